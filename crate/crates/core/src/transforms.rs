//! The context-transformation engine: resolve a profile for a file's
//! context and apply the four transformations.
//!
//! Subtraction and Addition act before checking (they pick the enabled
//! rule set and its parameters), Remessage and Reprioritisation act on
//! the produced diagnostics. Reprioritisation uses a two-band model:
//! band 0 is normal output, band 1 holds demoted findings pushed to the
//! bottom of the report — the simplest structure that moves a category
//! "to the bottom" without inventing numeric priorities.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::analyze::FileArtifacts;
use crate::rules::{self, Category, Diagnostic, RuleId, RuleParams, RuleParamsPatch};

/// One profile: either the base (`default`) profile or a context-specific
/// one. Field semantics follow the config file directly.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ContextProfile {
    pub disable: BTreeSet<RuleId>,
    pub enable: BTreeSet<RuleId>,
    pub param_overrides: BTreeMap<RuleId, RuleParamsPatch>,
    pub remessage: BTreeMap<RuleId, String>,
    pub demote_rules: BTreeSet<RuleId>,
    pub demote_categories: BTreeSet<Category>,
}

impl ContextProfile {
    /// Overlay `ctx` onto `self`: context-specific entries win. An enable
    /// in `ctx` cancels a default disable and vice versa; parameter and
    /// message maps merge key-wise; demotions accumulate.
    pub fn merged_with(&self, ctx: &ContextProfile) -> ContextProfile {
        let disable: BTreeSet<RuleId> = self
            .disable
            .difference(&ctx.enable)
            .copied()
            .chain(ctx.disable.iter().copied())
            .collect();
        let enable: BTreeSet<RuleId> = self
            .enable
            .difference(&ctx.disable)
            .copied()
            .chain(ctx.enable.iter().copied())
            .collect();
        let mut param_overrides = self.param_overrides.clone();
        for (rule, patch) in &ctx.param_overrides {
            param_overrides
                .entry(*rule)
                .and_modify(|base| base.overlay(patch))
                .or_insert_with(|| patch.clone());
        }
        let mut remessage = self.remessage.clone();
        remessage.extend(ctx.remessage.iter().map(|(k, v)| (*k, v.clone())));
        ContextProfile {
            disable,
            enable,
            param_overrides,
            remessage,
            demote_rules: self.demote_rules.union(&ctx.demote_rules).copied().collect(),
            demote_categories: self
                .demote_categories
                .union(&ctx.demote_categories)
                .copied()
                .collect(),
        }
    }
}

/// The fully resolved rule machinery for one context: which checkers run,
/// with which parameters, and how their output is transformed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EffectiveRules {
    /// Enabled checkers in catalog order.
    pub enabled: Vec<RuleId>,
    pub params: RuleParams,
    pub remessage: BTreeMap<RuleId, String>,
    pub demote_rules: BTreeSet<RuleId>,
    pub demote_categories: BTreeSet<Category>,
}

/// Subtraction and Addition: compute the enabled set and merged params.
/// `enabled_overrides` carries `[rules.<symbol>] enabled = ...` settings,
/// which adjust the catalog's default-enabled set before the profile's
/// enable/disable are applied.
pub fn effective_rule_set(
    profile: &ContextProfile,
    base_params: &RuleParams,
    enabled_overrides: &BTreeMap<RuleId, bool>,
) -> EffectiveRules {
    let enabled = RuleId::CHECKERS
        .into_iter()
        .filter(|r| {
            let base = enabled_overrides.get(r).copied().unwrap_or_else(|| r.default_enabled());
            (base || profile.enable.contains(r)) && !profile.disable.contains(r)
        })
        .collect();
    let mut params = base_params.clone();
    for patch in profile.param_overrides.values() {
        patch.apply(&mut params);
    }
    EffectiveRules {
        enabled,
        params,
        remessage: profile.remessage.clone(),
        demote_rules: profile.demote_rules.clone(),
        demote_categories: profile.demote_categories.clone(),
    }
}

impl EffectiveRules {
    pub fn is_demoted(&self, diag: &Diagnostic) -> bool {
        self.demote_rules.contains(&diag.rule)
            || self.demote_categories.contains(&diag.rule.category())
    }
}

/// Run every enabled checker over the artifacts, in catalog order.
pub fn run_checkers(artifacts: &FileArtifacts, effective: &EffectiveRules) -> Vec<Diagnostic> {
    effective
        .enabled
        .iter()
        .flat_map(|rule| rules::run_checker(*rule, artifacts, &effective.params))
        .collect()
}

/// Remessage: swap in the context's message template where one is
/// configured. Count, order, and positions are untouched.
pub fn apply_remessage(diags: &mut [Diagnostic], effective: &EffectiveRules) {
    for diag in diags {
        if let Some(template) = effective.remessage.get(&diag.rule) {
            diag.message = diag.args.render(template);
        }
    }
}

/// Reprioritisation: flag demoted findings and stable-sort into bands.
/// Band 0 precedes band 1; within a band the order is category severity,
/// then path, line, column, rule id.
pub fn apply_reprioritisation(
    mut diags: Vec<Diagnostic>,
    effective: &EffectiveRules,
) -> Vec<Diagnostic> {
    for diag in &mut diags {
        diag.demoted = effective.is_demoted(diag);
    }
    diags.sort_by(|a, b| {
        (a.demoted, a.category().rank(), &a.path, a.line, a.column, a.rule.id()).cmp(&(
            b.demoted,
            b.category().rank(),
            &b.path,
            b.line,
            b.column,
            b.rule.id(),
        ))
    });
    diags
}

/// The single per-file entry point: check, remessage, reprioritise.
pub fn apply_profile(artifacts: &FileArtifacts, effective: &EffectiveRules) -> Vec<Diagnostic> {
    let mut diags = run_checkers(artifacts, effective);
    apply_remessage(&mut diags, effective);
    apply_reprioritisation(diags, effective)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analyze::FileArtifacts;
    use crate::context::Purpose;
    use crate::rules::MessageArgs;

    fn artifacts(src: &str) -> FileArtifacts {
        FileArtifacts::build("test.py", src, Purpose::Ml).unwrap()
    }

    fn base_rules() -> EffectiveRules {
        effective_rule_set(&ContextProfile::default(), &RuleParams::default(), &BTreeMap::new())
    }

    fn diag(rule: RuleId, line: u32, column: u32) -> Diagnostic {
        Diagnostic {
            path: "test.py".into(),
            line,
            column,
            rule,
            message: "m".into(),
            args: MessageArgs::default(),
            context_purpose: Purpose::Ml,
            demoted: false,
        }
    }

    // ==================================================================
    // profile merge
    // ==================================================================

    #[test]
    fn context_disable_beats_default_enable() {
        let default = ContextProfile {
            enable: [RuleId::LineTooLong].into(),
            ..ContextProfile::default()
        };
        let ctx = ContextProfile {
            disable: [RuleId::LineTooLong].into(),
            ..ContextProfile::default()
        };
        let merged = default.merged_with(&ctx);
        assert!(merged.disable.contains(&RuleId::LineTooLong));
        assert!(!merged.enable.contains(&RuleId::LineTooLong));
    }

    #[test]
    fn context_enable_cancels_default_disable() {
        let default = ContextProfile {
            disable: [RuleId::TrailingWhitespace].into(),
            ..ContextProfile::default()
        };
        let ctx = ContextProfile {
            enable: [RuleId::TrailingWhitespace].into(),
            ..ContextProfile::default()
        };
        let merged = default.merged_with(&ctx);
        assert!(!merged.disable.contains(&RuleId::TrailingWhitespace));
        assert!(merged.enable.contains(&RuleId::TrailingWhitespace));
    }

    #[test]
    fn param_overrides_merge_key_wise() {
        let default = ContextProfile {
            param_overrides: [(
                RuleId::TooManyArguments,
                RuleParamsPatch { max_args: Some(7), ..RuleParamsPatch::default() },
            )]
            .into(),
            ..ContextProfile::default()
        };
        let ctx = ContextProfile {
            param_overrides: [(
                RuleId::InvalidName,
                RuleParamsPatch {
                    variable_name_pattern: Some("^.*$".into()),
                    ..RuleParamsPatch::default()
                },
            )]
            .into(),
            ..ContextProfile::default()
        };
        let merged = default.merged_with(&ctx);
        assert_eq!(merged.param_overrides.len(), 2);
        assert_eq!(merged.param_overrides[&RuleId::TooManyArguments].max_args, Some(7));
    }

    #[test]
    fn demotions_accumulate() {
        let default = ContextProfile {
            demote_rules: [RuleId::TrailingWhitespace].into(),
            ..ContextProfile::default()
        };
        let ctx = ContextProfile {
            demote_rules: [RuleId::BadIndentation].into(),
            ..ContextProfile::default()
        };
        assert_eq!(default.merged_with(&ctx).demote_rules.len(), 2);
    }

    // ==================================================================
    // subtraction / addition
    // ==================================================================

    #[test]
    fn default_enabled_set_excludes_line_too_long() {
        let eff = base_rules();
        assert!(eff.enabled.contains(&RuleId::InvalidName));
        assert!(!eff.enabled.contains(&RuleId::LineTooLong));
    }

    #[test]
    fn subtraction_removes_only_that_rule() {
        let src = "import os\ndf = 1 \n";
        let all = run_checkers(&artifacts(src), &base_rules());
        let profile = ContextProfile {
            disable: [RuleId::TrailingWhitespace].into(),
            ..ContextProfile::default()
        };
        let eff = effective_rule_set(&profile, &RuleParams::default(), &BTreeMap::new());
        let subtracted = run_checkers(&artifacts(src), &eff);
        let expected: Vec<_> = all
            .iter()
            .filter(|d| d.rule != RuleId::TrailingWhitespace)
            .cloned()
            .collect();
        assert_eq!(subtracted, expected);
        assert!(all.iter().any(|d| d.rule == RuleId::TrailingWhitespace));
    }

    #[test]
    fn addition_enables_default_disabled_rule() {
        let profile = ContextProfile {
            enable: [RuleId::LineTooLong].into(),
            ..ContextProfile::default()
        };
        let eff = effective_rule_set(&profile, &RuleParams::default(), &BTreeMap::new());
        assert!(eff.enabled.contains(&RuleId::LineTooLong));
        let long = format!("x = \"{}\"\n", "a".repeat(120));
        assert!(run_checkers(&artifacts(&long), &eff)
            .iter()
            .any(|d| d.rule == RuleId::LineTooLong));
    }

    #[test]
    fn enabled_override_adjusts_base_set() {
        let overrides: BTreeMap<RuleId, bool> =
            [(RuleId::TrailingWhitespace, false), (RuleId::LineTooLong, true)].into();
        let eff = effective_rule_set(&ContextProfile::default(), &RuleParams::default(), &overrides);
        assert!(!eff.enabled.contains(&RuleId::TrailingWhitespace));
        assert!(eff.enabled.contains(&RuleId::LineTooLong));
    }

    #[test]
    fn param_patch_applies_to_params() {
        let profile = ContextProfile {
            param_overrides: [(
                RuleId::TooManyArguments,
                RuleParamsPatch { max_args: Some(10), ..RuleParamsPatch::default() },
            )]
            .into(),
            ..ContextProfile::default()
        };
        let eff = effective_rule_set(&profile, &RuleParams::default(), &BTreeMap::new());
        assert_eq!(eff.params.max_args, 10);
        // untouched params keep their defaults
        assert_eq!(eff.params.indent_unit, vec![4]);
    }

    // ==================================================================
    // remessage
    // ==================================================================

    #[test]
    fn remessage_replaces_only_mapped_rule() {
        let src = "def train(p1, p2, p3, p4, p5, p6):\n    pass \n";
        let mut eff = base_rules();
        eff.remessage.insert(
            RuleId::TooManyArguments,
            "function {name} takes {count} hyperparameters; consider a configuration object"
                .into(),
        );
        let mut diags = run_checkers(&artifacts(src), &eff);
        let before: Vec<_> = diags.iter().map(|d| (d.line, d.column, d.rule)).collect();
        apply_remessage(&mut diags, &eff);
        let after: Vec<_> = diags.iter().map(|d| (d.line, d.column, d.rule)).collect();
        assert_eq!(before, after, "positions and order unchanged");
        let r0913 = diags.iter().find(|d| d.rule == RuleId::TooManyArguments).unwrap();
        assert_eq!(
            r0913.message,
            "function train takes 6 hyperparameters; consider a configuration object"
        );
        let c0303 = diags.iter().find(|d| d.rule == RuleId::TrailingWhitespace).unwrap();
        assert_eq!(c0303.message, "trailing whitespace");
    }

    #[test]
    fn empty_remessage_is_identity() {
        let src = "df = 1\n";
        let eff = base_rules();
        let mut diags = run_checkers(&artifacts(src), &eff);
        let before = diags.clone();
        apply_remessage(&mut diags, &eff);
        assert_eq!(before, diags);
    }

    // ==================================================================
    // reprioritisation
    // ==================================================================

    #[test]
    fn demoted_rules_go_to_band_one() {
        let mut eff = base_rules();
        eff.demote_rules.insert(RuleId::TrailingWhitespace);
        let input = vec![diag(RuleId::TrailingWhitespace, 2, 6), diag(RuleId::InvalidName, 5, 1)];
        let out = apply_reprioritisation(input, &eff);
        assert_eq!(out.len(), 2);
        assert_eq!(out[0].rule, RuleId::InvalidName);
        assert!(!out[0].demoted);
        assert_eq!(out[1].rule, RuleId::TrailingWhitespace);
        assert!(out[1].demoted);
    }

    #[test]
    fn category_demotion_catches_all_rules_of_category() {
        let mut eff = base_rules();
        eff.demote_categories.insert(Category::Convention);
        let input = vec![diag(RuleId::InvalidName, 1, 1), diag(RuleId::BadIndentation, 2, 1)];
        let out = apply_reprioritisation(input, &eff);
        assert_eq!(out[0].rule, RuleId::BadIndentation);
        assert!(out[1].demoted, "invalid-name is a convention rule");
    }

    #[test]
    fn band_zero_sorted_by_severity_then_position() {
        let input = vec![
            diag(RuleId::TrailingWhitespace, 1, 1),
            diag(RuleId::UnusedImport, 9, 1),
            diag(RuleId::TooManyArguments, 4, 5),
        ];
        let out = apply_reprioritisation(input, &base_rules());
        let rules: Vec<_> = out.iter().map(|d| d.rule).collect();
        // warning < refactor < convention
        assert_eq!(
            rules,
            [RuleId::UnusedImport, RuleId::TooManyArguments, RuleId::TrailingWhitespace]
        );
    }

    #[test]
    fn reprioritisation_is_a_permutation() {
        let mut eff = base_rules();
        eff.demote_rules.insert(RuleId::BadIndentation);
        let input = vec![
            diag(RuleId::BadIndentation, 3, 1),
            diag(RuleId::InvalidName, 1, 1),
            diag(RuleId::BadIndentation, 7, 1),
        ];
        let out = apply_reprioritisation(input.clone(), &eff);
        assert_eq!(out.len(), input.len());
        for d in &input {
            assert!(out.iter().any(|o| (o.line, o.rule) == (d.line, d.rule)));
        }
    }

    #[test]
    fn reprioritisation_idempotent() {
        let mut eff = base_rules();
        eff.demote_rules.insert(RuleId::TrailingWhitespace);
        let input = vec![
            diag(RuleId::TrailingWhitespace, 2, 6),
            diag(RuleId::InvalidName, 5, 1),
            diag(RuleId::UnusedImport, 1, 1),
        ];
        let once = apply_reprioritisation(input, &eff);
        let twice = apply_reprioritisation(once.clone(), &eff);
        assert_eq!(once, twice);
    }

    #[test]
    fn all_rules_demoted_keeps_internal_order() {
        let input = vec![
            diag(RuleId::UnusedImport, 9, 1),
            diag(RuleId::InvalidName, 2, 1),
            diag(RuleId::InvalidName, 5, 1),
        ];
        let plain = apply_reprioritisation(input.clone(), &base_rules());
        let mut eff = base_rules();
        eff.demote_categories.extend(Category::ALL);
        let banded = apply_reprioritisation(input, &eff);
        assert!(banded.iter().all(|d| d.demoted));
        let plain_keys: Vec<_> = plain.iter().map(|d| (d.rule, d.line)).collect();
        let banded_keys: Vec<_> = banded.iter().map(|d| (d.rule, d.line)).collect();
        assert_eq!(plain_keys, banded_keys);
    }

    // ==================================================================
    // end to end per file
    // ==================================================================

    #[test]
    fn apply_profile_composes_all_stages() {
        let src = "import os\ne = 1 \n";
        let mut eff = base_rules();
        eff.demote_rules.insert(RuleId::TrailingWhitespace);
        eff.remessage.insert(RuleId::UnusedImport, "drop the {name} import".into());
        let diags = apply_profile(&artifacts(src), &eff);
        // band 0: W0611 (warning), C0103 (convention); band 1: C0303
        let rules: Vec<_> = diags.iter().map(|d| d.rule).collect();
        assert_eq!(
            rules,
            [RuleId::UnusedImport, RuleId::InvalidName, RuleId::TrailingWhitespace]
        );
        assert_eq!(diags[0].message, "drop the os import");
        assert!(diags[2].demoted);
    }
}
