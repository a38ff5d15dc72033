//! Configuration: shipped defaults, the TOML file format, validation,
//! and the config fingerprint.
//!
//! A user file adjusts the shipped configuration rather than replacing
//! it: list-valued profile fields (`disable`, `enable`, `demote`)
//! replace the shipped list when present, map-valued fields (`params`,
//! `remessage`) merge key-wise with user entries winning. Everything is
//! validated here, at load time — unknown keys, unknown rule ids, bad
//! globs or regexes, and bad message templates are all rejected with the
//! offending name in the error — so the rest of the pipeline can assume
//! a well-formed configuration.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::context::Purpose;
use crate::rules::{Category, RuleId, RuleParams, RuleParamsPatch};
use crate::transforms::ContextProfile;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("config parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("config error: {0}")]
    Invalid(String),
}

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid(msg.into())
}

/// `[context]` section, resolved.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ContextConfig {
    pub ml_modules: Vec<String>,
    /// Tried in order; the first pattern matching a file's path wins.
    pub overrides: Vec<OverrideRule>,
    /// User-declared facets echoed into explain output; never inferred.
    pub facets: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OverrideRule {
    pub pattern: String,
    pub purpose: Purpose,
}

impl Default for ContextConfig {
    fn default() -> Self {
        ContextConfig {
            ml_modules: [
                "tensorflow",
                "torch",
                "keras",
                "sklearn",
                "jax",
                "xgboost",
                "lightgbm",
                "mxnet",
                "theano",
                "statsmodels",
                "numpy",
                "pandas",
                "scipy",
            ]
            .map(String::from)
            .to_vec(),
            overrides: Vec::new(),
            facets: BTreeMap::new(),
        }
    }
}

/// The fully resolved configuration.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Config {
    pub context: ContextConfig,
    /// Catalog-wide parameter defaults after `[rules.<symbol>]` tuning.
    pub base_params: RuleParams,
    /// `[rules.<symbol>] enabled = ...` adjustments to the default set.
    pub enabled_overrides: BTreeMap<RuleId, bool>,
    pub default_profile: ContextProfile,
    pub ml_profile: ContextProfile,
    pub non_ml_profile: ContextProfile,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            context: ContextConfig::default(),
            base_params: RuleParams::default(),
            enabled_overrides: BTreeMap::new(),
            default_profile: ContextProfile::default(),
            ml_profile: shipped_ml_profile(),
            non_ml_profile: ContextProfile::default(),
        }
    }
}

/// The shipped ML profile: relaxed naming for short/capitalized math
/// identifiers, a hyperparameter-friendly argument threshold, two-space
/// indentation allowed, a tailored message for argument overload, and
/// whitespace/indentation findings pushed to the bottom of the report.
fn shipped_ml_profile() -> ContextProfile {
    ContextProfile {
        disable: BTreeSet::new(),
        enable: BTreeSet::new(),
        param_overrides: [
            (
                RuleId::InvalidName,
                RuleParamsPatch {
                    variable_name_pattern: Some(
                        r"^(?:[a-z_][a-z0-9_]{2,30}|[A-Z][A-Za-z0-9]{0,2})$".to_string(),
                    ),
                    good_names: Some(
                        ["i", "j", "k", "_", "df", "e", "X", "y", "lr", "n"]
                            .map(String::from)
                            .to_vec(),
                    ),
                    ..RuleParamsPatch::default()
                },
            ),
            (
                RuleId::TooManyArguments,
                RuleParamsPatch { max_args: Some(10), ..RuleParamsPatch::default() },
            ),
            (
                RuleId::BadIndentation,
                RuleParamsPatch { indent_unit: Some(vec![2, 4]), ..RuleParamsPatch::default() },
            ),
        ]
        .into(),
        remessage: [(
            RuleId::TooManyArguments,
            "function {name} takes {count} hyperparameters; consider a configuration object"
                .to_string(),
        )]
        .into(),
        demote_rules: [RuleId::TrailingWhitespace, RuleId::BadIndentation].into(),
        demote_categories: BTreeSet::new(),
    }
}

impl Config {
    /// Parse and validate a TOML config, layered over the defaults.
    pub fn from_toml(text: &str) -> Result<Config, ConfigError> {
        let raw: raw::File = toml::from_str(text)?;
        let mut config = Config::default();
        if let Some(context) = raw.context {
            apply_context(&mut config.context, context)?;
        }
        if let Some(rules) = raw.rules {
            apply_rules(&mut config, rules)?;
        }
        if let Some(profiles) = raw.profile {
            if let Some(p) = profiles.default {
                apply_profile_section(&mut config.default_profile, p, "profile.default")?;
            }
            if let Some(p) = profiles.ml {
                apply_profile_section(&mut config.ml_profile, p, "profile.ml")?;
            }
            if let Some(p) = profiles.non_ml {
                apply_profile_section(&mut config.non_ml_profile, p, "profile.non_ml")?;
            }
        }
        config.validate()?;
        Ok(config)
    }

    pub fn from_file(path: &Path) -> Result<Config, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Config::from_toml(&text)
    }

    /// Cross-field checks; the defaults themselves must always pass.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.context.ml_modules.is_empty() {
            return Err(invalid("context.ml_modules must not be empty"));
        }
        for rule in &self.context.overrides {
            globset::Glob::new(&rule.pattern)
                .map_err(|e| invalid(format!("bad override pattern {:?}: {e}", rule.pattern)))?;
        }
        validate_params(&self.base_params)?;
        for (name, profile) in [
            ("profile.default", &self.default_profile),
            ("profile.ml", &self.ml_profile),
            ("profile.non_ml", &self.non_ml_profile),
        ] {
            validate_profile(name, profile, &self.base_params)?;
        }
        Ok(())
    }

    /// The merged profile for a purpose (default overlaid by context).
    pub fn resolve_profile(&self, purpose: Purpose) -> ContextProfile {
        let ctx = match purpose {
            Purpose::Ml => &self.ml_profile,
            Purpose::NonMl => &self.non_ml_profile,
        };
        self.default_profile.merged_with(ctx)
    }

    /// Stable hex fingerprint of the resolved configuration, so CI can
    /// detect config drift between runs. SHA-256 over the canonical JSON
    /// serialization of this struct (maps are ordered, so the bytes are
    /// stable for equal configs).
    pub fn fingerprint(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }
}

fn validate_params(params: &RuleParams) -> Result<(), ConfigError> {
    regex::Regex::new(&params.variable_name_pattern).map_err(|e| {
        invalid(format!("bad variable-name-pattern {:?}: {e}", params.variable_name_pattern))
    })?;
    if params.max_args == 0 {
        return Err(invalid("max-args must be at least 1"));
    }
    if params.max_line_length == 0 {
        return Err(invalid("max-line-length must be at least 1"));
    }
    if params.indent_unit.is_empty() || params.indent_unit.contains(&0) {
        return Err(invalid("indent-unit must list positive step sizes"));
    }
    Ok(())
}

fn validate_profile(
    name: &str,
    profile: &ContextProfile,
    base: &RuleParams,
) -> Result<(), ConfigError> {
    if let Some(rule) = profile.disable.intersection(&profile.enable).next() {
        return Err(invalid(format!(
            "{name}: rule {} is both disabled and enabled",
            rule.id()
        )));
    }
    for (rule, template) in &profile.remessage {
        validate_template(name, *rule, template)?;
    }
    // a profile's patches must still produce valid params
    let mut merged = base.clone();
    for patch in profile.param_overrides.values() {
        patch.apply(&mut merged);
    }
    validate_params(&merged)?;
    Ok(())
}

/// A template may use only the placeholders its rule declares.
fn validate_template(where_: &str, rule: RuleId, template: &str) -> Result<(), ConfigError> {
    if template.is_empty() {
        return Err(invalid(format!("{where_}: empty message template for {}", rule.id())));
    }
    let known = rule.placeholders();
    let mut rest = template;
    while let Some(open) = rest.find('{') {
        let after = &rest[open + 1..];
        let Some(close) = after.find('}') else { break };
        let name = &after[..close];
        if !known.contains(&name) {
            return Err(invalid(format!(
                "{where_}: template for {} uses unknown placeholder {{{name}}}",
                rule.id()
            )));
        }
        rest = &after[close + 1..];
    }
    Ok(())
}

fn lookup_rule(section: &str, name: &str) -> Result<RuleId, ConfigError> {
    RuleId::lookup(name)
        .ok_or_else(|| invalid(format!("{section}: unknown rule {name:?}")))
}

fn apply_context(target: &mut ContextConfig, raw: raw::Context) -> Result<(), ConfigError> {
    if let Some(modules) = raw.ml_modules {
        target.ml_modules = modules;
    }
    if let Some(overrides) = raw.overrides {
        target.overrides = overrides
            .into_iter()
            .map(|o| {
                let purpose = Purpose::parse(&o.purpose).ok_or_else(|| {
                    invalid(format!(
                        "context.overrides: unknown purpose {:?} (expected \"ml\" or \"non-ml\")",
                        o.purpose
                    ))
                })?;
                Ok(OverrideRule { pattern: o.pattern, purpose })
            })
            .collect::<Result<_, ConfigError>>()?;
    }
    if let Some(facets) = raw.facets {
        target.facets = facets;
    }
    Ok(())
}

fn apply_rules(
    config: &mut Config,
    raw: BTreeMap<String, raw::RuleSection>,
) -> Result<(), ConfigError> {
    for (name, section) in raw {
        let rule = lookup_rule("rules", &name)?;
        if rule == RuleId::Fatal {
            return Err(invalid("rules: the fatal pseudo-rule is not configurable"));
        }
        if let Some(enabled) = section.enabled {
            config.enabled_overrides.insert(rule, enabled);
        }
        section.params().apply(&mut config.base_params);
    }
    Ok(())
}

fn parse_rule_list(section: &str, names: Vec<String>) -> Result<BTreeSet<RuleId>, ConfigError> {
    names.into_iter().map(|n| lookup_rule(section, &n)).collect()
}

fn apply_profile_section(
    target: &mut ContextProfile,
    raw: raw::Profile,
    section: &str,
) -> Result<(), ConfigError> {
    if let Some(disable) = raw.disable {
        target.disable = parse_rule_list(section, disable)?;
    }
    if let Some(enable) = raw.enable {
        target.enable = parse_rule_list(section, enable)?;
    }
    if let Some(params) = raw.params {
        for (name, patch) in params {
            let rule = lookup_rule(section, &name)?;
            target
                .param_overrides
                .entry(rule)
                .and_modify(|base| base.overlay(&patch))
                .or_insert(patch);
        }
    }
    if let Some(remessage) = raw.remessage {
        for (name, template) in remessage {
            let rule = lookup_rule(section, &name)?;
            target.remessage.insert(rule, template);
        }
    }
    if let Some(demote) = raw.demote {
        target.demote_rules = BTreeSet::new();
        target.demote_categories = BTreeSet::new();
        for entry in demote {
            if let Some(category) = Category::parse(&entry) {
                target.demote_categories.insert(category);
            } else {
                target.demote_rules.insert(lookup_rule(section, &entry)?);
            }
        }
    }
    Ok(())
}

/// Serde mirror of the TOML file. Unknown keys anywhere are errors.
mod raw {
    use serde::Deserialize;
    use std::collections::BTreeMap;

    use crate::rules::RuleParamsPatch;

    #[derive(Debug, Deserialize)]
    #[serde(deny_unknown_fields)]
    pub struct File {
        pub context: Option<Context>,
        pub rules: Option<BTreeMap<String, RuleSection>>,
        pub profile: Option<Profiles>,
    }

    #[derive(Debug, Deserialize)]
    #[serde(deny_unknown_fields)]
    pub struct Context {
        pub ml_modules: Option<Vec<String>>,
        pub overrides: Option<Vec<Override>>,
        pub facets: Option<BTreeMap<String, String>>,
    }

    #[derive(Debug, Deserialize)]
    #[serde(deny_unknown_fields)]
    pub struct Override {
        pub pattern: String,
        pub purpose: String,
    }

    #[derive(Debug, Deserialize)]
    #[serde(deny_unknown_fields, rename_all = "kebab-case")]
    pub struct RuleSection {
        pub enabled: Option<bool>,
        pub variable_name_pattern: Option<String>,
        pub good_names: Option<Vec<String>>,
        pub max_args: Option<u32>,
        pub indent_unit: Option<Vec<u32>>,
        pub max_line_length: Option<u32>,
    }

    impl RuleSection {
        pub fn params(&self) -> RuleParamsPatch {
            RuleParamsPatch {
                variable_name_pattern: self.variable_name_pattern.clone(),
                good_names: self.good_names.clone(),
                max_args: self.max_args,
                indent_unit: self.indent_unit.clone(),
                max_line_length: self.max_line_length,
            }
        }
    }

    #[derive(Debug, Deserialize)]
    #[serde(deny_unknown_fields)]
    pub struct Profiles {
        pub default: Option<Profile>,
        pub ml: Option<Profile>,
        pub non_ml: Option<Profile>,
    }

    #[derive(Debug, Deserialize)]
    #[serde(deny_unknown_fields)]
    pub struct Profile {
        pub disable: Option<Vec<String>>,
        pub enable: Option<Vec<String>>,
        pub params: Option<BTreeMap<String, RuleParamsPatch>>,
        pub remessage: Option<BTreeMap<String, String>>,
        pub demote: Option<Vec<String>>,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        Config::default().validate().unwrap();
    }

    #[test]
    fn shipped_ml_profile_contents() {
        let config = Config::default();
        let ml = config.resolve_profile(Purpose::Ml);
        assert_eq!(
            ml.param_overrides[&RuleId::TooManyArguments].max_args,
            Some(10)
        );
        assert_eq!(
            ml.param_overrides[&RuleId::BadIndentation].indent_unit,
            Some(vec![2, 4])
        );
        assert!(ml.remessage[&RuleId::TooManyArguments].contains("hyperparameters"));
        assert!(ml.demote_rules.contains(&RuleId::TrailingWhitespace));
        assert!(ml.demote_rules.contains(&RuleId::BadIndentation));
    }

    #[test]
    fn non_ml_profile_is_identity() {
        let config = Config::default();
        assert_eq!(config.resolve_profile(Purpose::NonMl), ContextProfile::default());
    }

    #[test]
    fn empty_file_is_defaults() {
        assert_eq!(Config::from_toml("").unwrap(), Config::default());
    }

    #[test]
    fn context_section_parses() {
        let config = Config::from_toml(
            r#"
            [context]
            ml_modules = ["torch", "cuml"]
            overrides = [
                { pattern = "experiments/**", purpose = "ml" },
                { pattern = "tools/**", purpose = "non-ml" },
            ]
            [context.facets]
            team = "platform"
            "#,
        )
        .unwrap();
        assert_eq!(config.context.ml_modules, ["torch", "cuml"]);
        assert_eq!(config.context.overrides.len(), 2);
        assert_eq!(config.context.overrides[0].purpose, Purpose::Ml);
        assert_eq!(config.context.facets["team"], "platform");
    }

    #[test]
    fn rules_section_tunes_base_params() {
        let config = Config::from_toml(
            "[rules.too-many-arguments]\nmax-args = 7\n\n[rules.line-too-long]\nenabled = true\nmax-line-length = 120\n",
        )
        .unwrap();
        assert_eq!(config.base_params.max_args, 7);
        assert_eq!(config.base_params.max_line_length, 120);
        assert_eq!(config.enabled_overrides[&RuleId::LineTooLong], true);
    }

    #[test]
    fn rules_section_accepts_ids_too() {
        let config = Config::from_toml("[rules.R0913]\nmax-args = 9\n").unwrap();
        assert_eq!(config.base_params.max_args, 9);
    }

    #[test]
    fn profile_section_layers_over_shipped() {
        let config = Config::from_toml(
            r#"
            [profile.ml]
            disable = ["unused-import"]
            [profile.ml.params.too-many-arguments]
            max-args = 12
            "#,
        )
        .unwrap();
        assert!(config.ml_profile.disable.contains(&RuleId::UnusedImport));
        // user patch wins, other shipped overrides survive
        assert_eq!(
            config.ml_profile.param_overrides[&RuleId::TooManyArguments].max_args,
            Some(12)
        );
        assert!(config.ml_profile.param_overrides.contains_key(&RuleId::InvalidName));
        assert!(config.ml_profile.demote_rules.contains(&RuleId::TrailingWhitespace));
    }

    #[test]
    fn demote_list_replaces_shipped() {
        let config = Config::from_toml("[profile.ml]\ndemote = [\"convention\"]\n").unwrap();
        assert!(config.ml_profile.demote_rules.is_empty());
        assert!(config.ml_profile.demote_categories.contains(&Category::Convention));
    }

    #[test]
    fn unknown_rule_named_in_error() {
        let err = Config::from_toml("[profile.ml]\ndisable = [\"Z9999\"]\n").unwrap_err();
        assert!(err.to_string().contains("Z9999"), "{err}");
    }

    #[test]
    fn unknown_key_rejected() {
        let err = Config::from_toml("[context]\nml_modulez = []\n").unwrap_err();
        assert!(err.to_string().contains("ml_modulez"), "{err}");
    }

    #[test]
    fn empty_ml_modules_rejected() {
        let err = Config::from_toml("[context]\nml_modules = []\n").unwrap_err();
        assert!(err.to_string().contains("ml_modules"), "{err}");
    }

    #[test]
    fn bad_override_purpose_rejected() {
        let err = Config::from_toml(
            "[context]\noverrides = [{ pattern = \"x/**\", purpose = \"maybe\" }]\n",
        )
        .unwrap_err();
        assert!(err.to_string().contains("maybe"), "{err}");
    }

    #[test]
    fn bad_glob_rejected() {
        let err = Config::from_toml(
            "[context]\noverrides = [{ pattern = \"a[\", purpose = \"ml\" }]\n",
        )
        .unwrap_err();
        assert!(err.to_string().contains("a["), "{err}");
    }

    #[test]
    fn bad_regex_rejected() {
        let err =
            Config::from_toml("[rules.invalid-name]\nvariable-name-pattern = \"[\"\n").unwrap_err();
        assert!(err.to_string().contains("variable-name-pattern"), "{err}");
    }

    #[test]
    fn disable_enable_conflict_rejected() {
        let err = Config::from_toml(
            "[profile.ml]\ndisable = [\"C0303\"]\nenable = [\"C0303\"]\n",
        )
        .unwrap_err();
        assert!(err.to_string().contains("C0303"), "{err}");
    }

    #[test]
    fn unknown_placeholder_rejected() {
        let err = Config::from_toml(
            "[profile.ml.remessage]\ntrailing-whitespace = \"bad {name} here\"\n",
        )
        .unwrap_err();
        assert!(err.to_string().contains("{name}"), "{err}");
    }

    #[test]
    fn valid_placeholder_accepted() {
        let config = Config::from_toml(
            "[profile.non_ml.remessage]\ntoo-many-arguments = \"trim {name} to {limit} args\"\n",
        )
        .unwrap();
        assert_eq!(
            config.non_ml_profile.remessage[&RuleId::TooManyArguments],
            "trim {name} to {limit} args"
        );
    }

    #[test]
    fn empty_template_rejected() {
        let err = Config::from_toml("[profile.ml.remessage]\ninvalid-name = \"\"\n").unwrap_err();
        assert!(err.to_string().contains("empty"), "{err}");
    }

    #[test]
    fn zero_indent_unit_rejected() {
        let err = Config::from_toml("[rules.bad-indentation]\nindent-unit = [0]\n").unwrap_err();
        assert!(err.to_string().contains("indent-unit"), "{err}");
    }

    #[test]
    fn zero_max_args_rejected() {
        let err = Config::from_toml("[rules.too-many-arguments]\nmax-args = 0\n").unwrap_err();
        assert!(err.to_string().contains("max-args"), "{err}");
    }

    #[test]
    fn fingerprint_stable_and_sensitive() {
        let a = Config::default();
        let b = Config::default();
        assert_eq!(a.fingerprint(), b.fingerprint());
        let c = Config::from_toml("[rules.too-many-arguments]\nmax-args = 7\n").unwrap();
        assert_ne!(a.fingerprint(), c.fingerprint());
        assert_eq!(a.fingerprint().len(), 64);
    }

    #[test]
    fn profile_default_feeds_both_contexts() {
        let config = Config::from_toml("[profile.default]\ndisable = [\"trailing-whitespace\"]\n")
            .unwrap();
        assert!(config
            .resolve_profile(Purpose::NonMl)
            .disable
            .contains(&RuleId::TrailingWhitespace));
        assert!(config
            .resolve_profile(Purpose::Ml)
            .disable
            .contains(&RuleId::TrailingWhitespace));
    }

    #[test]
    fn fatal_rule_not_configurable() {
        let err = Config::from_toml("[rules.fatal]\nenabled = false\n").unwrap_err();
        assert!(err.to_string().contains("fatal"), "{err}");
    }
}
