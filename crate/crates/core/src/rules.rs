//! The checker catalog: parameterized rules producing raw diagnostics
//! from file artifacts.
//!
//! Rule ids follow the familiar letter-plus-four-digits convention
//! (C/W/R/E plus digits) so reports read like those of mainstream Python
//! linters; the ids are defined here, not imported from anywhere.
//! Checkers are pure functions of (artifacts, params) and never look at
//! the file's context — context sensitivity happens entirely in the
//! transforms layer, which decides which checkers run and with which
//! parameters.

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::analyze::FileArtifacts;
use crate::context::Purpose;

/// Severity category, ordered most to least severe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Category {
    Fatal,
    Error,
    Warning,
    Refactor,
    Convention,
}

impl Category {
    pub const ALL: [Category; 5] = [
        Category::Fatal,
        Category::Error,
        Category::Warning,
        Category::Refactor,
        Category::Convention,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Category::Fatal => "fatal",
            Category::Error => "error",
            Category::Warning => "warning",
            Category::Refactor => "refactor",
            Category::Convention => "convention",
        }
    }

    pub fn parse(s: &str) -> Option<Category> {
        Category::ALL.into_iter().find(|c| c.as_str() == s)
    }

    /// Sort rank: lower sorts first in reports.
    pub fn rank(self) -> u8 {
        self as u8
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RuleId {
    InvalidName,
    TooManyArguments,
    BadIndentation,
    TrailingWhitespace,
    LineTooLong,
    UnusedImport,
    /// Pseudo-rule for files that cannot be analyzed at all (lexical
    /// error, undecodable bytes, or a checker crash). Never disabled.
    Fatal,
}

impl RuleId {
    /// Real checkers, excluding the fatal pseudo-rule.
    pub const CHECKERS: [RuleId; 6] = [
        RuleId::InvalidName,
        RuleId::TooManyArguments,
        RuleId::BadIndentation,
        RuleId::TrailingWhitespace,
        RuleId::LineTooLong,
        RuleId::UnusedImport,
    ];

    pub fn id(self) -> &'static str {
        match self {
            RuleId::InvalidName => "C0103",
            RuleId::TooManyArguments => "R0913",
            RuleId::BadIndentation => "W0311",
            RuleId::TrailingWhitespace => "C0303",
            RuleId::LineTooLong => "C0301",
            RuleId::UnusedImport => "W0611",
            RuleId::Fatal => "F0001",
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            RuleId::InvalidName => "invalid-name",
            RuleId::TooManyArguments => "too-many-arguments",
            RuleId::BadIndentation => "bad-indentation",
            RuleId::TrailingWhitespace => "trailing-whitespace",
            RuleId::LineTooLong => "line-too-long",
            RuleId::UnusedImport => "unused-import",
            RuleId::Fatal => "fatal",
        }
    }

    pub fn category(self) -> Category {
        match self {
            RuleId::InvalidName => Category::Convention,
            RuleId::TooManyArguments => Category::Refactor,
            RuleId::BadIndentation => Category::Warning,
            RuleId::TrailingWhitespace => Category::Convention,
            RuleId::LineTooLong => Category::Convention,
            RuleId::UnusedImport => Category::Warning,
            RuleId::Fatal => Category::Fatal,
        }
    }

    pub fn default_enabled(self) -> bool {
        // line-too-long ships disabled; profiles opt in via Addition
        !matches!(self, RuleId::LineTooLong)
    }

    /// Placeholders a remessage template for this rule may use.
    pub fn placeholders(self) -> &'static [&'static str] {
        match self {
            RuleId::InvalidName => &["name"],
            RuleId::TooManyArguments => &["name", "count", "limit"],
            RuleId::BadIndentation => &["count"],
            RuleId::TrailingWhitespace => &[],
            RuleId::LineTooLong => &["count", "limit"],
            RuleId::UnusedImport => &["name"],
            RuleId::Fatal => &[],
        }
    }

    /// Resolve `C0103` / `invalid-name` style references from config.
    pub fn lookup(s: &str) -> Option<RuleId> {
        RuleId::CHECKERS
            .into_iter()
            .chain([RuleId::Fatal])
            .find(|r| r.id() == s || r.symbol() == s)
    }
}

impl Serialize for RuleId {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.id())
    }
}

/// Values available to fill `{name}` / `{count}` / `{limit}` in message
/// templates; captured by the checker that raised the finding.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MessageArgs {
    pub name: Option<String>,
    pub count: Option<u64>,
    pub limit: Option<u64>,
}

impl MessageArgs {
    fn named(name: &str) -> MessageArgs {
        MessageArgs { name: Some(name.to_string()), ..MessageArgs::default() }
    }

    /// Substitute placeholders into a template. Unknown placeholders were
    /// rejected at config load, so leftovers render as empty.
    pub fn render(&self, template: &str) -> String {
        template
            .replace("{name}", self.name.as_deref().unwrap_or(""))
            .replace("{count}", &self.count.map(|v| v.to_string()).unwrap_or_default())
            .replace("{limit}", &self.limit.map(|v| v.to_string()).unwrap_or_default())
    }
}

/// One finding. `message` is the final user-facing text (transforms may
/// rewrite it); `demoted` is set only by reprioritisation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub path: String,
    pub line: u32,
    pub column: u32,
    pub rule: RuleId,
    pub message: String,
    pub args: MessageArgs,
    pub context_purpose: Purpose,
    pub demoted: bool,
}

impl Diagnostic {
    pub fn category(&self) -> Category {
        self.rule.category()
    }
}

/// Effective merged parameters for the whole catalog. Config keys use the
/// kebab-case names (`variable-name-pattern`, `max-args`, ...).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RuleParams {
    pub variable_name_pattern: String,
    pub good_names: Vec<String>,
    pub max_args: u32,
    pub indent_unit: Vec<u32>,
    pub max_line_length: u32,
}

impl Default for RuleParams {
    fn default() -> Self {
        RuleParams {
            variable_name_pattern: r"^[a-z_][a-z0-9_]{2,30}$".to_string(),
            good_names: ["i", "j", "k", "_"].map(String::from).to_vec(),
            max_args: 5,
            indent_unit: vec![4],
            max_line_length: 100,
        }
    }
}

/// A partial [`RuleParams`]: fields present override, fields absent keep
/// the base value. This is what `[profile.<ctx>.params.<rule>]` sections
/// deserialize to.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct RuleParamsPatch {
    pub variable_name_pattern: Option<String>,
    pub good_names: Option<Vec<String>>,
    pub max_args: Option<u32>,
    pub indent_unit: Option<Vec<u32>>,
    pub max_line_length: Option<u32>,
}

impl RuleParamsPatch {
    pub fn apply(&self, params: &mut RuleParams) {
        if let Some(v) = &self.variable_name_pattern {
            params.variable_name_pattern = v.clone();
        }
        if let Some(v) = &self.good_names {
            params.good_names = v.clone();
        }
        if let Some(v) = self.max_args {
            params.max_args = v;
        }
        if let Some(v) = &self.indent_unit {
            params.indent_unit = v.clone();
        }
        if let Some(v) = self.max_line_length {
            params.max_line_length = v;
        }
    }

    /// Overlay `other` onto `self`, keeping `self` where `other` is absent.
    pub fn overlay(&mut self, other: &RuleParamsPatch) {
        if other.variable_name_pattern.is_some() {
            self.variable_name_pattern = other.variable_name_pattern.clone();
        }
        if other.good_names.is_some() {
            self.good_names = other.good_names.clone();
        }
        if other.max_args.is_some() {
            self.max_args = other.max_args;
        }
        if other.indent_unit.is_some() {
            self.indent_unit = other.indent_unit.clone();
        }
        if other.max_line_length.is_some() {
            self.max_line_length = other.max_line_length;
        }
    }

    pub fn is_empty(&self) -> bool {
        self == &RuleParamsPatch::default()
    }
}

/// Default message templates, rendered with the same placeholder engine
/// remessage uses.
fn default_template(rule: RuleId) -> &'static str {
    match rule {
        RuleId::InvalidName => "variable name \"{name}\" doesn't conform to the naming convention",
        RuleId::TooManyArguments => "too many arguments ({count}/{limit}) in function \"{name}\"",
        RuleId::BadIndentation => "bad indentation: unexpected indent of {count} columns",
        RuleId::TrailingWhitespace => "trailing whitespace",
        RuleId::LineTooLong => "line too long ({count}/{limit})",
        RuleId::UnusedImport => "unused import \"{name}\"",
        RuleId::Fatal => "",
    }
}

fn emit(
    artifacts: &FileArtifacts,
    rule: RuleId,
    line: u32,
    column: u32,
    args: MessageArgs,
) -> Diagnostic {
    Diagnostic {
        path: artifacts.path.clone(),
        line,
        column,
        rule,
        message: args.render(default_template(rule)),
        args,
        context_purpose: artifacts.purpose,
        demoted: false,
    }
}

/// C0103: every assignment-bound variable name must match the active
/// pattern or be listed in good-names.
pub fn check_invalid_name(artifacts: &FileArtifacts, params: &RuleParams) -> Vec<Diagnostic> {
    // invalid pattern strings are rejected at config load; a failure here
    // means a catalog bug, and panicking routes it to the fatal handler
    let pattern = Regex::new(&params.variable_name_pattern).expect("validated pattern");
    artifacts
        .bindings
        .iter()
        .filter(|b| !params.good_names.iter().any(|g| g == &b.name))
        .filter(|b| !pattern.is_match(&b.name))
        .map(|b| emit(artifacts, RuleId::InvalidName, b.line, b.column, MessageArgs::named(&b.name)))
        .collect()
}

/// R0913: functions declaring more than max-args parameters.
pub fn check_too_many_arguments(artifacts: &FileArtifacts, params: &RuleParams) -> Vec<Diagnostic> {
    artifacts
        .functions
        .iter()
        .filter(|f| f.param_count as u64 > params.max_args as u64)
        .map(|f| {
            let args = MessageArgs {
                name: Some(f.name.clone()),
                count: Some(f.param_count as u64),
                limit: Some(params.max_args as u64),
            };
            emit(artifacts, RuleId::TooManyArguments, f.line, f.column, args)
        })
        .collect()
}

/// W0311: an indentation increase must be a multiple of an allowed
/// indent unit. Only increases are checked; dedent returns to an
/// enclosing level and mixed dedents are a parser's concern, not ours.
pub fn check_bad_indentation(artifacts: &FileArtifacts, params: &RuleParams) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    let mut stack: Vec<u32> = vec![0];
    for ll in &artifacts.logical_lines {
        let w = ll.indent_width;
        let top = *stack.last().unwrap();
        if w > top {
            let delta = w - top;
            if !params.indent_unit.iter().any(|&u| u > 0 && delta % u == 0) {
                let args = MessageArgs { count: Some(delta as u64), ..MessageArgs::default() };
                diags.push(emit(artifacts, RuleId::BadIndentation, ll.first_line, 1, args));
            }
            stack.push(w);
        } else {
            while *stack.last().unwrap() > w {
                stack.pop();
            }
            if *stack.last().unwrap() < w {
                // dedent to a level never seen; adopt it silently
                stack.push(w);
            }
        }
    }
    diags
}

/// C0303: any physical line ending in spaces or tabs.
pub fn check_trailing_whitespace(artifacts: &FileArtifacts, _params: &RuleParams) -> Vec<Diagnostic> {
    artifacts
        .line_facts
        .iter()
        .filter(|f| f.has_trailing_whitespace)
        .map(|f| {
            let col = f.trailing_whitespace_column.unwrap_or(1);
            emit(artifacts, RuleId::TrailingWhitespace, f.line, col, MessageArgs::default())
        })
        .collect()
}

/// C0301: lines longer than max-line-length characters.
pub fn check_line_too_long(artifacts: &FileArtifacts, params: &RuleParams) -> Vec<Diagnostic> {
    artifacts
        .line_facts
        .iter()
        .filter(|f| f.char_len as u64 > params.max_line_length as u64)
        .map(|f| {
            let args = MessageArgs {
                count: Some(f.char_len as u64),
                limit: Some(params.max_line_length as u64),
                ..MessageArgs::default()
            };
            emit(artifacts, RuleId::LineTooLong, f.line, params.max_line_length + 1, args)
        })
        .collect()
}

/// W0611: an import whose bound name never appears as a NAME token
/// outside import statements. Star imports bind nothing nameable and are
/// exempt, as is `__future__` (imported purely for effect).
pub fn check_unused_import(artifacts: &FileArtifacts, _params: &RuleParams) -> Vec<Diagnostic> {
    let used: std::collections::HashSet<&str> = artifacts
        .logical_lines
        .iter()
        .flat_map(crate::pysyntax::non_import_name_texts)
        .collect();
    artifacts
        .imports
        .iter()
        .filter(|imp| imp.root_module != "__future__")
        .filter_map(|imp| {
            let bound = imp.alias.as_deref().unwrap_or(&imp.root_module);
            if bound == "*" || bound.is_empty() || used.contains(bound) {
                return None;
            }
            Some(emit(artifacts, RuleId::UnusedImport, imp.line, 1, MessageArgs::named(bound)))
        })
        .collect()
}

/// Run one checker by id.
pub fn run_checker(rule: RuleId, artifacts: &FileArtifacts, params: &RuleParams) -> Vec<Diagnostic> {
    match rule {
        RuleId::InvalidName => check_invalid_name(artifacts, params),
        RuleId::TooManyArguments => check_too_many_arguments(artifacts, params),
        RuleId::BadIndentation => check_bad_indentation(artifacts, params),
        RuleId::TrailingWhitespace => check_trailing_whitespace(artifacts, params),
        RuleId::LineTooLong => check_line_too_long(artifacts, params),
        RuleId::UnusedImport => check_unused_import(artifacts, params),
        RuleId::Fatal => Vec::new(),
    }
}
