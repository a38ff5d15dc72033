//! Per-file orchestration: source text in, classified context and
//! transformed diagnostics out.
//!
//! [`Engine`] is built once from a validated [`Config`] and shared
//! read-only across worker threads: it holds the compiled context
//! detector and one pre-resolved [`EffectiveRules`] per purpose, so
//! per-file work is allocation plus pure computation. A file that cannot
//! be analyzed — undecodable bytes, a lexical error, or a checker panic —
//! contributes a single fatal-category diagnostic instead of aborting the
//! run; other files are unaffected.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use crate::config::{Config, ConfigError};
use crate::context::{ContextDetector, FileContext, Purpose};
use crate::pylex::{
    physical_line_facts, split_logical_lines, tokenize, LexError, LexErrorReason, LineFacts,
    LogicalLine,
};
use crate::pysyntax::{
    extract_assignment_targets, extract_function_def, extract_imports, FunctionDef, Import,
    NameBinding,
};
use crate::rules::{Diagnostic, MessageArgs, RuleId};
use crate::transforms::{apply_profile, effective_rule_set, EffectiveRules};

/// Everything the checkers need to know about one file.
#[derive(Debug, Clone)]
pub struct FileArtifacts {
    pub path: String,
    pub purpose: Purpose,
    pub logical_lines: Vec<LogicalLine>,
    pub line_facts: Vec<LineFacts>,
    pub imports: Vec<Import>,
    pub functions: Vec<FunctionDef>,
    pub bindings: Vec<NameBinding>,
}

impl FileArtifacts {
    /// Lex and extract in one pass over the source.
    pub fn build(path: &str, source: &str, purpose: Purpose) -> Result<FileArtifacts, LexError> {
        let tokens = tokenize(source)?;
        let logical_lines = split_logical_lines(&tokens);
        let mut imports = Vec::new();
        let mut functions = Vec::new();
        let mut bindings = Vec::new();
        for line in &logical_lines {
            imports.extend(extract_imports(line));
            functions.extend(extract_function_def(line));
            bindings.extend(extract_assignment_targets(line));
        }
        Ok(FileArtifacts {
            path: path.to_string(),
            purpose,
            logical_lines,
            line_facts: physical_line_facts(source),
            imports,
            functions,
            bindings,
        })
    }
}

/// The result of analyzing one file.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub path: String,
    pub context: FileContext,
    /// Already remessaged and reprioritised; band 0 before band 1.
    pub diagnostics: Vec<Diagnostic>,
}

/// Compiled, immutable analysis machinery shared across files.
pub struct Engine {
    detector: ContextDetector,
    ml_rules: EffectiveRules,
    non_ml_rules: EffectiveRules,
    fingerprint: String,
}

impl Engine {
    pub fn new(config: &Config) -> Result<Engine, ConfigError> {
        config.validate()?;
        let detector = ContextDetector::new(&config.context)
            .map_err(|e| ConfigError::Invalid(format!("bad override pattern: {e}")))?;
        let resolve = |purpose| {
            effective_rule_set(
                &config.resolve_profile(purpose),
                &config.base_params,
                &config.enabled_overrides,
            )
        };
        Ok(Engine {
            detector,
            ml_rules: resolve(Purpose::Ml),
            non_ml_rules: resolve(Purpose::NonMl),
            fingerprint: config.fingerprint(),
        })
    }

    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    pub fn rules_for(&self, purpose: Purpose) -> &EffectiveRules {
        match purpose {
            Purpose::Ml => &self.ml_rules,
            Purpose::NonMl => &self.non_ml_rules,
        }
    }

    /// Analyze decoded source text under `path`'s context.
    pub fn analyze_source(&self, path: &str, source: &str) -> Analysis {
        let parsed = catch_unwind(AssertUnwindSafe(|| self.try_analyze(path, source)));
        match parsed {
            Ok(Ok(analysis)) => analysis,
            Ok(Err(lex_err)) => self.fatal(path, lex_err.line, lex_err.column, &lex_err.to_string()),
            // a checker bug must cost one file, not the run
            Err(_) => self.fatal(path, 1, 1, "internal error while checking this file"),
        }
    }

    /// Analyze raw file bytes, reporting undecodable content as a fatal
    /// diagnostic at the first bad byte.
    pub fn analyze_bytes(&self, path: &str, bytes: &[u8]) -> Analysis {
        match std::str::from_utf8(bytes) {
            Ok(source) => self.analyze_source(path, source),
            Err(e) => {
                let prefix = &bytes[..e.valid_up_to()];
                let line = 1 + prefix.iter().filter(|&&b| b == b'\n').count() as u32;
                let col = 1 + prefix
                    .iter()
                    .rev()
                    .take_while(|&&b| b != b'\n')
                    .count() as u32;
                let reason = LexError { line, column: col, reason: LexErrorReason::BadEncoding };
                self.fatal(path, line, col, &reason.to_string())
            }
        }
    }

    /// Read and analyze a file on disk.
    pub fn analyze_file(&self, path: &Path) -> std::io::Result<Analysis> {
        let bytes = std::fs::read(path)?;
        Ok(self.analyze_bytes(&path.display().to_string(), &bytes))
    }

    fn try_analyze(&self, path: &str, source: &str) -> Result<Analysis, LexError> {
        let mut artifacts = FileArtifacts::build(path, source, Purpose::NonMl)?;
        let context = self.detector.detect(path, &artifacts.imports);
        artifacts.purpose = context.purpose;
        let diagnostics = apply_profile(&artifacts, self.rules_for(context.purpose));
        Ok(Analysis { path: path.to_string(), context, diagnostics })
    }

    /// A file-level failure: context falls back to path-based detection
    /// (overrides still apply) and the only diagnostic is F0001.
    fn fatal(&self, path: &str, line: u32, column: u32, reason: &str) -> Analysis {
        let context = self.detector.detect(path, &[]);
        let diag = Diagnostic {
            path: path.to_string(),
            line,
            column,
            rule: RuleId::Fatal,
            message: format!("cannot analyze file: {reason}"),
            args: MessageArgs::default(),
            context_purpose: context.purpose,
            demoted: false,
        };
        Analysis { path: path.to_string(), context, diagnostics: vec![diag] }
    }
}
