//! Per-file purpose classification: is this file ML code or not?
//!
//! The signal is the file's imports: if any import's root module is in
//! the configured ML module set, the file counts as ML, and each matching
//! import becomes an evidence entry. Path-pattern overrides from the
//! config win over detection, letting users force a purpose for e.g.
//! `experiments/**` regardless of what those files import.

use std::collections::BTreeMap;

use globset::{Glob, GlobMatcher};
use serde::Serialize;

use crate::config::{ContextConfig, OverrideRule};
use crate::pysyntax::Import;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Purpose {
    #[serde(rename = "ml")]
    Ml,
    #[serde(rename = "non-ml")]
    NonMl,
}

impl Purpose {
    /// Lowercase form used in JSON and config files.
    pub fn as_str(self) -> &'static str {
        match self {
            Purpose::Ml => "ml",
            Purpose::NonMl => "non-ml",
        }
    }

    /// Mixed-case form used in human-readable text output.
    pub fn display(self) -> &'static str {
        match self {
            Purpose::Ml => "ML",
            Purpose::NonMl => "non-ML",
        }
    }

    pub fn parse(s: &str) -> Option<Purpose> {
        match s {
            "ml" => Some(Purpose::Ml),
            "non-ml" | "non_ml" => Some(Purpose::NonMl),
            _ => None,
        }
    }
}

/// One import that contributed to an ML classification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImportEvidence {
    pub module: String,
    pub line: u32,
}

/// The resolved context for one file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FileContext {
    pub purpose: Purpose,
    /// ML imports found in the file, in source order. When no override is
    /// active, `purpose == Ml` exactly when this is nonempty.
    pub evidence: Vec<ImportEvidence>,
    /// Pattern of the override that decided the purpose, if any.
    pub override_pattern: Option<String>,
    /// User-declared context facets from the config, echoed into
    /// `--explain-context` output; never inferred and never used by rules.
    pub declared_facets: BTreeMap<String, String>,
}

struct CompiledOverride {
    pattern: String,
    matcher: GlobMatcher,
    purpose: Purpose,
}

/// Classifies files. Built once from config, then shared read-only.
pub struct ContextDetector {
    ml_modules: Vec<String>,
    overrides: Vec<CompiledOverride>,
    facets: BTreeMap<String, String>,
}

impl ContextDetector {
    /// Compile the context section of the config. Glob syntax errors and
    /// unknown purposes were already rejected at config validation.
    pub fn new(cfg: &ContextConfig) -> Result<ContextDetector, globset::Error> {
        let mut overrides = Vec::new();
        for OverrideRule { pattern, purpose } in &cfg.overrides {
            overrides.push(CompiledOverride {
                pattern: pattern.clone(),
                matcher: Glob::new(pattern)?.compile_matcher(),
                purpose: *purpose,
            });
        }
        Ok(ContextDetector {
            ml_modules: cfg.ml_modules.clone(),
            overrides,
            facets: cfg.facets.clone(),
        })
    }

    /// True iff `root` names a configured ML module. Relative imports
    /// carry an empty root and never classify.
    pub fn classify_root_module(&self, root: &str) -> bool {
        !root.is_empty() && self.ml_modules.iter().any(|m| m == root)
    }

    /// Classify one file from its imports and path. Overrides are tried
    /// in config order and the first matching pattern wins; otherwise the
    /// file is ML iff it has at least one ML import.
    pub fn detect(&self, path: &str, imports: &[Import]) -> FileContext {
        let normalized = path.strip_prefix("./").unwrap_or(path);
        let mut evidence = Vec::new();
        for imp in imports {
            if self.classify_root_module(&imp.root_module) {
                let entry = ImportEvidence { module: imp.root_module.clone(), line: imp.line };
                if !evidence.contains(&entry) {
                    evidence.push(entry);
                }
            }
        }
        let matched = self.overrides.iter().find(|o| o.matcher.is_match(normalized));
        let purpose = match matched {
            Some(o) => o.purpose,
            None if evidence.is_empty() => Purpose::NonMl,
            None => Purpose::Ml,
        };
        FileContext {
            purpose,
            evidence,
            override_pattern: matched.map(|o| o.pattern.clone()),
            declared_facets: self.facets.clone(),
        }
    }
}
