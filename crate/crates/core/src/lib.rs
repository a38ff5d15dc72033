//! Context-aware lint engine for Python sources.
//!
//! The pipeline: [`pylex`] turns source text into tokens and logical
//! lines, [`pysyntax`] extracts imports / defs / name bindings from them,
//! [`context`] classifies each file as ML or non-ML from its imports,
//! [`rules`] holds the checker catalog, [`transforms`] adapts the rule
//! set to the detected context, and [`report`] renders the results.
//! [`analyze::Engine`] wires a whole file through that pipeline;
//! [`config`] loads the TOML configuration the pieces consume.

pub mod analyze;
pub mod config;
pub mod context;
pub mod pylex;
pub mod pysyntax;
pub mod report;
pub mod rules;
pub mod transforms;

pub use analyze::{Analysis, Engine, FileArtifacts};
pub use config::{Config, ConfigError};
pub use context::{ContextDetector, FileContext, ImportEvidence, Purpose};
pub use pylex::{LexError, LogicalLine, Token, TokenKind};
pub use report::{build_report, render_json, render_text, Report};
pub use rules::{Category, Diagnostic, RuleId};
pub use transforms::{ContextProfile, EffectiveRules};

/// Tool version stamped into reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
