//! Assemble per-file analyses into the final audit report and render it
//! as text or JSON.
//!
//! Assembly sorts files by path, so the report is identical however the
//! per-file results were scheduled. The JSON schema is fixed and
//! versioned by `version` (the tool version) plus `config_fingerprint`
//! (SHA-256 of the resolved configuration, also available from
//! [`crate::config::Config::fingerprint`]); consumers can use the pair
//! to detect config drift between CI runs.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::analyze::Analysis;
use crate::context::Purpose;
use crate::rules::Category;

/// The assembled audit report, ready to render.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub version: String,
    pub config_fingerprint: String,
    pub files: Vec<FileSection>,
    pub summary: Summary,
}

#[derive(Debug, Clone, Serialize)]
pub struct FileSection {
    pub path: String,
    pub context: Purpose,
    pub evidence: Vec<EvidenceEntry>,
    pub diagnostics: Vec<DiagnosticEntry>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EvidenceEntry {
    pub module: String,
    pub line: u32,
}

#[derive(Debug, Clone, Serialize)]
pub struct DiagnosticEntry {
    pub line: u32,
    pub column: u32,
    pub rule_id: String,
    pub symbol: String,
    pub category: Category,
    pub message: String,
    pub demoted: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub files: u64,
    pub ml_files: u64,
    pub diagnostics: u64,
    pub demoted: u64,
    /// Always carries all five categories, zero or not.
    pub by_category: BTreeMap<&'static str, u64>,
    /// Only rules that actually fired.
    pub by_rule: BTreeMap<String, u64>,
}

/// Build the report from per-file analyses, in any input order.
pub fn build_report(mut analyses: Vec<Analysis>, version: &str, fingerprint: &str) -> Report {
    analyses.sort_by(|a, b| a.path.cmp(&b.path));

    let mut by_category: BTreeMap<&'static str, u64> =
        Category::ALL.iter().map(|c| (c.as_str(), 0)).collect();
    let mut by_rule: BTreeMap<String, u64> = BTreeMap::new();
    let mut diagnostics = 0u64;
    let mut demoted = 0u64;
    let mut ml_files = 0u64;

    let files: Vec<FileSection> = analyses
        .iter()
        .map(|analysis| {
            if analysis.context.purpose == Purpose::Ml {
                ml_files += 1;
            }
            let entries: Vec<DiagnosticEntry> = analysis
                .diagnostics
                .iter()
                .map(|d| {
                    diagnostics += 1;
                    if d.demoted {
                        demoted += 1;
                    }
                    *by_category.get_mut(d.category().as_str()).unwrap() += 1;
                    *by_rule.entry(d.rule.id().to_string()).or_insert(0) += 1;
                    DiagnosticEntry {
                        line: d.line,
                        column: d.column,
                        rule_id: d.rule.id().to_string(),
                        symbol: d.rule.symbol().to_string(),
                        category: d.category(),
                        message: d.message.clone(),
                        demoted: d.demoted,
                    }
                })
                .collect();
            FileSection {
                path: analysis.path.clone(),
                context: analysis.context.purpose,
                evidence: analysis
                    .context
                    .evidence
                    .iter()
                    .map(|e| EvidenceEntry { module: e.module.clone(), line: e.line })
                    .collect(),
                diagnostics: entries,
            }
        })
        .collect();

    Report {
        version: version.to_string(),
        config_fingerprint: fingerprint.to_string(),
        files,
        summary: Summary {
            files: analyses.len() as u64,
            ml_files,
            diagnostics,
            demoted,
            by_category,
            by_rule,
        },
    }
}

/// Compact single-line JSON plus a trailing newline.
pub fn render_json(report: &Report) -> String {
    let mut out = serde_json::to_string(report).expect("report serializes");
    out.push('\n');
    out
}

/// Human-readable report: a section per file with findings, demoted ones
/// below a separator, then a summary block.
pub fn render_text(report: &Report) -> String {
    let mut out = String::new();
    for file in &report.files {
        if file.diagnostics.is_empty() {
            continue;
        }
        out.push_str(&format!("{} [context: {}]\n", file.path, file.context.display()));
        let mut in_demoted_band = false;
        for d in &file.diagnostics {
            if d.demoted && !in_demoted_band {
                out.push_str("  --- deprioritised ---\n");
                in_demoted_band = true;
            }
            out.push_str(&format!(
                "  {}:{}: {} ({}) {}\n",
                d.line, d.column, d.rule_id, d.symbol, d.message
            ));
        }
        out.push('\n');
    }
    let s = &report.summary;
    out.push_str(&format!(
        "{} file{} analyzed ({} ML), {} finding{} ({} deprioritised)\n",
        s.files,
        if s.files == 1 { "" } else { "s" },
        s.ml_files,
        s.diagnostics,
        if s.diagnostics == 1 { "" } else { "s" },
        s.demoted,
    ));
    out
}
