//! Command-line front end: discover files, load config, run the engine
//! over a worker pool, render the report, and set the exit code.
//!
//! Exit codes: 0 clean, 1 findings at or above `--fail-on` severity,
//! 2 usage or configuration error. Demoted findings never affect the
//! exit code — they exist to inform, not to gate CI.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context as _, Result};
use clap::{Parser, ValueEnum};
use rayon::prelude::*;

use mlsmellhound::analyze::{Analysis, Engine};
use mlsmellhound::config::{Config, OverrideRule};
use mlsmellhound::context::Purpose;
use mlsmellhound::report::{build_report, render_json, render_text};
use mlsmellhound::rules::Category;

#[derive(Debug, Parser)]
#[command(
    name = "mlsmellhound",
    version,
    about = "Context-aware linter for Python: detects each file's purpose and adapts rules, messages, and ranking to it"
)]
struct Args {
    /// Files or directories to lint (directories are walked for *.py).
    #[arg(default_value = ".")]
    paths: Vec<PathBuf>,

    /// Config file (otherwise: $MLSMELLHOUND_CONFIG, ./mlsmellhound.toml,
    /// or built-in defaults).
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Force every file's context instead of detecting it.
    #[arg(long, value_enum, value_name = "CONTEXT")]
    context_override: Option<ContextChoice>,

    /// Print each file's detected context and evidence before the report.
    #[arg(long)]
    explain_context: bool,

    /// Minimum category that makes the exit code nonzero.
    #[arg(long, value_enum, default_value_t = FailOn::Warning)]
    fail_on: FailOn,

    /// Glob of paths to skip (repeatable).
    #[arg(long, value_name = "GLOB")]
    exclude: Vec<String>,

    /// Worker threads; 0 picks the machine's parallelism.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ContextChoice {
    Ml,
    #[value(name = "non-ml")]
    NonMl,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FailOn {
    Error,
    Warning,
    Refactor,
    Convention,
}

impl FailOn {
    fn category(self) -> Category {
        match self {
            FailOn::Error => Category::Error,
            FailOn::Warning => Category::Warning,
            FailOn::Refactor => Category::Refactor,
            FailOn::Convention => Category::Convention,
        }
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(args) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("mlsmellhound: error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn run(args: Args) -> Result<ExitCode> {
    let mut config = load_config(args.config.as_deref())?;
    if let Some(choice) = args.context_override {
        let purpose = match choice {
            ContextChoice::Ml => Purpose::Ml,
            ContextChoice::NonMl => Purpose::NonMl,
        };
        // a universal override in front of the list forces every file,
        // exactly as if the user had written it in the config
        config
            .context
            .overrides
            .insert(0, OverrideRule { pattern: "**".to_string(), purpose });
    }
    let engine = Engine::new(&config).context("invalid configuration")?;
    let files = discover_files(&args.paths, &args.exclude)?;
    let analyses = analyze_all(&engine, &files, args.jobs)?;

    if args.explain_context {
        print!("{}", explain(&analyses));
    }

    let report = build_report(analyses, mlsmellhound::VERSION, engine.fingerprint());
    match args.format {
        Format::Text => print!("{}", render_text(&report)),
        Format::Json => print!("{}", render_json(&report)),
    }

    let threshold = args.fail_on.category();
    let failing = report
        .files
        .iter()
        .flat_map(|f| &f.diagnostics)
        .any(|d| !d.demoted && d.category <= threshold);
    Ok(ExitCode::from(if failing { 1 } else { 0 }))
}

/// Search order: --config flag, $MLSMELLHOUND_CONFIG, ./mlsmellhound.toml,
/// built-in defaults.
fn load_config(flag: Option<&Path>) -> Result<Config> {
    if let Some(path) = flag {
        return Config::from_file(path).with_context(|| format!("--config {}", path.display()));
    }
    if let Some(path) = std::env::var_os("MLSMELLHOUND_CONFIG") {
        let path = PathBuf::from(path);
        return Config::from_file(&path)
            .with_context(|| format!("MLSMELLHOUND_CONFIG={}", path.display()));
    }
    let local = Path::new("mlsmellhound.toml");
    if local.exists() {
        return Config::from_file(local).context("./mlsmellhound.toml");
    }
    Ok(Config::default())
}

/// Expand the given paths into a sorted, deduplicated list of Python
/// files. Explicit file arguments are taken as-is; directories are
/// walked recursively for `*.py`, skipping hidden directories.
fn discover_files(paths: &[PathBuf], exclude: &[String]) -> Result<Vec<PathBuf>> {
    let mut excludes = globset::GlobSetBuilder::new();
    for pattern in exclude {
        let glob = globset::Glob::new(pattern)
            .with_context(|| format!("bad --exclude pattern {pattern:?}"))?;
        excludes.add(glob);
    }
    let excludes = excludes.build().context("compiling --exclude patterns")?;
    let excluded = |path: &Path| {
        let text = path.display().to_string();
        excludes.is_match(text.strip_prefix("./").unwrap_or(&text))
    };

    let mut files = Vec::new();
    for path in paths {
        if !path.exists() {
            bail!("path does not exist: {}", path.display());
        }
        if path.is_file() {
            if !excluded(path) {
                files.push(path.clone());
            }
            continue;
        }
        for entry in walkdir::WalkDir::new(path)
            .follow_links(false)
            .into_iter()
            .filter_entry(|e| {
                e.depth() == 0
                    || !e.file_name().to_string_lossy().starts_with('.')
            })
        {
            let entry = entry.with_context(|| format!("walking {}", path.display()))?;
            if !entry.file_type().is_file() {
                continue;
            }
            let p = entry.path();
            if p.extension().is_some_and(|ext| ext == "py") && !excluded(p) {
                files.push(p.to_path_buf());
            }
        }
    }
    let mut keys: Vec<String> = files.iter().map(|p| p.display().to_string()).collect();
    keys.sort();
    keys.dedup();
    Ok(keys.into_iter().map(PathBuf::from).collect())
}

/// Run the engine over every file on a bounded worker pool. Results come
/// back in input order, so the report never depends on scheduling.
fn analyze_all(engine: &Engine, files: &[PathBuf], jobs: usize) -> Result<Vec<Analysis>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .context("building worker pool")?;
    let results: Vec<std::io::Result<Analysis>> =
        pool.install(|| files.par_iter().map(|path| engine.analyze_file(path)).collect());
    results
        .into_iter()
        .zip(files)
        .map(|(result, path)| result.with_context(|| format!("reading {}", path.display())))
        .collect()
}

/// One line per file: purpose, evidence, any override, declared facets.
fn explain(analyses: &[Analysis]) -> String {
    let mut sorted: Vec<&Analysis> = analyses.iter().collect();
    sorted.sort_by(|a, b| a.path.cmp(&b.path));
    let mut out = String::new();
    for analysis in sorted {
        let ctx = &analysis.context;
        out.push_str(&format!("{}: {}", analysis.path, ctx.purpose.display()));
        if !ctx.evidence.is_empty() {
            let entries: Vec<String> = ctx
                .evidence
                .iter()
                .map(|e| format!("{}@{}", e.module, e.line))
                .collect();
            out.push_str(&format!(" (evidence: {})", entries.join(", ")));
        }
        if let Some(pattern) = &ctx.override_pattern {
            out.push_str(&format!(" (override: {pattern})"));
        }
        if !ctx.declared_facets.is_empty() {
            let facets: Vec<String> =
                ctx.declared_facets.iter().map(|(k, v)| format!("{k}={v}")).collect();
            out.push_str(&format!(" [facets: {}]", facets.join(", ")));
        }
        out.push('\n');
    }
    out
}
