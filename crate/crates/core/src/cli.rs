//! Command-line driver.

use std::ffi::OsString;
use std::io::{IsTerminal, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use walkdir::WalkDir;

use crate::cfg::dump_cfg;
use crate::detectors::{run_detectors, DetectorConfig, Diagnostic, Severity};
use crate::engine::{analyze_contract, dump_states, ContractAnalysis, WorklistConfig};
use crate::error::{Error, Result};
use crate::frontend;
use crate::report::{FileReport, Report};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Level {
    Error,
    Warning,
    Info,
}

impl From<Level> for Severity {
    fn from(l: Level) -> Severity {
        match l {
            Level::Error => Severity::Error,
            Level::Warning => Severity::Warning,
            Level::Info => Severity::Info,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "minisol-iv", version, about = "Interval analysis and vulnerability detectors for a Solidity subset")]
struct Args {
    /// `.sol` files or directories to scan recursively.
    #[arg(required = true)]
    inputs: Vec<PathBuf>,

    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Comma-separated detector ids (`d1,d5` or full ids). Default: all.
    #[arg(long, value_name = "IDS")]
    detectors: Option<String>,

    /// Loop-header visits before joins become widenings.
    #[arg(long, value_name = "N", default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..))]
    widen_delay: u32,

    /// Print each function's control-flow graph.
    #[arg(long)]
    dump_cfg: bool,

    /// Print the state before every instruction.
    #[arg(long)]
    dump_states: bool,

    /// Lowest severity that makes the run fail.
    #[arg(long, value_enum, default_value_t = Level::Warning)]
    fail_on: Level,

    /// Override a detector's severity, e.g. `d3=warning`. Repeatable.
    #[arg(long = "severity", value_name = "ID=LEVEL")]
    severity: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub inputs: Vec<PathBuf>,
    pub format: Format,
    pub detectors: DetectorConfig,
    pub worklist: WorklistConfig,
    pub dump_cfg: bool,
    pub dump_states: bool,
    pub fail_on: Severity,
}

impl RunConfig {
    pub fn new(inputs: Vec<PathBuf>) -> RunConfig {
        RunConfig {
            inputs,
            format: Format::Text,
            detectors: DetectorConfig::default(),
            worklist: WorklistConfig::default(),
            dump_cfg: false,
            dump_states: false,
            fail_on: Severity::Warning,
        }
    }

    fn from_args(args: Args) -> Result<RunConfig> {
        let mut detectors = match &args.detectors {
            Some(list) => DetectorConfig::only(list)?,
            None => DetectorConfig::default(),
        };
        for s in &args.severity {
            detectors.set_severity(s)?;
        }
        Ok(RunConfig {
            inputs: args.inputs,
            format: args.format,
            detectors,
            worklist: WorklistConfig { widen_delay: args.widen_delay, ..WorklistConfig::default() },
            dump_cfg: args.dump_cfg,
            dump_states: args.dump_states,
            fail_on: args.fail_on.into(),
        })
    }
}

/// Result of analyzing one source text.
#[derive(Debug, Clone)]
pub struct SourceAnalysis {
    pub contracts: Vec<ContractAnalysis>,
    pub diagnostics: Vec<Diagnostic>,
}

pub fn analyze_source(source: &str, detectors: &DetectorConfig, worklist: WorklistConfig) -> Result<SourceAnalysis> {
    let (unit, symbols) = frontend::load(source)?;
    let mut contracts = Vec::new();
    let mut diagnostics = Vec::new();
    for c in &unit.contracts {
        let analysis = analyze_contract(c, &symbols, worklist)?;
        diagnostics.extend(run_detectors(c, &analysis, detectors));
        contracts.push(analysis);
    }
    Ok(SourceAnalysis { contracts, diagnostics })
}

/// Expands directories into their `.sol` files, sorted by path.
pub fn collect_inputs(inputs: &[PathBuf]) -> std::io::Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for input in inputs {
        if input.is_dir() {
            let mut found = Vec::new();
            for entry in WalkDir::new(input).sort_by_file_name() {
                let entry = entry.map_err(std::io::Error::other)?;
                if entry.file_type().is_file() && entry.path().extension().is_some_and(|e| e == "sol") {
                    found.push(entry.into_path());
                }
            }
            out.extend(found);
        } else if input.exists() {
            out.push(input.clone());
        } else {
            return Err(std::io::Error::new(std::io::ErrorKind::NotFound, format!("{}: no such file or directory", input.display())));
        }
    }
    Ok(out)
}

fn display_path(p: &Path) -> String {
    p.to_string_lossy().replace('\\', "/")
}

/// Everything a run produces; printing is left to the caller.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: Report,
    pub stdout: String,
    pub stderr: String,
    pub exit_code: i32,
}

pub fn run(config: &RunConfig, color: bool) -> Outcome {
    let mut stdout = String::new();
    let mut stderr = String::new();
    let mut failed = false;
    let files = match collect_inputs(&config.inputs) {
        Ok(f) => f,
        Err(e) => {
            return Outcome { report: Report::new(Vec::new()), stdout, stderr: format!("error: {e}\n"), exit_code: 2 };
        }
    };
    let mut reports = Vec::new();
    for path in &files {
        let name = display_path(path);
        let source = match std::fs::read_to_string(path) {
            Ok(s) => s,
            Err(e) => {
                stderr.push_str(&format!("{name}: error: {e}\n"));
                failed = true;
                continue;
            }
        };
        match analyze_source(&source, &config.detectors, config.worklist) {
            Ok(analysis) => {
                for c in &analysis.contracts {
                    for (cfg, result) in c.cfgs.iter().zip(&c.results) {
                        if config.dump_cfg {
                            stdout.push_str(&format!("// {name} {}\n{}\n", c.name, dump_cfg(cfg)));
                        }
                        if config.dump_states {
                            stdout.push_str(&format!("// {name} {}\n{}\n", c.name, dump_states(cfg, result)));
                        }
                    }
                }
                reports.push(FileReport::new(name, &source, &analysis.diagnostics));
            }
            Err(e) => {
                let msg = match (&e, e.span()) {
                    (_, Some(span)) => format!("{name}:{span}: error: {}\n", strip_span(&e)),
                    (Error::IterationLimitExceeded { .. }, None) => format!("{name}: internal error: {e}\n"),
                    _ => format!("{name}: error: {e}\n"),
                };
                stderr.push_str(&msg);
                failed = true;
            }
        }
    }
    let report = Report::new(reports);
    match config.format {
        Format::Json => {
            stdout.push_str(&report.to_json());
            stdout.push('\n');
        }
        Format::Text => stdout.push_str(&report.to_text(color)),
    }
    let exit_code = if failed {
        2
    } else if report.max_severity().is_some_and(|s| s >= config.fail_on) {
        1
    } else {
        0
    };
    Outcome { report, stdout, stderr, exit_code }
}

/// The error message without its leading `line:col: `.
fn strip_span(e: &Error) -> String {
    let text = e.to_string();
    match e.span() {
        Some(span) => text.strip_prefix(&format!("{span}: ")).unwrap_or(&text).to_string(),
        None => text,
    }
}

/// Parses arguments, runs, prints, and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let config = match RunConfig::from_args(args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let color = config.format == Format::Text && std::io::stdout().is_terminal() && std::env::var_os("MINISOL_IV_NO_COLOR").is_none();
    let outcome = run(&config, color);
    let _ = std::io::stdout().write_all(outcome.stdout.as_bytes());
    let _ = std::io::stderr().write_all(outcome.stderr.as_bytes());
    outcome.exit_code
}
