use std::fmt::Write;

use serde::Serialize;

use crate::detectors::{Diagnostic, Evidence, Severity};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Record {
    pub detector: &'static str,
    pub severity: &'static str,
    pub line: u32,
    pub column: u32,
    #[serde(rename = "endLine")]
    pub end_line: u32,
    #[serde(rename = "endColumn")]
    pub end_column: u32,
    pub message: String,
    pub evidence: Evidence,
    #[serde(skip)]
    start: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FileReport {
    pub path: String,
    pub diagnostics: Vec<Record>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub error: usize,
    pub warning: usize,
    pub info: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Report {
    pub version: &'static str,
    pub files: Vec<FileReport>,
    pub summary: Summary,
}

/// 1-based line and column of a byte offset.
fn position(source: &str, offset: usize) -> (u32, u32) {
    let before = &source[..offset.min(source.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rfind('\n').map_or(before.chars().count(), |nl| before[nl + 1..].chars().count()) + 1;
    (line as u32, col as u32)
}

impl FileReport {
    /// Diagnostics of one file sorted by position, then detector id.
    pub fn new(path: impl Into<String>, source: &str, diagnostics: &[Diagnostic]) -> FileReport {
        let mut records: Vec<Record> = diagnostics
            .iter()
            .map(|d| {
                let (end_line, end_column) = position(source, d.span.end);
                Record {
                    detector: d.detector.as_str(),
                    severity: d.severity.as_str(),
                    line: d.span.line,
                    column: d.span.column,
                    end_line,
                    end_column,
                    message: d.message.clone(),
                    evidence: d.evidence.clone(),
                    start: d.span.start,
                }
            })
            .collect();
        records.sort_by(|a, b| (a.start, a.detector).cmp(&(b.start, b.detector)));
        FileReport { path: path.into(), diagnostics: records }
    }
}

impl Report {
    pub fn new(mut files: Vec<FileReport>) -> Report {
        files.sort_by(|a, b| a.path.cmp(&b.path));
        let mut summary = Summary::default();
        for r in files.iter().flat_map(|f| &f.diagnostics) {
            match r.severity {
                "error" => summary.error += 1,
                "warning" => summary.warning += 1,
                _ => summary.info += 1,
            }
        }
        Report { version: VERSION, files, summary }
    }

    /// Highest severity among the findings.
    pub fn max_severity(&self) -> Option<Severity> {
        self.files.iter().flat_map(|f| &f.diagnostics).filter_map(|r| r.severity.parse().ok()).max()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }

    /// One line per finding plus a summary line. `color` wraps severities in
    /// ANSI escapes.
    pub fn to_text(&self, color: bool) -> String {
        let mut out = String::new();
        for f in &self.files {
            for r in &f.diagnostics {
                let sev = if color {
                    let code = match r.severity {
                        "error" => "31",
                        "warning" => "33",
                        _ => "36",
                    };
                    format!("\x1b[1;{code}m{}\x1b[0m", r.severity)
                } else {
                    r.severity.to_string()
                };
                write!(out, "{}:{}:{}: {sev}[{}]: {}", f.path, r.line, r.column, r.detector, r.message).unwrap();
                if !r.evidence.0.is_empty() {
                    let items: Vec<String> = r.evidence.0.iter().map(|(k, v)| format!("{k} = {v}")).collect();
                    write!(out, " ({})", items.join(", ")).unwrap();
                }
                out.push('\n');
            }
        }
        let s = self.summary;
        writeln!(out, "{} files, {} errors, {} warnings, {} info (minisol-iv {})", self.files.len(), s.error, s.warning, s.info, self.version)
            .unwrap();
        out
    }
}
