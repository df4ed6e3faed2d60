use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::ValueEnum;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] orbitsep::Error),
    #[error("cannot write {}: {source}", path.display())]
    Output { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(orbitsep::Error::SizeLimit { .. }) => 3,
            _ => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Violations,
    ResourceCap,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Violations => 1,
            Status::ResourceCap => 3,
        }
    }
}

/// Rows for CSV output; every cell is already formatted.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// What a subcommand produced.
pub struct Outcome {
    pub status: Status,
    /// One line for the diagnostic stream.
    pub summary: String,
    pub table: Table,
    pub json: serde_json::Value,
}

pub fn render(outcome: &Outcome, format: Format) -> Result<Vec<u8>, CliError> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let io = |e: csv::Error| CliError::Core(e.into());
            w.write_record(&outcome.table.columns).map_err(io)?;
            for row in &outcome.table.rows {
                w.write_record(row).map_err(io)?;
            }
            w.into_inner().map_err(|e| CliError::Usage(e.to_string()))
        }
        Format::Json => {
            let mut bytes = serde_json::to_vec_pretty(&outcome.json).map_err(|e| CliError::Usage(e.to_string()))?;
            bytes.push(b'\n');
            Ok(bytes)
        }
    }
}

/// Writes the report to `out`, or to stdout when no path is given.
pub fn emit_report(outcome: &Outcome, format: Format, out: Option<&Path>) -> Result<(), CliError> {
    let bytes = render(outcome, format)?;
    match out {
        Some(path) => write_file(path, &bytes),
        None => std::io::stdout()
            .write_all(&bytes)
            .map_err(|source| CliError::Output { path: "<stdout>".into(), source }),
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes).map_err(|source| CliError::Output {
        path: path.to_path_buf(),
        source,
    })
}

/// Written next to the report as `<out>.manifest.json`, so the report
/// itself stays byte-identical across runs.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub args: serde_json::Value,
    pub seed: u64,
    pub version: &'static str,
    pub started_at: f64,
    pub finished_at: f64,
    pub outputs: Vec<String>,
    pub exit_code: i32,
}

pub fn unix_time() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0)
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

pub fn write_manifest(manifest: &RunManifest, out: &Path) -> Result<(), CliError> {
    let mut bytes = serde_json::to_vec_pretty(manifest).map_err(|e| CliError::Usage(e.to_string()))?;
    bytes.push(b'\n');
    write_file(&manifest_path(out), &bytes)
}

/// Compact JSON for embedding in a CSV cell.
pub fn json_cell<T: Serialize + ?Sized>(v: &T) -> String {
    serde_json::to_string(v).unwrap_or_default()
}

pub fn opt_cell<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}
