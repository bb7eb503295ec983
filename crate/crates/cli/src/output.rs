//! Figure CSV and metadata sidecar.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use noma_ee::montecarlo::{ExperimentSpec, SweepRecord};

use crate::error::{CliError, CliResult};

pub const CSV_HEADER: [&str; 7] = [
    "strategy",
    "sweep_value",
    "mean_ee",
    "stderr_ee",
    "feasible_fraction",
    "trials",
    "seed",
];

/// 17 significant digits, enough to round-trip any `f64`.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// Renders sweep records as RFC 4180 CSV with LF line endings.
pub fn records_to_csv(records: &[SweepRecord]) -> CliResult<Vec<u8>> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .quote_style(csv::QuoteStyle::Necessary)
        .from_writer(Vec::new());
    let out = |e: csv::Error| CliError::Output(e.to_string());
    w.write_record(CSV_HEADER).map_err(out)?;
    for r in records {
        w.write_record([
            r.series_label(),
            format_float(r.sweep_value),
            format_float(r.mean_ee),
            format_float(r.stderr_ee),
            format_float(r.feasible_fraction),
            r.trials.to_string(),
            r.seed.to_string(),
        ])
        .map_err(out)?;
    }
    w.into_inner().map_err(|e| CliError::Output(e.to_string()))
}

pub fn records_to_json(records: &[SweepRecord]) -> CliResult<Vec<u8>> {
    let mut bytes = serde_json::to_vec_pretty(records).map_err(|e| CliError::Output(e.to_string()))?;
    bytes.push(b'\n');
    Ok(bytes)
}

/// Everything needed to regenerate a figure file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FigureMetadata {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub data_file: String,
    pub format: String,
    pub columns: Vec<String>,
    pub experiment: ExperimentSpec,
}

impl FigureMetadata {
    pub fn new(command: &str, data_file: &Path, format: &str, experiment: ExperimentSpec) -> Self {
        FigureMetadata {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            data_file: data_file
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_default(),
            format: format.to_string(),
            columns: CSV_HEADER.iter().map(|c| c.to_string()).collect(),
            experiment,
        }
    }
}

/// `<output>.meta.json`.
pub fn sidecar_path(output: &Path) -> PathBuf {
    let mut name = output.as_os_str().to_owned();
    name.push(".meta.json");
    PathBuf::from(name)
}

pub fn write_file(path: &Path, bytes: &[u8]) -> CliResult<()> {
    std::fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}
