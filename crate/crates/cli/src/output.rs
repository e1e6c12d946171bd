//! CSV and SVG file emission.

use std::path::{Path, PathBuf};

use csv::{Terminator, WriterBuilder};
use ztnd_core::RunSummary;

use crate::error::{CliError, CliResult};

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_num(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_num).unwrap_or_default()
}

pub fn ensure_dir(dir: &Path) -> CliResult<()> {
    std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.to_path_buf(),
        source,
    })
}

pub fn write_text(path: &Path, text: &str) -> CliResult<PathBuf> {
    std::fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(path.to_path_buf())
}

/// Writes a header and rows with LF line endings.
pub fn write_csv<I>(path: &Path, header: &[String], rows: I) -> CliResult<PathBuf>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let wrap = |source| CliError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut w = WriterBuilder::new()
        .terminator(Terminator::Any(b'\n'))
        .from_path(path)
        .map_err(wrap)?;
    w.write_record(header).map_err(wrap)?;
    for row in rows {
        w.write_record(&row).map_err(wrap)?;
    }
    w.flush().map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(path.to_path_buf())
}

pub const SUMMARY_HEADER: [&str; 9] = [
    "scenario",
    "model",
    "noise",
    "seed",
    "convergence_time",
    "steady_state_max",
    "steady_state_mean",
    "classification",
    "terminated",
];

/// One `summary.csv` row.
pub fn summary_row(scenario: &str, model: &str, noise: &str, seed: u64, s: &RunSummary) -> Vec<String> {
    vec![
        scenario.to_string(),
        model.to_string(),
        noise.to_string(),
        seed.to_string(),
        fmt_opt(s.convergence_time),
        fmt_num(s.steady_state_max),
        fmt_num(s.steady_state_mean),
        s.classification.to_string(),
        s.terminated.to_string(),
    ]
}

pub fn header(cols: &[&str]) -> Vec<String> {
    cols.iter().map(|c| c.to_string()).collect()
}

/// Plain-text table for terminal output.
pub fn table(rows: &[(String, RunSummary)]) -> String {
    let mut out = format!(
        "{:<8} {:>12} {:>12} {:>12} {:<11} {}\n",
        "model", "conv_time", "mssre", "mean", "class", "terminated"
    );
    for (name, s) in rows {
        let conv = s
            .convergence_time
            .map_or_else(|| "-".to_string(), |t| format!("{t:.2}"));
        out.push_str(&format!(
            "{:<8} {:>12} {:>12.3e} {:>12.3e} {:<11} {}\n",
            name,
            conv,
            s.steady_state_max,
            s.steady_state_mean,
            s.classification.name(),
            s.terminated
        ));
    }
    out
}
