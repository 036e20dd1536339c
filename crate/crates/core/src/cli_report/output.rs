use super::RunReport;
use crate::multiplier::samples_csv;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

pub const REPORT_FILE: &str = "report.json";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmittedFiles {
    pub report: PathBuf,
    /// One file per checked radius, in report order.
    pub csv: Vec<PathBuf>,
}

/// Write `report.json` and `circle_NNN.csv` files into `dir`.
pub fn emit_outputs(report: &RunReport, dir: &Path) -> io::Result<EmittedFiles> {
    fs::create_dir_all(dir)?;
    let mut json = serde_json::to_string_pretty(report).map_err(io::Error::other)?;
    json.push('\n');
    let report_path = dir.join(REPORT_FILE);
    fs::write(&report_path, json)?;
    let mut csv = Vec::with_capacity(report.circles.len());
    for (i, c) in report.circles.iter().enumerate() {
        let p = dir.join(format!("circle_{i:03}.csv"));
        fs::write(&p, samples_csv(&c.rows))?;
        csv.push(p);
    }
    Ok(EmittedFiles { report: report_path, csv })
}

/// Report JSON with the `timing_ms` key removed, for stability checks.
pub fn strip_timing(json: &str) -> serde_json::Result<String> {
    let mut v: serde_json::Value = serde_json::from_str(json)?;
    if let Some(obj) = v.as_object_mut() {
        obj.remove("timing_ms");
    }
    serde_json::to_string_pretty(&v)
}
