//! Result emission: comma-separated tables with documented schemas, a
//! structured manifest, and a plain-text summary.
//!
//! Tables are deterministic: floats are printed with 17 significant digits
//! and no timing information enters them.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use pqlab::estimates::EstimateReport;

use crate::runner::RunManifest;

pub fn fmt_float(v: f64) -> String {
    format!("{v:.17e}")
}

pub fn write_table(dir: &Path, name: &str, header: &[&str], rows: &[Vec<String>]) -> anyhow::Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    let mut out = fs::File::create(&path)?;
    writeln!(out, "{}", header.join(","))?;
    for row in rows {
        anyhow::ensure!(row.len() == header.len(), "row width mismatch in {name}");
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(path)
}

fn csv_escape(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// One row per estimate report: the generic inequality table.
pub fn write_estimates(dir: &Path, reports: &[EstimateReport]) -> anyhow::Result<PathBuf> {
    let header = ["name", "lhs", "rhs", "implied_constant", "budget", "pass", "params", "provenance"];
    let rows: Vec<Vec<String>> = reports
        .iter()
        .map(|r| {
            let params = r
                .params
                .iter()
                .map(|(k, v)| format!("{k}={}", fmt_float(*v)))
                .collect::<Vec<_>>()
                .join("; ");
            vec![
                r.name.clone(),
                fmt_float(r.lhs),
                fmt_float(r.rhs),
                fmt_float(r.implied_constant),
                fmt_float(r.budget),
                r.pass.to_string(),
                csv_escape(&params),
                csv_escape(&r.provenance),
            ]
        })
        .collect();
    write_table(dir, "estimates.csv", &header, &rows)
}

pub fn write_summary(dir: &Path, lines: &[String]) -> anyhow::Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join("summary.txt");
    let mut out = fs::File::create(&path)?;
    for line in lines {
        writeln!(out, "{line}")?;
    }
    Ok(path)
}

pub fn write_manifest(dir: &Path, manifest: &RunManifest) -> anyhow::Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join("manifest.txt");
    let mut out = fs::File::create(&path)?;
    writeln!(out, "manifest-version 1")?;
    writeln!(out, "tool pqlab-cli {}", manifest.version)?;
    writeln!(out, "experiment {}", manifest.name)?;
    writeln!(out, "kind {}", manifest.kind)?;
    writeln!(out, "seed {}", manifest.seed)?;
    writeln!(out, "status {}", if manifest.all_ok { "ok" } else { "failed" })?;
    writeln!(out, "instances {}", manifest.instances.len())?;
    for (k, (key, status)) in manifest.instances.iter().enumerate() {
        writeln!(out, "instance {k} {key} {status}")?;
    }
    for f in &manifest.files {
        writeln!(out, "file {f}")?;
    }
    writeln!(out, "wall-time-seconds {:.3}", manifest.wall_seconds)?;
    Ok(path)
}
