//! Report serialization: a JSON document plus flat CSV tables with the
//! column layout `scenario,check,k,t,left,right,margin,pass`. Floats are
//! written with 17 significant digits so re-parsing is lossless.

use std::fs;
use std::path::{Path, PathBuf};

use talenti_core::comparison::ComparisonReport;

use crate::error::{CliError, CliResult};
use crate::pipeline::RunOutput;
use crate::scenario::OutputKind;

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    fs::write(path, contents).map_err(|e| CliError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn report_json(report: &ComparisonReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serialization cannot fail");
    s.push('\n');
    s
}

pub fn report_csv(report: &ComparisonReport) -> String {
    let mut out = String::from("scenario,check,k,t,left,right,margin,pass\n");
    for rec in &report.checks {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            report.scenario,
            rec.name,
            rec.k.map(fmt).unwrap_or_default(),
            rec.t.map(fmt).unwrap_or_default(),
            fmt(rec.left),
            fmt(rec.right),
            fmt(rec.margin),
            rec.pass
        ));
    }
    out
}

pub fn table_csv(header: &str, rows: &[(f64, f64)]) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for &(a, b) in rows {
        out.push_str(&format!("{},{}\n", fmt(a), fmt(b)));
    }
    out
}

/// Writes the requested artifacts into `dir`, named `<scenario>.<kind>`.
pub fn emit_report(
    output: &RunOutput,
    outputs: &[OutputKind],
    dir: &Path,
) -> CliResult<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io {
        path: dir.to_path_buf(),
        message: e.to_string(),
    })?;
    let name = &output.report.scenario;
    let mut written = Vec::new();
    for kind in outputs {
        let (file, contents) = match kind {
            OutputKind::ReportJson => (format!("{name}.report.json"), report_json(&output.report)),
            OutputKind::ReportCsv => (format!("{name}.report.csv"), report_csv(&output.report)),
            OutputKind::MuCsv => {
                let table = output.mu_table.as_ref().ok_or_else(|| {
                    CliError::config(
                        "/outputs",
                        "mu_csv requested but the scenario computed no distribution function",
                    )
                })?;
                (format!("{name}.mu.csv"), table_csv("t,mu", table))
            }
            OutputKind::ProfileCsv => {
                let table = output.profile_table.as_ref().ok_or_else(|| {
                    CliError::config(
                        "/outputs",
                        "profile_csv requested but the scenario computed no radial profile",
                    )
                })?;
                (format!("{name}.profile.csv"), table_csv("r,v", table))
            }
        };
        let path = dir.join(file);
        write_file(&path, &contents)?;
        written.push(path);
    }
    Ok(written)
}
