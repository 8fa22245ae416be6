// `!(x > 0.0)` guards reject NaN, which `x <= 0.0` would admit.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! Batch front door for the p-Laplace numerical laboratory: scenario
//! configurations, the mesh/solve/symmetrize/compare pipeline, and
//! machine-readable reports.

pub mod emit;
pub mod error;
pub mod pipeline;
pub mod scenario;
pub mod schema;

use std::path::{Path, PathBuf};

use talenti_core::geometry::{export_mesh, DomainKind};
use talenti_core::radial::{radial_distribution, solve_radial, solve_radial_eigen, FStarSpec};

use error::{CliError, CliResult};
use scenario::{parse_domain, parse_scenario, OutputKind, Scenario};

/// Exit-code contract of the binary.
pub fn exit_code_for_run(results: &[CliResult<bool>]) -> i32 {
    let mut code = 0;
    for r in results {
        let c = match r {
            Ok(true) => 0,
            Ok(false) => 2,
            Err(e) => e.exit_code(),
        };
        code = code.max(c);
    }
    code
}

/// Runs one scenario file and emits its artifacts; returns whether every
/// check passed.
pub fn run_scenario_file(
    path: &Path,
    out_dir: &Path,
    resolution: Option<usize>,
) -> CliResult<bool> {
    let mut scenario = parse_scenario(path)?;
    apply_resolution_override(&mut scenario, resolution);
    let output = pipeline::run_scenario(&scenario)?;
    let outputs = if scenario.outputs.is_empty() {
        vec![OutputKind::ReportJson]
    } else {
        scenario.outputs.clone()
    };
    emit::emit_report(&output, &outputs, out_dir)?;
    for rec in &output.report.checks {
        let status = if rec.pass { "pass" } else { "FAIL" };
        println!(
            "[{}] {} {} margin {:+.6e}",
            scenario.name, status, rec.name, rec.margin
        );
    }
    Ok(output.report.all_pass())
}

pub fn apply_resolution_override(scenario: &mut Scenario, resolution: Option<usize>) {
    if let Some(k) = resolution {
        if scenario.domain.kind != DomainKind::ExternalMesh {
            scenario.domain.n_radial = k;
            scenario.domain.n_angular = 4 * k;
        }
    }
}

/// Scans a directory for `*.json` scenarios in lexicographic order.
pub fn batch_scenarios(dir: &Path) -> CliResult<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| CliError::Io {
            path: dir.to_path_buf(),
            message: e.to_string(),
        })?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().map(|e| e == "json").unwrap_or(false))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(CliError::Io {
            path: dir.to_path_buf(),
            message: "batch directory contains no .json scenarios".into(),
        });
    }
    Ok(files)
}

/// `mesh` subcommand: build a generator spec and export MESH v1 text.
pub fn run_mesh_command(spec_path: &Path, out_path: &Path) -> CliResult<()> {
    let text = std::fs::read_to_string(spec_path).map_err(|e| CliError::Io {
        path: spec_path.to_path_buf(),
        message: e.to_string(),
    })?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CliError::config("", format!("invalid JSON: {e}")))?;
    let spec = parse_domain(&value, "")?;
    let mesh = spec
        .build()
        .map_err(|e| CliError::core("mesh generation", e))?;
    export_mesh(&mesh, out_path).map_err(|e| CliError::core("mesh export", e))?;
    println!(
        "wrote {} ({} vertices, {} triangles, {} holes)",
        out_path.display(),
        mesh.vertices.len(),
        mesh.triangles.len(),
        mesh.hole_count
    );
    Ok(())
}

/// `oracle` subcommand parameters.
struct OracleParams {
    n: u32,
    p: f64,
    beta: f64,
    r0: f64,
    r1: f64,
    grid: usize,
    fstar: FStarSpec,
    eigen: bool,
}

fn parse_oracle_params(value: &serde_json::Value) -> CliResult<OracleParams> {
    use schema::*;
    let map = as_object(value, "")?;
    reject_unknown(
        map,
        &["n", "p", "beta", "R0", "R1", "grid", "fstar", "eigen"],
        "",
    )?;
    let n = match map.get("n") {
        Some(v) => as_usize(v, "/n")? as u32,
        None => 2,
    };
    let p = as_f64(required(map, "p", "")?, "/p")?;
    let beta = match map.get("beta") {
        Some(v) => as_f64(v, "/beta")?,
        None => 1.0,
    };
    let r0 = as_f64(required(map, "R0", "")?, "/R0")?;
    let r1 = match map.get("R1") {
        Some(v) => as_f64(v, "/R1")?,
        None => 0.0,
    };
    let grid = match map.get("grid") {
        Some(v) => as_usize(v, "/grid")?,
        None => scenario::DEFAULT_ORACLE_GRID,
    };
    let fstar = match map.get("fstar") {
        None => FStarSpec::Constant(1.0),
        Some(v) => {
            let fmap = as_object(v, "/fstar")?;
            match as_str(required(fmap, "kind", "/fstar")?, "/fstar/kind")? {
                "constant" => {
                    let value = as_f64(required(fmap, "value", "/fstar")?, "/fstar/value")?;
                    FStarSpec::Constant(value)
                }
                "table" => {
                    let rows = as_array(required(fmap, "points", "/fstar")?, "/fstar/points")?;
                    let mut table = Vec::new();
                    for (i, row) in rows.iter().enumerate() {
                        table.push(number_pair(row, &format!("/fstar/points/{i}"))?);
                    }
                    FStarSpec::Table(table)
                }
                other => {
                    return Err(CliError::config(
                        "/fstar/kind",
                        format!("unknown f* kind `{other}`"),
                    ))
                }
            }
        }
    };
    let eigen = match map.get("eigen") {
        Some(v) => v
            .as_bool()
            .ok_or_else(|| CliError::config("/eigen", "expected a boolean"))?,
        None => false,
    };
    Ok(OracleParams {
        n,
        p,
        beta,
        r0,
        r1,
        grid,
        fstar,
        eigen,
    })
}

/// `oracle` subcommand: radial-only tables and summary values.
pub fn run_oracle_command(params_path: &Path, out_dir: &Path) -> CliResult<()> {
    let text = std::fs::read_to_string(params_path).map_err(|e| CliError::Io {
        path: params_path.to_path_buf(),
        message: e.to_string(),
    })?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CliError::config("", format!("invalid JSON: {e}")))?;
    let params = parse_oracle_params(&value)?;
    let profile = solve_radial(
        params.n,
        params.p,
        params.beta,
        params.r0,
        params.r1,
        &params.fstar,
        params.grid,
    )
    .map_err(|e| CliError::core("radial solve", e))?;
    let df = radial_distribution(&profile).map_err(|e| CliError::core("radial solve", e))?;

    std::fs::create_dir_all(out_dir).map_err(|e| CliError::Io {
        path: out_dir.to_path_buf(),
        message: e.to_string(),
    })?;
    let stem = params_path
        .file_stem()
        .map(|s| s.to_string_lossy().to_string())
        .unwrap_or_else(|| "oracle".into());
    let profile_path = out_dir.join(format!("{stem}.profile.csv"));
    std::fs::write(&profile_path, emit::table_csv("r,v", &profile.samples)).map_err(|e| {
        CliError::Io {
            path: profile_path.clone(),
            message: e.to_string(),
        }
    })?;
    let mu_rows: Vec<(f64, f64)> = df
        .breakpoints()
        .iter()
        .map(|&t| (t, df.evaluate(t)))
        .collect();
    let mu_path = out_dir.join(format!("{stem}.mu.csv"));
    std::fs::write(&mu_path, emit::table_csv("t,mu", &mu_rows)).map_err(|e| CliError::Io {
        path: mu_path.clone(),
        message: e.to_string(),
    })?;

    let lambda = if params.eigen {
        Some(
            solve_radial_eigen(
                params.n,
                params.p,
                params.beta,
                params.r0,
                params.r1,
                params.grid.clamp(64, 4096),
            )
            .map_err(|e| CliError::core("radial eigen solve", e))?
            .lambda,
        )
    } else {
        None
    };

    let mut summary = serde_json::Map::new();
    summary.insert("v_boundary".into(), profile.v_boundary.into());
    summary.insert("c_bar".into(), profile.c_bar.into());
    summary.insert("l1_norm".into(), profile.l1_norm().into());
    summary.insert("mass".into(), df.total_mass().into());
    if let Some(l) = lambda {
        summary.insert("lambda".into(), l.into());
    }
    let summary_path = out_dir.join(format!("{stem}.oracle.json"));
    let mut body = serde_json::to_string_pretty(&serde_json::Value::Object(summary))
        .expect("summary serialization cannot fail");
    body.push('\n');
    std::fs::write(&summary_path, body).map_err(|e| CliError::Io {
        path: summary_path.clone(),
        message: e.to_string(),
    })?;
    println!(
        "wrote {}, {}, {}",
        profile_path.display(),
        mu_path.display(),
        summary_path.display()
    );
    Ok(())
}
