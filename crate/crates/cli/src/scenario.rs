//! Scenario configuration: JSON schema, defaults, and fail-fast hypothesis
//! validation. A scenario whose check selectors violate their theorem
//! hypotheses is rejected before any solver work happens.

use std::path::{Path, PathBuf};

use serde_json::Value;

use talenti_core::comparison::{is_integer_exponent, lorentz_k_max, unit_source_k_max, KGrid};
use talenti_core::fem::{SolveParams, SourceSpec};
use talenti_core::geometry::{DomainKind, DomainSpec};

use crate::error::{CliError, CliResult};
use crate::schema::*;

pub const DEFAULT_N_RADIAL: usize = 16;
pub const DEFAULT_N_ANGULAR: usize = 64;
pub const DEFAULT_ORACLE_GRID: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckSelector {
    Thm1,
    Cor12,
    Thm2i,
    Thm2ii,
    DiffIneq,
    Torsion,
    Eigen,
}

impl CheckSelector {
    pub fn parse(s: &str, ptr: &str) -> CliResult<CheckSelector> {
        Ok(match s {
            "thm1" => CheckSelector::Thm1,
            "cor12" => CheckSelector::Cor12,
            "thm2i" => CheckSelector::Thm2i,
            "thm2ii" => CheckSelector::Thm2ii,
            "diffineq" => CheckSelector::DiffIneq,
            "torsion" => CheckSelector::Torsion,
            "eigen" => CheckSelector::Eigen,
            other => {
                return Err(CliError::config(
                    ptr,
                    format!("unknown check selector `{other}`"),
                ))
            }
        })
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            CheckSelector::Thm1 => "thm1",
            CheckSelector::Cor12 => "cor12",
            CheckSelector::Thm2i => "thm2i",
            CheckSelector::Thm2ii => "thm2ii",
            CheckSelector::DiffIneq => "diffineq",
            CheckSelector::Torsion => "torsion",
            CheckSelector::Eigen => "eigen",
        }
    }
}

#[derive(Debug, Clone)]
pub enum KGridSpec {
    Auto,
    Explicit(Vec<f64>),
}

impl KGridSpec {
    /// Resolves against a bound: auto grids are capped, explicit grids must
    /// already respect it.
    pub fn resolve(&self, k_max: f64) -> CliResult<KGrid> {
        match self {
            KGridSpec::Auto => Ok(KGrid::auto(k_max)),
            KGridSpec::Explicit(values) => {
                KGrid::explicit(values.clone(), k_max).map_err(|e| CliError::core("k grid", e))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputKind {
    ReportJson,
    ReportCsv,
    MuCsv,
    ProfileCsv,
}

impl OutputKind {
    fn parse(s: &str, ptr: &str) -> CliResult<OutputKind> {
        Ok(match s {
            "report_json" => OutputKind::ReportJson,
            "report_csv" => OutputKind::ReportCsv,
            "mu_csv" => OutputKind::MuCsv,
            "profile_csv" => OutputKind::ProfileCsv,
            other => {
                return Err(CliError::config(
                    ptr,
                    format!("unknown output kind `{other}`"),
                ))
            }
        })
    }
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub domain: DomainSpec,
    pub p: f64,
    pub n: u32,
    pub beta: f64,
    pub source: SourceSpec,
    pub checks: Vec<CheckSelector>,
    pub kgrid: KGridSpec,
    pub solver: SolveParams,
    pub outputs: Vec<OutputKind>,
    pub oracle_grid: usize,
}

/// Parses and validates a scenario file; hypothesis gates run here so a bad
/// scenario produces no solver work.
pub fn parse_scenario(path: impl AsRef<Path>) -> CliResult<Scenario> {
    let text = std::fs::read_to_string(path.as_ref()).map_err(|e| CliError::Io {
        path: path.as_ref().to_path_buf(),
        message: e.to_string(),
    })?;
    parse_scenario_str(&text)
}

pub fn parse_scenario_str(text: &str) -> CliResult<Scenario> {
    let value: Value = serde_json::from_str(text)
        .map_err(|e| CliError::config("", format!("invalid JSON: {e}")))?;
    let scenario = parse_scenario_value(&value)?;
    validate_hypotheses(&scenario)?;
    Ok(scenario)
}

fn parse_scenario_value(value: &Value) -> CliResult<Scenario> {
    let root = as_object(value, "")?;
    reject_unknown(
        root,
        &[
            "name",
            "domain",
            "p",
            "n",
            "beta",
            "source",
            "checks",
            "kgrid",
            "solver",
            "outputs",
            "oracle_grid",
        ],
        "",
    )?;

    let name = as_str(required(root, "name", "")?, "/name")?.to_string();
    if name.is_empty()
        || !name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || "-_.".contains(c))
    {
        return Err(CliError::config(
            "/name",
            "scenario names must be nonempty and filesystem-safe",
        ));
    }

    let domain = parse_domain(required(root, "domain", "")?, "/domain")?;

    let p = as_f64(required(root, "p", "")?, "/p")?;
    if !(p > 1.0 && p <= 10.0) {
        return Err(CliError::config(
            "/p",
            format!("exponent p must lie in (1, 10], got {p}"),
        ));
    }
    let n = match root.get("n") {
        Some(v) => as_usize(v, "/n")? as u32,
        None => 2,
    };
    if n != 2 {
        return Err(CliError::config(
            "/n",
            "solve scenarios are two-dimensional; use the oracle command for general n",
        ));
    }
    let beta = match root.get("beta") {
        Some(v) => as_f64(v, "/beta")?,
        None => 1.0,
    };
    if !(beta > 0.0) {
        return Err(CliError::config("/beta", "beta must be positive"));
    }

    let source = parse_source(required(root, "source", "")?, "/source")?;

    let checks_val = as_array(required(root, "checks", "")?, "/checks")?;
    let mut checks = Vec::new();
    for (i, c) in checks_val.iter().enumerate() {
        let ptr = format!("/checks/{i}");
        checks.push(CheckSelector::parse(as_str(c, &ptr)?, &ptr)?);
    }

    let kgrid = match root.get("kgrid") {
        None => KGridSpec::Auto,
        Some(Value::String(s)) if s == "auto" => KGridSpec::Auto,
        Some(Value::Array(arr)) => {
            let mut values = Vec::new();
            for (i, v) in arr.iter().enumerate() {
                values.push(as_f64(v, &format!("/kgrid/{i}"))?);
            }
            if values.is_empty() {
                return Err(CliError::config(
                    "/kgrid",
                    "explicit k grid must be nonempty",
                ));
            }
            KGridSpec::Explicit(values)
        }
        Some(_) => {
            return Err(CliError::config(
                "/kgrid",
                "expected \"auto\" or an array of numbers",
            ))
        }
    };

    let mut solver = SolveParams::new(p, beta);
    if let Some(v) = root.get("solver") {
        apply_solver_overrides(&mut solver, v, "/solver")?;
    }
    solver
        .validate()
        .map_err(|e| CliError::config("/solver", e.to_string()))?;

    let outputs = match root.get("outputs") {
        None => vec![OutputKind::ReportJson],
        Some(v) => {
            let arr = as_array(v, "/outputs")?;
            let mut outs = Vec::new();
            for (i, o) in arr.iter().enumerate() {
                let ptr = format!("/outputs/{i}");
                outs.push(OutputKind::parse(as_str(o, &ptr)?, &ptr)?);
            }
            outs
        }
    };

    let oracle_grid = match root.get("oracle_grid") {
        Some(v) => as_usize(v, "/oracle_grid")?,
        None => DEFAULT_ORACLE_GRID,
    };

    Ok(Scenario {
        name,
        domain,
        p,
        n,
        beta,
        source,
        checks,
        kgrid,
        solver,
        outputs,
        oracle_grid,
    })
}

pub fn parse_domain(value: &Value, ptr: &str) -> CliResult<DomainSpec> {
    let map = as_object(value, ptr)?;
    reject_unknown(
        map,
        &[
            "kind",
            "R0",
            "R1",
            "d",
            "mesh_path",
            "n_radial",
            "n_angular",
        ],
        ptr,
    )?;
    let kind_str = as_str(required(map, "kind", ptr)?, &format!("{ptr}/kind"))?;
    let kind = match kind_str {
        "disk" => DomainKind::Disk,
        "concentric_annulus" => DomainKind::ConcentricAnnulus,
        "eccentric_annulus" => DomainKind::EccentricAnnulus,
        "external_mesh" => DomainKind::ExternalMesh,
        other => {
            return Err(CliError::config(
                format!("{ptr}/kind"),
                format!("unknown domain kind `{other}`"),
            ))
        }
    };
    let get_f64 = |key: &str, default: f64| -> CliResult<f64> {
        match map.get(key) {
            Some(v) => as_f64(v, &format!("{ptr}/{key}")),
            None => Ok(default),
        }
    };
    let spec = DomainSpec {
        kind,
        outer_radius: get_f64("R0", 0.0)?,
        hole_radius: get_f64("R1", 0.0)?,
        hole_offset: get_f64("d", 0.0)?,
        mesh_path: match map.get("mesh_path") {
            Some(v) => Some(PathBuf::from(as_str(v, &format!("{ptr}/mesh_path"))?)),
            None => None,
        },
        n_radial: match map.get("n_radial") {
            Some(v) => as_usize(v, &format!("{ptr}/n_radial"))?,
            None => DEFAULT_N_RADIAL,
        },
        n_angular: match map.get("n_angular") {
            Some(v) => as_usize(v, &format!("{ptr}/n_angular"))?,
            None => DEFAULT_N_ANGULAR,
        },
    };
    if kind != DomainKind::ExternalMesh && map.get("R0").is_none() {
        return Err(CliError::config(
            format!("{ptr}/R0"),
            "missing required key",
        ));
    }
    spec.validate()
        .map_err(|e| CliError::config(ptr, e.to_string()))?;
    Ok(spec)
}

fn parse_source(value: &Value, ptr: &str) -> CliResult<SourceSpec> {
    let map = as_object(value, ptr)?;
    let kind = as_str(required(map, "kind", ptr)?, &format!("{ptr}/kind"))?;
    match kind {
        "constant" => {
            reject_unknown(map, &["kind", "value"], ptr)?;
            let v = as_f64(required(map, "value", ptr)?, &format!("{ptr}/value"))?;
            if v < 0.0 {
                return Err(CliError::config(
                    format!("{ptr}/value"),
                    "source must be nonnegative",
                ));
            }
            Ok(SourceSpec::Constant(v))
        }
        "radial_profile" => {
            reject_unknown(map, &["kind", "center", "table"], ptr)?;
            let center = match map.get("center") {
                Some(v) => {
                    let (x, y) = number_pair(v, &format!("{ptr}/center"))?;
                    [x, y]
                }
                None => [0.0, 0.0],
            };
            let table_val = as_array(required(map, "table", ptr)?, &format!("{ptr}/table"))?;
            let mut table = Vec::new();
            for (i, row) in table_val.iter().enumerate() {
                table.push(number_pair(row, &format!("{ptr}/table/{i}"))?);
            }
            Ok(SourceSpec::RadialProfile { center, table })
        }
        "per_triangle" => {
            reject_unknown(map, &["kind", "values"], ptr)?;
            let vals = as_array(required(map, "values", ptr)?, &format!("{ptr}/values"))?;
            let mut values = Vec::new();
            for (i, v) in vals.iter().enumerate() {
                values.push(as_f64(v, &format!("{ptr}/values/{i}"))?);
            }
            Ok(SourceSpec::PerTriangle(values))
        }
        other => Err(CliError::config(
            format!("{ptr}/kind"),
            format!("unknown source kind `{other}`"),
        )),
    }
}

fn apply_solver_overrides(solver: &mut SolveParams, value: &Value, ptr: &str) -> CliResult<()> {
    let map = as_object(value, ptr)?;
    reject_unknown(
        map,
        &[
            "newton_tol",
            "max_newton_iters",
            "epsilon_schedule",
            "line_search",
        ],
        ptr,
    )?;
    if let Some(v) = map.get("newton_tol") {
        solver.newton_tol = as_f64(v, &format!("{ptr}/newton_tol"))?;
    }
    if let Some(v) = map.get("max_newton_iters") {
        solver.max_newton_iters = as_usize(v, &format!("{ptr}/max_newton_iters"))?;
    }
    if let Some(v) = map.get("epsilon_schedule") {
        let arr = as_array(v, &format!("{ptr}/epsilon_schedule"))?;
        let mut schedule = Vec::new();
        for (i, e) in arr.iter().enumerate() {
            schedule.push(as_f64(e, &format!("{ptr}/epsilon_schedule/{i}"))?);
        }
        solver.epsilon_schedule = schedule;
    }
    if let Some(v) = map.get("line_search") {
        let ls = as_object(v, &format!("{ptr}/line_search"))?;
        reject_unknown(
            ls,
            &["backtrack", "max_steps"],
            &format!("{ptr}/line_search"),
        )?;
        if let Some(b) = ls.get("backtrack") {
            solver.line_search_backtrack = as_f64(b, &format!("{ptr}/line_search/backtrack"))?;
        }
        if let Some(m) = ls.get("max_steps") {
            solver.line_search_max_steps = as_usize(m, &format!("{ptr}/line_search/max_steps"))?;
        }
    }
    Ok(())
}

/// Fail-fast theorem gates, mirroring the comparison module's hypotheses.
pub fn validate_hypotheses(s: &Scenario) -> CliResult<()> {
    let hyp = |msg: String| {
        CliError::core(
            format!("scenario `{}`", s.name),
            talenti_core::Error::Hypothesis(msg),
        )
    };
    let unit = s.source.is_unit();
    let nf = s.n as f64;
    for check in &s.checks {
        match check {
            CheckSelector::Thm1 | CheckSelector::DiffIneq | CheckSelector::Torsion => {}
            CheckSelector::Cor12 => {
                if !(is_integer_exponent(s.p) && s.p.round() as u32 >= s.n) {
                    return Err(hyp(format!(
                        "cor12 requires integer p >= n = {}, got p = {}",
                        s.n, s.p
                    )));
                }
            }
            CheckSelector::Thm2i => {
                if !unit {
                    return Err(hyp("thm2i requires the unit source f = 1".into()));
                }
                if s.p > nf / (nf - 1.0) + 1e-12 {
                    return Err(hyp(format!(
                        "thm2i requires p <= n/(n-1) = {:.6}, got p = {}",
                        nf / (nf - 1.0),
                        s.p
                    )));
                }
            }
            CheckSelector::Thm2ii => {
                if !unit {
                    return Err(hyp("thm2ii requires the unit source f = 1".into()));
                }
                if !is_integer_exponent(s.p) || s.p <= nf / (nf - 1.0) {
                    return Err(hyp(format!(
                        "thm2ii requires integer p > n/(n-1) = {:.6}, got p = {}",
                        nf / (nf - 1.0),
                        s.p
                    )));
                }
            }
            CheckSelector::Eigen => {
                if !(is_integer_exponent(s.p) && s.p.round() as u32 >= s.n) {
                    return Err(hyp(format!(
                        "eigen comparison requires integer p >= n = {}, got p = {}",
                        s.n, s.p
                    )));
                }
            }
        }
        // explicit k grids must respect each selected bound
        if let KGridSpec::Explicit(values) = &s.kgrid {
            let k_max = match check {
                CheckSelector::Thm1 => Some(lorentz_k_max(s.n, s.p)),
                CheckSelector::Thm2ii => {
                    Some(unit_source_k_max(s.n, s.p).map_err(|e| CliError::core("", e))?)
                }
                _ => None,
            };
            if let Some(k_max) = k_max {
                for &k in values {
                    if !(k > 0.0 && k <= k_max * (1.0 + 1e-12)) {
                        return Err(hyp(format!(
                            "k = {k} outside (0, {k_max:.6}] for check {}",
                            check.as_str()
                        )));
                    }
                }
            }
        }
    }
    Ok(())
}
