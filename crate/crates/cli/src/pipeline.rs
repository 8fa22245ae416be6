//! Deterministic scenario pipeline: mesh -> solve -> symmetrize -> compare.
//! Identical inputs yield identical reports byte for byte (no wall clock, no
//! unordered iteration reaches the serialized artifacts).

use std::sync::Arc;

use talenti_core::comparison::{lorentz_k_max, unit_source_k_max};
use talenti_core::comparison::{
    verify_differential_inequality, verify_lorentz_comparisons, verify_optimality,
    verify_pointwise, CheckSettings, ComparisonReport, LorentzCheckKind, OptimalityBranches,
    Provenance,
};
use talenti_core::fem::{solve_state, SourceSpec, StateSolution};
use talenti_core::geometry::{region_metrics, DomainKind, Mesh, RegionMetrics};
use talenti_core::radial::{solve_radial, FStarSpec, RadialProfile};
use talenti_core::rearrangement::{distribution_function_p1, DistributionFunction};

use crate::error::{CliError, CliResult};
use crate::scenario::{CheckSelector, Scenario};

/// Everything a scenario run produces: the merged report plus the plot-ready
/// tables the emitters serialize on request.
#[derive(Debug)]
pub struct RunOutput {
    pub report: ComparisonReport,
    /// (t, mu(t)) at the breakpoints of the state distribution function.
    pub mu_table: Option<Vec<(f64, f64)>>,
    /// (r, v(r)) samples of the radial benchmark profile.
    pub profile_table: Option<Vec<(f64, f64)>>,
}

/// Decreasing rearrangement of the source over the meshed domain: exact for
/// constants, a per-triangle step table otherwise (triangle means sorted
/// decreasingly, steps encoded by repeated abscissae).
fn fstar_from_source(mesh: &Mesh, source: &SourceSpec) -> CliResult<FStarSpec> {
    if let SourceSpec::Constant(v) = source {
        return Ok(FStarSpec::Constant(*v));
    }
    let mut cells: Vec<(f64, f64)> = Vec::with_capacity(mesh.triangles.len());
    for (ti, t) in mesh.triangles.iter().enumerate() {
        let area = mesh.signed_area(t);
        let [a, b, c] = t.vertices;
        let (pa, pb, pc) = (mesh.vertices[a], mesh.vertices[b], mesh.vertices[c]);
        let mids = [
            [0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])],
            [0.5 * (pb[0] + pc[0]), 0.5 * (pb[1] + pc[1])],
            [0.5 * (pc[0] + pa[0]), 0.5 * (pc[1] + pa[1])],
        ];
        let mean = mids.iter().map(|&m| source.eval(m, ti)).sum::<f64>() / 3.0;
        cells.push((mean, area));
    }
    cells.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal));
    let mut table = Vec::with_capacity(2 * cells.len());
    let mut s = 0.0;
    for &(value, area) in &cells {
        table.push((s, value));
        s += area;
        table.push((s, value));
    }
    let spec = FStarSpec::Table(table_dedup(table));
    spec.validate()
        .map_err(|e| CliError::core("source rearrangement", e))?;
    Ok(spec)
}

fn table_dedup(table: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(table.len());
    for (s, v) in table {
        if let Some(&(ps, pv)) = out.last() {
            if (s - ps).abs() <= 0.0 && (v - pv).abs() <= 0.0 {
                continue;
            }
        }
        out.push((s, v));
    }
    out
}

/// Calibration of the FEM error scale: solve the measure-matched concentric
/// twin at the same resolution and compare its torsion against the radial
/// benchmark. External meshes skip calibration (the relative-tolerance floor
/// applies).
fn calibrate_fem_error(s: &Scenario, metrics: &RegionMetrics) -> CliResult<f64> {
    match s.domain.kind {
        DomainKind::ExternalMesh => Ok(0.0),
        _ => {
            let twin = talenti_core::geometry::DomainSpec {
                kind: if s.domain.hole_radius > 0.0 {
                    DomainKind::ConcentricAnnulus
                } else {
                    DomainKind::Disk
                },
                outer_radius: s.domain.outer_radius,
                hole_radius: s.domain.hole_radius,
                hole_offset: 0.0,
                mesh_path: None,
                n_radial: s.domain.n_radial,
                n_angular: s.domain.n_angular,
            };
            let mesh = Arc::new(twin.build().map_err(|e| CliError::core("calibration", e))?);
            let sol = solve_state(&mesh, &s.solver, &SourceSpec::unit())
                .map_err(|e| CliError::core("calibration", e))?;
            let t_fem = talenti_core::fem::torsion(&sol.field);
            let profile = solve_radial(
                2,
                s.p,
                s.beta,
                metrics.outer_radius_symmetrized,
                metrics.hole_radius_symmetrized,
                &FStarSpec::Constant(1.0),
                s.oracle_grid,
            )
            .map_err(|e| CliError::core("calibration", e))?;
            let t_ref = profile.l1_norm();
            if t_ref <= 0.0 {
                return Ok(0.0);
            }
            Ok(((t_fem - t_ref) / t_ref).abs())
        }
    }
}

struct PipelineState {
    mesh: Arc<Mesh>,
    metrics: RegionMetrics,
    state: Option<StateSolution>,
    df: Option<DistributionFunction>,
    profile: Option<RadialProfile>,
    fstar: Option<FStarSpec>,
    settings: Option<CheckSettings>,
}

impl PipelineState {
    fn state(&mut self, s: &Scenario) -> CliResult<&StateSolution> {
        if self.state.is_none() {
            let sol = solve_state(&self.mesh, &s.solver, &s.source)
                .map_err(|e| CliError::core(format!("scenario `{}`", s.name), e))?;
            self.state = Some(sol);
        }
        Ok(self.state.as_ref().unwrap())
    }

    fn df(&mut self, s: &Scenario) -> CliResult<&DistributionFunction> {
        if self.df.is_none() {
            self.state(s)?;
            let df = distribution_function_p1(&self.state.as_ref().unwrap().field)
                .map_err(|e| CliError::core(format!("scenario `{}`", s.name), e))?;
            self.df = Some(df);
        }
        Ok(self.df.as_ref().unwrap())
    }

    fn fstar(&mut self, s: &Scenario) -> CliResult<&FStarSpec> {
        if self.fstar.is_none() {
            self.fstar = Some(fstar_from_source(&self.mesh, &s.source)?);
        }
        Ok(self.fstar.as_ref().unwrap())
    }

    fn profile(&mut self, s: &Scenario) -> CliResult<&RadialProfile> {
        if self.profile.is_none() {
            let fstar = self.fstar(s)?.clone();
            let profile = solve_radial(
                2,
                s.p,
                s.beta,
                self.metrics.outer_radius_symmetrized,
                self.metrics.hole_radius_symmetrized,
                &fstar,
                s.oracle_grid,
            )
            .map_err(|e| CliError::core(format!("scenario `{}`", s.name), e))?;
            self.profile = Some(profile);
        }
        Ok(self.profile.as_ref().unwrap())
    }

    fn settings(&mut self, s: &Scenario) -> CliResult<CheckSettings> {
        if self.settings.is_none() {
            let fem_error = calibrate_fem_error(s, &self.metrics)?;
            self.settings = Some(CheckSettings {
                source_is_unit: s.source.is_unit(),
                fem_error_estimate: fem_error,
            });
        }
        Ok(*self.settings.as_ref().unwrap())
    }
}

/// Runs the full pipeline for one scenario.
pub fn run_scenario(s: &Scenario) -> CliResult<RunOutput> {
    let mesh = Arc::new(
        s.domain
            .build()
            .map_err(|e| CliError::core(format!("scenario `{}`", s.name), e))?,
    );
    s.source
        .validate(&mesh)
        .map_err(|e| CliError::core(format!("scenario `{}`", s.name), e))?;
    let metrics =
        region_metrics(&mesh).map_err(|e| CliError::core(format!("scenario `{}`", s.name), e))?;
    let mut pipe = PipelineState {
        mesh,
        metrics,
        state: None,
        df: None,
        profile: None,
        fstar: None,
        settings: None,
    };

    let ctx = |e: talenti_core::Error| CliError::core(format!("scenario `{}`", s.name), e);
    let mut report = ComparisonReport::default();
    for check in &s.checks {
        let settings = pipe.settings(s)?;
        let partial = match check {
            CheckSelector::Thm1 => {
                let kgrid = s.kgrid.resolve(lorentz_k_max(s.n, s.p))?;
                pipe.state(s)?;
                pipe.profile(s)?;
                verify_lorentz_comparisons(
                    &pipe.state.as_ref().unwrap().field,
                    pipe.profile.as_ref().unwrap(),
                    s.p,
                    s.n,
                    &kgrid,
                    LorentzCheckKind::General,
                    &settings,
                )
                .map_err(ctx)?
            }
            CheckSelector::Cor12 => {
                let kgrid = s.kgrid.resolve(lorentz_k_max(s.n, s.p))?;
                pipe.state(s)?;
                pipe.profile(s)?;
                verify_lorentz_comparisons(
                    &pipe.state.as_ref().unwrap().field,
                    pipe.profile.as_ref().unwrap(),
                    s.p,
                    s.n,
                    &kgrid,
                    LorentzCheckKind::LebesgueEndpoints,
                    &settings,
                )
                .map_err(ctx)?
            }
            CheckSelector::Thm2ii => {
                let k_max = unit_source_k_max(s.n, s.p).map_err(ctx)?;
                let kgrid = s.kgrid.resolve(k_max)?;
                pipe.state(s)?;
                pipe.profile(s)?;
                verify_lorentz_comparisons(
                    &pipe.state.as_ref().unwrap().field,
                    pipe.profile.as_ref().unwrap(),
                    s.p,
                    s.n,
                    &kgrid,
                    LorentzCheckKind::UnitSource,
                    &settings,
                )
                .map_err(ctx)?
            }
            CheckSelector::Thm2i => {
                pipe.state(s)?;
                pipe.profile(s)?;
                verify_pointwise(
                    &pipe.state.as_ref().unwrap().field,
                    pipe.profile.as_ref().unwrap(),
                    s.p,
                    s.n,
                    &settings,
                )
                .map_err(ctx)?
            }
            CheckSelector::DiffIneq => {
                pipe.state(s)?;
                let fstar = pipe.fstar(s)?.clone();
                verify_differential_inequality(
                    &pipe.state.as_ref().unwrap().field,
                    s.p,
                    s.n,
                    s.beta,
                    &fstar,
                    &settings,
                )
                .map_err(ctx)?
            }
            CheckSelector::Torsion => verify_optimality(
                &pipe.mesh,
                &s.solver,
                s.n,
                OptimalityBranches {
                    torsion: true,
                    eigen: false,
                },
                &settings,
                s.oracle_grid,
            )
            .map_err(ctx)?,
            CheckSelector::Eigen => verify_optimality(
                &pipe.mesh,
                &s.solver,
                s.n,
                OptimalityBranches {
                    torsion: false,
                    eigen: true,
                },
                &settings,
                s.oracle_grid.clamp(64, 2048),
            )
            .map_err(ctx)?,
        };
        report.merge(partial);
    }

    report.scenario = s.name.clone();
    report.provenance = Provenance {
        mesh_vertices: pipe.mesh.vertices.len(),
        mesh_triangles: pipe.mesh.triangles.len(),
        hole_count: pipe.mesh.hole_count,
        resolution: match s.domain.kind {
            DomainKind::ExternalMesh => None,
            _ => Some((s.domain.n_radial, s.domain.n_angular)),
        },
        solver_residual: pipe
            .state
            .as_ref()
            .map(|st| st.diagnostics.final_residual())
            .unwrap_or(0.0),
        epsilon_min: s.solver.epsilon_min(),
        oracle_grid: s.oracle_grid,
    };
    report.sort_records();

    // tables for the plot-ready outputs: computed by the checks that need
    // them, or on demand when the scenario requests the CSVs explicitly
    if s.outputs.contains(&crate::scenario::OutputKind::MuCsv) {
        pipe.df(s)?;
    }
    if s.outputs.contains(&crate::scenario::OutputKind::ProfileCsv) {
        pipe.profile(s)?;
    }
    let mu_table = pipe.df.as_ref().map(|df| {
        df.breakpoints()
            .iter()
            .map(|&t| (t, df.evaluate(t)))
            .collect()
    });
    let profile_table = pipe.profile.as_ref().map(|p| p.samples.clone());

    Ok(RunOutput {
        report,
        mu_table,
        profile_table,
    })
}
