//! Damped Newton minimization of the regularized energy with epsilon
//! continuation.
//!
//! The schedule starts loose and ends at the reporting regularization; each
//! stage warm-starts from the previous one. The p = 2 problem is quadratic,
//! so the continuation is seeded with its exact solution, which also keeps
//! the boundary traces positive for p < 2 where the boundary Hessian weight
//! degenerates at zero.

use std::sync::Arc;

use super::assembly::{self, LoadTerm, P1Geometry};
use super::{build_dof_map, DofMap, Field, SolveParams, SourceSpec};
use crate::error::{Error, Result};
use crate::geometry::Mesh;
use crate::linalg::{self, pcg_jacobi};

const ARMIJO_C1: f64 = 1e-4;

#[derive(Debug, Clone)]
pub struct StageDiagnostics {
    pub epsilon: f64,
    pub newton_iterations: usize,
    pub final_residual: f64,
    pub final_energy: f64,
}

#[derive(Debug, Clone, Default)]
pub struct SolveDiagnostics {
    pub stages: Vec<StageDiagnostics>,
    /// Accepted energies in order across all stages of the final schedule.
    pub energy_trace: Vec<f64>,
}

impl SolveDiagnostics {
    pub fn final_residual(&self) -> f64 {
        self.stages.last().map(|s| s.final_residual).unwrap_or(0.0)
    }
}

/// A converged state solution together with its solver diagnostics.
#[derive(Debug, Clone)]
pub struct StateSolution {
    pub field: Field,
    pub diagnostics: SolveDiagnostics,
}

/// Minimizes the Robin p-Dirichlet energy over the constrained space for the
/// given source; errors if f takes negative values or Newton stalls.
pub fn solve_state(
    mesh: &Arc<Mesh>,
    params: &SolveParams,
    f: &SourceSpec,
) -> Result<StateSolution> {
    params.validate()?;
    f.validate(mesh)?;
    let dofs = Arc::new(build_dof_map(mesh)?);
    let geo = P1Geometry::new(mesh);
    let load = LoadTerm::from_source(mesh, f)?;
    solve_with_load(&dofs, params, &geo, &load, None, &params.epsilon_schedule)
}

/// Shared driver used by the state and eigen solvers.
pub(crate) fn solve_with_load(
    dofs: &Arc<DofMap>,
    params: &SolveParams,
    geo: &P1Geometry,
    load: &LoadTerm,
    initial: Option<&[f64]>,
    schedule: &[f64],
) -> Result<StateSolution> {
    if load.is_zero() && initial.is_none() {
        // unique minimizer of a nonnegative strictly convex functional
        let field = Field::zeros(dofs);
        return Ok(StateSolution {
            field,
            diagnostics: SolveDiagnostics::default(),
        });
    }

    let mut values = match initial {
        Some(v) => v.to_vec(),
        None => {
            let mut v = linear_warm_start(dofs, params, geo, load)?;
            continue_in_p(&mut v, dofs, params, geo, load, schedule[0])?;
            v
        }
    };
    let mut diagnostics = SolveDiagnostics::default();
    for (i, &eps) in schedule.iter().enumerate() {
        let boundary_delta = if i + 1 == schedule.len() { 0.0 } else { eps };
        let stage = newton_stage(
            &mut values,
            dofs,
            params,
            geo,
            load,
            Stage {
                eps,
                boundary_delta,
            },
            &mut diagnostics,
        )?;
        diagnostics.stages.push(stage);
    }
    let field = Field::from_dof_values(dofs, values)?;
    Ok(StateSolution { field, diagnostics })
}

/// Walks the exponent from 2 toward the target in factor-of-two steps of
/// p - 1, re-solving at the coarsest regularization each time. Keeps the
/// Newton basin reachable when the target exponent (or a large Robin
/// parameter) puts the p = 2 solution far from the minimizer.
fn continue_in_p(
    values: &mut [f64],
    dofs: &Arc<DofMap>,
    params: &SolveParams,
    geo: &P1Geometry,
    load: &LoadTerm,
    coarse_eps: f64,
) -> Result<()> {
    let target = params.p - 1.0;
    let mut q = 1.0f64;
    let mut scratch = SolveDiagnostics::default();
    while (q / target).max(target / q) > 2.0 {
        q = if target > q { 2.0 * q } else { 0.5 * q };
        let stage_params = SolveParams {
            p: 1.0 + q,
            newton_tol: params.newton_tol.max(1e-6),
            ..params.clone()
        };
        newton_stage(
            values,
            dofs,
            &stage_params,
            geo,
            load,
            Stage {
                eps: coarse_eps,
                boundary_delta: coarse_eps,
            },
            &mut scratch,
        )?;
    }
    Ok(())
}

/// Exact solution of the p = 2 problem; a single SPD solve.
fn linear_warm_start(
    dofs: &Arc<DofMap>,
    params: &SolveParams,
    geo: &P1Geometry,
    load: &LoadTerm,
) -> Result<Vec<f64>> {
    let p2 = SolveParams {
        p: 2.0,
        ..params.clone()
    };
    let zero = vec![0.0; dofs.free_count()];
    let (_, grad) = assembly::energy_and_gradient(&zero, dofs, &p2, geo, load, 0.0);
    let h = assembly::hessian(&zero, dofs, &p2, geo, 0.0, 0.0, 0.0);
    let rhs: Vec<f64> = grad.iter().map(|g| -g).collect();
    let (x, out) = pcg_jacobi(&h, &rhs, 1e-12, 40 * dofs.free_count().max(50));
    if !out.converged {
        return Err(Error::Convergence {
            residual: out.residual,
            message: "linear warm start did not converge".into(),
        });
    }
    Ok(x)
}

/// One continuation stage: the gradient regularization and, away from the
/// final stage, the boundary-trace smoothing.
#[derive(Clone, Copy)]
struct Stage {
    eps: f64,
    boundary_delta: f64,
}

fn newton_stage(
    values: &mut [f64],
    dofs: &Arc<DofMap>,
    params: &SolveParams,
    geo: &P1Geometry,
    load: &LoadTerm,
    stage: Stage,
    diagnostics: &mut SolveDiagnostics,
) -> Result<StageDiagnostics> {
    let Stage {
        eps,
        boundary_delta,
    } = stage;
    let n = dofs.free_count();
    let (mut energy, mut grad) = assembly::energy_and_gradient_smoothed(
        values,
        dofs,
        params,
        geo,
        load,
        eps,
        boundary_delta,
    );
    diagnostics.energy_trace.push(energy);
    let mut residual = linalg::norm2(&grad);
    let mut iterations = 0;
    while residual > params.newton_tol * (1.0 + energy.abs()) {
        if iterations >= params.max_newton_iters {
            return Err(Error::Convergence {
                residual,
                message: format!(
                    "Newton exceeded {} iterations at eps = {eps:.1e}",
                    params.max_newton_iters
                ),
            });
        }
        let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let trace_floor = if params.p < 2.0 {
            1e-8 * (1.0 + scale)
        } else {
            0.0
        };
        let h = assembly::hessian(values, dofs, params, geo, eps, boundary_delta, trace_floor);
        let rhs: Vec<f64> = grad.iter().map(|g| -g).collect();
        let (mut dir, _) = pcg_jacobi(&h, &rhs, 1e-10, 20 * n.max(50));
        if linalg::dot(&dir, &grad) >= 0.0 {
            // fall back to steepest descent if the step is not a descent
            // direction (truncated or numerically indefinite solve)
            dir = rhs.clone();
        }
        let slope = linalg::dot(&grad, &dir);
        let noise = 1e-14 * (1.0 + energy.abs());
        let mut trial = vec![0.0; n];
        if -slope <= noise {
            // predicted decrease below f64 rounding of the energy: the
            // Armijo test cannot measure it, take the full Newton step
            for i in 0..n {
                values[i] += dir[i];
            }
        } else {
            let mut alpha = 1.0;
            let mut accepted = false;
            for _ in 0..=params.line_search_max_steps {
                for i in 0..n {
                    trial[i] = values[i] + alpha * dir[i];
                }
                let e_trial = assembly::energy_only_smoothed(
                    &trial,
                    dofs,
                    params,
                    geo,
                    load,
                    eps,
                    boundary_delta,
                );
                if e_trial <= energy + ARMIJO_C1 * alpha * slope {
                    values.copy_from_slice(&trial);
                    accepted = true;
                    break;
                }
                alpha *= params.line_search_backtrack;
            }
            if !accepted {
                return Err(Error::Convergence {
                    residual,
                    message: format!("line search failed at eps = {eps:.1e}"),
                });
            }
        }
        let (e_new, g_new) = assembly::energy_and_gradient_smoothed(
            values,
            dofs,
            params,
            geo,
            load,
            eps,
            boundary_delta,
        );
        energy = e_new;
        grad = g_new;
        residual = linalg::norm2(&grad);
        diagnostics.energy_trace.push(energy);
        iterations += 1;
    }
    Ok(StageDiagnostics {
        epsilon: eps,
        newton_iterations: iterations,
        final_residual: residual,
        final_energy: energy,
    })
}
