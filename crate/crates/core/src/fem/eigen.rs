//! First Robin p-eigenpair over the constrained space by inverse-power
//! (Picard) iteration: each step minimizes the state energy with source
//! lambda_k u_k^{p-1}, renormalizes in L^p, and updates lambda from the
//! Rayleigh quotient. Fixed points are eigenfunctions; the quotient is
//! monitored for monotone decrease.

use std::sync::Arc;

use super::assembly::{self, LoadTerm, P1Geometry};
use super::solver::{solve_with_load, SolveDiagnostics};
use super::{build_dof_map, Field, SolveParams};
use crate::error::{Error, Result};
use crate::geometry::Mesh;

const MAX_PICARD_ITERS: usize = 300;

#[derive(Debug, Clone)]
pub struct EigenSolution {
    pub lambda: f64,
    /// Eigenfunction with unit L^p norm over the whole domain.
    pub field: Field,
    /// Rayleigh quotient after each Picard step.
    pub lambda_trace: Vec<f64>,
    pub picard_iterations: usize,
    pub last_state_diagnostics: SolveDiagnostics,
}

fn rayleigh_quotient(field: &Field, params: &SolveParams) -> f64 {
    assembly::dirichlet_energy_terms(field, params) / assembly::lp_mass(field, params.p)
}

fn normalize_lp(field: &Field, p: f64) -> Result<Field> {
    let mass = assembly::lp_mass(field, p);
    if !(mass > 0.0) {
        return Err(Error::Diagnostic("eigen iterate has zero L^p mass".into()));
    }
    let norm = mass.powf(1.0 / p);
    let values = field.dof_values().iter().map(|v| v / norm).collect();
    Field::from_dof_values(field.dof_map(), values)
}

/// Minimizes the Rayleigh quotient R(phi) = (∫|∇phi|^p + beta ∮ phi^p) / ∫ phi^p
/// over the hole-constant space; returns the smallest eigenvalue and a
/// nonnegative normalized eigenfunction.
pub fn solve_eigen(
    mesh: &Arc<Mesh>,
    params: &SolveParams,
    seed: Option<&Field>,
) -> Result<EigenSolution> {
    params.validate()?;
    let dofs = Arc::new(build_dof_map(mesh)?);
    let geo = P1Geometry::new(mesh);

    let mut u = match seed {
        Some(s) => {
            if !Arc::ptr_eq(s.mesh(), mesh) && s.mesh().as_ref() != mesh.as_ref() {
                return Err(Error::contract("seed field lives on a different mesh"));
            }
            let vals: Vec<f64> = s.dof_values().iter().map(|v| v.abs()).collect();
            Field::from_dof_values(&dofs, vals)?
        }
        None => Field::constant(&dofs, 1.0),
    };
    u = normalize_lp(&u, params.p)?;
    let mut lambda = rayleigh_quotient(&u, params);
    let mut lambda_trace = vec![lambda];
    let mut oscillations = 0usize;

    for iter in 0..MAX_PICARD_ITERS {
        let load = LoadTerm::from_nodal_power(mesh, &u.nodal_values(), params.p - 1.0, lambda);
        // full continuation on the first solve, final regularization afterwards
        let schedule: &[f64] = if iter == 0 {
            &params.epsilon_schedule
        } else {
            std::slice::from_ref(params.epsilon_schedule.last().unwrap())
        };
        let sol = solve_with_load(&dofs, params, &geo, &load, Some(u.dof_values()), schedule)?;
        let last_diag = sol.diagnostics;
        let next = normalize_lp(&sol.field, params.p)?;
        let lambda_next = rayleigh_quotient(&next, params);
        if lambda_next > lambda * (1.0 + 1e-9) {
            oscillations += 1;
            if oscillations > 3 {
                return Err(Error::Diagnostic(format!(
                    "Rayleigh quotient oscillates: {lambda:.12e} -> {lambda_next:.12e}"
                )));
            }
        }
        let done = (lambda_next - lambda).abs() <= params.newton_tol * lambda.abs();
        u = next;
        lambda = lambda_next;
        lambda_trace.push(lambda);
        if done {
            return Ok(EigenSolution {
                lambda,
                field: u,
                lambda_trace,
                picard_iterations: iter + 1,
                last_state_diagnostics: last_diag,
            });
        }
    }
    Err(Error::Convergence {
        residual: (lambda_trace[lambda_trace.len() - 1] - lambda_trace[lambda_trace.len() - 2])
            .abs(),
        message: format!("eigen iteration exceeded {MAX_PICARD_ITERS} Picard steps"),
    })
}
