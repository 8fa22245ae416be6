//! P1 finite elements for the Robin p-Dirichlet energy on the constrained
//! space of fields that are constant on each hole.
//!
//! The constraint is realized structurally: every vertex touching a hole
//! (interface ring included) maps to a single shared degree of freedom, so a
//! field is constant on hole closures by construction and its gradient
//! vanishes on hole triangles identically.

mod assembly;
mod eigen;
mod solver;

pub use assembly::{energy_gradient, energy_value};
pub use eigen::{solve_eigen, EigenSolution};
pub use solver::{solve_state, SolveDiagnostics, StageDiagnostics, StateSolution};

#[cfg(test)]
pub(crate) use assembly::lp_mass;
pub(crate) use assembly::{LoadTerm, P1Geometry};

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::Mesh;

/// Maps vertices to degrees of freedom, collapsing each hole closure onto a
/// single shared dof.
#[derive(Debug, Clone)]
pub struct DofMap {
    mesh: Arc<Mesh>,
    node_to_dof: Vec<usize>,
    hole_dofs: Vec<usize>,
    free_count: usize,
}

/// Builds the dof map for a mesh: free vertices take dofs 0.. in vertex
/// order, followed by one dof per hole.
pub fn build_dof_map(mesh: &Arc<Mesh>) -> Result<DofMap> {
    let m = mesh.hole_count;
    let nv = mesh.vertices.len();
    // vertex -> hole region (usize::MAX when free)
    let mut owner = vec![usize::MAX; nv];
    for r in 1..=m {
        let vs = mesh.hole_vertices(r);
        if vs.is_empty() {
            return Err(Error::validation(format!(
                "hole region {r} has no triangles"
            )));
        }
        for v in vs {
            if owner[v] != usize::MAX && owner[v] != r {
                return Err(Error::validation(format!(
                    "vertex {v} belongs to holes {} and {r}",
                    owner[v]
                )));
            }
            owner[v] = r;
        }
    }
    let mut node_to_dof = vec![usize::MAX; nv];
    let mut next = 0usize;
    for v in 0..nv {
        if owner[v] == usize::MAX {
            node_to_dof[v] = next;
            next += 1;
        }
    }
    let mut hole_dofs = Vec::with_capacity(m);
    for r in 1..=m {
        let dof = next;
        next += 1;
        hole_dofs.push(dof);
        for v in 0..nv {
            if owner[v] == r {
                node_to_dof[v] = dof;
            }
        }
    }
    Ok(DofMap {
        mesh: Arc::clone(mesh),
        node_to_dof,
        hole_dofs,
        free_count: next,
    })
}

impl DofMap {
    pub fn mesh(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    pub fn free_count(&self) -> usize {
        self.free_count
    }

    pub fn dof_of_vertex(&self, v: usize) -> usize {
        self.node_to_dof[v]
    }

    pub fn hole_dofs(&self) -> &[usize] {
        &self.hole_dofs
    }

    pub fn hole_count(&self) -> usize {
        self.hole_dofs.len()
    }
}

/// Finite-element field over a [`DofMap`]; nodal values are views through
/// the dof collapse, so the constant-on-holes invariant holds by
/// construction. Fields are immutable snapshots.
#[derive(Debug, Clone)]
pub struct Field {
    dofs: Arc<DofMap>,
    values: Vec<f64>,
}

impl Field {
    pub fn zeros(dofs: &Arc<DofMap>) -> Field {
        Field {
            dofs: Arc::clone(dofs),
            values: vec![0.0; dofs.free_count],
        }
    }

    pub fn constant(dofs: &Arc<DofMap>, value: f64) -> Field {
        Field {
            dofs: Arc::clone(dofs),
            values: vec![value; dofs.free_count],
        }
    }

    pub fn from_dof_values(dofs: &Arc<DofMap>, values: Vec<f64>) -> Result<Field> {
        if values.len() != dofs.free_count {
            return Err(Error::contract(format!(
                "dof vector has length {}, expected {}",
                values.len(),
                dofs.free_count
            )));
        }
        Ok(Field {
            dofs: Arc::clone(dofs),
            values,
        })
    }

    pub fn dof_map(&self) -> &Arc<DofMap> {
        &self.dofs
    }

    pub fn mesh(&self) -> &Arc<Mesh> {
        &self.dofs.mesh
    }

    pub fn dof_values(&self) -> &[f64] {
        &self.values
    }

    pub fn vertex_value(&self, v: usize) -> f64 {
        self.values[self.dofs.node_to_dof[v]]
    }

    pub fn nodal_values(&self) -> Vec<f64> {
        self.dofs
            .node_to_dof
            .iter()
            .map(|&d| self.values[d])
            .collect()
    }

    /// The shared constant of hole `i` (0-based).
    pub fn hole_constant(&self, i: usize) -> f64 {
        self.values[self.dofs.hole_dofs[i]]
    }

    pub fn hole_constants(&self) -> Vec<f64> {
        self.dofs
            .hole_dofs
            .iter()
            .map(|&d| self.values[d])
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().fold(f64::INFINITY, |m, &v| m.min(v))
    }

    /// Minimum of the trace on the exterior (tag 0) boundary.
    pub fn min_on_exterior_boundary(&self) -> f64 {
        let mesh = self.mesh();
        let mut min = f64::INFINITY;
        for e in mesh.boundary_edges.iter().filter(|e| e.tag == 0) {
            for &v in &e.vertices {
                min = min.min(self.vertex_value(v));
            }
        }
        min
    }
}

/// Parameters of the state solver.
#[derive(Debug, Clone)]
pub struct SolveParams {
    pub p: f64,
    pub beta: f64,
    /// Strictly decreasing continuation schedule; the last entry is the
    /// regularization used for every reported quantity.
    pub epsilon_schedule: Vec<f64>,
    pub newton_tol: f64,
    pub max_newton_iters: usize,
    pub line_search_backtrack: f64,
    pub line_search_max_steps: usize,
}

impl SolveParams {
    pub fn new(p: f64, beta: f64) -> SolveParams {
        SolveParams {
            p,
            beta,
            epsilon_schedule: vec![1e-1, 1e-2, 1e-3, 1e-4],
            newton_tol: 1e-9,
            max_newton_iters: 100,
            line_search_backtrack: 0.5,
            line_search_max_steps: 30,
        }
    }

    pub fn epsilon_min(&self) -> f64 {
        *self.epsilon_schedule.last().unwrap_or(&0.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p > 1.0 && self.p <= 10.0) {
            return Err(Error::parameter(format!(
                "exponent p must lie in (1, 10], got {}",
                self.p
            )));
        }
        if !(self.beta > 0.0) {
            return Err(Error::parameter("Robin parameter beta must be positive"));
        }
        if self.epsilon_schedule.is_empty() {
            return Err(Error::parameter("epsilon schedule must be nonempty"));
        }
        let mut prev = f64::INFINITY;
        for &e in &self.epsilon_schedule {
            if !(e > 0.0 && e < prev) {
                return Err(Error::parameter(
                    "epsilon schedule must be strictly decreasing and positive",
                ));
            }
            prev = e;
        }
        if !(self.newton_tol > 0.0) {
            return Err(Error::parameter("newton_tol must be positive"));
        }
        if !(self.line_search_backtrack > 0.0 && self.line_search_backtrack < 1.0) {
            return Err(Error::parameter(
                "line search backtrack factor must be in (0, 1)",
            ));
        }
        Ok(())
    }
}

/// Nonnegative source term f.
#[derive(Debug, Clone)]
pub enum SourceSpec {
    Constant(f64),
    /// Radial profile g(|x - center|): linear interpolation of a table of
    /// (radius, value) pairs, clamped at the ends.
    RadialProfile {
        center: [f64; 2],
        table: Vec<(f64, f64)>,
    },
    /// One value per triangle.
    PerTriangle(Vec<f64>),
}

impl SourceSpec {
    pub fn unit() -> SourceSpec {
        SourceSpec::Constant(1.0)
    }

    pub fn is_unit(&self) -> bool {
        matches!(self, SourceSpec::Constant(v) if *v == 1.0)
    }

    pub fn is_zero(&self) -> bool {
        match self {
            SourceSpec::Constant(v) => *v == 0.0,
            SourceSpec::RadialProfile { table, .. } => table.iter().all(|&(_, g)| g == 0.0),
            SourceSpec::PerTriangle(vals) => vals.iter().all(|&v| v == 0.0),
        }
    }

    pub fn validate(&self, mesh: &Mesh) -> Result<()> {
        match self {
            SourceSpec::Constant(v) => {
                if *v < 0.0 {
                    return Err(Error::parameter("source must be nonnegative"));
                }
            }
            SourceSpec::RadialProfile { table, .. } => {
                if table.is_empty() {
                    return Err(Error::parameter("radial source table is empty"));
                }
                let mut prev = f64::NEG_INFINITY;
                for &(r, g) in table {
                    if r <= prev {
                        return Err(Error::parameter("radial source radii must increase"));
                    }
                    if g < 0.0 {
                        return Err(Error::parameter("source must be nonnegative"));
                    }
                    prev = r;
                }
            }
            SourceSpec::PerTriangle(vals) => {
                if vals.len() != mesh.triangles.len() {
                    return Err(Error::contract(format!(
                        "per-triangle source has {} entries for {} triangles",
                        vals.len(),
                        mesh.triangles.len()
                    )));
                }
                if vals.iter().any(|&v| v < 0.0) {
                    return Err(Error::parameter("source must be nonnegative"));
                }
            }
        }
        Ok(())
    }

    /// Point evaluation; `triangle` disambiguates the per-triangle case.
    pub fn eval(&self, x: [f64; 2], triangle: usize) -> f64 {
        match self {
            SourceSpec::Constant(v) => *v,
            SourceSpec::RadialProfile { center, table } => {
                let r = ((x[0] - center[0]).powi(2) + (x[1] - center[1]).powi(2)).sqrt();
                if r <= table[0].0 {
                    return table[0].1;
                }
                if r >= table[table.len() - 1].0 {
                    return table[table.len() - 1].1;
                }
                let j = table.partition_point(|&(rt, _)| rt <= r) - 1;
                let (r0, g0) = table[j];
                let (r1, g1) = table[j + 1];
                g0 + (g1 - g0) * (r - r0) / (r1 - r0)
            }
            SourceSpec::PerTriangle(vals) => vals[triangle],
        }
    }
}

/// Torsion functional of a converged state solution for the unit source:
/// the L1 norm of the constant extension, by per-triangle linear quadrature.
pub fn torsion(field: &Field) -> f64 {
    let mesh = field.mesh();
    let mut acc = 0.0;
    for t in &mesh.triangles {
        let a = mesh.signed_area(t);
        let s: f64 = t.vertices.iter().map(|&v| field.vertex_value(v)).sum();
        acc += a * s / 3.0;
    }
    acc
}

/// The Rayleigh-type quotient (∫u)^p / (∫|∇u|^p + β ∮ u^p) evaluated at the
/// field. At a converged unit-source state this equals (∫u)^{p-1}; the
/// discrepancy with [`torsion`] away from p = 2 is intentional.
pub fn torsion_rayleigh_quotient(field: &Field, params: &SolveParams) -> f64 {
    let l1 = torsion(field);
    let denom = assembly::dirichlet_energy_terms(field, params);
    l1.powf(params.p) / denom
}

/// Discrete interface flux of hole `hole` paired against the hole's
/// indicator dof, together with the source mass over the hole.
///
/// At first-order optimality the two agree at residual level: the energy
/// gradient entry of the hole dof is exactly `flux - source`.
pub fn hole_flux(
    field: &Field,
    params: &SolveParams,
    f: &SourceSpec,
    hole: usize,
) -> Result<(f64, f64)> {
    params.validate()?;
    let mesh = field.mesh();
    f.validate(mesh)?;
    if hole >= field.dof_map().hole_count() {
        return Err(Error::parameter(format!(
            "hole index {hole} out of range ({} holes)",
            field.dof_map().hole_count()
        )));
    }
    let geo = P1Geometry::new(mesh);
    let load = LoadTerm::from_source(mesh, f)?;
    Ok(assembly::hole_flux_pairing(
        field,
        params,
        &geo,
        &load,
        hole,
        params.epsilon_min(),
    ))
}
