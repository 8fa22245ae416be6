//! Assembly of the regularized Robin p-Dirichlet energy
//!
//!   F_eps(w) = (1/p) ∫ (eps^2 + |∇w|^2)^{p/2} dx
//!            + (beta/p) ∮ |w|^p dH^1  -  ∫ f w dx
//!
//! over P1 elements: the gradient is constant per triangle, the boundary
//! trace is integrated with 4-point Gauss-Legendre per edge (exact for
//! p <= 7 on linear traces), and the load uses the 3-point edge-midpoint
//! rule (exact for quadratics). At eps = 0 the value is the exact energy.
//!
//! Everything is assembled in the collapsed dof space, so hole constants are
//! ordinary unknowns and hole triangles contribute no gradient energy.

use super::{DofMap, Field, SolveParams, SourceSpec};
use crate::error::{Error, Result};
use crate::linalg::CsrMatrix;
use crate::quadrature::{GL4, TRI7};

/// Per-triangle areas and basis gradients, computed once per mesh and reused
/// across Newton iterations.
pub(crate) struct P1Geometry {
    pub area: Vec<f64>,
    pub grads: Vec<[[f64; 2]; 3]>,
}

impl P1Geometry {
    pub fn new(mesh: &crate::geometry::Mesh) -> P1Geometry {
        let nt = mesh.triangles.len();
        let mut area = Vec::with_capacity(nt);
        let mut grads = Vec::with_capacity(nt);
        for t in &mesh.triangles {
            let [a, b, c] = t.vertices;
            let pa = mesh.vertices[a];
            let pb = mesh.vertices[b];
            let pc = mesh.vertices[c];
            let two_a = (pb[0] - pa[0]) * (pc[1] - pa[1]) - (pc[0] - pa[0]) * (pb[1] - pa[1]);
            area.push(0.5 * two_a);
            grads.push([
                [(pb[1] - pc[1]) / two_a, (pc[0] - pb[0]) / two_a],
                [(pc[1] - pa[1]) / two_a, (pa[0] - pc[0]) / two_a],
                [(pa[1] - pb[1]) / two_a, (pb[0] - pa[0]) / two_a],
            ]);
        }
        P1Geometry { area, grads }
    }
}

/// Source term resolved to values at the three edge midpoints per triangle,
/// matching the load quadrature.
pub(crate) struct LoadTerm {
    pub midpoint_values: Vec<[f64; 3]>,
}

impl LoadTerm {
    pub fn from_source(mesh: &crate::geometry::Mesh, f: &SourceSpec) -> Result<LoadTerm> {
        f.validate(mesh)?;
        let geo_midpoints = |ti: usize, t: &crate::geometry::Triangle| {
            let [a, b, c] = t.vertices;
            let pa = mesh.vertices[a];
            let pb = mesh.vertices[b];
            let pc = mesh.vertices[c];
            [
                f.eval([0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])], ti),
                f.eval([0.5 * (pb[0] + pc[0]), 0.5 * (pb[1] + pc[1])], ti),
                f.eval([0.5 * (pc[0] + pa[0]), 0.5 * (pc[1] + pa[1])], ti),
            ]
        };
        Ok(LoadTerm {
            midpoint_values: mesh
                .triangles
                .iter()
                .enumerate()
                .map(|(ti, t)| geo_midpoints(ti, t))
                .collect(),
        })
    }

    /// Load g = scale * max(u, 0)^exponent for a nodal P1 field u, evaluated
    /// by interpolating u to the midpoints first. Used by the eigen solver.
    pub fn from_nodal_power(
        mesh: &crate::geometry::Mesh,
        nodal: &[f64],
        exponent: f64,
        scale: f64,
    ) -> LoadTerm {
        let vals = mesh
            .triangles
            .iter()
            .map(|t| {
                let [a, b, c] = t.vertices;
                let (ua, ub, uc) = (nodal[a], nodal[b], nodal[c]);
                [
                    scale * (0.5 * (ua + ub)).max(0.0).powf(exponent),
                    scale * (0.5 * (ub + uc)).max(0.0).powf(exponent),
                    scale * (0.5 * (uc + ua)).max(0.0).powf(exponent),
                ]
            })
            .collect();
        LoadTerm {
            midpoint_values: vals,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.midpoint_values
            .iter()
            .all(|m| m.iter().all(|&v| v == 0.0))
    }
}

fn triangle_gradient(
    values: &[f64],
    dofs: &DofMap,
    t: &crate::geometry::Triangle,
    grads: &[[f64; 2]; 3],
) -> [f64; 2] {
    let mut g = [0.0, 0.0];
    for (k, &v) in t.vertices.iter().enumerate() {
        let w = values[dofs.dof_of_vertex(v)];
        g[0] += w * grads[k][0];
        g[1] += w * grads[k][1];
    }
    g
}

/// Energy F_eps at the given regularization; `epsilon = 0` evaluates the
/// exact unregularized functional.
pub fn energy_value(
    field: &Field,
    params: &SolveParams,
    f: &SourceSpec,
    epsilon: f64,
) -> Result<f64> {
    params.validate()?;
    if epsilon < 0.0 {
        return Err(Error::parameter("epsilon must be nonnegative"));
    }
    let mesh = field.mesh();
    f.validate(mesh)?;
    let geo = P1Geometry::new(mesh);
    let load = LoadTerm::from_source(mesh, f)?;
    Ok(energy_only(
        field.dof_values(),
        field.dof_map(),
        params,
        &geo,
        &load,
        epsilon,
    ))
}

/// Gradient of the energy in dof space; the first-order-optimality residual
/// the solver drives to zero.
pub fn energy_gradient(
    field: &Field,
    params: &SolveParams,
    f: &SourceSpec,
    epsilon: f64,
) -> Result<Vec<f64>> {
    params.validate()?;
    if epsilon < 0.0 {
        return Err(Error::parameter("epsilon must be nonnegative"));
    }
    let mesh = field.mesh();
    f.validate(mesh)?;
    let geo = P1Geometry::new(mesh);
    let load = LoadTerm::from_source(mesh, f)?;
    let (_, grad) = energy_and_gradient(
        field.dof_values(),
        field.dof_map(),
        params,
        &geo,
        &load,
        epsilon,
    );
    Ok(grad)
}

pub(crate) fn energy_only(
    values: &[f64],
    dofs: &DofMap,
    params: &SolveParams,
    geo: &P1Geometry,
    load: &LoadTerm,
    eps: f64,
) -> f64 {
    energy_only_smoothed(values, dofs, params, geo, load, eps, 0.0)
}

/// Energy with the boundary trace smoothed as (delta^2 + w^2)^{p/2}; the
/// solver uses delta > 0 on continuation stages so the p < 2 boundary
/// curvature stays consistent between gradient and Hessian, and delta = 0 on
/// the final stage so the reported functional is exact.
pub(crate) fn energy_only_smoothed(
    values: &[f64],
    dofs: &DofMap,
    params: &SolveParams,
    geo: &P1Geometry,
    load: &LoadTerm,
    eps: f64,
    boundary_delta: f64,
) -> f64 {
    let mesh = dofs.mesh();
    let p = params.p;
    let eps2 = eps * eps;
    let mut energy = 0.0;
    for (ti, t) in mesh.triangles.iter().enumerate() {
        let g = triangle_gradient(values, dofs, t, &geo.grads[ti]);
        let g2 = g[0] * g[0] + g[1] * g[1];
        energy += geo.area[ti] / p * (eps2 + g2).powf(0.5 * p);
        // load: 3-point midpoint rule
        let [a, b, c] = t.vertices;
        let wa = values[dofs.dof_of_vertex(a)];
        let wb = values[dofs.dof_of_vertex(b)];
        let wc = values[dofs.dof_of_vertex(c)];
        let fm = load.midpoint_values[ti];
        energy -= geo.area[ti] / 3.0
            * (fm[0] * 0.5 * (wa + wb) + fm[1] * 0.5 * (wb + wc) + fm[2] * 0.5 * (wc + wa));
    }
    let d2 = boundary_delta * boundary_delta;
    for e in mesh.boundary_edges.iter().filter(|e| e.tag == 0) {
        let len = mesh.edge_length(e);
        let wa = values[dofs.dof_of_vertex(e.vertices[0])];
        let wb = values[dofs.dof_of_vertex(e.vertices[1])];
        let mut acc = 0.0;
        for &(x, w) in GL4.iter() {
            let s = 0.5 * (1.0 + x);
            let val = wa * (1.0 - s) + wb * s;
            acc += w * (d2 + val * val).powf(0.5 * p);
        }
        energy += params.beta / p * 0.5 * len * acc;
    }
    energy
}

pub(crate) fn energy_and_gradient(
    values: &[f64],
    dofs: &DofMap,
    params: &SolveParams,
    geo: &P1Geometry,
    load: &LoadTerm,
    eps: f64,
) -> (f64, Vec<f64>) {
    energy_and_gradient_smoothed(values, dofs, params, geo, load, eps, 0.0)
}

pub(crate) fn energy_and_gradient_smoothed(
    values: &[f64],
    dofs: &DofMap,
    params: &SolveParams,
    geo: &P1Geometry,
    load: &LoadTerm,
    eps: f64,
    boundary_delta: f64,
) -> (f64, Vec<f64>) {
    let mesh = dofs.mesh();
    let p = params.p;
    let eps2 = eps * eps;
    let mut energy = 0.0;
    let mut grad = vec![0.0; dofs.free_count()];
    for (ti, t) in mesh.triangles.iter().enumerate() {
        let a = geo.area[ti];
        let g = triangle_gradient(values, dofs, t, &geo.grads[ti]);
        let g2 = g[0] * g[0] + g[1] * g[1];
        let s2 = eps2 + g2;
        // powf(0, negative) is inf; the limit of sigma * g is 0 for p > 1
        let mut sigma = s2.powf(0.5 * p - 1.0);
        if !sigma.is_finite() {
            sigma = 0.0;
        }
        energy += a / p * s2.powf(0.5 * p);
        for (k, &v) in t.vertices.iter().enumerate() {
            let dk = dofs.dof_of_vertex(v);
            grad[dk] += a * sigma * (g[0] * geo.grads[ti][k][0] + g[1] * geo.grads[ti][k][1]);
        }
        let [va, vb, vc] = t.vertices;
        let (da, db, dc) = (
            dofs.dof_of_vertex(va),
            dofs.dof_of_vertex(vb),
            dofs.dof_of_vertex(vc),
        );
        let fm = load.midpoint_values[ti];
        let (wa, wb, wc) = (values[da], values[db], values[dc]);
        energy -=
            a / 3.0 * (fm[0] * 0.5 * (wa + wb) + fm[1] * 0.5 * (wb + wc) + fm[2] * 0.5 * (wc + wa));
        grad[da] -= a / 6.0 * (fm[0] + fm[2]);
        grad[db] -= a / 6.0 * (fm[0] + fm[1]);
        grad[dc] -= a / 6.0 * (fm[1] + fm[2]);
    }
    let d2 = boundary_delta * boundary_delta;
    for e in mesh.boundary_edges.iter().filter(|e| e.tag == 0) {
        let len = mesh.edge_length(e);
        let da = dofs.dof_of_vertex(e.vertices[0]);
        let db = dofs.dof_of_vertex(e.vertices[1]);
        let (wa, wb) = (values[da], values[db]);
        let mut e_acc = 0.0;
        let mut ga = 0.0;
        let mut gb = 0.0;
        for &(x, w) in GL4.iter() {
            let s = 0.5 * (1.0 + x);
            let val = wa * (1.0 - s) + wb * s;
            let v2 = d2 + val * val;
            e_acc += w * v2.powf(0.5 * p);
            let dphi = v2.powf(0.5 * p - 1.0) * val;
            ga += w * dphi * (1.0 - s);
            gb += w * dphi * s;
        }
        let half_len = 0.5 * len;
        energy += params.beta / p * half_len * e_acc;
        grad[da] += params.beta * half_len * ga;
        grad[db] += params.beta * half_len * gb;
    }
    (energy, grad)
}

/// Hessian of the regularized energy, consistent with the smoothed boundary
/// term. With `boundary_delta = 0` and p < 2 the boundary weight |w|^{p-2}
/// blows up near zero traces; `trace_floor` clamps it below so the matrix
/// stays SPD (the damped step only needs a descent model there).
pub(crate) fn hessian(
    values: &[f64],
    dofs: &DofMap,
    params: &SolveParams,
    geo: &P1Geometry,
    eps: f64,
    boundary_delta: f64,
    trace_floor: f64,
) -> CsrMatrix {
    let mesh = dofs.mesh();
    let p = params.p;
    let eps2 = eps * eps;
    let mut triplets: Vec<(usize, usize, f64)> = Vec::with_capacity(mesh.triangles.len() * 9);
    for (ti, t) in mesh.triangles.iter().enumerate() {
        let a = geo.area[ti];
        let g = triangle_gradient(values, dofs, t, &geo.grads[ti]);
        let g2 = g[0] * g[0] + g[1] * g[1];
        let s2 = eps2 + g2;
        // sanitize the degenerate s2 = 0 limits: sigma -> {1, 0} for p {=, >} 2
        // and the rank-one term always vanishes with g
        let mut sigma = s2.powf(0.5 * p - 1.0);
        if !sigma.is_finite() {
            sigma = 0.0;
        }
        let mut dsigma = (p - 2.0) * s2.powf(0.5 * p - 2.0);
        if !dsigma.is_finite() {
            dsigma = 0.0;
        }
        let local_dofs = [
            dofs.dof_of_vertex(t.vertices[0]),
            dofs.dof_of_vertex(t.vertices[1]),
            dofs.dof_of_vertex(t.vertices[2]),
        ];
        let gdot = [
            g[0] * geo.grads[ti][0][0] + g[1] * geo.grads[ti][0][1],
            g[0] * geo.grads[ti][1][0] + g[1] * geo.grads[ti][1][1],
            g[0] * geo.grads[ti][2][0] + g[1] * geo.grads[ti][2][1],
        ];
        for i in 0..3 {
            for j in 0..3 {
                let lap = geo.grads[ti][i][0] * geo.grads[ti][j][0]
                    + geo.grads[ti][i][1] * geo.grads[ti][j][1];
                let h = a * (sigma * lap + dsigma * gdot[i] * gdot[j]);
                triplets.push((local_dofs[i], local_dofs[j], h));
            }
        }
    }
    let d2 = boundary_delta * boundary_delta;
    for e in mesh.boundary_edges.iter().filter(|e| e.tag == 0) {
        let len = mesh.edge_length(e);
        let da = dofs.dof_of_vertex(e.vertices[0]);
        let db = dofs.dof_of_vertex(e.vertices[1]);
        let (wa, wb) = (values[da], values[db]);
        let mut h = [[0.0f64; 2]; 2];
        for &(x, w) in GL4.iter() {
            let s = 0.5 * (1.0 + x);
            let val = wa * (1.0 - s) + wb * s;
            let weight = if boundary_delta > 0.0 {
                // exact second derivative of (d^2 + w^2)^{p/2} / p
                let v2 = d2 + val * val;
                v2.powf(0.5 * p - 1.0) + (p - 2.0) * v2.powf(0.5 * p - 2.0) * val * val
            } else {
                (p - 1.0) * val.abs().max(trace_floor).powf(p - 2.0)
            };
            let phi = [1.0 - s, s];
            for i in 0..2 {
                for j in 0..2 {
                    h[i][j] += w * weight * phi[i] * phi[j];
                }
            }
        }
        let coeff = params.beta * 0.5 * len;
        let dd = [da, db];
        for i in 0..2 {
            for j in 0..2 {
                triplets.push((dd[i], dd[j], coeff * h[i][j]));
            }
        }
    }
    CsrMatrix::from_triplets(dofs.free_count(), triplets)
}

/// ∫ |∇u|^p dx + beta ∮ |u|^p dH^1 at eps = 0 (degree-5 rule for the
/// interior p-power is irrelevant here: |∇u| is constant per triangle).
pub(crate) fn dirichlet_energy_terms(field: &Field, params: &SolveParams) -> f64 {
    let mesh = field.mesh();
    let dofs = field.dof_map();
    let geo = P1Geometry::new(mesh);
    let p = params.p;
    let values = field.dof_values();
    let mut acc = 0.0;
    for (ti, t) in mesh.triangles.iter().enumerate() {
        let g = triangle_gradient(values, dofs, t, &geo.grads[ti]);
        let g2 = g[0] * g[0] + g[1] * g[1];
        acc += geo.area[ti] * g2.powf(0.5 * p);
    }
    for e in mesh.boundary_edges.iter().filter(|e| e.tag == 0) {
        let len = mesh.edge_length(e);
        let wa = values[dofs.dof_of_vertex(e.vertices[0])];
        let wb = values[dofs.dof_of_vertex(e.vertices[1])];
        let mut b_acc = 0.0;
        for &(x, w) in GL4.iter() {
            let s = 0.5 * (1.0 + x);
            let val = wa * (1.0 - s) + wb * s;
            b_acc += w * val.abs().powf(p);
        }
        acc += params.beta * 0.5 * len * b_acc;
    }
    acc
}

/// ∫ |u|^p dx over the whole domain with the degree-5 triangle rule
/// (interpolate first, then take the power).
pub(crate) fn lp_mass(field: &Field, p: f64) -> f64 {
    let mesh = field.mesh();
    let mut acc = 0.0;
    for t in &mesh.triangles {
        let a = mesh.signed_area(t);
        let vals = [
            field.vertex_value(t.vertices[0]),
            field.vertex_value(t.vertices[1]),
            field.vertex_value(t.vertices[2]),
        ];
        let mut tri_acc = 0.0;
        for &(bary, w) in TRI7.iter() {
            let u = bary[0] * vals[0] + bary[1] * vals[1] + bary[2] * vals[2];
            tri_acc += w * u.abs().powf(p);
        }
        acc += a * tri_acc;
    }
    acc
}

/// Variationally consistent hole flux: the bulk-triangle part of the energy
/// gradient paired with the indicator of the hole dof, versus the source
/// mass over the hole. Their difference is exactly the gradient entry of the
/// hole dof.
pub(crate) fn hole_flux_pairing(
    field: &Field,
    params: &SolveParams,
    geo: &P1Geometry,
    load: &LoadTerm,
    hole: usize,
    eps: f64,
) -> (f64, f64) {
    let mesh = field.mesh();
    let dofs = field.dof_map();
    let values = field.dof_values();
    let hole_dof = dofs.hole_dofs()[hole];
    let region = hole + 1;
    let p = params.p;
    let eps2 = eps * eps;
    let mut flux = 0.0;
    let mut source = 0.0;
    for (ti, t) in mesh.triangles.iter().enumerate() {
        let a = geo.area[ti];
        let fm = load.midpoint_values[ti];
        if t.region == region {
            source += a / 3.0 * (fm[0] + fm[1] + fm[2]);
            continue;
        }
        if t.region != 0 {
            continue;
        }
        let hat = [
            (dofs.dof_of_vertex(t.vertices[0]) == hole_dof) as usize as f64,
            (dofs.dof_of_vertex(t.vertices[1]) == hole_dof) as usize as f64,
            (dofs.dof_of_vertex(t.vertices[2]) == hole_dof) as usize as f64,
        ];
        if hat == [0.0, 0.0, 0.0] {
            continue;
        }
        let g = triangle_gradient(values, dofs, t, &geo.grads[ti]);
        let g2 = g[0] * g[0] + g[1] * g[1];
        let sigma = (eps2 + g2).powf(0.5 * p - 1.0);
        let mut hat_grad = [0.0, 0.0];
        for (h, grad) in hat.iter().zip(&geo.grads[ti]) {
            hat_grad[0] += h * grad[0];
            hat_grad[1] += h * grad[1];
        }
        flux += a * sigma * (g[0] * hat_grad[0] + g[1] * hat_grad[1]);
        // subtract the load picked up by the decaying part of the hat field
        flux -= a / 3.0
            * (fm[0] * 0.5 * (hat[0] + hat[1])
                + fm[1] * 0.5 * (hat[1] + hat[2])
                + fm[2] * 0.5 * (hat[2] + hat[0]));
    }
    (flux, source)
}
