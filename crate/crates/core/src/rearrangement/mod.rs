//! Exact distribution functions, rearrangements, and Lorentz quasi-norms of
//! nonnegative P1 fields.
//!
//! For a piecewise-linear field the super-level-set area of a single triangle
//! with sorted vertex values v1 <= v2 <= v3 and area A is
//!
//!   A                                     for t <  v1
//!   A (1 - (t - v1)^2 / ((v2-v1)(v3-v1))) for t in [v1, v2)
//!   A (v3 - t)^2 / ((v3-v1)(v3-v2))       for t in [v2, v3)
//!   0                                     for t >= v3
//!
//! so the global mu(t) = |{u > t}| is piecewise quadratic with breakpoints at
//! the distinct nodal values. Triangles with all three values equal (the hole
//! plateaus) contribute pure step jumps, which is why mu drops by at least the
//! hole area at each hole constant.
//!
//! Pieces are stored in the *local* variable tau = t - t_j of their interval.
//! In that variable every coefficient is bounded by the triangle areas even
//! when two nodal values are only a few ulps apart, whereas the expanded
//! global coefficients can grow like A / (v2 - v1) and destroy precision.

use crate::error::{Error, Result};
use crate::fem::Field;
use crate::quadrature::{gl16_integrate, GL16};

/// Right-continuous, non-increasing distribution function mu(t) of a
/// nonnegative field, exact for P1 data.
#[derive(Debug, Clone)]
pub struct DistributionFunction {
    /// t_0 = 0 < t_1 < ... < t_M = max value.
    breakpoints: Vec<f64>,
    /// Piece j covers [t_j, t_{j+1}) with mu(t_j + tau) = a tau^2 + b tau + c.
    pieces: Vec<QuadPiece>,
    /// Measure of the whole domain (mu(0) can be smaller if u vanishes on a
    /// set of positive measure).
    total_mass: f64,
    max_value: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct QuadPiece {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl QuadPiece {
    fn eval(&self, tau: f64) -> f64 {
        (self.a * tau + self.b) * tau + self.c
    }

    fn derivative(&self, tau: f64) -> f64 {
        2.0 * self.a * tau + self.b
    }
}

impl DistributionFunction {
    pub(crate) fn from_parts(
        breakpoints: Vec<f64>,
        pieces: Vec<QuadPiece>,
        total_mass: f64,
    ) -> DistributionFunction {
        debug_assert_eq!(pieces.len() + 1, breakpoints.len().max(1));
        let max_value = *breakpoints.last().unwrap_or(&0.0);
        DistributionFunction {
            breakpoints,
            pieces,
            total_mass,
            max_value,
        }
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[QuadPiece] {
        &self.pieces
    }

    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    pub fn max_value(&self) -> f64 {
        self.max_value
    }

    /// Index of the piece containing t, or None when t >= max value.
    fn piece_index(&self, t: f64) -> Option<usize> {
        if self.pieces.is_empty() || t >= self.max_value {
            return None;
        }
        // partition_point returns the first breakpoint > t; piece index is one less
        let j = self.breakpoints.partition_point(|&b| b <= t);
        Some(j.saturating_sub(1).min(self.pieces.len() - 1))
    }

    /// mu(t), right-continuous; defined for t >= 0 and zero beyond the max.
    pub fn evaluate(&self, t: f64) -> f64 {
        debug_assert!(t >= 0.0);
        match self.piece_index(t) {
            Some(j) => self.pieces[j].eval(t - self.breakpoints[j]),
            None => 0.0,
        }
    }

    /// Analytic mu'(t) inside the piece containing t (a.e. derivative).
    pub fn derivative(&self, t: f64) -> f64 {
        match self.piece_index(t) {
            Some(j) => self.pieces[j].derivative(t - self.breakpoints[j]),
            None => 0.0,
        }
    }

    /// ∫_0^∞ mu(t) dt, exact per piece (Cavalieri: equals ∫ u dx).
    pub fn integral(&self) -> f64 {
        let mut acc = 0.0;
        for (j, piece) in self.pieces.iter().enumerate() {
            let h = self.breakpoints[j + 1] - self.breakpoints[j];
            acc += ((piece.a * h / 3.0 + piece.b / 2.0) * h + piece.c) * h;
        }
        acc
    }

    /// ∫_0^∞ t^{q-1} mu(t)^{q/p} dt by 16-point Gauss-Legendre per piece;
    /// the Lorentz building block.
    fn lorentz_integral(&self, p: f64, q: f64) -> f64 {
        let mut acc = 0.0;
        for (j, piece) in self.pieces.iter().enumerate() {
            let t0 = self.breakpoints[j];
            let t1 = self.breakpoints[j + 1];
            if q < 1.0 && t0 == 0.0 {
                // integrable singularity of t^{q-1}: substitute t = y^{1/q}
                let y1 = t1.powf(q);
                acc += gl16_integrate(0.0, y1, |y| {
                    let t = y.powf(1.0 / q);
                    piece.eval(t - t0).max(0.0).powf(q / p) / q
                });
            } else {
                acc += gl16_integrate(t0, t1, |t| {
                    t.powf(q - 1.0) * piece.eval(t - t0).max(0.0).powf(q / p)
                });
            }
        }
        acc
    }

    /// Values of mu at both sides of every breakpoint, descending; used to
    /// split the quantile axis into smooth segments.
    #[cfg(test)]
    pub(crate) fn mass_breakpoints(&self) -> Vec<f64> {
        let mut masses = vec![0.0];
        for (j, piece) in self.pieces.iter().enumerate() {
            let h = self.breakpoints[j + 1] - self.breakpoints[j];
            masses.push(piece.eval(0.0));
            masses.push(piece.eval(h));
        }
        masses.push(self.total_mass);
        masses.sort_by(|a, b| a.partial_cmp(b).unwrap());
        masses.dedup_by(|a, b| (*a - *b).abs() <= f64::EPSILON * self.total_mass.max(1.0));
        masses
    }
}

/// Exact distribution function of a nonnegative P1 field.
pub fn distribution_function_p1(field: &Field) -> Result<DistributionFunction> {
    let mesh = field.mesh();
    let mut nodal = field.nodal_values();
    let scale = nodal.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for v in nodal.iter_mut() {
        if *v < 0.0 {
            if *v < -1e-12 * scale.max(1.0) {
                return Err(Error::contract(format!(
                    "distribution function requires a nonnegative field, found {v:.3e}"
                )));
            }
            *v = 0.0;
        }
    }

    let mut breakpoints: Vec<f64> = nodal.clone();
    breakpoints.push(0.0);
    breakpoints.sort_by(|a, b| a.partial_cmp(b).unwrap());
    breakpoints.dedup();
    let m = breakpoints.len() - 1;

    let idx = |v: f64| -> usize {
        breakpoints
            .binary_search_by(|probe| probe.partial_cmp(&v).unwrap())
            .expect("nodal value must be a breakpoint")
    };

    let mut a = vec![0.0f64; m.max(1)];
    let mut b = vec![0.0f64; m.max(1)];
    let mut c = vec![0.0f64; m.max(1)];
    // constant contributions (mu = A below v1) via a difference array
    let mut c_diff = vec![0.0f64; m + 2];
    let mut total_mass = 0.0;

    for t in &mesh.triangles {
        let area = mesh.signed_area(t);
        total_mass += area;
        let mut v = [
            nodal[t.vertices[0]],
            nodal[t.vertices[1]],
            nodal[t.vertices[2]],
        ];
        v.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let (v1, v2, v3) = (v[0], v[1], v[2]);
        let i1 = idx(v1);
        c_diff[0] += area;
        c_diff[i1] -= area;
        if v2 > v1 {
            let d1 = (v2 - v1) * (v3 - v1);
            let i2 = idx(v2);
            for j in i1..i2 {
                let off = breakpoints[j] - v1;
                a[j] -= area / d1;
                b[j] -= 2.0 * area * off / d1;
                c[j] += area * (1.0 - off * off / d1);
            }
        }
        if v3 > v2 {
            let d2 = (v3 - v1) * (v3 - v2);
            let i2 = idx(v2);
            let i3 = idx(v3);
            for j in i2..i3 {
                let delta = v3 - breakpoints[j];
                a[j] += area / d2;
                b[j] -= 2.0 * area * delta / d2;
                c[j] += area * delta * delta / d2;
            }
        }
    }

    // fold the constant prefix sums into c
    let mut running = 0.0;
    for j in 0..m {
        running += c_diff[j];
        c[j] += running;
    }

    let pieces = if m == 0 {
        Vec::new()
    } else {
        (0..m)
            .map(|j| QuadPiece {
                a: a[j],
                b: b[j],
                c: c[j],
            })
            .collect()
    };
    Ok(DistributionFunction::from_parts(
        breakpoints,
        pieces,
        total_mass,
    ))
}

/// Decreasing rearrangement u*(s) = inf { t >= 0 : mu(t) < s }.
pub fn quantile(df: &DistributionFunction, s: f64) -> Result<f64> {
    if !(s > 0.0 && s <= df.total_mass * (1.0 + 1e-12)) {
        return Err(Error::parameter(format!(
            "quantile argument s = {s:.6e} outside (0, {:.6e}]",
            df.total_mass
        )));
    }
    if df.pieces.is_empty() || df.pieces[0].eval(0.0) < s {
        return Ok(0.0);
    }
    // first piece whose left value drops below s (values non-increasing in j)
    let mut lo = 0usize;
    let mut hi = df.pieces.len();
    while lo < hi {
        let mid = (lo + hi) / 2;
        if df.pieces[mid].eval(0.0) < s {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    // lo is the first index with mu(t_lo) < s, or pieces.len() if none
    if lo == df.pieces.len() {
        // mu stays >= s through the last piece start; check inside it
        let j = df.pieces.len() - 1;
        let h = df.breakpoints[j + 1] - df.breakpoints[j];
        if df.pieces[j].eval(h) >= s - f64::EPSILON * df.total_mass {
            // drops below s only at the final jump to zero
            return Ok(df.max_value);
        }
        return Ok(df.breakpoints[j] + piece_crossing(&df.pieces[j], h, s));
    }
    let j = lo - 1; // previous piece has mu(t_j) >= s
    let h = df.breakpoints[j + 1] - df.breakpoints[j];
    let left_limit = df.pieces[j].eval(h);
    if left_limit >= s {
        // crossing happens at the jump between pieces
        return Ok(df.breakpoints[j + 1]);
    }
    Ok(df.breakpoints[j] + piece_crossing(&df.pieces[j], h, s))
}

/// Bisection for mu(tau) = s on a single monotone piece.
fn piece_crossing(piece: &QuadPiece, h: f64, s: f64) -> f64 {
    let mut lo = 0.0;
    let mut hi = h;
    for _ in 0..70 {
        let mid = 0.5 * (lo + hi);
        if piece.eval(mid) < s {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Lorentz parameters (P, q); q = infinity is out of scope.
#[derive(Debug, Clone, Copy)]
pub struct LorentzParams {
    pub p: f64,
    pub q: f64,
}

impl LorentzParams {
    pub fn new(p: f64, q: f64) -> Result<LorentzParams> {
        if !(p > 0.0) || !(q > 0.0) || !q.is_finite() {
            return Err(Error::parameter(
                "Lorentz exponents must be positive and finite",
            ));
        }
        Ok(LorentzParams { p, q })
    }
}

/// Lorentz quasi-norm P^{1/q} ( ∫_0^∞ t^{q-1} mu(t)^{q/P} dt )^{1/q}.
/// With q = P this reduces to the L^P norm by Cavalieri's principle.
pub fn lorentz_norm(df: &DistributionFunction, params: &LorentzParams) -> Result<f64> {
    LorentzParams::new(params.p, params.q)?;
    let integral = df.lorentz_integral(params.p, params.q);
    Ok(params.p.powf(1.0 / params.q) * integral.powf(1.0 / params.q))
}

/// ∫_{exterior boundary ∩ {u > t}} 1/u dH^1 with the closed-form log
/// integral of the reciprocal linear trace on each tag-0 edge.
pub fn exterior_boundary_integral(field: &Field, t: f64) -> Result<f64> {
    if t < 0.0 {
        return Err(Error::parameter("level t must be nonnegative"));
    }
    let mesh = field.mesh();
    let mut acc = 0.0;
    for e in mesh.boundary_edges.iter().filter(|e| e.tag == 0) {
        let len = mesh.edge_length(e);
        let a = field.vertex_value(e.vertices[0]);
        let b = field.vertex_value(e.vertices[1]);
        let hi = a.max(b);
        let lo = a.min(b);
        if hi <= t {
            continue;
        }
        let clipped_lo = lo.max(t);
        if hi - lo <= 1e-14 * hi.abs().max(1.0) {
            // constant trace above the level
            let value = 0.5 * (a + b);
            if value <= 0.0 {
                return Err(Error::contract(
                    "exterior boundary trace must be positive on contributing edges",
                ));
            }
            acc += len / value;
            continue;
        }
        if clipped_lo <= 0.0 {
            return Err(Error::contract(
                "exterior boundary trace must be positive on contributing edges",
            ));
        }
        acc += len * (hi / clipped_lo).ln() / (hi - lo);
    }
    Ok(acc)
}

/// ∫_0^{upper} tau^{p-1} E(tau) dtau with E the exterior integral above,
/// integrated exactly between the sorted boundary trace values (E is smooth
/// inside each such interval).
pub fn exterior_boundary_tau_integral(field: &Field, p: f64, upper: f64) -> Result<f64> {
    let mesh = field.mesh();
    let mut cuts: Vec<f64> = vec![0.0, upper];
    for e in mesh.boundary_edges.iter().filter(|e| e.tag == 0) {
        for &v in &e.vertices {
            let val = field.vertex_value(v);
            if val > 0.0 && val < upper {
                cuts.push(val);
            }
        }
    }
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup();
    let mut acc = 0.0;
    for w in cuts.windows(2) {
        let mut err = None;
        acc += gl16_segment(w[0], w[1], |tau| {
            match exterior_boundary_integral(field, tau) {
                Ok(e) => tau.powf(p - 1.0) * e,
                Err(e) => {
                    err = Some(e);
                    0.0
                }
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
    }
    Ok(acc)
}

fn gl16_segment(a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = 0.0;
    for &(x, w) in GL16.iter() {
        acc += w * f(mid + half * x);
    }
    acc * half
}

/// ∮_{exterior} u^{p-1} dH^1 with the exact antiderivative of the linear
/// trace per edge.
pub fn exterior_boundary_power_integral(field: &Field, p: f64) -> f64 {
    let mesh = field.mesh();
    let mut acc = 0.0;
    for e in mesh.boundary_edges.iter().filter(|e| e.tag == 0) {
        let len = mesh.edge_length(e);
        let a = field.vertex_value(e.vertices[0]);
        let b = field.vertex_value(e.vertices[1]);
        if (b - a).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0) {
            acc += len * (0.5 * (a + b)).max(0.0).powf(p - 1.0);
        } else {
            // ∫_0^1 (a + (b-a) s)^{p-1} ds = (b^p - a^p) / (p (b - a))
            acc += len * (b.max(0.0).powf(p) - a.max(0.0).powf(p)) / (p * (b - a));
        }
    }
    acc
}
