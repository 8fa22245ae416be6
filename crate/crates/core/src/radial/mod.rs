//! Semi-analytic solution of the symmetrized problem on the annulus
//! A = B_{R0} \ B_{R1} for general dimension n >= 2 and exponent p > 1.
//!
//! Radial integration of -div(|v'|^{p-2} v') = f_sharp, with the hole
//! absorbing the source mass rearranged into it, gives closed forms for the
//! derivative and the Robin boundary value:
//!
//!   v'(r)  = -[ (1 / (n w_n r^{n-1})) ∫_0^{w_n r^n} f*(s) ds ]^{1/(p-1)}
//!   v(R0)  =  [ (1 / (n w_n R0^{n-1} beta)) ∫_0^{w_n R0^n} f*(s) ds ]^{1/(p-1)}
//!
//! and v is recovered by quadrature of |v'| from the boundary inward. The
//! plateau constant is c_bar = v(R1). Because v' has an explicit formula,
//! every derived identity (Robin balance, interface flux, the level-set
//! differential identity) can be checked to quadrature accuracy.

mod eigen1d;

pub use eigen1d::{solve_radial_eigen, RadialEigenSolution};

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quadrature::adaptive_simpson;
use crate::rearrangement::{DistributionFunction, QuadPiece};

/// Measure of the n-dimensional unit ball.
pub fn unit_ball_measure(n: u32) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0,
        2 => PI,
        _ => unit_ball_measure(n - 2) * 2.0 * PI / n as f64,
    }
}

/// Decreasing rearrangement f* of the source over (0, |Omega_0|): constant,
/// or a non-increasing piecewise-linear table of (s, value) nodes (repeated
/// s encodes a step).
#[derive(Debug, Clone)]
pub enum FStarSpec {
    Constant(f64),
    Table(Vec<(f64, f64)>),
}

impl FStarSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            FStarSpec::Constant(v) => {
                if *v < 0.0 {
                    return Err(Error::parameter("f* must be nonnegative"));
                }
            }
            FStarSpec::Table(table) => {
                if table.len() < 2 {
                    return Err(Error::parameter("f* table needs at least 2 nodes"));
                }
                if table[0].0 != 0.0 {
                    return Err(Error::parameter("f* table must start at s = 0"));
                }
                let mut prev_s = -1.0;
                let mut prev_v = f64::INFINITY;
                for &(s, v) in table {
                    if s < prev_s {
                        return Err(Error::parameter(
                            "f* table abscissae must be non-decreasing",
                        ));
                    }
                    if v < 0.0 {
                        return Err(Error::parameter("f* must be nonnegative"));
                    }
                    if v > prev_v + 1e-12 * prev_v.abs().max(1.0) {
                        return Err(Error::parameter("f* must be non-increasing"));
                    }
                    prev_s = s;
                    prev_v = v;
                }
            }
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        match self {
            FStarSpec::Constant(v) => *v == 0.0,
            FStarSpec::Table(table) => table.iter().all(|&(_, v)| v == 0.0),
        }
    }

    pub fn domain_end(&self) -> Option<f64> {
        match self {
            FStarSpec::Constant(_) => None,
            FStarSpec::Table(table) => Some(table.last().unwrap().0),
        }
    }
}

/// Exact ∫_0^s f*(sigma) dsigma; non-decreasing and concave in s.
pub fn cumulative_f_star(spec: &FStarSpec, s: f64) -> Result<f64> {
    spec.validate()?;
    if s < -1e-12 {
        return Err(Error::parameter("cumulative argument must be nonnegative"));
    }
    let s = s.max(0.0);
    match spec {
        FStarSpec::Constant(v) => Ok(v * s),
        FStarSpec::Table(table) => {
            let end = table.last().unwrap().0;
            if s > end * (1.0 + 1e-9) {
                return Err(Error::parameter(format!(
                    "cumulative argument {s:.6e} exceeds f* domain end {end:.6e}"
                )));
            }
            let s = s.min(end);
            let mut acc = 0.0;
            for w in table.windows(2) {
                let (s0, v0) = w[0];
                let (s1, v1) = w[1];
                if s <= s0 {
                    break;
                }
                let hi = s.min(s1);
                if hi <= s0 {
                    continue;
                }
                let frac_end = if s1 > s0 { (hi - s0) / (s1 - s0) } else { 0.0 };
                let v_hi = v0 + (v1 - v0) * frac_end;
                acc += 0.5 * (v0 + v_hi) * (hi - s0);
            }
            Ok(acc)
        }
    }
}

/// Semi-analytic radial solution of the symmetrized problem.
#[derive(Debug, Clone)]
pub struct RadialProfile {
    pub n: u32,
    pub p: f64,
    pub beta: f64,
    pub r_inner: f64,
    pub r_outer: f64,
    /// (r, v(r)) on [R1, R0], r ascending, v non-increasing.
    pub samples: Vec<(f64, f64)>,
    /// Plateau constant v(R1).
    pub c_bar: f64,
    /// Boundary value v(R0) = min of the constant extension.
    pub v_boundary: f64,
    /// Minimum of v; for the radial profile this is v(R0).
    pub v_min: f64,
    fstar: FStarSpec,
}

impl RadialProfile {
    pub fn fstar(&self) -> &FStarSpec {
        &self.fstar
    }

    /// |v'(r)| from the closed form.
    pub fn derivative_magnitude(&self, r: f64) -> f64 {
        let n = self.n as f64;
        let wn = unit_ball_measure(self.n);
        let cum = cumulative_f_star(&self.fstar, wn * r.powf(n)).unwrap_or(0.0);
        if cum <= 0.0 || r <= 0.0 {
            return 0.0;
        }
        (cum / (n * wn * r.powf(n - 1.0))).powf(1.0 / (self.p - 1.0))
    }

    /// Constant extension: c_bar inside the hole, v(R0) outside the domain.
    pub fn value_at(&self, r: f64) -> f64 {
        if r <= self.r_inner {
            return self.c_bar;
        }
        if r >= self.r_outer {
            return self.v_boundary;
        }
        let j = self
            .samples
            .partition_point(|&(rs, _)| rs <= r)
            .saturating_sub(1)
            .min(self.samples.len() - 2);
        let (r0, v0) = self.samples[j];
        let (r1, v1) = self.samples[j + 1];
        if r1 == r0 {
            return v0;
        }
        v0 + (v1 - v0) * (r - r0) / (r1 - r0)
    }

    /// L1 norm of the constant extension over the ball of radius R0,
    /// via the exact swap
    ///   ∫ v dx = c_bar w_n R1^n + v(R0) w_n (R0^n - R1^n)
    ///          + ∫_{R1}^{R0} |v'(rho)| w_n (rho^n - R1^n) drho.
    pub fn l1_norm(&self) -> f64 {
        let n = self.n as f64;
        let wn = unit_ball_measure(self.n);
        let base = self.c_bar * wn * self.r_inner.powf(n)
            + self.v_boundary * wn * (self.r_outer.powf(n) - self.r_inner.powf(n));
        let tail = adaptive_simpson(
            &|rho: f64| self.derivative_magnitude(rho) * wn * (rho.powf(n) - self.r_inner.powf(n)),
            self.r_inner,
            self.r_outer,
            1e-12,
        );
        base + tail
    }
}

/// Graded sample grid clustering toward the inner radius where v' can be
/// steep for small p - 1.
fn sample_grid(r1: f64, r0: f64, count: usize) -> Vec<f64> {
    (0..=count)
        .map(|i| {
            let s = i as f64 / count as f64;
            r1 + (r0 - r1) * s.powf(1.5)
        })
        .collect()
}

/// Solves the symmetrized problem on the annulus (R1 = 0 gives the ball).
pub fn solve_radial(
    n: u32,
    p: f64,
    beta: f64,
    r0: f64,
    r1: f64,
    spec: &FStarSpec,
    grid: usize,
) -> Result<RadialProfile> {
    if n < 2 {
        return Err(Error::parameter("dimension n must be at least 2"));
    }
    if !(p > 1.0) {
        return Err(Error::parameter("exponent p must exceed 1"));
    }
    if !(beta > 0.0) {
        return Err(Error::parameter("Robin parameter beta must be positive"));
    }
    if !(r0 > 0.0) || r1 < 0.0 || r1 >= r0 {
        return Err(Error::parameter("radii must satisfy 0 <= R1 < R0"));
    }
    if grid < 16 {
        return Err(Error::Convergence {
            residual: f64::NAN,
            message: format!("radial grid of {grid} samples is too coarse (need >= 16)"),
        });
    }
    spec.validate()?;
    if let Some(end) = spec.domain_end() {
        let needed = unit_ball_measure(n) * r0.powf(n as f64);
        if end < needed * (1.0 - 1e-9) {
            return Err(Error::contract(format!(
                "f* table covers (0, {end:.6e}) but the domain has measure {needed:.6e}"
            )));
        }
    }

    let nf = n as f64;
    let wn = unit_ball_measure(n);
    if spec.is_zero() {
        let samples = sample_grid(r1, r0, grid)
            .into_iter()
            .map(|r| (r, 0.0))
            .collect();
        return Ok(RadialProfile {
            n,
            p,
            beta,
            r_inner: r1,
            r_outer: r0,
            samples,
            c_bar: 0.0,
            v_boundary: 0.0,
            v_min: 0.0,
            fstar: spec.clone(),
        });
    }

    let total = cumulative_f_star(spec, wn * r0.powf(nf))?;
    let v_boundary = (total / (nf * wn * r0.powf(nf - 1.0) * beta)).powf(1.0 / (p - 1.0));

    let deriv = |r: f64| -> f64 {
        let cum = cumulative_f_star(spec, wn * r.powf(nf)).unwrap_or(0.0);
        if cum <= 0.0 || r <= 0.0 {
            0.0
        } else {
            (cum / (nf * wn * r.powf(nf - 1.0))).powf(1.0 / (p - 1.0))
        }
    };

    let rs = sample_grid(r1, r0, grid);
    let mut values = vec![0.0; rs.len()];
    values[rs.len() - 1] = v_boundary;
    // accumulate v(r_i) = v(r_{i+1}) + ∫_{r_i}^{r_{i+1}} |v'|
    for i in (0..rs.len() - 1).rev() {
        let inc = adaptive_simpson(&deriv, rs[i], rs[i + 1], 1e-15);
        values[i] = values[i + 1] + inc;
    }
    let c_bar = values[0];
    let samples: Vec<(f64, f64)> = rs.into_iter().zip(values).collect();
    Ok(RadialProfile {
        n,
        p,
        beta,
        r_inner: r1,
        r_outer: r0,
        samples,
        c_bar,
        v_boundary,
        v_min: v_boundary,
        fstar: spec.clone(),
    })
}

/// Distribution function phi(t) = w_n r(t)^n of the constant extension,
/// emitted in the same piecewise-quadratic representation used for P1
/// fields: exact for n = 2 (with r interpolated linearly in t between
/// samples), node-exact quadratic fits for n >= 3. The plateau produces the
/// final jump of size w_n R1^n at t = c_bar.
pub fn radial_distribution(profile: &RadialProfile) -> Result<DistributionFunction> {
    let wn = unit_ball_measure(profile.n);
    let nf = profile.n as f64;
    let total_mass = wn * profile.r_outer.powf(nf);
    if profile.c_bar == 0.0 {
        return Ok(DistributionFunction::from_parts(
            vec![0.0],
            Vec::new(),
            total_mass,
        ));
    }

    for w in profile.samples.windows(2) {
        if w[1].1 > w[0].1 + 1e-12 * profile.c_bar {
            return Err(Error::contract(
                "radial samples must be non-increasing outward",
            ));
        }
    }

    let mut breakpoints = vec![0.0];
    let mut pieces: Vec<QuadPiece> = Vec::new();

    // constant region below the boundary value
    if profile.v_boundary > 0.0 {
        breakpoints.push(profile.v_boundary);
        pieces.push(QuadPiece {
            a: 0.0,
            b: 0.0,
            c: total_mass,
        });
    }

    // walk samples from the boundary inward: t ascending from v(R0) to c_bar
    let samples = &profile.samples;
    for k in (0..samples.len() - 1).rev() {
        let (r_in, v_in) = samples[k];
        let (r_out, _) = samples[k + 1];
        let t0 = *breakpoints.last().unwrap();
        let t1 = v_in;
        if t1 <= t0 {
            continue; // zero-width in t (duplicate values)
        }
        let h = t1 - t0;
        let slope = (r_out - r_in) / h; // dr/dt < 0 magnitude
        if profile.n == 2 {
            // phi(t0 + tau) = pi (r_out - slope*tau)^2, exact
            pieces.push(QuadPiece {
                a: wn * slope * slope,
                b: -2.0 * wn * r_out * slope,
                c: wn * r_out * r_out,
            });
        } else {
            let phi = |tau: f64| wn * (r_out - slope * tau).powf(nf);
            let (f0, fm, f1) = (phi(0.0), phi(0.5 * h), phi(h));
            pieces.push(QuadPiece {
                a: 2.0 * (f0 - 2.0 * fm + f1) / (h * h),
                b: (-3.0 * f0 + 4.0 * fm - f1) / h,
                c: f0,
            });
        }
        breakpoints.push(t1);
    }

    Ok(DistributionFunction::from_parts(
        breakpoints,
        pieces,
        total_mass,
    ))
}
