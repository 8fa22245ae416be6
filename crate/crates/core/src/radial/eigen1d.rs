//! 1D first Robin p-eigenvalue on the annulus, with the hole handled by
//! constant extension: the innermost node carries the plateau mass
//! w_n R1^n / n (per unit of the common n w_n factor).
//!
//! Rayleigh quotient in reduced form (the common n w_n cancels):
//!
//!   R(phi) = ( ∫_{R1}^{R0} |phi'|^p r^{n-1} dr + beta R0^{n-1} phi(R0)^p )
//!          / ( ∫_{R1}^{R0} phi^p r^{n-1} dr + phi(R1)^p R1^n / n )
//!
//! minimized by the same Picard scheme as the 2D solver, with tridiagonal
//! damped Newton inner solves.

use crate::error::{Error, Result};
use crate::linalg::solve_tridiagonal;
use crate::quadrature::GL4;

const MAX_PICARD_ITERS: usize = 300;
const ARMIJO_C1: f64 = 1e-4;

#[derive(Debug, Clone)]
pub struct RadialEigenSolution {
    pub lambda: f64,
    /// (r, phi(r)) samples of the normalized eigenprofile.
    pub samples: Vec<(f64, f64)>,
    pub lambda_trace: Vec<f64>,
}

struct Grid {
    r: Vec<f64>,
    n: f64,
    beta: f64,
    p: f64,
    r0: f64,
    plateau_weight: f64,
}

impl Grid {
    fn new(n: u32, p: f64, beta: f64, r0: f64, r1: f64, count: usize) -> Grid {
        let r: Vec<f64> = (0..=count)
            .map(|i| r1 + (r0 - r1) * (i as f64 / count as f64))
            .collect();
        let nf = n as f64;
        Grid {
            r,
            n: nf,
            beta,
            p,
            r0,
            plateau_weight: r1.powf(nf) / nf,
        }
    }

    /// ∫_{r_i}^{r_{i+1}} r^{n-1} dr, the exact interval weight.
    fn interval_weight(&self, i: usize) -> f64 {
        (self.r[i + 1].powf(self.n) - self.r[i].powf(self.n)) / self.n
    }

    fn energy(&self, phi: &[f64], load: &[f64], eps: f64) -> f64 {
        let p = self.p;
        let mut acc = 0.0;
        for i in 0..self.r.len() - 1 {
            let h = self.r[i + 1] - self.r[i];
            let slope = (phi[i + 1] - phi[i]) / h;
            acc += self.interval_weight(i) / p * (eps * eps + slope * slope).powf(0.5 * p);
        }
        acc += self.beta * self.r0.powf(self.n - 1.0) / p * phi[self.r.len() - 1].abs().powf(p);
        acc -= crate::linalg::dot(load, phi);
        acc
    }

    fn gradient(&self, phi: &[f64], load: &[f64], eps: f64) -> Vec<f64> {
        let p = self.p;
        let m = self.r.len();
        let mut g = vec![0.0; m];
        for i in 0..m - 1 {
            let h = self.r[i + 1] - self.r[i];
            let slope = (phi[i + 1] - phi[i]) / h;
            let sigma = (eps * eps + slope * slope).powf(0.5 * p - 1.0) * slope;
            let w = self.interval_weight(i);
            g[i] -= w * sigma / h;
            g[i + 1] += w * sigma / h;
        }
        let last = phi[m - 1];
        g[m - 1] +=
            self.beta * self.r0.powf(self.n - 1.0) * last.abs().powf(p - 1.0).copysign(last);
        for i in 0..m {
            g[i] -= load[i];
        }
        g
    }

    /// Tridiagonal Hessian bands (lower, diag, upper).
    fn hessian(&self, phi: &[f64], eps: f64, floor: f64) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let p = self.p;
        let m = self.r.len();
        let mut lower = vec![0.0; m - 1];
        let mut diag = vec![0.0; m];
        let mut upper = vec![0.0; m - 1];
        for i in 0..m - 1 {
            let h = self.r[i + 1] - self.r[i];
            let slope = (phi[i + 1] - phi[i]) / h;
            let s2 = eps * eps + slope * slope;
            let coeff = s2.powf(0.5 * p - 1.0) + (p - 2.0) * s2.powf(0.5 * p - 2.0) * slope * slope;
            let w = self.interval_weight(i) * coeff / (h * h);
            diag[i] += w;
            diag[i + 1] += w;
            lower[i] -= w;
            upper[i] -= w;
        }
        diag[m - 1] += self.beta
            * self.r0.powf(self.n - 1.0)
            * (p - 1.0)
            * phi[m - 1].abs().max(floor).powf(p - 2.0);
        (lower, diag, upper)
    }

    /// Load vector for source g(r): entries ∫ g phi_i r^{n-1} dr (4-point
    /// Gauss per interval) plus the plateau term on node 0.
    fn load_vector(&self, g: &impl Fn(f64) -> f64, plateau_value: f64) -> Vec<f64> {
        let m = self.r.len();
        let mut load = vec![0.0; m];
        for i in 0..m - 1 {
            let (ra, rb) = (self.r[i], self.r[i + 1]);
            let h = rb - ra;
            for &(x, w) in GL4.iter() {
                let s = 0.5 * (1.0 + x);
                let r = ra + s * h;
                let gw = 0.5 * h * w * g(r) * r.powf(self.n - 1.0);
                load[i] += gw * (1.0 - s);
                load[i + 1] += gw * s;
            }
        }
        load[0] += plateau_value * self.plateau_weight;
        load
    }

    fn lp_mass(&self, phi: &[f64]) -> f64 {
        let p = self.p;
        let mut acc = 0.0;
        for i in 0..self.r.len() - 1 {
            let (ra, rb) = (self.r[i], self.r[i + 1]);
            let h = rb - ra;
            for &(x, w) in GL4.iter() {
                let s = 0.5 * (1.0 + x);
                let r = ra + s * h;
                let val = phi[i] * (1.0 - s) + phi[i + 1] * s;
                acc += 0.5 * h * w * val.abs().powf(p) * r.powf(self.n - 1.0);
            }
        }
        acc + phi[0].abs().powf(p) * self.plateau_weight
    }

    fn rayleigh_numerator(&self, phi: &[f64]) -> f64 {
        let p = self.p;
        let mut acc = 0.0;
        for i in 0..self.r.len() - 1 {
            let h = self.r[i + 1] - self.r[i];
            let slope = (phi[i + 1] - phi[i]) / h;
            acc += self.interval_weight(i) * slope.abs().powf(p);
        }
        acc + self.beta * self.r0.powf(self.n - 1.0) * phi[self.r.len() - 1].abs().powf(p)
    }
}

fn newton_1d(
    grid: &Grid,
    phi: &mut Vec<f64>,
    load: &[f64],
    schedule: &[f64],
    tol: f64,
) -> Result<()> {
    for &eps in schedule {
        let mut energy = grid.energy(phi, load, eps);
        let mut grad = grid.gradient(phi, load, eps);
        let mut iterations = 0;
        loop {
            let residual = crate::linalg::norm2(&grad);
            if residual <= tol * (1.0 + energy.abs()) {
                break;
            }
            if iterations > 200 {
                return Err(Error::Convergence {
                    residual,
                    message: "1D Newton stalled".into(),
                });
            }
            let scale = phi.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let floor = if grid.p < 2.0 {
                1e-8 * (1.0 + scale)
            } else {
                0.0
            };
            let (lower, diag, upper) = grid.hessian(phi, eps, floor);
            let rhs: Vec<f64> = grad.iter().map(|g| -g).collect();
            let mut dir = solve_tridiagonal(&lower, &diag, &upper, &rhs);
            if crate::linalg::dot(&dir, &grad) >= 0.0 {
                dir = rhs;
            }
            let slope = crate::linalg::dot(&grad, &dir);
            let noise = 1e-14 * (1.0 + energy.abs());
            if -slope <= noise {
                // decrease below energy rounding: take the full step
                for (v, d) in phi.iter_mut().zip(&dir) {
                    *v += d;
                }
                energy = grid.energy(phi, load, eps);
            } else {
                let mut alpha = 1.0;
                let mut accepted = false;
                for _ in 0..40 {
                    let trial: Vec<f64> =
                        phi.iter().zip(&dir).map(|(v, d)| v + alpha * d).collect();
                    let e_trial = grid.energy(&trial, load, eps);
                    if e_trial <= energy + ARMIJO_C1 * alpha * slope {
                        *phi = trial;
                        energy = e_trial;
                        accepted = true;
                        break;
                    }
                    alpha *= 0.5;
                }
                if !accepted {
                    return Err(Error::Convergence {
                        residual,
                        message: "1D line search failed".into(),
                    });
                }
            }
            grad = grid.gradient(phi, load, eps);
            iterations += 1;
        }
    }
    Ok(())
}

/// First eigenvalue of the radial Robin p-problem on the annulus (ball for
/// R1 = 0), with the plateau handled by constant extension.
pub fn solve_radial_eigen(
    n: u32,
    p: f64,
    beta: f64,
    r0: f64,
    r1: f64,
    grid_count: usize,
) -> Result<RadialEigenSolution> {
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
    if grid_count < 8 {
        return Err(Error::Convergence {
            residual: f64::NAN,
            message: "eigen grid too coarse (need >= 8 intervals)".into(),
        });
    }

    let grid = Grid::new(n, p, beta, r0, r1, grid_count);
    let schedule = [1e-1, 1e-2, 1e-3, 1e-4];
    let final_eps = [1e-4];
    let tol = 1e-10;

    let mut phi = vec![1.0; grid.r.len()];
    let mass = grid.lp_mass(&phi);
    let norm = mass.powf(1.0 / p);
    phi.iter_mut().for_each(|v| *v /= norm);
    let mut lambda = grid.rayleigh_numerator(&phi) / grid.lp_mass(&phi);
    let mut trace = vec![lambda];

    for iter in 0..MAX_PICARD_ITERS {
        let phi_interp = phi.clone();
        let r_nodes = grid.r.clone();
        let source = move |r: f64| -> f64 {
            let j = r_nodes
                .partition_point(|&rn| rn <= r)
                .saturating_sub(1)
                .min(r_nodes.len() - 2);
            let (ra, rb) = (r_nodes[j], r_nodes[j + 1]);
            let s = if rb > ra { (r - ra) / (rb - ra) } else { 0.0 };
            let val = phi_interp[j] * (1.0 - s) + phi_interp[j + 1] * s;
            val.max(0.0).powf(p - 1.0)
        };
        let load: Vec<f64> = grid
            .load_vector(&source, phi[0].max(0.0).powf(p - 1.0))
            .iter()
            .map(|v| lambda * v)
            .collect();
        let sched: &[f64] = if iter == 0 { &schedule } else { &final_eps };
        newton_1d(&grid, &mut phi, &load, sched, tol)?;
        let mass = grid.lp_mass(&phi);
        if !(mass > 0.0) {
            return Err(Error::Diagnostic("eigen iterate collapsed to zero".into()));
        }
        let norm = mass.powf(1.0 / p);
        phi.iter_mut().for_each(|v| *v /= norm);
        let lambda_next = grid.rayleigh_numerator(&phi) / grid.lp_mass(&phi);
        let done = (lambda_next - lambda).abs() <= 1e-10 * lambda.abs();
        lambda = lambda_next;
        trace.push(lambda);
        if done {
            let samples = grid.r.iter().cloned().zip(phi).collect();
            return Ok(RadialEigenSolution {
                lambda,
                samples,
                lambda_trace: trace,
            });
        }
    }
    Err(Error::Convergence {
        residual: (trace[trace.len() - 1] - trace[trace.len() - 2]).abs(),
        message: format!("radial eigen iteration exceeded {MAX_PICARD_ITERS} Picard steps"),
    })
}
