//! Minimal sparse linear algebra for the Newton solvers: CSR storage,
//! Jacobi-preconditioned conjugate gradients, and a Thomas solve for the
//! tridiagonal 1D problems. Assembly and iteration orders are fixed so
//! repeated runs are bit-identical.

/// Compressed sparse row matrix, square, with explicit symmetric storage.
#[derive(Debug, Clone)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl CsrMatrix {
    /// Builds a CSR matrix from (row, col, value) triplets, summing duplicates.
    pub fn from_triplets(n: usize, mut triplets: Vec<(usize, usize, f64)>) -> Self {
        triplets.sort_unstable_by_key(|t| (t.0, t.1));
        let mut row_ptr = vec![0usize; n + 1];
        let mut cols = Vec::with_capacity(triplets.len());
        let mut vals: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut cur_row = 0usize;
        let mut row_start = 0usize;
        for &(r, c, v) in &triplets {
            debug_assert!(r < n && c < n);
            while cur_row < r {
                row_ptr[cur_row + 1] = cols.len();
                cur_row += 1;
                row_start = cols.len();
            }
            if cols.len() > row_start && *cols.last().unwrap() == c {
                *vals.last_mut().unwrap() += v;
            } else {
                cols.push(c);
                vals.push(v);
            }
        }
        while cur_row < n {
            row_ptr[cur_row + 1] = cols.len();
            cur_row += 1;
        }
        CsrMatrix {
            n,
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n);
        debug_assert_eq!(y.len(), self.n);
        for (i, yi) in y.iter_mut().enumerate() {
            let mut acc = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            *yi = acc;
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.n];
        for (i, di) in d.iter_mut().enumerate() {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                if self.cols[k] == i {
                    *di += self.vals[k];
                }
            }
        }
        d
    }
}

#[derive(Debug, Clone, Copy)]
pub struct PcgOutcome {
    pub iterations: usize,
    pub converged: bool,
    pub residual: f64,
}

/// Jacobi-preconditioned conjugate gradients for SPD systems.
///
/// Starts from `x = 0`; any truncated iterate is still a descent direction
/// for the quadratic model, which is all the damped Newton loop needs.
pub fn pcg_jacobi(
    a: &CsrMatrix,
    b: &[f64],
    rel_tol: f64,
    max_iter: usize,
) -> (Vec<f64>, PcgOutcome) {
    let n = a.n();
    let mut diag = a.diagonal();
    for d in diag.iter_mut() {
        if *d <= 0.0 || !d.is_finite() {
            *d = 1.0;
        }
    }
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let b_norm = norm2(b);
    if b_norm == 0.0 {
        return (
            x,
            PcgOutcome {
                iterations: 0,
                converged: true,
                residual: 0.0,
            },
        );
    }
    let mut z: Vec<f64> = r.iter().zip(&diag).map(|(ri, di)| ri / di).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    let tol = rel_tol * b_norm;
    let mut res = b_norm;
    for it in 0..max_iter {
        a.matvec(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 || !pap.is_finite() {
            // numerically indefinite direction; bail out with current iterate
            return (
                x,
                PcgOutcome {
                    iterations: it,
                    converged: false,
                    residual: res,
                },
            );
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        res = norm2(&r);
        if res <= tol {
            return (
                x,
                PcgOutcome {
                    iterations: it + 1,
                    converged: true,
                    residual: res,
                },
            );
        }
        for i in 0..n {
            z[i] = r[i] / diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    (
        x,
        PcgOutcome {
            iterations: max_iter,
            converged: false,
            residual: res,
        },
    )
}

/// Thomas algorithm for a tridiagonal system; `lower` and `upper` have
/// length n-1. Panics on zero pivots (callers assemble SPD systems).
pub fn solve_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    assert_eq!(lower.len(), n - 1);
    assert_eq!(upper.len(), n - 1);
    assert_eq!(rhs.len(), n);
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = upper[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let m = diag[i] - lower[i - 1] * c[i - 1];
        if i < n - 1 {
            c[i] = upper[i] / m;
        }
        d[i] = (rhs[i] - lower[i - 1] * d[i - 1]) / m;
    }
    let mut x = d;
    for i in (0..n - 1).rev() {
        let next = x[i + 1];
        x[i] -= c[i] * next;
    }
    x
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
