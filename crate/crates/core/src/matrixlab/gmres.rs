//! Restarted GMRES with modified Gram–Schmidt Arnoldi and Givens rotations.

use super::{LinalgError, SparseMatrix};

/// A square linear map applied to vectors.
pub trait LinearOperator {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

impl LinearOperator for SparseMatrix {
    fn dim(&self) -> usize {
        self.n_rows()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.mul_vec_into(x, y);
    }
}

/// Adapts a closure `(x, y) -> y = A x` to [`LinearOperator`].
pub struct FnOperator<F> {
    dim: usize,
    f: F,
}

impl<F: Fn(&[f64], &mut [f64])> FnOperator<F> {
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<F: Fn(&[f64], &mut [f64])> LinearOperator for FnOperator<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        (self.f)(x, y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GmresOptions {
    pub restart: usize,
    /// Relative residual target `‖b − A x‖₂ / ‖b‖₂`.
    pub tol: f64,
    /// Cap on the total number of Arnoldi steps.
    pub max_inner: usize,
}

impl Default for GmresOptions {
    fn default() -> Self {
        Self {
            restart: 20,
            tol: 1e-6,
            max_inner: 10_000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GmresOutcome {
    pub x: Vec<f64>,
    /// Total Arnoldi steps (matrix-vector products inside the Krylov loop)
    /// over all restart cycles.
    pub inner_iterations: usize,
    pub converged: bool,
    /// Arnoldi produced a zero vector: the Krylov space is invariant.
    pub breakdown: bool,
    /// Relative residual estimate after each Arnoldi step.
    pub residual_history: Vec<f64>,
    /// True relative residual of the returned iterate.
    pub relative_residual: f64,
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn true_residual(op: &impl LinearOperator, b: &[f64], x: &[f64], r: &mut [f64]) -> f64 {
    op.apply(x, r);
    for (ri, bi) in r.iter_mut().zip(b) {
        *ri = bi - *ri;
    }
    norm2(r)
}

/// Solves `A x = b` by GMRES(`restart`) starting from `x0`.
///
/// Running out of `max_inner` steps is not an error; the outcome then has
/// `converged == false` and carries the best iterate.
pub fn gmres(
    op: &impl LinearOperator,
    b: &[f64],
    x0: &[f64],
    opts: GmresOptions,
) -> Result<GmresOutcome, LinalgError> {
    let n = op.dim();
    if opts.restart == 0 {
        return Err(LinalgError::InvalidArgument("restart must be at least 1".into()));
    }
    if !(opts.tol > 0.0) {
        return Err(LinalgError::InvalidArgument("tolerance must be positive".into()));
    }
    for len in [b.len(), x0.len()] {
        if len != n {
            return Err(LinalgError::DimensionMismatch { expected: n, found: len });
        }
    }

    let b_norm = norm2(b);
    let mut x = x0.to_vec();
    let mut r = vec![0.0; n];
    if b_norm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return Ok(GmresOutcome {
            x,
            inner_iterations: 0,
            converged: true,
            breakdown: false,
            residual_history: Vec::new(),
            relative_residual: 0.0,
        });
    }

    let m = opts.restart.min(n.max(1));
    let mut basis: Vec<Vec<f64>> = (0..=m).map(|_| vec![0.0; n]).collect();
    // Column-major Hessenberg, column j has j + 2 meaningful entries.
    let mut h = vec![vec![0.0; m + 1]; m];
    let mut cs = vec![0.0; m];
    let mut sn = vec![0.0; m];
    let mut g = vec![0.0; m + 1];
    let mut w = vec![0.0; n];

    let mut inner = 0usize;
    let mut history = Vec::new();
    let mut breakdown = false;
    let mut rel = true_residual(op, b, &x, &mut r) / b_norm;

    while rel > opts.tol && inner < opts.max_inner {
        let beta = rel * b_norm;
        for (v, ri) in basis[0].iter_mut().zip(&r) {
            *v = ri / beta;
        }
        g.iter_mut().for_each(|v| *v = 0.0);
        g[0] = beta;

        let mut steps = 0;
        let mut cycle_breakdown = false;
        for j in 0..m {
            if inner >= opts.max_inner {
                break;
            }
            op.apply(&basis[j], &mut w);
            inner += 1;
            let w_norm = norm2(&w);
            for i in 0..=j {
                let hij = dot(&w, &basis[i]);
                h[j][i] = hij;
                for (wk, vk) in w.iter_mut().zip(&basis[i]) {
                    *wk -= hij * vk;
                }
            }
            let h_next = norm2(&w);
            h[j][j + 1] = h_next;

            for i in 0..j {
                let (a, c) = (h[j][i], h[j][i + 1]);
                h[j][i] = cs[i] * a + sn[i] * c;
                h[j][i + 1] = -sn[i] * a + cs[i] * c;
            }
            let (a, c) = (h[j][j], h[j][j + 1]);
            let rho = a.hypot(c);
            if rho == 0.0 {
                cs[j] = 1.0;
                sn[j] = 0.0;
            } else {
                cs[j] = a / rho;
                sn[j] = c / rho;
            }
            h[j][j] = rho;
            h[j][j + 1] = 0.0;
            g[j + 1] = -sn[j] * g[j];
            g[j] *= cs[j];
            steps = j + 1;
            history.push(g[j + 1].abs() / b_norm);

            if h_next <= 1e-14 * w_norm {
                cycle_breakdown = true;
                break;
            }
            if g[j + 1].abs() / b_norm <= opts.tol {
                break;
            }
            for (v, wk) in basis[j + 1].iter_mut().zip(&w) {
                *v = wk / h_next;
            }
        }

        // Back substitution on the rotated Hessenberg system.
        let mut y = vec![0.0; steps];
        for i in (0..steps).rev() {
            let mut s = g[i];
            for k in i + 1..steps {
                s -= h[k][i] * y[k];
            }
            y[i] = if h[i][i] == 0.0 { 0.0 } else { s / h[i][i] };
        }
        for (k, yk) in y.iter().enumerate() {
            for (xi, vi) in x.iter_mut().zip(&basis[k]) {
                *xi += yk * vi;
            }
        }
        rel = true_residual(op, b, &x, &mut r) / b_norm;
        if let Some(last) = history.last_mut() {
            *last = rel;
        }
        if cycle_breakdown {
            breakdown = true;
            break;
        }
    }

    Ok(GmresOutcome {
        x,
        inner_iterations: inner,
        converged: rel <= opts.tol,
        breakdown,
        residual_history: history,
        relative_residual: rel,
    })
}
