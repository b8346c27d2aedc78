//! Spectral radius, 2-norm and extreme-eigenvalue estimates.
//!
//! All estimates run power (or inverse power) iteration. For matrices of
//! order at most [`DENSE_FALLBACK_MAX`] a dense eigensolver takes over when
//! the iteration stagnates or contracts too slowly for the estimate to be
//! trusted.

use super::lu::{lu_factorize, lu_factorize_with, PivotPolicy};
use super::{LinalgError, SparseMatrix};

pub const MAX_POWER_ITERATIONS: usize = 10_000;
/// Relative change between successive estimates that counts as converged.
pub const POWER_TOL: f64 = 1e-10;
pub const DENSE_FALLBACK_MAX: usize = 64;
/// Observed contraction rate above which a converged power estimate is
/// refined densely (the stopping test only bounds the error by
/// `POWER_TOL · r / (1 − r)`).
const SLOW_RATE: f64 = 0.99;
pub const SYMMETRY_TOL: f64 = 1e-12;

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn normalize(v: &mut [f64]) -> f64 {
    let n = norm2(v);
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
    n
}

/// Tracks successive estimates and the observed contraction rate.
struct Tracker {
    prev: Option<f64>,
    prev_delta: Option<f64>,
    rate: f64,
}

impl Tracker {
    fn new() -> Self {
        Self {
            prev: None,
            prev_delta: None,
            rate: 0.0,
        }
    }

    /// Records `value`; returns true when the change is below `tol` relative.
    fn push(&mut self, value: f64, tol: f64) -> bool {
        let done = match self.prev {
            Some(p) => {
                let delta = (value - p).abs();
                if let Some(pd) = self.prev_delta {
                    if pd > 0.0 {
                        self.rate = delta / pd;
                    }
                }
                self.prev_delta = Some(delta);
                delta <= tol * value.abs().max(f64::MIN_POSITIVE)
            }
            None => false,
        };
        self.prev = Some(value);
        done
    }
}

fn dense_spectral_radius(m: &SparseMatrix) -> f64 {
    m.to_dense()
        .complex_eigenvalues()
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

/// Spectral radius of an entrywise nonnegative square matrix.
///
/// Power iteration from the all-ones vector on `M + sI`, where the shift
/// `s > 0` separates the Perron root from `−ρ` (lattice-type matrices are
/// often bipartite). The iterate stays positive, so the Collatz–Wielandt
/// quotients `min (Kv)ᵢ/vᵢ ≤ ρ(K) ≤ max (Kv)ᵢ/vᵢ` bracket the answer.
pub fn spectral_radius(m: &SparseMatrix) -> Result<f64, LinalgError> {
    let n = m.require_square()?;
    if let Some((row, col, value)) = m.iter().find(|&(_, _, v)| v < 0.0) {
        return Err(LinalgError::NonNegativityViolation { row, col, value });
    }
    if n == 0 || m.nnz() == 0 {
        return Ok(0.0);
    }

    let row_sums: Vec<f64> = (0..n).map(|i| m.row(i).1.iter().sum()).collect();
    let lo_sum = row_sums.iter().copied().fold(f64::INFINITY, f64::min);
    let hi_sum = row_sums.iter().copied().fold(0.0, f64::max);
    if hi_sum - lo_sum <= POWER_TOL * hi_sum {
        // Constant row sums: the all-ones vector is a Perron vector.
        return Ok(0.5 * (lo_sum + hi_sum));
    }
    let shift = lo_sum.max(0.1 * hi_sum);

    let mut v = vec![1.0 / (n as f64).sqrt(); n];
    let mut w = vec![0.0; n];
    let mut tracker = Tracker::new();
    let mut estimate = 0.0;
    for it in 0..MAX_POWER_ITERATIONS {
        m.mul_vec_into(&v, &mut w);
        for (wi, vi) in w.iter_mut().zip(&v) {
            *wi += shift * vi;
        }
        let growth = norm2(&w);
        estimate = growth - shift;

        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for (wi, vi) in w.iter().zip(&v) {
            let q = wi / vi;
            lo = lo.min(q);
            hi = hi.max(q);
        }
        if hi - lo <= POWER_TOL * hi {
            return Ok((0.5 * (lo + hi) - shift).max(0.0));
        }

        if tracker.push(growth, POWER_TOL) && it >= 2 {
            if n <= DENSE_FALLBACK_MAX && tracker.rate > SLOW_RATE {
                return Ok(dense_spectral_radius(m));
            }
            return Ok(estimate.max(0.0));
        }
        std::mem::swap(&mut v, &mut w);
        normalize(&mut v);
    }
    if n <= DENSE_FALLBACK_MAX {
        return Ok(dense_spectral_radius(m));
    }
    Err(LinalgError::NoConvergence {
        estimate: estimate.max(0.0),
        iterations: MAX_POWER_ITERATIONS,
    })
}

/// Deterministic start vector with no special structure.
fn start_vector(n: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * ((i as f64) * 0.7).sin()).collect();
    normalize(&mut v);
    v
}

/// Power iteration for the largest eigenvalue of a symmetric positive
/// semidefinite operator given as `apply(v) -> K v`.
fn largest_psd_eigenvalue(
    n: usize,
    mut apply: impl FnMut(&[f64]) -> Result<Vec<f64>, LinalgError>,
    dense: Option<&dyn Fn() -> f64>,
) -> Result<f64, LinalgError> {
    let mut v = start_vector(n);
    let mut tracker = Tracker::new();
    let mut estimate = 0.0;
    for it in 0..MAX_POWER_ITERATIONS {
        let mut w = apply(&v)?;
        // Rayleigh quotient with a unit vector.
        let theta: f64 = w.iter().zip(&v).map(|(a, b)| a * b).sum();
        estimate = theta;
        let w_norm = normalize(&mut w);
        if w_norm == 0.0 {
            return Ok(0.0);
        }
        if tracker.push(theta, POWER_TOL) && it >= 2 {
            if tracker.rate > SLOW_RATE {
                if let Some(f) = dense {
                    return Ok(f());
                }
            }
            return Ok(theta);
        }
        v = w;
    }
    if let Some(f) = dense {
        return Ok(f());
    }
    Err(LinalgError::NoConvergence {
        estimate,
        iterations: MAX_POWER_ITERATIONS,
    })
}

/// Spectral norm `‖M‖₂`, from power iteration on `MᵀM`.
pub fn two_norm(m: &SparseMatrix) -> Result<f64, LinalgError> {
    if m.nnz() == 0 {
        return Ok(0.0);
    }
    let dense_fn = || m.to_dense().singular_values().max().powi(2);
    let dense: Option<&dyn Fn() -> f64> =
        (m.n_rows().max(m.n_cols()) <= DENSE_FALLBACK_MAX).then_some(&dense_fn);
    let lambda = largest_psd_eigenvalue(m.n_cols(), |v| Ok(m.mul_vec_transposed(&m.mul_vec(v))), dense);
    sqrt_estimate(lambda)
}

/// `‖M⁻¹‖₂` for a nonsingular `M`, i.e. `1/σ_min(M)`, by power iteration on
/// `M⁻ᵀM⁻¹` through one factorization.
pub fn inverse_two_norm(m: &SparseMatrix) -> Result<f64, LinalgError> {
    let n = m.require_square()?;
    let f = lu_factorize(m)?;
    let dense_fn = || m.to_dense().singular_values().min().powi(-2);
    let dense: Option<&dyn Fn() -> f64> = (n <= DENSE_FALLBACK_MAX).then_some(&dense_fn);
    let lambda = largest_psd_eigenvalue(n, |v| f.solve_transposed(&f.solve(v)?), dense);
    sqrt_estimate(lambda)
}

fn sqrt_estimate(lambda: Result<f64, LinalgError>) -> Result<f64, LinalgError> {
    match lambda {
        Ok(l) => Ok(l.max(0.0).sqrt()),
        Err(LinalgError::NoConvergence { estimate, iterations }) => Err(LinalgError::NoConvergence {
            estimate: estimate.max(0.0).sqrt(),
            iterations,
        }),
        Err(e) => Err(e),
    }
}

fn dense_symmetric_min(m: &SparseMatrix) -> f64 {
    m.to_dense().symmetric_eigenvalues().min()
}

/// Smallest eigenvalue of a symmetric positive definite matrix by inverse
/// iteration. Definiteness is established by an unpivoted factorization
/// with strictly positive pivots.
pub fn smallest_eigenvalue_spd(m: &SparseMatrix) -> Result<f64, LinalgError> {
    let n = m.require_square()?;
    if let Some((row, col)) = m.first_asymmetry(SYMMETRY_TOL) {
        return Err(LinalgError::NotSymmetric { row, col });
    }
    let f = match lu_factorize_with(m, PivotPolicy::Diagonal) {
        Ok(f) => f,
        Err(LinalgError::SingularMatrix { column, pivot }) => {
            return Err(LinalgError::NotPositiveDefinite { index: column, pivot })
        }
        Err(e) => return Err(e),
    };
    if let Some((index, &pivot)) = f.pivots().iter().enumerate().find(|(_, p)| **p <= 0.0) {
        return Err(LinalgError::NotPositiveDefinite { index, pivot });
    }

    let mut v = start_vector(n);
    let mut tracker = Tracker::new();
    let mut estimate = f64::NAN;
    for it in 0..MAX_POWER_ITERATIONS {
        let mut w = f.solve(&v)?;
        normalize(&mut w);
        let mw = m.mul_vec(&w);
        let theta: f64 = mw.iter().zip(&w).map(|(a, b)| a * b).sum();
        estimate = theta;
        if tracker.push(theta, POWER_TOL) && it >= 2 {
            if n <= DENSE_FALLBACK_MAX && tracker.rate > SLOW_RATE {
                return Ok(dense_symmetric_min(m));
            }
            return Ok(theta);
        }
        v = w;
    }
    if n <= DENSE_FALLBACK_MAX {
        return Ok(dense_symmetric_min(m));
    }
    Err(LinalgError::NoConvergence {
        estimate,
        iterations: MAX_POWER_ITERATIONS,
    })
}
