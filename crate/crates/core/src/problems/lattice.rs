//! Block-tridiagonal lattice LCPs on an `m × m` grid.

use crate::matrixlab::SparseMatrix;

use super::{LcpProblem, ProblemError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LatticeVariant {
    /// `R̂ = tridiag(−I, S, −I)`, `S = tridiag(−1, 4, −1)`.
    Symmetric,
    /// `R̂ = tridiag(−1.5I, S, −0.5I)`, `S = tridiag(−1.5, 4, −0.5)`.
    Nonsymmetric,
}

impl LatticeVariant {
    /// (sub-diagonal, super-diagonal) coupling.
    fn couplings(self) -> (f64, f64) {
        match self {
            Self::Symmetric => (-1.0, -1.0),
            Self::Nonsymmetric => (-1.5, -0.5),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeParams {
    pub m: usize,
    pub mu: f64,
    pub variant: LatticeVariant,
}

impl LatticeParams {
    pub fn n(&self) -> usize {
        self.m * self.m
    }
}

/// `z* = (1, 2, 1, 2, …)`, truncated to length `n`.
pub fn alternating_solution(n: usize) -> Vec<f64> {
    (0..n).map(|i| if i % 2 == 0 { 1.0 } else { 2.0 }).collect()
}

/// `R = R̂ + μI`, `q = −R z*` with the alternating `z*` as known solution.
pub fn generate_lattice(params: LatticeParams) -> Result<LcpProblem, ProblemError> {
    let m = params.m;
    if m < 1 {
        return Err(ProblemError::InvalidParams("grid dimension m must be at least 1".into()));
    }
    if !params.mu.is_finite() {
        return Err(ProblemError::InvalidParams("shift mu must be finite".into()));
    }
    let n = m * m;
    let (lower, upper) = params.variant.couplings();
    let mut trip = Vec::with_capacity(5 * n);
    for block in 0..m {
        for j in 0..m {
            let row = block * m + j;
            trip.push((row, row, 4.0 + params.mu));
            if j > 0 {
                trip.push((row, row - 1, lower));
            }
            if j + 1 < m {
                trip.push((row, row + 1, upper));
            }
            if block > 0 {
                trip.push((row, row - m, lower));
            }
            if block + 1 < m {
                trip.push((row, row + m, upper));
            }
        }
    }
    let r = SparseMatrix::from_triplets(n, n, trip)?;
    let z = alternating_solution(n);
    let q: Vec<f64> = r.mul_vec(&z).into_iter().map(|v| -v).collect();
    LcpProblem::new(r, q, Some(z))
}
