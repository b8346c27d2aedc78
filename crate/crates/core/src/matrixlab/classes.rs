//! Comparison matrices, M-matrix tests and the `D − L − U` splitting.

use std::fmt;

use super::spectral::spectral_radius;
use super::{LinalgError, SparseMatrix};

/// `⟨M⟩`: `|mᵢᵢ|` on the diagonal and `−|mᵢⱼ|` elsewhere.
pub fn comparison_matrix(m: &SparseMatrix) -> SparseMatrix {
    m.map_values(|i, j, v| if i == j { v.abs() } else { -v.abs() })
}

/// Outcome of [`is_m_matrix`], carrying the evidence for the verdict.
#[derive(Debug, Clone, PartialEq)]
pub enum MMatrixVerdict {
    /// Z-matrix with positive diagonal and `ρ(I − D⁻¹M) < 1`.
    MMatrix { jacobi_radius: f64 },
    NotSquare,
    NotZMatrix { row: usize, col: usize, value: f64 },
    NonPositiveDiagonal { index: usize, value: f64 },
    JacobiRadiusTooLarge { jacobi_radius: f64 },
    /// The power iteration did not settle; the verdict uses its last estimate.
    Unresolved { estimate: f64 },
}

impl MMatrixVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, Self::MMatrix { .. })
    }

    pub fn jacobi_radius(&self) -> Option<f64> {
        match *self {
            Self::MMatrix { jacobi_radius } | Self::JacobiRadiusTooLarge { jacobi_radius } => Some(jacobi_radius),
            Self::Unresolved { estimate } => Some(estimate),
            _ => None,
        }
    }
}

impl fmt::Display for MMatrixVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::MMatrix { jacobi_radius } => write!(f, "M-matrix (rho(J)={jacobi_radius:.6e})"),
            Self::NotSquare => write!(f, "not square"),
            Self::NotZMatrix { row, col, value } => {
                write!(f, "not a Z-matrix: entry ({row},{col}) = {value:e}")
            }
            Self::NonPositiveDiagonal { index, value } => {
                write!(f, "non-positive diagonal at {index}: {value:e}")
            }
            Self::JacobiRadiusTooLarge { jacobi_radius } => {
                write!(f, "rho(J)={jacobi_radius:.6e} >= 1")
            }
            Self::Unresolved { estimate } => write!(f, "unresolved (rho(J)~{estimate:.6e})"),
        }
    }
}

/// Nonsingular M-matrix test through the Jacobi splitting.
///
/// For a Z-matrix `M = D − N` with positive diagonal, `M` is a nonsingular
/// M-matrix exactly when `ρ(D⁻¹N) < 1`; `D⁻¹N = I − D⁻¹M` is nonnegative so
/// its spectral radius is a Perron root.
pub fn is_m_matrix(m: &SparseMatrix) -> MMatrixVerdict {
    let Ok(n) = m.require_square() else {
        return MMatrixVerdict::NotSquare;
    };
    if let Some((row, col, value)) = m.iter().find(|&(i, j, v)| i != j && v > 0.0) {
        return MMatrixVerdict::NotZMatrix { row, col, value };
    }
    let diag = m.diagonal();
    if let Some((index, &value)) = diag.iter().enumerate().find(|(_, d)| **d <= 0.0) {
        return MMatrixVerdict::NonPositiveDiagonal { index, value };
    }
    let jacobi = SparseMatrix::from_triplets(
        n,
        n,
        m.iter().filter(|&(i, j, _)| i != j).map(|(i, j, v)| (i, j, -v / diag[i])),
    )
    .expect("same pattern");
    match spectral_radius(&jacobi) {
        Ok(r) if r < 1.0 => MMatrixVerdict::MMatrix { jacobi_radius: r },
        Ok(r) => MMatrixVerdict::JacobiRadiusTooLarge { jacobi_radius: r },
        Err(LinalgError::NoConvergence { estimate, .. }) => MMatrixVerdict::Unresolved { estimate },
        Err(_) => unreachable!("Jacobi matrix of a Z-matrix is square and nonnegative"),
    }
}

/// `A = D − L − U` with `L`, `U` the negated strictly lower and upper parts.
#[derive(Debug, Clone, PartialEq)]
pub struct Splitting {
    pub d: SparseMatrix,
    pub l: SparseMatrix,
    pub u: SparseMatrix,
}

impl Splitting {
    pub fn of(a: &SparseMatrix) -> Self {
        Self {
            d: a.filter(|i, j| i == j),
            l: a.filter(|i, j| i > j).scale(-1.0),
            u: a.filter(|i, j| i < j).scale(-1.0),
        }
    }

    /// `D − L − U`.
    pub fn reconstruct(&self) -> SparseMatrix {
        self.d
            .sub(&self.l)
            .and_then(|m| m.sub(&self.u))
            .expect("parts share a shape")
    }
}
