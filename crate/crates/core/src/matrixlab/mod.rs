//! Sparse matrix kernel: storage, LU, GMRES, spectral estimates and
//! matrix-class predicates.

mod classes;
mod gmres;
mod lu;
pub mod mmio;
mod sparse;
mod spectral;

pub use classes::{comparison_matrix, is_m_matrix, MMatrixVerdict, Splitting};
pub use gmres::{gmres, FnOperator, GmresOptions, GmresOutcome, LinearOperator};
pub use lu::{lu_factorize, lu_factorize_with, Factorization, PivotPolicy, SINGULARITY_CUTOFF};
pub use sparse::SparseMatrix;
pub use spectral::{
    inverse_two_norm, smallest_eigenvalue_spd, spectral_radius, two_norm, DENSE_FALLBACK_MAX,
    MAX_POWER_ITERATIONS, POWER_TOL, SYMMETRY_TOL,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("matrix is singular: pivot {pivot:e} at column {column}")]
    SingularMatrix { column: usize, pivot: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("shape mismatch: {left:?} vs {right:?}")]
    ShapeMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("matrix is not square ({n_rows}x{n_cols})")]
    NotSquare { n_rows: usize, n_cols: usize },
    #[error("entry ({row},{col}) outside a {n_rows}x{n_cols} matrix")]
    IndexOutOfBounds {
        row: usize,
        col: usize,
        n_rows: usize,
        n_cols: usize,
    },
    #[error("negative entry {value:e} at ({row},{col})")]
    NonNegativityViolation { row: usize, col: usize, value: f64 },
    #[error("no convergence after {iterations} iterations (estimate {estimate:e})")]
    NoConvergence { estimate: f64, iterations: usize },
    #[error("matrix is not symmetric at ({row},{col})")]
    NotSymmetric { row: usize, col: usize },
    #[error("matrix is not positive definite: pivot {pivot:e} at {index}")]
    NotPositiveDefinite { index: usize, pivot: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
