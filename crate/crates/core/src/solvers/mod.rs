//! Fixed-point iterations for `A x − B|x| = b` and the sign-reduced linear solve.
//!
//! All iterative methods share [`iteration_driver`]: the residual is evaluated
//! after every update and `iterations` counts updates, so `x⁰` is not counted.

mod methods;
mod reduced;

pub use methods::{solve_max_based, solve_mn, solve_nms, SplittingStrategy};
pub use reduced::{solve_sign_reduced, AssumedSign, ReducedBackend};

use std::time::Instant;

use thiserror::Error;

use crate::matrixlab::{LinalgError, SparseMatrix};
use crate::problems::{GaveProblem, ProblemError};

/// Iteration stops with [`StopReason::Diverged`] once the residual exceeds this.
pub const DIVERGENCE_LIMIT: f64 = 1e12;

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("iteration matrix is singular (pivot {pivot:e} in column {column})")]
    SingularIterationMatrix { column: usize, pivot: f64 },
    #[error("invalid splitting: {0}")]
    InvalidSplitting(String),
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Linalg(LinalgError),
}

impl From<LinalgError> for SolveError {
    fn from(e: LinalgError) -> Self {
        match e {
            LinalgError::SingularMatrix { column, pivot } => Self::SingularIterationMatrix { column, pivot },
            other => Self::Linalg(other),
        }
    }
}

/// How the parameter matrix `Ω` is chosen.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum OmegaSpec {
    #[default]
    DiagonalOfA,
    /// `ω·I`.
    Scalar(f64),
    Explicit(SparseMatrix),
}

impl OmegaSpec {
    pub fn resolve(&self, a: &SparseMatrix) -> Result<SparseMatrix, SolveError> {
        let n = a.n_rows();
        match self {
            Self::DiagonalOfA => Ok(SparseMatrix::from_diagonal(&a.diagonal())),
            Self::Scalar(w) => {
                if !w.is_finite() {
                    return Err(SolveError::InvalidConfig(format!("omega must be finite, got {w}")));
                }
                Ok(SparseMatrix::from_diagonal(&vec![*w; n]))
            }
            Self::Explicit(m) => {
                if m.n_rows() != n || m.n_cols() != n {
                    return Err(SolveError::InvalidConfig(format!(
                        "omega is {}x{}, expected {n}x{n}",
                        m.n_rows(),
                        m.n_cols()
                    )));
                }
                Ok(m.clone())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub omega: OmegaSpec,
    pub tol: f64,
    pub k_max: usize,
    /// Starting vector; `None` means the zero vector.
    pub x0: Option<Vec<f64>>,
    /// Keep every iterate `x¹, x², …` in the report.
    pub record_iterates: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            omega: OmegaSpec::DiagonalOfA,
            tol: 1e-6,
            k_max: 500,
            x0: None,
            record_iterates: false,
        }
    }
}

impl SolverConfig {
    pub(crate) fn validate(&self, n: usize) -> Result<Vec<f64>, SolveError> {
        if !(self.tol > 0.0) {
            return Err(SolveError::InvalidConfig(format!("tol must be positive, got {}", self.tol)));
        }
        if self.k_max < 1 {
            return Err(SolveError::InvalidConfig("k_max must be at least 1".into()));
        }
        match &self.x0 {
            None => Ok(vec![0.0; n]),
            Some(x) if x.len() == n => Ok(x.clone()),
            Some(x) => Err(ProblemError::DimensionMismatch { expected: n, found: x.len() }.into()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    Converged,
    MaxIterations,
    Diverged,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// Residual after each update; its length equals `iterations`.
    pub residual_log: Vec<f64>,
    pub converged: bool,
    pub stop_reason: StopReason,
    /// Seconds spent in the solve, factorization included.
    pub wall_time: f64,
    /// Set by the sign-reduced solve only.
    pub sign_consistent: Option<bool>,
    /// The residuals are absolute norms because `b = 0`.
    pub residual_is_absolute: bool,
    /// Iterates after each update when requested in the config.
    pub iterates: Vec<Vec<f64>>,
}

impl SolveReport {
    pub fn final_residual(&self) -> Option<f64> {
        self.residual_log.last().copied()
    }
}

/// `max{0, xᵢ}` componentwise.
pub fn max_plus(x: &[f64]) -> Vec<f64> {
    x.iter().map(|&v| if v > 0.0 { v } else { 0.0 }).collect()
}

/// Runs `step(xᵏ, xᵏ⁺¹)` from the configured start until the GAVE residual
/// drops below `tol`, `k_max` updates are done or the residual blows up.
pub fn iteration_driver<F>(problem: &GaveProblem, config: &SolverConfig, step: F) -> Result<SolveReport, SolveError>
where
    F: FnMut(&[f64], &mut [f64]) -> Result<(), SolveError>,
{
    let start = Instant::now();
    let x0 = config.validate(problem.dim())?;
    let absolute = problem.residual_detail(&x0)?.absolute;
    let mut report = drive(config, x0, step, |x| problem.residual(x).map_err(SolveError::from))?;
    report.residual_is_absolute = absolute;
    report.wall_time = start.elapsed().as_secs_f64();
    Ok(report)
}

pub(crate) fn drive<F, R>(config: &SolverConfig, x0: Vec<f64>, mut step: F, residual: R) -> Result<SolveReport, SolveError>
where
    F: FnMut(&[f64], &mut [f64]) -> Result<(), SolveError>,
    R: Fn(&[f64]) -> Result<f64, SolveError>,
{
    let start = Instant::now();
    let mut x = x0;
    let mut next = vec![0.0; x.len()];
    let mut log = Vec::new();
    let mut iterates = Vec::new();
    let mut stop = StopReason::MaxIterations;
    for _ in 0..config.k_max {
        step(&x, &mut next)?;
        std::mem::swap(&mut x, &mut next);
        let res = residual(&x)?;
        log.push(res);
        if config.record_iterates {
            iterates.push(x.clone());
        }
        if res < config.tol {
            stop = StopReason::Converged;
            break;
        }
        if !(res <= DIVERGENCE_LIMIT) {
            stop = StopReason::Diverged;
            break;
        }
    }
    Ok(SolveReport {
        x,
        iterations: log.len(),
        residual_log: log,
        converged: stop == StopReason::Converged,
        stop_reason: stop,
        wall_time: start.elapsed().as_secs_f64(),
        sign_consistent: None,
        residual_is_absolute: false,
        iterates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn small_problem() -> GaveProblem {
        let a = SparseMatrix::from_dense_rows(&[vec![4.0, -1.0], vec![-1.0, 4.0]]).unwrap();
        GaveProblem::new(a, SparseMatrix::identity(2), vec![-6.0, 4.0]).unwrap()
    }

    #[test]
    fn max_plus_examples() {
        assert_eq!(max_plus(&[-1.0, 0.0, 2.0]), vec![0.0, 0.0, 2.0]);
        assert_eq!(max_plus(&[-3.0, -0.0]), vec![0.0, 0.0]);
    }

    proptest! {
        #[test]
        fn max_plus_reconstructs_abs(x in proptest::collection::vec(-1e300f64..1e300, 0..50)) {
            let m = max_plus(&x);
            for (xi, mi) in x.iter().zip(&m) {
                prop_assert_eq!(2.0 * mi - xi, xi.abs());
            }
        }
    }

    #[test]
    fn identity_step_exhausts_budget() {
        let p = small_problem();
        let cfg = SolverConfig { k_max: 37, ..Default::default() };
        let r = iteration_driver(&p, &cfg, |x, y| {
            y.copy_from_slice(x);
            Ok(())
        })
        .unwrap();
        assert_eq!(r.iterations, 37);
        assert_eq!(r.residual_log.len(), 37);
        assert!(!r.converged);
        assert_eq!(r.stop_reason, StopReason::MaxIterations);
    }

    #[test]
    fn jump_to_solution_takes_one_step() {
        let p = small_problem();
        let r = iteration_driver(&p, &SolverConfig::default(), |_, y| {
            y.copy_from_slice(&[-1.0, 1.0]);
            Ok(())
        })
        .unwrap();
        assert_eq!(r.iterations, 1);
        assert!(r.converged);
        assert_eq!(r.residual_log, vec![0.0]);
    }

    #[test]
    fn blow_up_is_reported_as_divergence() {
        let p = small_problem();
        let r = iteration_driver(&p, &SolverConfig::default(), |x, y| {
            for (a, b) in y.iter_mut().zip(x) {
                *a = 1e3 * b + 1.0;
            }
            Ok(())
        })
        .unwrap();
        assert_eq!(r.stop_reason, StopReason::Diverged);
        assert!(r.iterations < 10);
    }

    #[test]
    fn config_is_validated() {
        let p = small_problem();
        let noop = |x: &[f64], y: &mut [f64]| {
            y.copy_from_slice(x);
            Ok(())
        };
        for cfg in [
            SolverConfig { tol: 0.0, ..Default::default() },
            SolverConfig { k_max: 0, ..Default::default() },
            SolverConfig { x0: Some(vec![1.0]), ..Default::default() },
        ] {
            assert!(iteration_driver(&p, &cfg, noop).is_err());
        }
    }

    #[test]
    fn omega_resolution() {
        let a = SparseMatrix::from_dense_rows(&[vec![4.0, -1.0], vec![-1.0, 5.0]]).unwrap();
        assert_eq!(OmegaSpec::DiagonalOfA.resolve(&a).unwrap(), SparseMatrix::from_diagonal(&[4.0, 5.0]));
        assert_eq!(OmegaSpec::Scalar(2.0).resolve(&a).unwrap(), SparseMatrix::from_diagonal(&[2.0, 2.0]));
        assert!(OmegaSpec::Explicit(SparseMatrix::identity(3)).resolve(&a).is_err());
        assert!(OmegaSpec::Scalar(f64::NAN).resolve(&a).is_err());
    }
}
