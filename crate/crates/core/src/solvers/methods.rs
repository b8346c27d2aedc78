use std::time::Instant;

use crate::matrixlab::{lu_factorize, SparseMatrix, Splitting};
use crate::problems::GaveProblem;

use super::{iteration_driver, max_plus, SolveError, SolveReport, SolverConfig};

/// How `A = M − N` is split for [`solve_nms`].
#[derive(Debug, Clone, PartialEq)]
pub enum SplittingStrategy {
    /// `M = D − L`, `N = U`.
    GaussSeidel,
    /// `M = A`, `N = 0`.
    Full,
    Explicit { m: SparseMatrix, n: SparseMatrix },
}

/// Relative tolerance for checking `M − N = A` on explicit splittings.
const SPLITTING_TOL: f64 = 1e-12;

fn add_into(acc: &mut [f64], v: &[f64]) {
    for (a, b) in acc.iter_mut().zip(v) {
        *a += b;
    }
}

/// `xᵏ⁺¹ = (M+Ω)⁻¹((N+Ω)xᵏ + B|xᵏ| + b)` with `N+Ω` given directly.
fn linear_splitting(
    problem: &GaveProblem,
    config: &SolverConfig,
    m_plus_omega: SparseMatrix,
    n_plus_omega: SparseMatrix,
) -> Result<SolveReport, SolveError> {
    let start = Instant::now();
    let lu = lu_factorize(&m_plus_omega)?;
    let b = problem.b();
    let rhs = problem.rhs();
    let n = problem.dim();
    let mut abs_x = vec![0.0; n];
    let mut tmp = vec![0.0; n];
    let mut work = vec![0.0; n];
    let mut report = iteration_driver(problem, config, |x, y| {
        n_plus_omega.mul_vec_into(x, y);
        for (a, v) in abs_x.iter_mut().zip(x) {
            *a = v.abs();
        }
        b.mul_vec_into(&abs_x, &mut tmp);
        add_into(y, &tmp);
        add_into(y, rhs);
        lu.solve_in_place(y, &mut work)?;
        Ok(())
    })?;
    report.wall_time = start.elapsed().as_secs_f64();
    Ok(report)
}

/// Method 1: `xᵏ⁺¹ = (A+Ω)⁻¹(Ωxᵏ + B|xᵏ| + b)`.
pub fn solve_mn(problem: &GaveProblem, config: &SolverConfig) -> Result<SolveReport, SolveError> {
    let omega = config.omega.resolve(problem.a())?;
    let m_plus_omega = problem.a().add(&omega)?;
    linear_splitting(problem, config, m_plus_omega, omega)
}

/// Method 2: `xᵏ⁺¹ = (M+Ω)⁻¹((N+Ω)xᵏ + B|xᵏ| + b)` for `A = M − N`.
pub fn solve_nms(
    problem: &GaveProblem,
    config: &SolverConfig,
    strategy: &SplittingStrategy,
) -> Result<SolveReport, SolveError> {
    let a = problem.a();
    let omega = config.omega.resolve(a)?;
    let (m, n) = match strategy {
        SplittingStrategy::GaussSeidel => {
            let s = Splitting::of(a);
            (s.d.sub(&s.l)?, s.u)
        }
        SplittingStrategy::Full => (a.clone(), SparseMatrix::zeros(a.n_rows(), a.n_cols())),
        SplittingStrategy::Explicit { m, n } => {
            let diff = m.sub(n).map_err(|e| SolveError::InvalidSplitting(e.to_string()))?;
            let gap = diff.sub(a).map_err(|e| SolveError::InvalidSplitting(e.to_string()))?.max_abs();
            if gap > SPLITTING_TOL * a.max_abs().max(1.0) {
                return Err(SolveError::InvalidSplitting(format!("M − N differs from A by {gap:e}")));
            }
            (m.clone(), n.clone())
        }
    };
    linear_splitting(problem, config, m.add(&omega)?, n.add(&omega)?)
}

/// `A + B + Ω`, built the same way by every caller so factorizations agree.
pub(crate) fn max_based_matrix(problem: &GaveProblem, omega: &SparseMatrix) -> Result<SparseMatrix, SolveError> {
    Ok(problem.a().add(problem.b())?.add(omega)?)
}

/// Method 3: `xᵏ⁺¹ = (A+B+Ω)⁻¹(Ωxᵏ + 2B·max{0,xᵏ} + b)`.
pub fn solve_max_based(problem: &GaveProblem, config: &SolverConfig) -> Result<SolveReport, SolveError> {
    let start = Instant::now();
    let omega = config.omega.resolve(problem.a())?;
    let lu = lu_factorize(&max_based_matrix(problem, &omega)?)?;
    let b = problem.b();
    let rhs = problem.rhs();
    let n = problem.dim();
    let mut tmp = vec![0.0; n];
    let mut work = vec![0.0; n];
    let mut report = iteration_driver(problem, config, |x, y| {
        omega.mul_vec_into(x, y);
        b.mul_vec_into(&max_plus(x), &mut tmp);
        for (a, t) in y.iter_mut().zip(&tmp) {
            *a += 2.0 * t;
        }
        add_into(y, rhs);
        lu.solve_in_place(y, &mut work)?;
        Ok(())
    })?;
    report.wall_time = start.elapsed().as_secs_f64();
    Ok(report)
}
