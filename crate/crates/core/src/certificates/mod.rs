//! Sufficient convergence conditions for the max-based iteration, with margins.

mod report;

pub use report::{ClassVerdict, ConvergenceReport};

use rayon::prelude::*;
use thiserror::Error;

use crate::matrixlab::{
    comparison_matrix, inverse_two_norm, is_m_matrix, lu_factorize, smallest_eigenvalue_spd, spectral_radius,
    two_norm, LinalgError, SparseMatrix,
};
use crate::problems::GaveProblem;

/// Largest order for which `f_Ω + g_Ω` is formed explicitly.
pub const DENSE_THRESHOLD: usize = 4096;

#[derive(Debug, Error)]
pub enum CertificateError {
    #[error("matrix is singular (pivot {pivot:e} in column {column})")]
    SingularIterationMatrix { column: usize, pivot: f64 },
    #[error("order {n} exceeds the dense limit {limit}")]
    TooLargeForDense { n: usize, limit: usize },
    #[error("A+B is not symmetric: entry ({row},{col}) differs from its transpose")]
    NotSymmetric { row: usize, col: usize },
    #[error("A+B is not positive definite (pivot {pivot:e} at {index})")]
    NotPositiveDefinite { index: usize, pivot: f64 },
    #[error("invalid omega: {0}")]
    InvalidOmega(String),
    #[error(transparent)]
    Linalg(LinalgError),
}

impl From<LinalgError> for CertificateError {
    fn from(e: LinalgError) -> Self {
        match e {
            LinalgError::SingularMatrix { column, pivot } => Self::SingularIterationMatrix { column, pivot },
            LinalgError::NotSymmetric { row, col } => Self::NotSymmetric { row, col },
            LinalgError::NotPositiveDefinite { index, pivot } => Self::NotPositiveDefinite { index, pivot },
            other => Self::Linalg(other),
        }
    }
}

fn check_omega_shape(problem: &GaveProblem, omega: &SparseMatrix) -> Result<(), CertificateError> {
    let n = problem.dim();
    if omega.n_rows() != n || omega.n_cols() != n {
        return Err(CertificateError::InvalidOmega(format!(
            "omega is {}x{}, expected {n}x{n}",
            omega.n_rows(),
            omega.n_cols()
        )));
    }
    Ok(())
}

/// `f_Ω + g_Ω = |(A+B+Ω)⁻¹Ω| + 2|(A+B+Ω)⁻¹B|`, formed column by column.
pub fn theorem1_matrix(problem: &GaveProblem, omega: &SparseMatrix) -> Result<SparseMatrix, CertificateError> {
    check_omega_shape(problem, omega)?;
    let n = problem.dim();
    if n > DENSE_THRESHOLD {
        return Err(CertificateError::TooLargeForDense { n, limit: DENSE_THRESHOLD });
    }
    let k = problem.a().add(problem.b())?.add(omega)?;
    let lu = lu_factorize(&k)?;
    // Columns of Ω and B are rows of their transposes.
    let omega_t = omega.transpose();
    let b_t = problem.b().transpose();
    let column = |m_t: &SparseMatrix, j: usize| -> Result<Vec<f64>, LinalgError> {
        let mut c = vec![0.0; n];
        let (idx, val) = m_t.row(j);
        if idx.is_empty() {
            return Ok(c);
        }
        for (&i, &v) in idx.iter().zip(val) {
            c[i] = v;
        }
        lu.solve(&c)
    };
    let cols: Vec<Vec<(usize, usize, f64)>> = (0..n)
        .into_par_iter()
        .map(|j| {
            let f = column(&omega_t, j)?;
            let g = column(&b_t, j)?;
            Ok(f.iter()
                .zip(&g)
                .enumerate()
                .map(|(i, (fi, gi))| (i, j, fi.abs() + 2.0 * gi.abs()))
                .filter(|t| t.2 != 0.0)
                .collect())
        })
        .collect::<Result<_, LinalgError>>()?;
    Ok(SparseMatrix::from_triplets(n, n, cols.into_iter().flatten())?)
}

/// `ρ(f_Ω + g_Ω) < 1`.
pub fn check_theorem1(problem: &GaveProblem, omega: &SparseMatrix) -> Result<ConvergenceReport, CertificateError> {
    let rho = spectral_radius(&theorem1_matrix(problem, omega)?)?;
    let mut r = ConvergenceReport::new(1, rho < 1.0, 1.0 - rho);
    r.rho = Some(rho);
    Ok(r)
}

/// `‖(A+B)⁻¹‖₂ < 1/(2‖Ω‖₂ + 2‖B‖₂)`. A zero denominator gives `rhs = +∞`.
pub fn check_theorem2(problem: &GaveProblem, omega: &SparseMatrix) -> Result<ConvergenceReport, CertificateError> {
    check_omega_shape(problem, omega)?;
    let k = problem.a().add(problem.b())?;
    let lhs = inverse_two_norm(&k)?;
    let denom = 2.0 * two_norm(omega)? + 2.0 * two_norm(problem.b())?;
    let rhs = if denom > 0.0 { 1.0 / denom } else { f64::INFINITY };
    let mut r = ConvergenceReport::new(2, lhs < rhs, rhs - lhs);
    r.lhs = Some(lhs);
    r.rhs = Some(rhs);
    Ok(r)
}

/// `τ = 2‖B‖₂ < μ_min(A+B)` for symmetric positive definite `A+B`, `Ω = ωI`.
pub fn check_theorem3(problem: &GaveProblem, omega: f64) -> Result<ConvergenceReport, CertificateError> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(CertificateError::InvalidOmega(format!("omega must be a positive scalar, got {omega}")));
    }
    let k = problem.a().add(problem.b())?;
    let mu_min = smallest_eigenvalue_spd(&k)?;
    let tau = 2.0 * two_norm(problem.b())?;
    let mut r = ConvergenceReport::new(3, tau < mu_min, mu_min - tau);
    r.tau = Some(tau);
    r.mu_min = Some(mu_min);
    r.lhs = Some(tau);
    r.rhs = Some(mu_min);
    r.omega = Some(omega);
    Ok(r)
}

/// `A+B` is an H₊-matrix and `⟨A+B⟩ − 2|B|` is an M-matrix.
pub fn check_theorem4(problem: &GaveProblem, omega: &SparseMatrix) -> Result<ConvergenceReport, CertificateError> {
    check_omega_shape(problem, omega)?;
    if !omega.is_diagonal() {
        return Err(CertificateError::InvalidOmega("omega must be diagonal".into()));
    }
    if let Some((i, d)) = omega.diagonal().into_iter().enumerate().find(|(_, d)| !(*d > 0.0)) {
        return Err(CertificateError::InvalidOmega(format!("omega diagonal entry {i} is {d:e}, not positive")));
    }
    let k = problem.a().add(problem.b())?;
    let cmp = comparison_matrix(&k);
    let h = is_m_matrix(&cmp);
    let diag_witness = k.diagonal().into_iter().enumerate().find(|(_, d)| !(*d > 0.0));
    let shifted = cmp.sub(&problem.b().abs().scale(2.0))?;
    let m = is_m_matrix(&shifted);

    let holds = h.holds() && diag_witness.is_none() && m.holds();
    let margin = m.jacobi_radius().map(|r| 1.0 - r).unwrap_or(f64::NEG_INFINITY);
    let mut r = ConvergenceReport::new(4, holds, margin);
    r.rho = m.jacobi_radius();
    r.class_verdicts.push(ClassVerdict::new("<A+B> M-matrix", h.holds(), h.to_string()));
    r.class_verdicts.push(match diag_witness {
        None => ClassVerdict::new("diag(A+B) > 0", true, "positive".into()),
        Some((i, d)) => ClassVerdict::new("diag(A+B) > 0", false, format!("entry {i} is {d:e}")),
    });
    r.class_verdicts.push(ClassVerdict::new("<A+B> - 2|B| M-matrix", m.holds(), m.to_string()));
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{generate_lattice, lcp_to_gave, LatticeParams, LatticeVariant};

    fn rows(r: &[&[f64]]) -> SparseMatrix {
        SparseMatrix::from_dense_rows(&r.iter().map(|x| x.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn diag_problem(a: f64, b: f64) -> GaveProblem {
        GaveProblem::new(
            SparseMatrix::from_diagonal(&[a, a]),
            SparseMatrix::from_diagonal(&[b, b]),
            vec![1.0, -1.0],
        )
        .unwrap()
    }

    fn lattice(m: usize) -> GaveProblem {
        let lcp = generate_lattice(LatticeParams { m, mu: 4.0, variant: LatticeVariant::Symmetric }).unwrap();
        lcp_to_gave(&lcp).0
    }

    fn dense_theorem1_radius(p: &GaveProblem, omega: &SparseMatrix) -> f64 {
        let k = (p.a().to_dense() + p.b().to_dense() + omega.to_dense()).try_inverse().unwrap();
        let s = (&k * omega.to_dense()).abs() + (&k * p.b().to_dense()).abs() * 2.0;
        s.complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn theorem1_linear_case() {
        let p = GaveProblem::new(rows(&[&[2.0, 1.0], &[0.0, 3.0]]), SparseMatrix::zeros(2, 2), vec![1.0, 1.0]).unwrap();
        let r = check_theorem1(&p, &SparseMatrix::zeros(2, 2)).unwrap();
        assert!(r.holds);
        assert_eq!(r.rho, Some(0.0));
    }

    #[test]
    fn theorem1_diagonal_closed_form() {
        let r = check_theorem1(&diag_problem(10.0, 0.1), &SparseMatrix::identity(2)).unwrap();
        assert!(r.holds);
        assert!((r.rho.unwrap() - 1.2 / 11.1).abs() < 1e-12);
        assert!((r.margin - (1.0 - 1.2 / 11.1)).abs() < 1e-12);
    }

    #[test]
    fn theorem1_matches_dense_eigenvalues_on_lattice() {
        for m in [2, 3, 4] {
            let p = lattice(m);
            let omega = SparseMatrix::from_diagonal(&p.a().diagonal());
            let r = check_theorem1(&p, &omega).unwrap();
            let expected = dense_theorem1_radius(&p, &omega);
            assert!((r.rho.unwrap() - expected).abs() < 1e-8, "m={m}: {:?} vs {expected}", r.rho);
            assert_eq!(r.holds, expected < 1.0);
        }
    }

    #[test]
    fn theorem1_errors() {
        let p = GaveProblem::new(SparseMatrix::zeros(2, 2), SparseMatrix::zeros(2, 2), vec![1.0, 1.0]).unwrap();
        assert!(matches!(
            check_theorem1(&p, &SparseMatrix::zeros(2, 2)),
            Err(CertificateError::SingularIterationMatrix { .. })
        ));
        let n = DENSE_THRESHOLD + 1;
        let big = GaveProblem::new(SparseMatrix::identity(n), SparseMatrix::zeros(n, n), vec![1.0; n]).unwrap();
        assert!(matches!(
            check_theorem1(&big, &SparseMatrix::identity(n)),
            Err(CertificateError::TooLargeForDense { .. })
        ));
    }

    #[test]
    fn theorem2_closed_forms() {
        let r = check_theorem2(&diag_problem(10.0, 0.1), &SparseMatrix::identity(2)).unwrap();
        assert!(r.holds);
        assert!((r.lhs.unwrap() - 1.0 / 10.1).abs() < 1e-9);
        assert!((r.rhs.unwrap() - 1.0 / 2.2).abs() < 1e-9);

        let r = check_theorem2(&diag_problem(1.0, 0.9), &SparseMatrix::identity(2)).unwrap();
        assert!(!r.holds);
        assert!((r.lhs.unwrap() - 1.0 / 1.9).abs() < 1e-9);
        assert!((r.rhs.unwrap() - 1.0 / 3.8).abs() < 1e-9);
        assert!(r.margin < 0.0);

        let p = GaveProblem::new(rows(&[&[2.0, 1.0], &[0.0, 3.0]]), SparseMatrix::zeros(2, 2), vec![1.0, 1.0]).unwrap();
        let r = check_theorem2(&p, &SparseMatrix::zeros(2, 2)).unwrap();
        assert!(r.holds);
        assert_eq!(r.rhs, Some(f64::INFINITY));
    }

    #[test]
    fn theorem3_examples() {
        let r = check_theorem3(&diag_problem(10.0, 0.1), 1.0).unwrap();
        assert!(r.holds);
        assert!((r.tau.unwrap() - 0.2).abs() < 1e-9);
        assert!((r.mu_min.unwrap() - 10.1).abs() < 1e-9);

        let p = GaveProblem::new(rows(&[&[2.0, -1.0], &[-1.0, 2.0]]), SparseMatrix::from_diagonal(&[2.0, 2.0]), vec![1.0, 1.0])
            .unwrap();
        let r = check_theorem3(&p, 0.5).unwrap();
        assert!(!r.holds);
        assert!((r.tau.unwrap() - 4.0).abs() < 1e-9);
        assert!((r.mu_min.unwrap() - 3.0).abs() < 1e-9);
        assert_eq!(check_theorem3(&p, 7.0).unwrap().holds, r.holds);
    }

    #[test]
    fn theorem3_on_lattice_matches_dense_eigen() {
        let p = lattice(4);
        let r = check_theorem3(&p, 1.0).unwrap();
        let sum = p.a().to_dense() + p.b().to_dense();
        let mu = sum.symmetric_eigenvalues().min();
        let tau = 2.0 * p.b().to_dense().singular_values().max();
        assert!((r.mu_min.unwrap() - mu).abs() < 1e-8);
        assert!((r.tau.unwrap() - tau).abs() < 1e-8);
        assert_eq!(r.holds, tau < mu);
        assert!(!r.holds);
    }

    #[test]
    fn theorem3_errors() {
        let p = diag_problem(1.0, 0.0);
        assert!(matches!(check_theorem3(&p, 0.0), Err(CertificateError::InvalidOmega(_))));
        let ns = GaveProblem::new(rows(&[&[2.0, 1.0], &[0.0, 3.0]]), SparseMatrix::zeros(2, 2), vec![1.0, 1.0]).unwrap();
        assert!(matches!(check_theorem3(&ns, 1.0), Err(CertificateError::NotSymmetric { .. })));
        let indef = diag_problem(-1.0, 0.0);
        assert!(matches!(check_theorem3(&indef, 1.0), Err(CertificateError::NotPositiveDefinite { .. })));
    }

    #[test]
    fn theorem4_examples() {
        let s = rows(&[&[4.0, -1.0], &[-1.0, 4.0]]);
        let p = GaveProblem::new(s.clone(), SparseMatrix::from_diagonal(&[0.1, 0.1]), vec![1.0, 1.0]).unwrap();
        let r = check_theorem4(&p, &SparseMatrix::identity(2)).unwrap();
        assert!(r.holds);
        assert!(r.class_verdicts.iter().all(|v| v.holds));
        // ⟨A+B⟩ − 2|B| = [[3.9, −1], [−1, 3.9]]: Jacobi radius 1/3.9.
        assert!((r.rho.unwrap() - 1.0 / 3.9).abs() < 1e-9);

        let p = GaveProblem::new(s, SparseMatrix::zeros(2, 2), vec![1.0, 1.0]).unwrap();
        assert!(check_theorem4(&p, &SparseMatrix::identity(2)).unwrap().holds);
    }

    #[test]
    fn theorem4_fails_on_lattice() {
        let p = lattice(2);
        let omega = SparseMatrix::from_diagonal(&p.a().diagonal());
        let r = check_theorem4(&p, &omega).unwrap();
        assert!(!r.holds);
        assert!(r.class_verdicts[0].holds);
        assert!(!r.class_verdicts[2].holds);
    }

    #[test]
    fn theorem4_rejects_bad_omega() {
        let p = diag_problem(4.0, 0.1);
        for omega in [
            SparseMatrix::from_diagonal(&[1.0, 0.0]),
            SparseMatrix::from_dense_rows(&[vec![1.0, 0.5], vec![0.0, 1.0]]).unwrap(),
            SparseMatrix::from_diagonal(&[1.0, -1.0]),
        ] {
            assert!(matches!(check_theorem4(&p, &omega), Err(CertificateError::InvalidOmega(_))));
        }
    }
}
