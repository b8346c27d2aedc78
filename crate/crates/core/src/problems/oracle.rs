//! Exhaustive solution of small GAVEs over all `2ⁿ` sign patterns.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::{norm_inf, GaveProblem, ProblemError};

pub const ORACLE_MAX_DIM: usize = 20;
/// Solutions closer than this in the ∞-norm are merged.
const DEDUP_TOL: f64 = 1e-9;
/// Candidates whose dense relative residual exceeds this are discarded.
const RESIDUAL_TOL: f64 = 1e-9;
/// Slack on the sign test `sᵢ xᵢ ≥ 0`, relative to `1 + ‖x‖_∞`.
const SIGN_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleSolution {
    pub x: Vec<f64>,
    /// The branch `s` for which `(A − B diag(s)) x = b` produced `x`.
    pub sign_pattern: Vec<i8>,
}

/// Solves `(A − B·diag(s)) x = b` for every `s ∈ {−1, +1}ⁿ` by dense
/// elimination and keeps the solutions with `diag(s) x = |x|`.
///
/// Singular branches are skipped. Results are ordered by pattern index
/// (bit `i` set means `sᵢ = +1`) and deduplicated.
pub fn sign_enumeration_oracle(problem: &GaveProblem) -> Result<Vec<OracleSolution>, ProblemError> {
    let n = problem.dim();
    if n > ORACLE_MAX_DIM {
        return Err(ProblemError::TooLarge { n, limit: ORACLE_MAX_DIM });
    }
    let a = problem.a().to_dense();
    let b = problem.b().to_dense();
    let rhs = DVector::from_column_slice(problem.rhs());
    let rhs_norm = rhs.norm();
    let scale = if rhs_norm > 0.0 { rhs_norm } else { 1.0 };

    let candidates: Vec<OracleSolution> = (0u64..1 << n)
        .into_par_iter()
        .filter_map(|pattern| {
            let signs: Vec<f64> = (0..n).map(|i| if pattern >> i & 1 == 1 { 1.0 } else { -1.0 }).collect();
            let mut branch: DMatrix<f64> = a.clone();
            for j in 0..n {
                for i in 0..n {
                    branch[(i, j)] -= b[(i, j)] * signs[j];
                }
            }
            let x = branch.lu().solve(&rhs)?;
            if x.iter().any(|v| !v.is_finite()) {
                return None;
            }
            let slack = SIGN_SLACK * (1.0 + x.amax());
            if x.iter().zip(&signs).any(|(xi, s)| s * xi < -slack) {
                return None;
            }
            let abs_x = x.abs();
            let res = (&a * &x - &b * &abs_x - &rhs).norm() / scale;
            (res <= RESIDUAL_TOL).then(|| OracleSolution {
                x: x.iter().copied().collect(),
                sign_pattern: signs.iter().map(|&s| s as i8).collect(),
            })
        })
        .collect();

    let mut unique: Vec<OracleSolution> = Vec::new();
    for c in candidates {
        let seen = unique.iter().any(|u| {
            let diff: Vec<f64> = u.x.iter().zip(&c.x).map(|(p, q)| p - q).collect();
            norm_inf(&diff) <= DEDUP_TOL
        });
        if !seen {
            unique.push(c);
        }
    }
    Ok(unique)
}
