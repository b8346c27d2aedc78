//! GAVE and LCP problem definitions, the lattice benchmark generators, the
//! LCP ↔ GAVE conversion and a brute-force sign-enumeration oracle.

mod io;
mod lattice;
mod oracle;

pub use io::{read_problem_dir, write_problem_dir, ProblemDir};
pub use lattice::{generate_lattice, LatticeParams, LatticeVariant};
pub use oracle::{sign_enumeration_oracle, OracleSolution, ORACLE_MAX_DIM};

use thiserror::Error;

use crate::matrixlab::{LinalgError, SparseMatrix};

#[derive(Debug, Error)]
pub enum ProblemError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix {name} is {rows}x{cols}, expected {n}x{n}")]
    BadShape {
        name: &'static str,
        rows: usize,
        cols: usize,
        n: usize,
    },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("problem of order {n} exceeds the enumeration limit {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// `A x − B |x| = b`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaveProblem {
    a: SparseMatrix,
    b: SparseMatrix,
    rhs: Vec<f64>,
}

impl GaveProblem {
    pub fn new(a: SparseMatrix, b: SparseMatrix, rhs: Vec<f64>) -> Result<Self, ProblemError> {
        let n = rhs.len();
        for (name, m) in [("A", &a), ("B", &b)] {
            if m.n_rows() != n || m.n_cols() != n {
                return Err(ProblemError::BadShape {
                    name,
                    rows: m.n_rows(),
                    cols: m.n_cols(),
                    n,
                });
            }
        }
        Ok(Self { a, b, rhs })
    }

    pub fn dim(&self) -> usize {
        self.rhs.len()
    }

    pub fn a(&self) -> &SparseMatrix {
        &self.a
    }

    pub fn b(&self) -> &SparseMatrix {
        &self.b
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    pub(crate) fn check_len(&self, x: &[f64]) -> Result<(), ProblemError> {
        if x.len() == self.dim() {
            Ok(())
        } else {
            Err(ProblemError::DimensionMismatch {
                expected: self.dim(),
                found: x.len(),
            })
        }
    }

    /// `A x − B |x| − b`.
    pub fn residual_vector(&self, x: &[f64]) -> Result<Vec<f64>, ProblemError> {
        self.check_len(x)?;
        let abs_x: Vec<f64> = x.iter().map(|v| v.abs()).collect();
        let ax = self.a.mul_vec(x);
        let b_abs = self.b.mul_vec(&abs_x);
        Ok(ax
            .iter()
            .zip(&b_abs)
            .zip(&self.rhs)
            .map(|((p, q), r)| p - q - r)
            .collect())
    }

    /// Relative residual `‖A x − B|x| − b‖₂ / ‖b‖₂`; see [`Residual`].
    pub fn residual(&self, x: &[f64]) -> Result<f64, ProblemError> {
        self.residual_detail(x).map(|r| r.value)
    }

    pub fn residual_detail(&self, x: &[f64]) -> Result<Residual, ProblemError> {
        let r = norm2(&self.residual_vector(x)?);
        let scale = norm2(&self.rhs);
        Ok(if scale > 0.0 {
            Residual {
                value: r / scale,
                absolute: false,
            }
        } else {
            Residual {
                value: r,
                absolute: true,
            }
        })
    }
}

/// A GAVE residual. `absolute` is set when `b = 0` and the norm is reported
/// without normalization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residual {
    pub value: f64,
    pub absolute: bool,
}

/// Free-function form of [`GaveProblem::residual`].
pub fn residual(problem: &GaveProblem, x: &[f64]) -> Result<f64, ProblemError> {
    problem.residual(x)
}

pub(crate) fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub(crate) fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Find `z ≥ 0` with `w = R z + q ≥ 0` and `zᵀw = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct LcpProblem {
    pub r: SparseMatrix,
    pub q: Vec<f64>,
    pub known_solution: Option<Vec<f64>>,
}

impl LcpProblem {
    pub fn new(r: SparseMatrix, q: Vec<f64>, known_solution: Option<Vec<f64>>) -> Result<Self, ProblemError> {
        let n = q.len();
        if r.n_rows() != n || r.n_cols() != n {
            return Err(ProblemError::BadShape {
                name: "R",
                rows: r.n_rows(),
                cols: r.n_cols(),
                n,
            });
        }
        if let Some(z) = &known_solution {
            if z.len() != n {
                return Err(ProblemError::DimensionMismatch { expected: n, found: z.len() });
            }
        }
        Ok(Self { r, q, known_solution })
    }

    /// `R z + q`.
    pub fn w(&self, z: &[f64]) -> Vec<f64> {
        self.r.mul_vec(z).iter().zip(&self.q).map(|(a, b)| a + b).collect()
    }

    /// `‖min(z, R z + q)‖_∞`, zero exactly at LCP solutions.
    pub fn complementarity_residual(&self, z: &[f64]) -> f64 {
        let w = self.w(z);
        z.iter().zip(&w).fold(0.0, |m, (a, b)| m.max(a.min(*b).abs()))
    }
}

/// A known GAVE solution together with the LCP solution it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionWitness {
    pub x_star: Vec<f64>,
    pub z_star: Vec<f64>,
    /// `sign(x*ᵢ)` in {−1, 0, +1}.
    pub sign_pattern: Vec<i8>,
}

pub fn sign_pattern(x: &[f64]) -> Vec<i8> {
    x.iter()
        .map(|&v| if v > 0.0 { 1 } else if v < 0.0 { -1 } else { 0 })
        .collect()
}

/// `(R, q) ↦ (A, B, b) = (R + I, R − I, q)`.
///
/// With `w = |x| + x` and `z = |x| − x`, `x = (w − z)/2`, so a known LCP
/// solution `z*` yields the GAVE solution `(R z* + q − z*)/2`.
pub fn lcp_to_gave(lcp: &LcpProblem) -> (GaveProblem, Option<SolutionWitness>) {
    let n = lcp.q.len();
    let eye = SparseMatrix::identity(n);
    let a = lcp.r.add(&eye).expect("square");
    let b = lcp.r.sub(&eye).expect("square");
    let problem = GaveProblem::new(a, b, lcp.q.clone()).expect("shapes checked by LcpProblem");
    let witness = lcp.known_solution.as_ref().map(|z| {
        let w = lcp.w(z);
        let x_star: Vec<f64> = w.iter().zip(z).map(|(wi, zi)| 0.5 * (wi - zi)).collect();
        SolutionWitness {
            sign_pattern: sign_pattern(&x_star),
            x_star,
            z_star: z.clone(),
        }
    });
    (problem, witness)
}

/// `x ↦ (z, w) = (|x| − x, |x| + x)`.
pub fn gave_solution_to_lcp(x: &[f64]) -> (Vec<f64>, Vec<f64>) {
    x.iter().map(|&v| (v.abs() - v, v.abs() + v)).unzip()
}
