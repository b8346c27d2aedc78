//! Problem directories: `A.mtx`, `B.mtx`, `b.txt` and an optional `xstar.txt`.

use std::fs;
use std::path::Path;

use crate::matrixlab::mmio::{read_matrix_market_file, read_vector_file, write_matrix_market_file, write_vector_file};

use super::{GaveProblem, ProblemError};

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemDir {
    pub problem: GaveProblem,
    pub x_star: Option<Vec<f64>>,
}

pub fn read_problem_dir(dir: impl AsRef<Path>) -> Result<ProblemDir, ProblemError> {
    let dir = dir.as_ref();
    let a = read_matrix_market_file(dir.join("A.mtx"))?;
    let b = read_matrix_market_file(dir.join("B.mtx"))?;
    let rhs = read_vector_file(dir.join("b.txt"))?;
    let problem = GaveProblem::new(a, b, rhs)?;
    let xs_path = dir.join("xstar.txt");
    let x_star = if xs_path.exists() {
        let x = read_vector_file(xs_path)?;
        problem.check_len(&x)?;
        Some(x)
    } else {
        None
    };
    Ok(ProblemDir { problem, x_star })
}

pub fn write_problem_dir(dir: impl AsRef<Path>, problem: &GaveProblem, x_star: Option<&[f64]>) -> Result<(), ProblemError> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(crate::matrixlab::LinalgError::from)?;
    write_matrix_market_file(problem.a(), dir.join("A.mtx"))?;
    write_matrix_market_file(problem.b(), dir.join("B.mtx"))?;
    write_vector_file(problem.rhs(), dir.join("b.txt"))?;
    if let Some(x) = x_star {
        problem.check_len(x)?;
        write_vector_file(x, dir.join("xstar.txt"))?;
    }
    Ok(())
}
