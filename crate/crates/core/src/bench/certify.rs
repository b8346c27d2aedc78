use std::fmt::Write;

use crate::certificates::{check_theorem1, check_theorem2, check_theorem3, check_theorem4, ConvergenceReport};
use crate::matrixlab::SparseMatrix;
use crate::problems::GaveProblem;
use crate::solvers::OmegaSpec;

use super::{build_instances, BenchConfig, BenchError, TableFormat};

/// Theorem 1–4 outcomes for one instance; failed checks keep their message.
#[derive(Debug, Clone)]
pub struct CertificateRow {
    pub label: String,
    pub n: usize,
    pub results: Vec<(u8, Result<ConvergenceReport, String>)>,
}

fn scalar_of(omega: &SparseMatrix) -> Option<f64> {
    let d = omega.diagonal();
    let w = *d.first()?;
    (omega.is_diagonal() && d.iter().all(|&v| v == w)).then_some(w)
}

pub fn certify_problem(label: &str, problem: &GaveProblem, omega: &OmegaSpec) -> CertificateRow {
    let n = problem.dim();
    let omega = match omega.resolve(problem.a()) {
        Ok(o) => o,
        Err(e) => {
            return CertificateRow { label: label.into(), n, results: (1..=4).map(|t| (t, Err(e.to_string()))).collect() }
        }
    };
    let t3 = match scalar_of(&omega) {
        Some(w) => check_theorem3(problem, w).map_err(|e| e.to_string()),
        None => Err("omega is not a scalar multiple of the identity".into()),
    };
    CertificateRow {
        label: label.into(),
        n,
        results: vec![
            (1, check_theorem1(problem, &omega).map_err(|e| e.to_string())),
            (2, check_theorem2(problem, &omega).map_err(|e| e.to_string())),
            (3, t3),
            (4, check_theorem4(problem, &omega).map_err(|e| e.to_string())),
        ],
    }
}

/// One row of certificate verdicts per configured instance.
pub fn certify(config: &BenchConfig) -> Result<Vec<CertificateRow>, BenchError> {
    Ok(build_instances(config)?
        .iter()
        .map(|inst| certify_problem(&inst.label, &inst.problem, &config.omega))
        .collect())
}

pub fn emit_certificates(rows: &[CertificateRow], format: TableFormat) -> String {
    let mut s = String::new();
    match format {
        TableFormat::Csv => {
            writeln!(s, "instance,n,{},error", ConvergenceReport::CSV_HEADER).unwrap();
            for row in rows {
                for (t, r) in &row.results {
                    match r {
                        Ok(rep) => writeln!(s, "{},{},{},", row.label, row.n, rep.csv_row()).unwrap(),
                        Err(e) => {
                            let e = e.replace(',', ";");
                            writeln!(s, "{},{},{t},,,,,,,,,{e}", row.label, row.n).unwrap()
                        }
                    }
                }
            }
        }
        TableFormat::Markdown => {
            s.push_str("| Instance | n | Theorem 1 | Theorem 2 | Theorem 3 | Theorem 4 |\n|---|---:|---|---|---|---|\n");
            for row in rows {
                write!(s, "| {} | {} |", row.label, row.n).unwrap();
                for (_, r) in &row.results {
                    let cell = match r {
                        Ok(rep) => format!(
                            "{} (margin {:.4e})",
                            if rep.holds { "holds" } else { "fails" },
                            rep.margin
                        ),
                        Err(e) => format!("n/a: {e}"),
                    };
                    write!(s, " {cell} |").unwrap();
                }
                s.push('\n');
            }
        }
    }
    s
}
