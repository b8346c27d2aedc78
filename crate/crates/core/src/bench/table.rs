use std::fmt::Write;
use std::str::FromStr;

use super::{BenchError, BenchRow};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Markdown,
    Csv,
}

impl FromStr for TableFormat {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "markdown" | "md" => Ok(Self::Markdown),
            "csv" => Ok(Self::Csv),
            other => Err(BenchError::Config(format!("unknown table format `{other}`"))),
        }
    }
}

fn cpu(v: f64) -> String {
    format!("{v:.3e}")
}

fn res(v: f64) -> String {
    format!("{v:.4e}")
}

/// Renders rows as a CSV file or as a markdown table with methods as row
/// groups (IT, CPU, RES) and problem orders as columns.
pub fn emit_table(rows: &[BenchRow], format: TableFormat) -> Result<String, BenchError> {
    if rows.is_empty() {
        return Err(BenchError::Config("no benchmark rows to emit".into()));
    }
    Ok(match format {
        TableFormat::Csv => {
            let mut s = String::from("method,n,it,cpu_s,res\n");
            for r in rows {
                writeln!(s, "{},{},{},{},{}", r.method.label(), r.n, r.it, cpu(r.cpu_s), res(r.res)).unwrap();
            }
            s
        }
        TableFormat::Markdown => markdown(rows),
    })
}

fn first_seen<T: PartialEq + Copy>(items: impl Iterator<Item = T>) -> Vec<T> {
    let mut out = Vec::new();
    for x in items {
        if !out.contains(&x) {
            out.push(x);
        }
    }
    out
}

fn markdown(rows: &[BenchRow]) -> String {
    let sizes = first_seen(rows.iter().map(|r| r.n));
    let methods = first_seen(rows.iter().map(|r| r.method));
    let mut s = String::from("| Method |  |");
    for n in &sizes {
        write!(s, " n={n} |").unwrap();
    }
    s.push_str("\n|---|---|");
    s.push_str(&"---:|".repeat(sizes.len()));
    s.push('\n');
    for m in methods {
        let cells: Vec<Option<&BenchRow>> =
            sizes.iter().map(|&n| rows.iter().find(|r| r.method == m && r.n == n)).collect();
        let line = |name: &str, f: &dyn Fn(&BenchRow) -> String| {
            let mut l = format!("| {} | {name} |", if name == "IT" { m.label() } else { "" });
            for c in &cells {
                let text = match c {
                    None => "-".to_string(),
                    Some(r) if r.error.is_some() => "error".to_string(),
                    Some(r) => f(r),
                };
                write!(l, " {text} |").unwrap();
            }
            l.push('\n');
            l
        };
        s.push_str(&line("IT", &|r| if r.converged { r.it.to_string() } else { format!("{} (nc)", r.it) }));
        s.push_str(&line("CPU", &|r| cpu(r.cpu_s)));
        s.push_str(&line("RES", &|r| res(r.res)));
    }
    s
}
