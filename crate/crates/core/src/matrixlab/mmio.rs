//! Matrix Market coordinate files and plain-text vectors.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{LinalgError, SparseMatrix};

fn parse_err(line: usize, msg: impl Into<String>) -> LinalgError {
    LinalgError::Parse {
        line,
        message: msg.into(),
    }
}

/// Reads a `coordinate real general` (or `symmetric`) Matrix Market stream.
/// Indices are 1-based.
pub fn read_matrix_market(reader: impl Read) -> Result<SparseMatrix, LinalgError> {
    let mut lines = BufReader::new(reader).lines().enumerate();

    let (_, header) = lines.next().ok_or_else(|| parse_err(1, "empty input"))?;
    let header = header?;
    let tokens: Vec<String> = header.split_whitespace().map(str::to_ascii_lowercase).collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" || tokens[1] != "matrix" {
        return Err(parse_err(1, format!("bad header `{header}`")));
    }
    if tokens[2] != "coordinate" {
        return Err(parse_err(1, "only coordinate format is supported"));
    }
    if tokens[3] != "real" && tokens[3] != "integer" {
        return Err(parse_err(1, format!("unsupported field `{}`", tokens[3])));
    }
    let symmetric = match tokens[4].as_str() {
        "general" => false,
        "symmetric" => true,
        other => return Err(parse_err(1, format!("unsupported symmetry `{other}`"))),
    };

    let mut size: Option<(usize, usize, usize)> = None;
    let mut triplets = Vec::new();
    for (idx, line) in lines {
        let line_no = idx + 1;
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        let fields: Vec<&str> = t.split_whitespace().collect();
        match size {
            None => {
                if fields.len() != 3 {
                    return Err(parse_err(line_no, "size line needs `rows cols nnz`"));
                }
                let parse = |s: &str| s.parse::<usize>().map_err(|e| parse_err(line_no, e.to_string()));
                let dims = (parse(fields[0])?, parse(fields[1])?, parse(fields[2])?);
                triplets.reserve(dims.2);
                size = Some(dims);
            }
            Some((rows, cols, _)) => {
                if fields.len() != 3 {
                    return Err(parse_err(line_no, "entry needs `row col value`"));
                }
                let i: usize = fields[0].parse().map_err(|_| parse_err(line_no, "bad row index"))?;
                let j: usize = fields[1].parse().map_err(|_| parse_err(line_no, "bad column index"))?;
                let v: f64 = fields[2].parse().map_err(|_| parse_err(line_no, "bad value"))?;
                if i == 0 || j == 0 || i > rows || j > cols {
                    return Err(parse_err(line_no, format!("index ({i},{j}) outside {rows}x{cols}")));
                }
                triplets.push((i - 1, j - 1, v));
                if symmetric && i != j {
                    triplets.push((j - 1, i - 1, v));
                }
            }
        }
    }
    let (rows, cols, nnz) = size.ok_or_else(|| parse_err(2, "missing size line"))?;
    let stored = if symmetric {
        triplets.iter().filter(|(i, j, _)| i >= j).count()
    } else {
        triplets.len()
    };
    if stored != nnz {
        return Err(parse_err(0, format!("header declares {nnz} entries, found {stored}")));
    }
    SparseMatrix::from_triplets(rows, cols, triplets)
}

pub fn write_matrix_market(m: &SparseMatrix, writer: impl Write) -> Result<(), LinalgError> {
    let mut w = BufWriter::new(writer);
    writeln!(w, "%%MatrixMarket matrix coordinate real general")?;
    writeln!(w, "{} {} {}", m.n_rows(), m.n_cols(), m.nnz())?;
    for (i, j, v) in m.iter() {
        writeln!(w, "{} {} {:e}", i + 1, j + 1, v)?;
    }
    w.flush()?;
    Ok(())
}

/// One value per line; blank lines and `%`/`#` comments are skipped.
pub fn read_vector(reader: impl Read) -> Result<Vec<f64>, LinalgError> {
    let mut out = Vec::new();
    for (idx, line) in BufReader::new(reader).lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') || t.starts_with('#') {
            continue;
        }
        out.push(t.parse().map_err(|_| parse_err(idx + 1, format!("bad value `{t}`")))?);
    }
    Ok(out)
}

pub fn write_vector(v: &[f64], writer: impl Write) -> Result<(), LinalgError> {
    let mut w = BufWriter::new(writer);
    for x in v {
        writeln!(w, "{x:e}")?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_matrix_market_file(path: impl AsRef<Path>) -> Result<SparseMatrix, LinalgError> {
    read_matrix_market(File::open(path)?)
}

pub fn write_matrix_market_file(m: &SparseMatrix, path: impl AsRef<Path>) -> Result<(), LinalgError> {
    write_matrix_market(m, File::create(path)?)
}

pub fn read_vector_file(path: impl AsRef<Path>) -> Result<Vec<f64>, LinalgError> {
    read_vector(File::open(path)?)
}

pub fn write_vector_file(v: &[f64], path: impl AsRef<Path>) -> Result<(), LinalgError> {
    write_vector(v, File::create(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reads_general_with_comments() {
        let text = "%%MatrixMarket matrix coordinate real general\n% comment\n2 2 3\n1 1 4\n2 1 -1.5\n2 2 4e0\n";
        let m = read_matrix_market(text.as_bytes()).unwrap();
        assert_eq!(m.get(1, 0), -1.5);
        assert_eq!(m.get(1, 1), 4.0);
        assert_eq!(m.nnz(), 3);
    }

    #[test]
    fn symmetric_storage_is_expanded() {
        let text = "%%MatrixMarket matrix coordinate real symmetric\n2 2 2\n1 1 4\n2 1 -1\n";
        let m = read_matrix_market(text.as_bytes()).unwrap();
        assert_eq!(m.get(0, 1), -1.0);
        assert_eq!(m.get(1, 0), -1.0);
    }

    #[test]
    fn malformed_inputs() {
        for bad in [
            "",
            "%%MatrixMarket matrix array real general\n2 2\n1\n2\n3\n4\n",
            "%%MatrixMarket matrix coordinate complex general\n1 1 1\n1 1 1 0\n",
            "%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n",
            "%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1.0\n",
            "%%MatrixMarket matrix coordinate real general\n2 2 1\n1 1 abc\n",
        ] {
            assert!(read_matrix_market(bad.as_bytes()).is_err(), "accepted: {bad:?}");
        }
    }

    #[test]
    fn vectors_parse() {
        let v = read_vector("1\n\n-2.5e-3\n# note\n3\n".as_bytes()).unwrap();
        assert_eq!(v, vec![1.0, -2.5e-3, 3.0]);
        assert!(read_vector("1\nx\n".as_bytes()).is_err());
    }

    proptest! {
        #[test]
        fn write_then_read_is_identity(
            entries in proptest::collection::vec((0usize..6, 0usize..5, -1e6f64..1e6), 0..30)
        ) {
            let m = SparseMatrix::from_triplets(6, 5, entries).unwrap();
            let mut buf = Vec::new();
            write_matrix_market(&m, &mut buf).unwrap();
            prop_assert_eq!(read_matrix_market(buf.as_slice()).unwrap(), m.clone());

            let v: Vec<f64> = m.iter().map(|e| e.2).collect();
            let mut vbuf = Vec::new();
            write_vector(&v, &mut vbuf).unwrap();
            prop_assert_eq!(read_vector(vbuf.as_slice()).unwrap(), v);
        }
    }
}
