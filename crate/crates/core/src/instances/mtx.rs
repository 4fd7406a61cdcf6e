//! MatrixMarket reader/writer for real general matrices.
//!
//! Dense matrices are written in `array` format, sparse ones in `coordinate`
//! format. Values are written in shortest round-trip form so a write/read
//! cycle is bit-exact.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::InstanceError;
use crate::kernels::{DenseMatrix, Matrix, SparseMatrixCsc};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Layout {
    Array,
    Coordinate,
}

pub fn read_matrix(path: &Path) -> Result<Matrix, InstanceError> {
    let text = fs::read_to_string(path).map_err(|e| InstanceError::io(path, e))?;
    parse_matrix(&text, path)
}

/// Reads an `m × 1` matrix (either layout) as a vector.
pub fn read_vector(path: &Path) -> Result<Vec<f64>, InstanceError> {
    let a = read_matrix(path)?;
    if a.cols() != 1 {
        return Err(InstanceError::Format {
            path: path.to_path_buf(),
            line: 2,
            msg: format!("expected a single column, found {}", a.cols()),
        });
    }
    Ok(a.to_dense().column(0).to_vec())
}

pub fn parse_matrix(text: &str, path: &Path) -> Result<Matrix, InstanceError> {
    let err = |line: usize, msg: String| InstanceError::Format {
        path: path.to_path_buf(),
        line,
        msg,
    };
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));

    let (hline, header) = lines.next().ok_or_else(|| err(1, "empty file".into()))?;
    let words: Vec<String> = header.split_whitespace().map(str::to_lowercase).collect();
    if words.len() != 5 || words[0] != "%%matrixmarket" || words[1] != "matrix" {
        return Err(err(
            hline,
            "expected '%%MatrixMarket matrix <format> <field> <symmetry>'".into(),
        ));
    }
    let layout = match words[2].as_str() {
        "array" => Layout::Array,
        "coordinate" => Layout::Coordinate,
        other => return Err(err(hline, format!("unsupported format '{other}'"))),
    };
    if !matches!(words[3].as_str(), "real" | "double" | "integer") {
        return Err(err(hline, format!("unsupported field '{}'", words[3])));
    }
    if words[4] != "general" {
        return Err(err(hline, format!("unsupported symmetry '{}'", words[4])));
    }

    let mut body = lines.filter(|(_, l)| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('%')
    });
    let (sline, size) = body
        .next()
        .ok_or_else(|| err(hline + 1, "missing size line".into()))?;
    let dims: Vec<usize> = size
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|e| err(sline, format!("bad size line: {e}")))?;

    let parse_f64 = |line: usize, tok: &str| -> Result<f64, InstanceError> {
        let v: f64 = tok
            .parse()
            .map_err(|_| err(line, format!("invalid number '{tok}'")))?;
        if !v.is_finite() {
            return Err(err(line, format!("non-finite value '{tok}'")));
        }
        Ok(v)
    };

    match layout {
        Layout::Array => {
            let [m, n] = dims[..] else {
                return Err(err(sline, "array size line needs 'rows cols'".into()));
            };
            let mut data = Vec::with_capacity(m * n);
            let mut last_line = sline;
            for (ln, l) in body {
                last_line = ln;
                for tok in l.split_whitespace() {
                    if data.len() == m * n {
                        return Err(err(ln, "more values than rows × cols".into()));
                    }
                    data.push(parse_f64(ln, tok)?);
                }
            }
            if data.len() != m * n {
                return Err(err(
                    last_line,
                    format!("expected {} values, found {}", m * n, data.len()),
                ));
            }
            Ok(Matrix::Dense(DenseMatrix::new(m, n, data)?))
        }
        Layout::Coordinate => {
            let [m, n, nnz] = dims[..] else {
                return Err(err(
                    sline,
                    "coordinate size line needs 'rows cols nnz'".into(),
                ));
            };
            let mut seen: HashMap<(usize, usize), usize> = HashMap::with_capacity(nnz);
            let mut triplets = Vec::with_capacity(nnz);
            let mut last_line = sline;
            for (ln, l) in body {
                last_line = ln;
                let toks: Vec<&str> = l.split_whitespace().collect();
                if toks.len() != 3 {
                    return Err(err(ln, "expected 'row col value'".into()));
                }
                let idx = |t: &str, bound: usize, what: &str| -> Result<usize, InstanceError> {
                    let i: usize = t
                        .parse()
                        .map_err(|_| err(ln, format!("invalid {what} index '{t}'")))?;
                    if i == 0 || i > bound {
                        return Err(err(ln, format!("{what} index {i} outside 1..={bound}")));
                    }
                    Ok(i - 1)
                };
                let i = idx(toks[0], m, "row")?;
                let j = idx(toks[1], n, "column")?;
                let v = parse_f64(ln, toks[2])?;
                if let Some(first) = seen.insert((i, j), ln) {
                    return Err(err(
                        ln,
                        format!(
                            "duplicate entry ({}, {}) (first given on line {first})",
                            i + 1,
                            j + 1
                        ),
                    ));
                }
                if triplets.len() == nnz {
                    return Err(err(ln, format!("more than the declared {nnz} entries")));
                }
                triplets.push((i, j, v));
            }
            if triplets.len() != nnz {
                return Err(err(
                    last_line,
                    format!("declared {nnz} entries, found {}", triplets.len()),
                ));
            }
            Ok(Matrix::Sparse(SparseMatrixCsc::from_triplets(
                m, n, &triplets,
            )?))
        }
    }
}

pub fn format_dense(a: &DenseMatrix) -> String {
    let mut out = String::with_capacity(24 * a.as_slice().len() + 64);
    out.push_str("%%MatrixMarket matrix array real general\n");
    let _ = writeln!(out, "{} {}", a.rows(), a.cols());
    for v in a.as_slice() {
        let _ = writeln!(out, "{v:e}");
    }
    out
}

pub fn format_sparse(a: &SparseMatrixCsc) -> String {
    let mut out = String::with_capacity(32 * a.nnz() + 64);
    out.push_str("%%MatrixMarket matrix coordinate real general\n");
    let _ = writeln!(out, "{} {} {}", a.rows(), a.cols(), a.nnz());
    for (i, j, v) in a.triplets() {
        let _ = writeln!(out, "{} {} {v:e}", i + 1, j + 1);
    }
    out
}

pub fn write_matrix(path: &Path, a: &Matrix) -> Result<(), InstanceError> {
    let text = match a {
        Matrix::Dense(d) => format_dense(d),
        Matrix::Sparse(s) => format_sparse(s),
    };
    fs::write(path, text).map_err(|e| InstanceError::io(path, e))
}

pub fn write_vector(path: &Path, v: &[f64]) -> Result<(), InstanceError> {
    let col = DenseMatrix::new(v.len(), 1, v.to_vec())?;
    fs::write(path, format_dense(&col)).map_err(|e| InstanceError::io(path, e))
}
