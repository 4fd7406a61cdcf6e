//! Export of the split-variable LP `min 1ᵀx⁺ + 1ᵀx⁻ s.t. Ax⁺ − Ax⁻ = b,
//! x± ≥ 0` in fixed-format MPS, plus a reader for the same subset.
//!
//! Name fields sit in their fixed columns. Numbers are written in shortest
//! round-trip form, so long values run past column 36; readers that split on
//! whitespace (all common solvers) accept this, and it keeps the exported LP
//! exact.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::Path;

use super::{BpInstance, InstanceError};
use crate::kernels::Matrix;

const OBJ_ROW: &str = "COST";

/// Standard-form LP `min cᵀy s.t. Ey = h, y ≥ 0` as read back from MPS.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub name: String,
    pub row_names: Vec<String>,
    pub col_names: Vec<String>,
    pub objective: Vec<f64>,
    /// `(row, col, value)` entries of `E`.
    pub entries: Vec<(usize, usize, f64)>,
    pub rhs: Vec<f64>,
}

impl LinearProgram {
    pub fn rows(&self) -> usize {
        self.row_names.len()
    }

    pub fn cols(&self) -> usize {
        self.col_names.len()
    }

    /// Dense row-major copy of `E`.
    pub fn dense_rows(&self) -> Vec<Vec<f64>> {
        let mut e = vec![vec![0.0; self.cols()]; self.rows()];
        for &(i, j, v) in &self.entries {
            e[i][j] += v;
        }
        e
    }
}

fn row_name(i: usize) -> String {
    format!("R{}", i + 1)
}

fn column_line(out: &mut String, col: &str, row: &str, v: f64) {
    let _ = writeln!(out, "    {col:<8}  {row:<8}  {:>12}", format!("{v:e}"));
}

pub fn write_mps<W: Write>(inst: &BpInstance, mut w: W) -> std::io::Result<()> {
    let (m, n) = (inst.rows(), inst.cols());
    let mut out = String::new();
    let name = if inst.meta.label.is_empty() {
        "BPLP"
    } else {
        inst.meta.label.as_str()
    };
    let _ = writeln!(out, "NAME          {name}");
    out.push_str("ROWS\n");
    let _ = writeln!(out, " N  {OBJ_ROW}");
    for i in 0..m {
        let _ = writeln!(out, " E  {}", row_name(i));
    }
    out.push_str("COLUMNS\n");
    for (prefix, sign) in [("XP", 1.0), ("XM", -1.0)] {
        for j in 0..n {
            let col = format!("{prefix}{}", j + 1);
            column_line(&mut out, &col, OBJ_ROW, 1.0);
            match &inst.matrix {
                Matrix::Dense(a) => {
                    for (i, &v) in a.column(j).iter().enumerate() {
                        if v != 0.0 {
                            column_line(&mut out, &col, &row_name(i), sign * v);
                        }
                    }
                }
                Matrix::Sparse(a) => {
                    let (idx, vals) = a.column(j);
                    for (&i, &v) in idx.iter().zip(vals) {
                        column_line(&mut out, &col, &row_name(i), sign * v);
                    }
                }
            }
        }
    }
    out.push_str("RHS\n");
    for (i, &v) in inst.rhs.iter().enumerate() {
        if v != 0.0 {
            column_line(&mut out, "RHS", &row_name(i), v);
        }
    }
    out.push_str("ENDATA\n");
    w.write_all(out.as_bytes())
}

pub fn export_lp(inst: &BpInstance, path: &Path) -> Result<(), InstanceError> {
    let file = fs::File::create(path).map_err(|e| InstanceError::io(path, e))?;
    let mut buf = std::io::BufWriter::new(file);
    write_mps(inst, &mut buf).map_err(|e| InstanceError::io(path, e))?;
    buf.flush().map_err(|e| InstanceError::io(path, e))
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    Start,
    Rows,
    Columns,
    Rhs,
    Done,
}

/// Reads the MPS subset produced by [`write_mps`]: one objective row,
/// equality rows, nonnegative columns, no BOUNDS or RANGES.
pub fn read_mps(path: &Path) -> Result<LinearProgram, InstanceError> {
    let text = fs::read_to_string(path).map_err(|e| InstanceError::io(path, e))?;
    let err = |line: usize, msg: String| InstanceError::Format {
        path: path.to_path_buf(),
        line,
        msg,
    };
    let mut lp = LinearProgram {
        name: String::new(),
        row_names: Vec::new(),
        col_names: Vec::new(),
        objective: Vec::new(),
        entries: Vec::new(),
        rhs: Vec::new(),
    };
    let mut obj_name: Option<String> = None;
    let mut row_index = std::collections::HashMap::new();
    let mut col_index = std::collections::HashMap::new();
    let mut section = Section::Start;

    for (ln, raw) in text.lines().enumerate().map(|(i, l)| (i + 1, l)) {
        if raw.trim().is_empty() || raw.starts_with('*') {
            continue;
        }
        let toks: Vec<&str> = raw.split_whitespace().collect();
        if !raw.starts_with(' ') {
            section = match toks[0] {
                "NAME" => {
                    lp.name = toks.get(1).copied().unwrap_or("").to_string();
                    Section::Start
                }
                "ROWS" => Section::Rows,
                "COLUMNS" => Section::Columns,
                "RHS" => Section::Rhs,
                "ENDATA" => Section::Done,
                other => return Err(err(ln, format!("unsupported section '{other}'"))),
            };
            continue;
        }
        match section {
            Section::Rows => {
                let [kind, name] = toks[..] else {
                    return Err(err(ln, "expected '<type> <name>'".into()));
                };
                match kind {
                    "N" if obj_name.is_none() => obj_name = Some(name.to_string()),
                    "E" => {
                        row_index.insert(name.to_string(), lp.row_names.len());
                        lp.row_names.push(name.to_string());
                    }
                    _ => return Err(err(ln, format!("unsupported row type '{kind}'"))),
                }
            }
            Section::Columns | Section::Rhs => {
                if toks.len() != 3 && toks.len() != 5 {
                    return Err(err(
                        ln,
                        "expected '<name> <row> <value> [<row> <value>]'".into(),
                    ));
                }
                let col = toks[0];
                let j = if section == Section::Columns {
                    Some(*col_index.entry(col.to_string()).or_insert_with(|| {
                        lp.col_names.push(col.to_string());
                        lp.objective.push(0.0);
                        lp.col_names.len() - 1
                    }))
                } else {
                    if lp.rhs.is_empty() {
                        lp.rhs = vec![0.0; lp.row_names.len()];
                    }
                    None
                };
                for pair in toks[1..].chunks(2) {
                    let v: f64 = pair[1]
                        .parse()
                        .map_err(|_| err(ln, format!("invalid number '{}'", pair[1])))?;
                    if Some(pair[0]) == obj_name.as_deref() {
                        match j {
                            Some(j) => lp.objective[j] = v,
                            None => return Err(err(ln, "objective constant not supported".into())),
                        }
                        continue;
                    }
                    let &i = row_index
                        .get(pair[0])
                        .ok_or_else(|| err(ln, format!("unknown row '{}'", pair[0])))?;
                    match j {
                        Some(j) => lp.entries.push((i, j, v)),
                        None => lp.rhs[i] = v,
                    }
                }
            }
            Section::Start | Section::Done => {
                return Err(err(ln, "data line outside a section".into()));
            }
        }
    }
    if section != Section::Done {
        return Err(err(text.lines().count(), "missing ENDATA".into()));
    }
    if lp.rhs.is_empty() {
        lp.rhs = vec![0.0; lp.row_names.len()];
    }
    Ok(lp)
}
