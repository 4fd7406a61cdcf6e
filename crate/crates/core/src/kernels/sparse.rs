use super::{DenseMatrix, KernelError};

/// Compressed sparse column matrix.
///
/// Row indices are strictly increasing inside each column and every stored
/// value is finite and nonzero.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrixCsc {
    rows: usize,
    cols: usize,
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrixCsc {
    pub fn new(
        rows: usize,
        cols: usize,
        col_ptr: Vec<usize>,
        row_idx: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self, KernelError> {
        if col_ptr.len() != cols + 1 {
            return Err(KernelError::DimensionMismatch {
                what: "column pointer length",
                expected: cols + 1,
                found: col_ptr.len(),
            });
        }
        if row_idx.len() != values.len() {
            return Err(KernelError::DimensionMismatch {
                what: "row index count",
                expected: values.len(),
                found: row_idx.len(),
            });
        }
        if col_ptr[0] != 0 || col_ptr[cols] != values.len() {
            return Err(KernelError::InvalidStructure(
                "column pointers must start at 0 and end at nnz".into(),
            ));
        }
        for j in 0..cols {
            let (lo, hi) = (col_ptr[j], col_ptr[j + 1]);
            if lo > hi {
                return Err(KernelError::InvalidStructure(format!(
                    "column pointers decrease at column {j}"
                )));
            }
            let idx = &row_idx[lo..hi];
            if idx.iter().any(|&i| i >= rows) {
                return Err(KernelError::InvalidStructure(format!(
                    "row index out of bounds in column {j}"
                )));
            }
            if idx.windows(2).any(|w| w[0] >= w[1]) {
                return Err(KernelError::InvalidStructure(format!(
                    "row indices not strictly increasing in column {j}"
                )));
            }
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(KernelError::NonFinite("sparse matrix"));
        }
        if values.contains(&0.0) {
            return Err(KernelError::InvalidStructure("explicit zero stored".into()));
        }
        Ok(SparseMatrixCsc {
            rows,
            cols,
            col_ptr,
            row_idx,
            values,
        })
    }

    /// Builds from `(row, col, value)` triplets. Zero values are dropped;
    /// duplicate positions are an error.
    pub fn from_triplets(
        rows: usize,
        cols: usize,
        triplets: &[(usize, usize, f64)],
    ) -> Result<Self, KernelError> {
        let mut entries: Vec<(usize, usize, f64)> = triplets
            .iter()
            .copied()
            .filter(|&(_, _, v)| v != 0.0)
            .collect();
        for &(i, j, _) in &entries {
            if i >= rows || j >= cols {
                return Err(KernelError::InvalidStructure(format!(
                    "entry ({i}, {j}) outside {rows}x{cols}"
                )));
            }
        }
        entries.sort_by_key(|&(i, j, _)| (j, i));
        if let Some(w) = entries
            .windows(2)
            .find(|w| (w[0].0, w[0].1) == (w[1].0, w[1].1))
        {
            return Err(KernelError::InvalidStructure(format!(
                "duplicate entry ({}, {})",
                w[0].0, w[0].1
            )));
        }
        let mut col_ptr = vec![0usize; cols + 1];
        for &(_, j, _) in &entries {
            col_ptr[j + 1] += 1;
        }
        for j in 0..cols {
            col_ptr[j + 1] += col_ptr[j];
        }
        let row_idx = entries.iter().map(|e| e.0).collect();
        let values = entries.iter().map(|e| e.2).collect();
        SparseMatrixCsc::new(rows, cols, col_ptr, row_idx, values)
    }

    pub fn from_dense(a: &DenseMatrix) -> Self {
        let mut col_ptr = Vec::with_capacity(a.cols() + 1);
        let mut row_idx = Vec::new();
        let mut values = Vec::new();
        col_ptr.push(0);
        for j in 0..a.cols() {
            for (i, &v) in a.column(j).iter().enumerate() {
                if v != 0.0 {
                    row_idx.push(i);
                    values.push(v);
                }
            }
            col_ptr.push(values.len());
        }
        SparseMatrixCsc {
            rows: a.rows(),
            cols: a.cols(),
            col_ptr,
            row_idx,
            values,
        }
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut d = DenseMatrix::zeros(self.rows, self.cols);
        for j in 0..self.cols {
            let (idx, vals) = self.column(j);
            let col = d.column_mut(j);
            for (&i, &v) in idx.iter().zip(vals) {
                col[i] = v;
            }
        }
        d
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn col_ptr(&self) -> &[usize] {
        &self.col_ptr
    }

    pub fn row_idx(&self) -> &[usize] {
        &self.row_idx
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Row indices and values of column `j`.
    pub fn column(&self, j: usize) -> (&[usize], &[f64]) {
        let (lo, hi) = (self.col_ptr[j], self.col_ptr[j + 1]);
        (&self.row_idx[lo..hi], &self.values[lo..hi])
    }

    /// Iterates `(row, col, value)` in column-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.cols).flat_map(move |j| {
            let (idx, vals) = self.column(j);
            idx.iter().zip(vals).map(move |(&i, &v)| (i, j, v))
        })
    }

    pub(crate) fn matvec_into(&self, x: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        for (j, &xj) in x.iter().enumerate() {
            if xj == 0.0 {
                continue;
            }
            let (idx, vals) = self.column(j);
            for (&i, &v) in idx.iter().zip(vals) {
                out[i] += v * xj;
            }
        }
    }

    pub(crate) fn matvec_t_into(&self, y: &[f64], out: &mut [f64]) {
        for (j, o) in out.iter_mut().enumerate() {
            let (idx, vals) = self.column(j);
            *o = idx.iter().zip(vals).map(|(&i, &v)| v * y[i]).sum();
        }
    }

    pub fn gram(&self) -> DenseMatrix {
        let m = self.rows;
        let mut g = vec![0.0; m * m];
        for j in 0..self.cols {
            let (idx, vals) = self.column(j);
            for (&q, &vq) in idx.iter().zip(vals) {
                for (&p, &vp) in idx.iter().zip(vals) {
                    g[q * m + p] += vp * vq;
                }
            }
        }
        DenseMatrix::from_col_major_unchecked(m, m, g)
    }
}
