use super::KernelError;

/// Column-major dense matrix with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self, KernelError> {
        if data.len() != rows * cols {
            return Err(KernelError::DimensionMismatch {
                what: "dense matrix entries",
                expected: rows * cols,
                found: data.len(),
            });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(KernelError::NonFinite("dense matrix"));
        }
        Ok(DenseMatrix { rows, cols, data })
    }

    pub(crate) fn from_col_major_unchecked(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        DenseMatrix { rows, cols, data }
    }

    /// Builds a matrix from row vectors; handy for small literals.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, KernelError> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        let mut data = vec![0.0; m * n];
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(KernelError::DimensionMismatch {
                    what: "row length",
                    expected: n,
                    found: row.len(),
                });
            }
            for (j, &v) in row.iter().enumerate() {
                data[j * m + i] = v;
            }
        }
        DenseMatrix::new(m, n, data)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut a = DenseMatrix::zeros(n, n);
        for i in 0..n {
            a.data[i * n + i] = 1.0;
        }
        a
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[j * self.rows + i]
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub(crate) fn column_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.data[j * self.rows..(j + 1) * self.rows]
    }

    /// Entries in column-major order.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub(crate) fn matvec_into(&self, x: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        for (j, &xj) in x.iter().enumerate() {
            if xj != 0.0 {
                super::axpy(xj, self.column(j), out);
            }
        }
    }

    pub(crate) fn matvec_t_into(&self, y: &[f64], out: &mut [f64]) {
        for (j, o) in out.iter_mut().enumerate() {
            *o = super::dot(self.column(j), y);
        }
    }

    /// `AAᵀ` as a dense symmetric `rows × rows` matrix.
    pub fn gram(&self) -> DenseMatrix {
        let m = self.rows;
        let mut g = DenseMatrix::zeros(m, m);
        for j in 0..self.cols {
            let col = self.column(j);
            for (q, &cq) in col.iter().enumerate() {
                if cq == 0.0 {
                    continue;
                }
                let gcol = &mut g.data[q * m..(q + 1) * m];
                for p in q..m {
                    gcol[p] += col[p] * cq;
                }
            }
        }
        // mirror lower triangle into upper
        for q in 0..m {
            for p in (q + 1)..m {
                g.data[p * m + q] = g.data[q * m + p];
            }
        }
        g
    }

    pub(crate) fn to_nalgebra(&self) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from_column_slice(self.rows, self.cols, &self.data)
    }
}
