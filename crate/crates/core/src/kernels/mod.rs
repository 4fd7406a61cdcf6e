//! Dense and sparse linear-algebra kernels used by the projectors.
//!
//! Only what the solvers need lives here: products with `A` and `Aᵀ`,
//! solves with the Gram matrix `AAᵀ` (Cholesky or conjugate gradient) and
//! small least-squares problems on column subsets.

mod dense;
mod qr;
mod sparse;
mod spd;

pub use dense::DenseMatrix;
pub use qr::ThinQr;
pub use sparse::SparseMatrixCsc;
pub use spd::{SpdMode, SpdSolver, DEFAULT_SPD_TOLERANCE};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KernelError {
    #[error("dimension mismatch for {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("invalid matrix structure: {0}")]
    InvalidStructure(String),
    #[error("Gram matrix is not numerically positive definite (pivot {pivot})")]
    NotPositiveDefinite { pivot: usize },
    #[error(
        "conjugate gradient did not converge in {iterations} iterations (residual {residual:e})"
    )]
    NotConverged { iterations: usize, residual: f64 },
    #[error("linear solve residual {residual:e} exceeds bound {bound:e}")]
    Inaccurate { residual: f64, bound: f64 },
    #[error("matrix is rank deficient (numerical rank below {cols})")]
    RankDeficient { cols: usize },
}

/// Constraint matrix, either dense (column-major) or compressed sparse column.
#[derive(Debug, Clone, PartialEq)]
pub enum Matrix {
    Dense(DenseMatrix),
    Sparse(SparseMatrixCsc),
}

impl Matrix {
    pub fn rows(&self) -> usize {
        match self {
            Matrix::Dense(a) => a.rows(),
            Matrix::Sparse(a) => a.rows(),
        }
    }

    pub fn cols(&self) -> usize {
        match self {
            Matrix::Dense(a) => a.cols(),
            Matrix::Sparse(a) => a.cols(),
        }
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self, Matrix::Sparse(_))
    }

    /// `Ax`.
    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>, KernelError> {
        check_len("matvec input", self.cols(), x.len())?;
        let mut out = vec![0.0; self.rows()];
        self.matvec_into(x, &mut out);
        Ok(out)
    }

    /// `Aᵀy`.
    pub fn matvec_t(&self, y: &[f64]) -> Result<Vec<f64>, KernelError> {
        check_len("transposed matvec input", self.rows(), y.len())?;
        let mut out = vec![0.0; self.cols()];
        self.matvec_t_into(y, &mut out);
        Ok(out)
    }

    /// Unchecked `out = Ax`; lengths must already agree.
    pub(crate) fn matvec_into(&self, x: &[f64], out: &mut [f64]) {
        match self {
            Matrix::Dense(a) => a.matvec_into(x, out),
            Matrix::Sparse(a) => a.matvec_into(x, out),
        }
    }

    /// Unchecked `out = Aᵀy`.
    pub(crate) fn matvec_t_into(&self, y: &[f64], out: &mut [f64]) {
        match self {
            Matrix::Dense(a) => a.matvec_t_into(y, out),
            Matrix::Sparse(a) => a.matvec_t_into(y, out),
        }
    }

    /// Dense `AAᵀ`.
    pub fn gram(&self) -> DenseMatrix {
        match self {
            Matrix::Dense(a) => a.gram(),
            Matrix::Sparse(a) => a.gram(),
        }
    }

    /// Dense copy of the columns listed in `cols`, in that order.
    pub fn select_columns(&self, cols: &[usize]) -> DenseMatrix {
        let m = self.rows();
        let mut data = vec![0.0; m * cols.len()];
        for (k, &j) in cols.iter().enumerate() {
            let dst = &mut data[k * m..(k + 1) * m];
            match self {
                Matrix::Dense(a) => dst.copy_from_slice(a.column(j)),
                Matrix::Sparse(a) => {
                    let (idx, vals) = a.column(j);
                    for (&i, &v) in idx.iter().zip(vals) {
                        dst[i] = v;
                    }
                }
            }
        }
        DenseMatrix::from_col_major_unchecked(m, cols.len(), data)
    }

    pub fn to_dense(&self) -> DenseMatrix {
        match self {
            Matrix::Dense(a) => a.clone(),
            Matrix::Sparse(a) => a.to_dense(),
        }
    }
}

impl From<DenseMatrix> for Matrix {
    fn from(a: DenseMatrix) -> Self {
        Matrix::Dense(a)
    }
}

impl From<SparseMatrixCsc> for Matrix {
    fn from(a: SparseMatrixCsc) -> Self {
        Matrix::Sparse(a)
    }
}

pub(crate) fn check_len(
    what: &'static str,
    expected: usize,
    found: usize,
) -> Result<(), KernelError> {
    if expected != found {
        return Err(KernelError::DimensionMismatch {
            what,
            expected,
            found,
        });
    }
    Ok(())
}

pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

pub fn norm1(x: &[f64]) -> f64 {
    x.iter().map(|v| v.abs()).sum()
}

pub fn norm2(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

pub fn norm_inf(x: &[f64]) -> f64 {
    x.iter().fold(0.0, |acc: f64, v| acc.max(v.abs()))
}

/// `y += alpha * x`
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Euclidean distance between two vectors of equal length.
pub fn dist2(x: &[f64], y: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

pub fn dist_inf(x: &[f64], y: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .fold(0.0, |acc: f64, (a, b)| acc.max((a - b).abs()))
}
