use super::{check_len, dot, norm2, DenseMatrix, KernelError, Matrix};

/// Square root of double-precision machine epsilon, rounded.
pub const DEFAULT_SPD_TOLERANCE: f64 = 1.49e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpdMode {
    /// Factor `AAᵀ` once and reuse the factor for every solve.
    Cholesky,
    /// Conjugate gradient on the operator `y ↦ A(Aᵀy)`; `AAᵀ` is never formed.
    ConjugateGradient,
}

/// Solver for `AAᵀ w = rhs` with `A` of full row rank.
///
/// Every successful solve satisfies `‖AAᵀw − rhs‖₂ ≤ tol·(1 + ‖rhs‖₂)`.
#[derive(Debug, Clone)]
pub struct SpdSolver<'a> {
    matrix: &'a Matrix,
    mode: SpdMode,
    tol: f64,
    max_iter: usize,
    factor: Option<CholeskyFactor>,
}

#[derive(Debug, Clone)]
struct CholeskyFactor {
    gram: DenseMatrix,
    // lower triangle, column-major
    lower: Vec<f64>,
}

impl<'a> SpdSolver<'a> {
    /// Picks Cholesky for dense matrices and CG for sparse ones.
    pub fn for_matrix(matrix: &'a Matrix) -> Result<Self, KernelError> {
        let mode = if matrix.is_sparse() {
            SpdMode::ConjugateGradient
        } else {
            SpdMode::Cholesky
        };
        SpdSolver::new(matrix, mode)
    }

    pub fn new(matrix: &'a Matrix, mode: SpdMode) -> Result<Self, KernelError> {
        let factor = match mode {
            SpdMode::Cholesky => Some(CholeskyFactor::new(matrix.gram())?),
            SpdMode::ConjugateGradient => None,
        };
        Ok(SpdSolver {
            matrix,
            mode,
            tol: DEFAULT_SPD_TOLERANCE,
            max_iter: 10 * matrix.rows().max(1),
            factor,
        })
    }

    /// Overrides the residual threshold; must lie in `(0, 1)`.
    pub fn with_tolerance(mut self, tol: f64) -> Result<Self, KernelError> {
        if !(tol > 0.0 && tol < 1.0) {
            return Err(KernelError::InvalidStructure(format!(
                "SPD tolerance {tol} outside (0, 1)"
            )));
        }
        self.tol = tol;
        Ok(self)
    }

    pub fn mode(&self) -> SpdMode {
        self.mode
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    pub fn matrix(&self) -> &'a Matrix {
        self.matrix
    }

    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>, KernelError> {
        check_len("Gram system right-hand side", self.matrix.rows(), rhs.len())?;
        match &self.factor {
            Some(f) => {
                let w = f.solve(rhs);
                let bound = self.tol * (1.0 + norm2(rhs));
                let mut gw = vec![0.0; rhs.len()];
                f.gram.matvec_into(&w, &mut gw);
                let residual = gw
                    .iter()
                    .zip(rhs)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                if residual > bound {
                    return Err(KernelError::Inaccurate { residual, bound });
                }
                Ok(w)
            }
            None => self.solve_cg(rhs),
        }
    }

    fn solve_cg(&self, rhs: &[f64]) -> Result<Vec<f64>, KernelError> {
        let m = rhs.len();
        let n = self.matrix.cols();
        let stop = self.tol * (1.0 + norm2(rhs));
        let mut w = vec![0.0; m];
        let mut r = rhs.to_vec();
        let mut p = r.clone();
        let mut q = vec![0.0; m];
        let mut scratch = vec![0.0; n];
        let mut rs = dot(&r, &r);
        for it in 0..=self.max_iter {
            if rs.sqrt() <= stop {
                return Ok(w);
            }
            if it == self.max_iter {
                break;
            }
            self.matrix.matvec_t_into(&p, &mut scratch);
            self.matrix.matvec_into(&scratch, &mut q);
            let pq = dot(&p, &q);
            if !(pq > 0.0) {
                return Err(KernelError::NotPositiveDefinite { pivot: it });
            }
            let alpha = rs / pq;
            super::axpy(alpha, &p, &mut w);
            super::axpy(-alpha, &q, &mut r);
            let rs_new = dot(&r, &r);
            let beta = rs_new / rs;
            for (pi, ri) in p.iter_mut().zip(&r) {
                *pi = ri + beta * *pi;
            }
            rs = rs_new;
        }
        Err(KernelError::NotConverged {
            iterations: self.max_iter,
            residual: rs.sqrt(),
        })
    }
}

impl CholeskyFactor {
    fn new(gram: DenseMatrix) -> Result<Self, KernelError> {
        let m = gram.rows();
        let mut l = gram.as_slice().to_vec();
        // scale-aware pivot floor: a pivot this small means AAᵀ is singular to working precision
        let floor = f64::EPSILON * (0..m).map(|i| gram.get(i, i)).fold(0.0, f64::max) * m as f64;
        for j in 0..m {
            let mut d = l[j * m + j];
            for k in 0..j {
                d -= l[k * m + j] * l[k * m + j];
            }
            if !(d > floor) {
                return Err(KernelError::NotPositiveDefinite { pivot: j });
            }
            let djj = d.sqrt();
            l[j * m + j] = djj;
            for i in (j + 1)..m {
                let mut s = l[j * m + i];
                for k in 0..j {
                    s -= l[k * m + i] * l[k * m + j];
                }
                l[j * m + i] = s / djj;
            }
        }
        // zero the strict upper triangle so the storage is a clean L
        for j in 0..m {
            for i in 0..j {
                l[j * m + i] = 0.0;
            }
        }
        Ok(CholeskyFactor { gram, lower: l })
    }

    fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let m = rhs.len();
        let l = &self.lower;
        // L y = rhs
        let mut y = rhs.to_vec();
        for j in 0..m {
            y[j] /= l[j * m + j];
            let yj = y[j];
            for i in (j + 1)..m {
                y[i] -= l[j * m + i] * yj;
            }
        }
        // Lᵀ w = y
        for i in (0..m).rev() {
            let col = &l[i * m..(i + 1) * m];
            let s: f64 = ((i + 1)..m).map(|k| col[k] * y[k]).sum();
            y[i] = (y[i] - s) / col[i];
        }
        y
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::SparseMatrixCsc;

    #[test]
    fn identity_system() {
        let a = Matrix::Dense(DenseMatrix::identity(2));
        for mode in [SpdMode::Cholesky, SpdMode::ConjugateGradient] {
            let s = SpdSolver::new(&a, mode).unwrap();
            let w = s.solve(&[4.0, 5.0]).unwrap();
            assert!((w[0] - 4.0).abs() < 1e-12 && (w[1] - 5.0).abs() < 1e-12);
        }
    }

    #[test]
    fn single_row_system() {
        // AAᵀ = 4, so 4w = 8
        let a = Matrix::Dense(DenseMatrix::from_rows(&[vec![2.0, 0.0]]).unwrap());
        for mode in [SpdMode::Cholesky, SpdMode::ConjugateGradient] {
            let w = SpdSolver::new(&a, mode).unwrap().solve(&[8.0]).unwrap();
            assert!((w[0] - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rank_deficient_rows_fail_cholesky() {
        let a = Matrix::Dense(DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap());
        assert!(matches!(
            SpdSolver::new(&a, SpdMode::Cholesky),
            Err(KernelError::NotPositiveDefinite { .. })
        ));
    }

    #[test]
    fn auto_mode_follows_storage() {
        let d = DenseMatrix::identity(3);
        let dense = Matrix::Dense(d.clone());
        let sparse = Matrix::Sparse(SparseMatrixCsc::from_dense(&d));
        assert_eq!(
            SpdSolver::for_matrix(&dense).unwrap().mode(),
            SpdMode::Cholesky
        );
        assert_eq!(
            SpdSolver::for_matrix(&sparse).unwrap().mode(),
            SpdMode::ConjugateGradient
        );
    }

    #[test]
    fn tolerance_must_be_in_unit_interval() {
        let a = Matrix::Dense(DenseMatrix::identity(1));
        let s = SpdSolver::new(&a, SpdMode::ConjugateGradient).unwrap();
        assert!(s.clone().with_tolerance(0.0).is_err());
        assert!(s.clone().with_tolerance(1.0).is_err());
        assert!(s.with_tolerance(1e-10).is_ok());
    }

    #[test]
    fn cg_zero_rhs_returns_zero() {
        let a = Matrix::Dense(DenseMatrix::identity(3));
        let s = SpdSolver::new(&a, SpdMode::ConjugateGradient).unwrap();
        assert_eq!(s.solve(&[0.0; 3]).unwrap(), vec![0.0; 3]);
    }
}
