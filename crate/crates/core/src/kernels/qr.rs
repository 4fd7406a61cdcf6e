use nalgebra::{DMatrix, DVector};

use super::{DenseMatrix, KernelError};

/// Thin Householder QR of a tall matrix with full column rank.
///
/// Used for the small least-squares problems on column subsets (optimality
/// check, recovery condition, enumeration oracle).
#[derive(Debug, Clone)]
pub struct ThinQr {
    q: DMatrix<f64>,
    r: DMatrix<f64>,
}

/// Diagonal entries of `R` below this fraction of the largest one count as zero.
const RANK_TOL: f64 = 1e-10;

impl ThinQr {
    pub fn new(a: &DenseMatrix) -> Result<Self, KernelError> {
        let (m, n) = (a.rows(), a.cols());
        if n > m {
            return Err(KernelError::RankDeficient { cols: n });
        }
        let qr = a.to_nalgebra().qr();
        let q = qr.q();
        let r = qr.r();
        let rmax = (0..n).map(|i| r[(i, i)].abs()).fold(0.0, f64::max);
        if n > 0 && (0..n).any(|i| !(r[(i, i)].abs() > RANK_TOL * rmax)) {
            return Err(KernelError::RankDeficient { cols: n });
        }
        Ok(ThinQr { q, r })
    }

    /// `argmin ‖Ax − rhs‖₂`.
    pub fn least_squares(&self, rhs: &[f64]) -> Vec<f64> {
        let qtb = self.q.transpose() * DVector::from_column_slice(rhs);
        self.r
            .solve_upper_triangular(&qtb)
            .expect("R has a nonzero diagonal")
            .as_slice()
            .to_vec()
    }

    /// Minimum-norm solution of the underdetermined system `Aᵀw = rhs`.
    pub fn min_norm_transposed(&self, rhs: &[f64]) -> Vec<f64> {
        let y = self
            .r
            .transpose()
            .solve_lower_triangular(&DVector::from_column_slice(rhs))
            .expect("R has a nonzero diagonal");
        (&self.q * y).as_slice().to_vec()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overdetermined_least_squares() {
        // fit y = c over points (1, 2, 3) => c = 2
        let a = DenseMatrix::from_rows(&[vec![1.0], vec![1.0], vec![1.0]]).unwrap();
        let qr = ThinQr::new(&a).unwrap();
        let x = qr.least_squares(&[1.0, 2.0, 3.0]);
        assert!((x[0] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn min_norm_solution() {
        // [1 2] w = 1 has min-norm solution (1/5, 2/5) in the column space
        let a = DenseMatrix::from_rows(&[vec![1.0], vec![2.0]]).unwrap();
        let w = ThinQr::new(&a).unwrap().min_norm_transposed(&[1.0]);
        assert!((w[0] - 0.2).abs() < 1e-14 && (w[1] - 0.4).abs() < 1e-14);
    }

    #[test]
    fn detects_rank_deficiency() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0], vec![0.0, 0.0]]).unwrap();
        assert!(matches!(
            ThinQr::new(&a),
            Err(KernelError::RankDeficient { .. })
        ));
        let wide = DenseMatrix::from_rows(&[vec![1.0, 2.0]]).unwrap();
        assert!(ThinQr::new(&wide).is_err());
    }
}
