//! Euclidean projections onto the affine set `{x : Ax = b}` and onto the
//! ℓ1-ball `{z : ‖z‖₁ ≤ r}`.

use crate::kernels::{check_len, norm1, norm2, norm_inf, KernelError, Matrix, SpdMode, SpdSolver};

const REFINE_TOL: f64 = 1e-10;
const MAX_REFINE: usize = 3;

/// Orthogonal projector onto `M = {x : Ax = b}`.
#[derive(Debug, Clone)]
pub struct AffineProjector<'a> {
    spd: SpdSolver<'a>,
    rhs: &'a [f64],
}

impl<'a> AffineProjector<'a> {
    /// Uses Cholesky of `AAᵀ` for dense `A` and CG for sparse `A`.
    pub fn new(matrix: &'a Matrix, rhs: &'a [f64]) -> Result<Self, KernelError> {
        AffineProjector::with_solver(SpdSolver::for_matrix(matrix)?, rhs)
    }

    pub fn with_mode(
        matrix: &'a Matrix,
        rhs: &'a [f64],
        mode: SpdMode,
    ) -> Result<Self, KernelError> {
        AffineProjector::with_solver(SpdSolver::new(matrix, mode)?, rhs)
    }

    pub fn with_solver(spd: SpdSolver<'a>, rhs: &'a [f64]) -> Result<Self, KernelError> {
        check_len("right-hand side", spd.matrix().rows(), rhs.len())?;
        if rhs.iter().any(|v| !v.is_finite()) {
            return Err(KernelError::NonFinite("right-hand side"));
        }
        Ok(AffineProjector { spd, rhs })
    }

    pub fn matrix(&self) -> &'a Matrix {
        self.spd.matrix()
    }

    pub fn rhs(&self) -> &'a [f64] {
        self.rhs
    }

    pub fn solver(&self) -> &SpdSolver<'a> {
        &self.spd
    }

    /// `z − Aᵀw` with `AAᵀw = Az − b`.
    ///
    /// CG only reduces the residual relative to `‖Az − b‖`, which can be far
    /// larger than `‖b‖`; in that mode the correction is repeated on the
    /// remaining residual until `‖Ax − b‖ ≤ 1e-10·(1 + ‖b‖)`.
    pub fn project(&self, z: &[f64]) -> Result<Vec<f64>, KernelError> {
        let a = self.matrix();
        let mut x = z.to_vec();
        let mut resid = a.matvec(z)?;
        for (r, b) in resid.iter_mut().zip(self.rhs) {
            *r -= b;
        }
        let mut atw = vec![0.0; a.cols()];
        let target = REFINE_TOL * (1.0 + norm2(self.rhs));
        for round in 0..=MAX_REFINE {
            let w = self.spd.solve(&resid)?;
            a.matvec_t_into(&w, &mut atw);
            for (xi, ci) in x.iter_mut().zip(&atw) {
                *xi -= ci;
            }
            if self.spd.mode() == SpdMode::Cholesky || round == MAX_REFINE {
                break;
            }
            a.matvec_into(&x, &mut resid);
            for (r, b) in resid.iter_mut().zip(self.rhs) {
                *r -= b;
            }
            if norm2(&resid) <= target {
                break;
            }
        }
        Ok(x)
    }

    /// `‖Ax − b‖₂`.
    pub fn residual(&self, x: &[f64]) -> Result<f64, KernelError> {
        let ax = self.matrix().matvec(x)?;
        Ok(ax
            .iter()
            .zip(self.rhs)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt())
    }
}

/// The ℓ1-ball `B₁(0, r)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct L1Ball {
    radius: f64,
}

impl L1Ball {
    pub fn new(radius: f64) -> Result<Self, KernelError> {
        if !(radius >= 0.0) || !radius.is_finite() {
            return Err(KernelError::InvalidStructure(format!(
                "l1-ball radius {radius} must be finite and nonnegative"
            )));
        }
        Ok(L1Ball { radius })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn contains(&self, z: &[f64], rel_tol: f64) -> bool {
        norm1(z) <= self.radius * (1.0 + rel_tol)
    }

    pub fn project(&self, z: &[f64]) -> Vec<f64> {
        project_l1_ball(self, z)
    }
}

/// Soft-threshold level `θ ≥ 0` such that the shrunk vector has ℓ1-norm `r`,
/// or `0` when `z` is already inside the ball.
///
/// Sort-based: with `u` the magnitudes in decreasing order, `θ = (Σ_{i≤ρ} u_i − r)/ρ`
/// for the largest `ρ` with `u_ρ > (Σ_{i≤ρ} u_i − r)/ρ`.
pub fn l1_threshold(radius: f64, z: &[f64]) -> f64 {
    let total = norm1(z);
    if total <= radius {
        return 0.0;
    }
    let mut u: Vec<f64> = z.iter().map(|v| v.abs()).collect();
    u.sort_unstable_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (j, &uj) in u.iter().enumerate() {
        cum += uj;
        let t = (cum - radius) / (j + 1) as f64;
        if uj > t {
            theta = t;
        } else {
            break;
        }
    }
    theta
}

fn soft_threshold(z: &[f64], theta: f64) -> Vec<f64> {
    z.iter()
        .map(|&v| {
            let s = v.abs() - theta;
            if s > 0.0 {
                s.copysign(v)
            } else {
                0.0
            }
        })
        .collect()
}

/// Exact Euclidean projection onto `B₁(0, r)`.
///
/// Entries with `|z_i| ≤ θ` (ties included) map to exactly zero.
pub fn project_l1_ball(ball: &L1Ball, z: &[f64]) -> Vec<f64> {
    let r = ball.radius();
    if r == 0.0 {
        return vec![0.0; z.len()];
    }
    if norm1(z) <= r {
        return z.to_vec();
    }
    soft_threshold(z, l1_threshold(r, z))
}

/// Reference ℓ1-ball projection by 200 bisection steps on `θ ∈ [0, ‖z‖_∞]`.
///
/// Slow and independent of [`project_l1_ball`]; kept for cross-checking.
pub fn l1_projection_oracle(ball: &L1Ball, z: &[f64]) -> Vec<f64> {
    let r = ball.radius();
    if norm1(z) <= r {
        return z.to_vec();
    }
    let excess =
        |theta: f64| -> f64 { z.iter().map(|v| (v.abs() - theta).max(0.0)).sum::<f64>() - r };
    let (mut lo, mut hi) = (0.0, norm_inf(z));
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if excess(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    soft_threshold(z, 0.5 * (lo + hi))
}

/// Euclidean distance from `z` to the affine set, `‖z − P_M(z)‖₂`.
pub fn affine_distance(proj: &AffineProjector<'_>, z: &[f64]) -> Result<f64, KernelError> {
    let x = proj.project(z)?;
    Ok(crate::kernels::dist2(&x, z))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::DenseMatrix;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn interior_point_unchanged() {
        let ball = L1Ball::new(5.0).unwrap();
        assert_eq!(ball.project(&[1.0, -2.0]), vec![1.0, -2.0]);
    }

    #[test]
    fn threshold_example() {
        let ball = L1Ball::new(2.0).unwrap();
        assert_eq!(l1_threshold(2.0, &[3.0, 1.0]), 1.0);
        assert_eq!(ball.project(&[3.0, 1.0]), vec![2.0, 0.0]);
        assert!(close(
            &l1_projection_oracle(&ball, &[3.0, 1.0]),
            &[2.0, 0.0],
            1e-12
        ));
    }

    #[test]
    fn zero_radius_gives_zero() {
        let ball = L1Ball::new(0.0).unwrap();
        assert_eq!(ball.project(&[3.0, -1.0, 0.5]), vec![0.0; 3]);
        assert!(L1Ball::new(-1.0).is_err());
        assert!(L1Ball::new(f64::NAN).is_err());
    }

    #[test]
    fn boundary_point_keeps_theta_zero() {
        assert_eq!(l1_threshold(3.0, &[1.0, -2.0]), 0.0);
        let ball = L1Ball::new(3.0).unwrap();
        assert_eq!(ball.project(&[1.0, -2.0]), vec![1.0, -2.0]);
    }

    #[test]
    fn ties_shrink_equally() {
        let ball = L1Ball::new(1.0).unwrap();
        let p = ball.project(&[1.0, -1.0, 0.25]);
        assert!(close(&p, &[0.5, -0.5, 0.0], 1e-15));
        let o = l1_projection_oracle(&ball, &[1.0, -1.0, 0.25]);
        assert!(close(&o, &p, 1e-12));
    }

    #[test]
    fn oracle_inside_ball() {
        let ball = L1Ball::new(10.0).unwrap();
        assert_eq!(l1_projection_oracle(&ball, &[1.0, 2.0]), vec![1.0, 2.0]);
    }

    #[test]
    fn affine_symmetric_case() {
        let a = Matrix::Dense(DenseMatrix::from_rows(&[vec![1.0, 1.0]]).unwrap());
        let b = [2.0];
        let p = AffineProjector::new(&a, &b).unwrap();
        assert!(close(&p.project(&[0.0, 0.0]).unwrap(), &[1.0, 1.0], 1e-14));
    }

    #[test]
    fn affine_hand_solved_case() {
        // AAᵀ = 5, w = -2/5, x = -Aᵀw = (2/5, 4/5)
        let a = Matrix::Dense(DenseMatrix::from_rows(&[vec![1.0, 2.0]]).unwrap());
        let b = [2.0];
        for mode in [SpdMode::Cholesky, SpdMode::ConjugateGradient] {
            let p = AffineProjector::with_mode(&a, &b, mode).unwrap();
            assert!(close(&p.project(&[0.0, 0.0]).unwrap(), &[0.4, 0.8], 1e-14));
            assert!((affine_distance(&p, &[0.0, 0.0]).unwrap() - 2.0 / 5f64.sqrt()).abs() < 1e-14);
        }
    }

    #[test]
    fn affine_fixed_point() {
        let a = Matrix::Dense(
            DenseMatrix::from_rows(&[vec![1.0, 0.5, -2.0, 0.0], vec![0.0, 1.0, 3.0, 1.0]]).unwrap(),
        );
        let xs = [0.3, -1.2, 0.7, 2.0];
        let b = a.matvec(&xs).unwrap();
        let p = AffineProjector::new(&a, &b).unwrap();
        assert!(close(&p.project(&xs).unwrap(), &xs, 1e-10));
    }

    #[test]
    fn rhs_length_checked() {
        let a = Matrix::Dense(DenseMatrix::identity(2));
        assert!(AffineProjector::new(&a, &[1.0]).is_err());
    }
}
