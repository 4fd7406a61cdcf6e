//! Method of alternating projections between an ℓ1-ball and the affine set.
//!
//! The engine alternates `x ← P_M(z)`, `z ← P_B(x)` and stops on one of
//! three events:
//!
//! * the sets look intersecting: `‖x − z‖_∞` is below the feasibility
//!   tolerance, absolutely or relative to `‖x‖_∞`;
//! * the gap `‖z − x‖₂` stopped improving by more than the stall tolerance
//!   (relative), in which case `(x, z)` is taken as a best approximation pair
//!   and `z − x` as the displacement vector;
//! * the iteration cap or a deadline was hit.

use std::time::Instant;

use thiserror::Error;

use crate::kernels::{dist2, dist_inf, norm1, norm_inf, KernelError};
use crate::projections::{AffineProjector, L1Ball};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapConfig {
    pub feas_tol: f64,
    pub stall_tol: f64,
    pub max_iter: usize,
}

impl Default for MapConfig {
    fn default() -> Self {
        MapConfig {
            feas_tol: 1e-6,
            stall_tol: 1e-6,
            max_iter: 1_000_000,
        }
    }
}

impl MapConfig {
    pub fn validate(&self) -> Result<(), MapError> {
        if !(self.feas_tol > 0.0) || !(self.stall_tol > 0.0) {
            return Err(MapError::Config("MAP tolerances must be positive".into()));
        }
        if self.max_iter == 0 {
            return Err(MapError::Config(
                "MAP iteration cap must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum MapError {
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error("starting point has l1-norm {norm} outside the ball of radius {radius}")]
    StartOutsideBall { norm: f64, radius: f64 },
    #[error("invalid MAP configuration: {0}")]
    Config(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StallReason {
    IterationCap,
    Deadline,
}

#[derive(Debug, Clone, PartialEq)]
pub enum MapStatus {
    /// `point` lies in `M`; `ball_point = P_B(point)` is within tolerance of it.
    Intersecting {
        point: Vec<f64>,
        ball_point: Vec<f64>,
    },
    /// Approximate best approximation pair with `displacement = z − x`.
    BestPair {
        x: Vec<f64>,
        z: Vec<f64>,
        displacement: Vec<f64>,
    },
    /// Neither exit fired; the last pair is returned for inspection.
    Stalled {
        x: Vec<f64>,
        z: Vec<f64>,
        reason: StallReason,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct MapOutcome {
    pub status: MapStatus,
    /// Full sweeps performed (one affine and one ℓ1 projection each).
    pub iterations: usize,
    pub affine_projections: usize,
    pub l1_projections: usize,
    /// `‖z − x‖₂` at the last sweep.
    pub final_gap: f64,
}

impl MapOutcome {
    pub fn is_intersecting(&self) -> bool {
        matches!(self.status, MapStatus::Intersecting { .. })
    }

    pub fn is_best_pair(&self) -> bool {
        matches!(self.status, MapStatus::BestPair { .. })
    }
}

pub fn run_map(
    ball: &L1Ball,
    proj: &AffineProjector<'_>,
    z_start: &[f64],
    cfg: &MapConfig,
) -> Result<MapOutcome, MapError> {
    run_map_traced(ball, proj, z_start, cfg, None, None)
}

/// [`run_map`] with an optional deadline and a per-sweep callback receiving
/// `(j, g_j)`.
pub fn run_map_traced(
    ball: &L1Ball,
    proj: &AffineProjector<'_>,
    z_start: &[f64],
    cfg: &MapConfig,
    deadline: Option<Instant>,
    mut trace: Option<&mut dyn FnMut(usize, f64)>,
) -> Result<MapOutcome, MapError> {
    cfg.validate()?;
    let start_norm = norm1(z_start);
    if start_norm > ball.radius() * (1.0 + 1e-12) + f64::MIN_POSITIVE {
        return Err(MapError::StartOutsideBall {
            norm: start_norm,
            radius: ball.radius(),
        });
    }
    let spd_tol = proj.solver().tolerance();
    let mut z = z_start.to_vec();
    let mut prev_gap: Option<f64> = None;
    let mut x = Vec::new();
    let mut gap = f64::INFINITY;

    for j in 1..=cfg.max_iter {
        if deadline.is_some_and(|d| Instant::now() >= d) {
            return Ok(outcome(
                MapStatus::Stalled {
                    x,
                    z,
                    reason: StallReason::Deadline,
                },
                j - 1,
                gap,
            ));
        }
        x = proj.project(&z)?;
        let z_next = ball.project(&x);
        gap = dist2(&z_next, &x);
        if let Some(f) = trace.as_mut() {
            f(j, gap);
        }
        if let Some(p) = prev_gap {
            debug_assert!(
                gap <= p * (1.0 + 10.0 * spd_tol) + 1e-12,
                "MAP gap increased from {p} to {gap}"
            );
        }

        let sup = dist_inf(&x, &z_next);
        if sup <= cfg.feas_tol || sup <= cfg.feas_tol * norm_inf(&x) {
            return Ok(outcome(
                MapStatus::Intersecting {
                    point: x,
                    ball_point: z_next,
                },
                j,
                gap,
            ));
        }
        if let Some(p) = prev_gap {
            if p - gap <= cfg.stall_tol * p {
                let displacement = z_next.iter().zip(&x).map(|(a, b)| a - b).collect();
                return Ok(outcome(
                    MapStatus::BestPair {
                        x,
                        z: z_next,
                        displacement,
                    },
                    j,
                    gap,
                ));
            }
        }
        prev_gap = Some(gap);
        z = z_next;
    }
    Ok(outcome(
        MapStatus::Stalled {
            x,
            z,
            reason: StallReason::IterationCap,
        },
        cfg.max_iter,
        gap,
    ))
}

fn outcome(status: MapStatus, sweeps: usize, gap: f64) -> MapOutcome {
    MapOutcome {
        status,
        iterations: sweeps,
        affine_projections: sweeps,
        l1_projections: sweeps,
        final_gap: gap,
    }
}
