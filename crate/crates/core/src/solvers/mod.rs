//! Top-level basis pursuit solvers sharing one option set and one result
//! schema.
//!
//! * [`bpmap_solve`]: growing ℓ1-balls whose radii increase by the length of
//!   the displacement vector between the ball and the affine set.
//! * [`bpmap_bin_solve`]: bisection-style bracketing of the optimal radius.
//! * [`isal1_solve`]: infeasible-point subgradient baseline.
//!
//! All three can call the heuristic optimality check ([`hoc_check`]) to
//! finish early with an exact dual certificate.

mod bin;
mod bpmap;
mod hoc;
mod isal1;

pub use bin::bpmap_bin_solve;
pub use bpmap::bpmap_solve;
pub use hoc::{
    dual_lower_bound, hoc_check, hoc_check_support, hoc_trigger_policy, support_of, HocFailure,
    HocOutcome,
};
pub use isal1::isal1_solve;

use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::instances::BpInstance;
use crate::kernels::{norm1, norm2, KernelError, SpdMode};
use crate::map::{MapConfig, MapError};
use crate::projections::AffineProjector;

#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions {
    pub map: MapConfig,
    pub max_outer: usize,
    pub time_limit: Duration,
    pub hoc: bool,
    /// Support threshold: `|x_i| > max(support_abs, support_rel·‖x‖_∞)`.
    pub support_abs: f64,
    pub support_rel: f64,
    /// Relative support threshold used on the dense iterates of the subgradient baseline.
    pub isal_support_rel: f64,
    pub alpha: f64,
    pub bin_gap_tol: f64,
    pub hoc_tol: f64,
    /// Gram solver backend; `None` picks Cholesky for dense and CG for sparse matrices.
    pub spd_mode: Option<SpdMode>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            map: MapConfig::default(),
            max_outer: 100_000,
            time_limit: Duration::from_secs(3600),
            hoc: true,
            support_abs: 1e-12,
            support_rel: 1e-10,
            isal_support_rel: 1e-6,
            alpha: 0.9,
            bin_gap_tol: 1e-6,
            hoc_tol: 1e-6,
            spd_mode: None,
        }
    }
}

impl SolverOptions {
    pub fn without_hoc(mut self) -> Self {
        self.hoc = false;
        self
    }

    pub fn validate(&self) -> Result<(), SolveError> {
        self.map
            .validate()
            .map_err(|e| SolveError::InvalidOptions(e.to_string()))?;
        let bad = |msg: &str| Err(SolveError::InvalidOptions(msg.to_string()));
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return bad("alpha must lie in (0, 1)");
        }
        for (name, v) in [
            ("support_abs", self.support_abs),
            ("support_rel", self.support_rel),
            ("isal_support_rel", self.isal_support_rel),
            ("bin_gap_tol", self.bin_gap_tol),
            ("hoc_tol", self.hoc_tol),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(SolveError::InvalidOptions(format!(
                    "{name} must be positive"
                )));
            }
        }
        if self.max_outer == 0 {
            return bad("outer iteration cap must be at least 1");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SolveStatus {
    Optimal,
    HocOptimal,
    Stalled,
    IterLimit,
    TimeLimit,
}

impl SolveStatus {
    pub fn is_success(self) -> bool {
        matches!(self, SolveStatus::Optimal | SolveStatus::HocOptimal)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SolveStatus::Optimal => "Optimal",
            SolveStatus::HocOptimal => "HocOptimal",
            SolveStatus::Stalled => "Stalled",
            SolveStatus::IterLimit => "IterLimit",
            SolveStatus::TimeLimit => "TimeLimit",
        }
    }
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SolveStatus {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "Optimal" => SolveStatus::Optimal,
            "HocOptimal" => SolveStatus::HocOptimal,
            "Stalled" => SolveStatus::Stalled,
            "IterLimit" => SolveStatus::IterLimit,
            "TimeLimit" => SolveStatus::TimeLimit,
            other => return Err(format!("unknown status '{other}'")),
        })
    }
}

/// One logged outer step.
#[derive(Debug, Clone, PartialEq)]
pub struct OuterRecord {
    pub k: usize,
    /// Current radius (BP-MAP), bracket lower end (BIN), or objective (ISAL1).
    pub r: f64,
    /// Bracket upper end, BIN only.
    pub upper: Option<f64>,
    /// Bracket width `R_k − r_k`, tracked separately from the endpoints, BIN only.
    pub width: Option<f64>,
    /// `‖d^k‖₂` (BP-MAP), final MAP gap (BIN), or step length (ISAL1).
    pub norm_d: f64,
    /// `‖z^k‖₁` of the ball iterate at this step.
    pub z_norm1: f64,
    /// `z^k` is the origin or the ball side of a best approximation pair,
    /// so it sits on the sphere of radius `r`.
    pub on_sphere: bool,
    pub inner_iters: usize,
    pub elapsed_s: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub solution: Vec<f64>,
    pub status: SolveStatus,
    pub objective: f64,
    pub residual: f64,
    pub outer_iterations: usize,
    pub inner_iterations: usize,
    pub affine_projections: usize,
    pub l1_projections: usize,
    pub hoc_calls: usize,
    pub wall_time: f64,
    /// Dual vector `w` with `‖Aᵀw‖_∞ ≲ 1`, present only with a gap.
    pub certificate: Option<Vec<f64>>,
    pub duality_gap: Option<f64>,
    /// Final `(r, R)` bracket, BIN only.
    pub bracket: Option<(f64, f64)>,
    pub trajectory: Vec<OuterRecord>,
}

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("invalid solver options: {0}")]
    InvalidOptions(String),
    #[error("projection backend failed after {} outer steps: {source}", trajectory.len())]
    Backend {
        #[source]
        source: MapError,
        trajectory: Vec<OuterRecord>,
    },
}

impl SolveError {
    pub(crate) fn backend(source: impl Into<MapError>, trajectory: &[OuterRecord]) -> Self {
        SolveError::Backend {
            source: source.into(),
            trajectory: trajectory.to_vec(),
        }
    }
}

/// The solver variants exposed to the CLI and benchmark runner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SolverKind {
    Bpmap,
    BpmapHoc,
    BpmapBin,
    BpmapHocBin,
    Isal1,
}

impl SolverKind {
    pub const ALL: [SolverKind; 5] = [
        SolverKind::Bpmap,
        SolverKind::BpmapHoc,
        SolverKind::BpmapBin,
        SolverKind::BpmapHocBin,
        SolverKind::Isal1,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SolverKind::Bpmap => "bpmap",
            SolverKind::BpmapHoc => "bpmap-hoc",
            SolverKind::BpmapBin => "bpmap-bin",
            SolverKind::BpmapHocBin => "bpmap-hoc-bin",
            SolverKind::Isal1 => "isal1",
        }
    }

    /// Runs the variant; the HOC flag in `opts` is overridden by the variant
    /// except for `isal1`, which always honors it.
    pub fn solve(self, inst: &BpInstance, opts: &SolverOptions) -> Result<SolveResult, SolveError> {
        let mut o = opts.clone();
        match self {
            SolverKind::Bpmap => {
                o.hoc = false;
                bpmap_solve(inst, &o)
            }
            SolverKind::BpmapHoc => {
                o.hoc = true;
                bpmap_solve(inst, &o)
            }
            SolverKind::BpmapBin => {
                o.hoc = false;
                bpmap_bin_solve(inst, &o)
            }
            SolverKind::BpmapHocBin => {
                o.hoc = true;
                bpmap_bin_solve(inst, &o)
            }
            SolverKind::Isal1 => isal1_solve(inst, &o),
        }
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SolverKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SolverKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                format!(
                    "unknown solver '{s}' (expected one of: {})",
                    SolverKind::ALL.map(|k| k.name()).join(", ")
                )
            })
    }
}

/// Writes the trajectory as CSV: `k, r_k, R_k, norm_d, inner_iters, elapsed_s`.
pub fn write_trajectory_csv<W: Write>(records: &[OuterRecord], w: W) -> csv::Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["k", "r_k", "R_k", "norm_d", "inner_iters", "elapsed_s"])?;
    for rec in records {
        wtr.write_record([
            rec.k.to_string(),
            format!("{:e}", rec.r),
            rec.upper.map(|u| format!("{u:e}")).unwrap_or_default(),
            format!("{:e}", rec.norm_d),
            rec.inner_iters.to_string(),
            format!("{:.6}", rec.elapsed_s),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn save_trajectory_csv(records: &[OuterRecord], path: &Path) -> csv::Result<()> {
    let file = std::fs::File::create(path)?;
    write_trajectory_csv(records, std::io::BufWriter::new(file))
}

/// Shared bookkeeping for one solve.
pub(crate) struct Run<'a> {
    pub inst: &'a BpInstance,
    pub start: Instant,
    pub deadline: Instant,
    pub trajectory: Vec<OuterRecord>,
    pub inner: usize,
    pub affine: usize,
    pub l1: usize,
    pub hoc_calls: usize,
}

impl<'a> Run<'a> {
    pub fn new(inst: &'a BpInstance, opts: &SolverOptions) -> Self {
        let start = Instant::now();
        Run {
            inst,
            start,
            deadline: start
                .checked_add(opts.time_limit)
                .unwrap_or(start + Duration::from_secs(u32::MAX as u64)),
            trajectory: Vec::new(),
            inner: 0,
            affine: 0,
            l1: 0,
            hoc_calls: 0,
        }
    }

    pub fn elapsed(&self) -> f64 {
        self.start.elapsed().as_secs_f64()
    }

    pub fn timed_out(&self) -> bool {
        Instant::now() >= self.deadline
    }

    pub fn projector(&self, opts: &SolverOptions) -> Result<AffineProjector<'a>, SolveError> {
        let p = match opts.spd_mode {
            Some(mode) => AffineProjector::with_mode(&self.inst.matrix, &self.inst.rhs, mode),
            None => AffineProjector::new(&self.inst.matrix, &self.inst.rhs),
        };
        p.map_err(|e: KernelError| SolveError::backend(e, &[]))
    }

    pub fn finish(
        self,
        solution: Vec<f64>,
        status: SolveStatus,
        outer: usize,
    ) -> Result<SolveResult, SolveError> {
        let residual = self
            .inst
            .residual(&solution)
            .map_err(|e| SolveError::backend(e, &self.trajectory))?;
        Ok(SolveResult {
            objective: norm1(&solution),
            residual,
            solution,
            status,
            outer_iterations: outer,
            inner_iterations: self.inner,
            affine_projections: self.affine,
            l1_projections: self.l1,
            hoc_calls: self.hoc_calls,
            wall_time: self.elapsed(),
            certificate: None,
            duality_gap: None,
            bracket: None,
            trajectory: self.trajectory,
        })
    }
}

impl SolveResult {
    pub(crate) fn with_certificate(mut self, w: Vec<f64>, gap: f64) -> Self {
        self.certificate = Some(w);
        self.duality_gap = Some(gap);
        self
    }

    /// Success statuses must come with a small residual.
    pub fn residual_ok(&self, rhs: &[f64]) -> bool {
        self.residual <= 1e-6 * (1.0 + norm2(rhs))
    }
}
