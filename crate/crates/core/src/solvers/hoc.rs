use std::fmt;

use super::SolverOptions;
use crate::instances::BpInstance;
use crate::kernels::{dot, norm1, norm2, norm_inf, ThinQr};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HocFailure {
    SupportEmpty,
    DualInfeasible,
    PrimalInconsistent,
    GapTooLarge,
    LinearSolverFailed,
}

impl fmt::Display for HocFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HocFailure::SupportEmpty => "support-empty",
            HocFailure::DualInfeasible => "dual-infeasible",
            HocFailure::PrimalInconsistent => "primal-inconsistent",
            HocFailure::GapTooLarge => "gap-too-large",
            HocFailure::LinearSolverFailed => "linear-solver-failed",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum HocOutcome {
    /// `x̂` solves `Ax = b` on the guessed support, `ŵ` is dual feasible and
    /// the relative gap `(‖x̂‖₁ − bᵀŵ)/‖x̂‖₁` is within tolerance.
    Success { x: Vec<f64>, w: Vec<f64>, gap: f64 },
    /// `dual` holds `ŵ` whenever it was computed before the check failed.
    Failure {
        reason: HocFailure,
        dual: Option<Vec<f64>>,
    },
}

impl HocOutcome {
    pub fn is_success(&self) -> bool {
        matches!(self, HocOutcome::Success { .. })
    }

    fn fail(reason: HocFailure) -> Self {
        HocOutcome::Failure { reason, dual: None }
    }
}

/// Indices with `|x_i| > max(abs, rel·‖x‖_∞)`, ascending.
pub fn support_of(x: &[f64], abs: f64, rel: f64) -> Vec<usize> {
    let cut = abs.max(rel * norm_inf(x));
    x.iter()
        .enumerate()
        .filter(|(_, v)| v.abs() > cut)
        .map(|(i, _)| i)
        .collect()
}

/// Fires when two consecutive supports agree and are nonempty.
pub fn hoc_trigger_policy(previous: &[usize], current: &[usize]) -> bool {
    !current.is_empty() && previous == current
}

/// Runs the optimality check on the support of `x` under the thresholds in `opts`.
pub fn hoc_check(inst: &BpInstance, x: &[f64], opts: &SolverOptions) -> HocOutcome {
    let support = support_of(x, opts.support_abs, opts.support_rel);
    let signs: Vec<f64> = support.iter().map(|&i| x[i].signum()).collect();
    hoc_check_support(inst, &support, &signs, opts.hoc_tol)
}

/// Optimality check for a given support and sign pattern.
pub fn hoc_check_support(
    inst: &BpInstance,
    support: &[usize],
    signs: &[f64],
    tol: f64,
) -> HocOutcome {
    assert_eq!(support.len(), signs.len(), "one sign per support index");
    if support.is_empty() {
        return HocOutcome::fail(HocFailure::SupportEmpty);
    }
    let (m, n) = (inst.rows(), inst.cols());
    if support.len() > m {
        return HocOutcome::fail(HocFailure::LinearSolverFailed);
    }
    let a_s = inst.matrix.select_columns(support);
    let Ok(qr) = ThinQr::new(&a_s) else {
        return HocOutcome::fail(HocFailure::LinearSolverFailed);
    };
    let w = qr.min_norm_transposed(signs);
    let Ok(atw) = inst.matrix.matvec_t(&w) else {
        return HocOutcome::fail(HocFailure::LinearSolverFailed);
    };
    let failure = |reason| HocOutcome::Failure {
        reason,
        dual: Some(w.clone()),
    };
    if !(norm_inf(&atw) <= 1.0 + tol) {
        return failure(HocFailure::DualInfeasible);
    }

    let b = &inst.rhs;
    let xs = qr.least_squares(b);
    let mut x = vec![0.0; n];
    for (&j, &v) in support.iter().zip(&xs) {
        x[j] = v;
    }
    match inst.residual(&x) {
        Ok(res) if res <= tol * (1.0 + norm2(b)) => {}
        Ok(_) => return failure(HocFailure::PrimalInconsistent),
        Err(_) => return failure(HocFailure::LinearSolverFailed),
    }
    let primal = norm1(&x);
    let gap = (primal - dot(b, &w)) / primal;
    if !(gap.abs() <= tol) {
        return failure(HocFailure::GapTooLarge);
    }
    HocOutcome::Success { x, w, gap }
}

/// Weak-duality bound `bᵀw / ‖Aᵀw‖_∞`; `−∞` when `Aᵀw = 0`.
pub fn dual_lower_bound(inst: &BpInstance, w: &[f64]) -> f64 {
    let atw = inst
        .matrix
        .matvec_t(w)
        .expect("dual vector length must equal the number of rows");
    let scale = norm_inf(&atw);
    if scale == 0.0 {
        return f64::NEG_INFINITY;
    }
    dot(&inst.rhs, w) / scale
}
