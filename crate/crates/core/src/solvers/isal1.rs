use super::hoc::{dual_lower_bound, hoc_check_support, hoc_trigger_policy, support_of, HocOutcome};
use super::{OuterRecord, Run, SolveError, SolveResult, SolveStatus, SolverOptions};
use crate::instances::BpInstance;
use crate::kernels::{norm1, norm2, norm_inf};

/// Iterations without a new best objective before the step scale is halved.
const PATIENCE: usize = 20;
/// Re-project onto the affine set this often to remove drift.
const REPROJECT_EVERY: usize = 25;
const MIN_STEP_SCALE: f64 = 1e-12;

/// Projected subgradient method with a Polyak-type step and a dual lower
/// bound `φ` as target value.
///
/// `x^{k+1} = P_M(xᵏ − λ_k (‖xᵏ‖₁ − φ)/‖hᵏ‖² hᵏ)` with `hᵏ = sign(xᵏ)`.
/// Since `xᵏ ∈ M` the projection equals `xᵏ − t (hᵏ − Aᵀw)` with
/// `AAᵀw = Ahᵏ`, and that `w` doubles as a dual estimate for `φ`.
pub fn isal1_solve(inst: &BpInstance, opts: &SolverOptions) -> Result<SolveResult, SolveError> {
    opts.validate()?;
    let mut run = Run::new(inst, opts);
    let n = inst.cols();
    if inst.rhs_is_zero() {
        return run.finish(vec![0.0; n], SolveStatus::Optimal, 0);
    }
    let proj = run.projector(opts)?;
    let spd = proj.solver();
    let a = &inst.matrix;
    let backend = |e, t: &[OuterRecord]| SolveError::backend(e, t);

    let mut x = proj.project(&vec![0.0; n]).map_err(|e| backend(e, &[]))?;
    run.affine += 1;
    let mut best_x = x.clone();
    let mut best_f = norm1(&x);
    let mut phi = 0.0_f64;
    let mut phi_w: Option<Vec<f64>> = None;
    let mut lambda = 1.0_f64;
    let mut stale = 0usize;
    let mut prev_support: Vec<usize> = Vec::new();
    let mut last_hoc_support: Option<Vec<usize>> = None;

    let mut k = 0;
    let status = loop {
        if best_f - phi <= opts.hoc_tol * best_f {
            break SolveStatus::Optimal;
        }
        if k >= opts.max_outer {
            break SolveStatus::IterLimit;
        }
        if run.timed_out() {
            break SolveStatus::TimeLimit;
        }
        if lambda < MIN_STEP_SCALE {
            break SolveStatus::Stalled;
        }

        if opts.hoc {
            let support = support_of(&x, opts.support_abs, opts.isal_support_rel);
            let fire = k == 0 || hoc_trigger_policy(&prev_support, &support);
            if fire && last_hoc_support.as_ref() != Some(&support) {
                run.hoc_calls += 1;
                let signs: Vec<f64> = support.iter().map(|&i| x[i].signum()).collect();
                match hoc_check_support(inst, &support, &signs, opts.hoc_tol) {
                    HocOutcome::Success { x, w, gap } => {
                        let res = run.finish(x, SolveStatus::HocOptimal, k)?;
                        return Ok(res.with_certificate(w, gap));
                    }
                    HocOutcome::Failure { dual: Some(w), .. } => {
                        let bound = dual_lower_bound(inst, &w);
                        if bound > phi {
                            phi = bound;
                            phi_w = Some(w);
                        }
                    }
                    HocOutcome::Failure { dual: None, .. } => {}
                }
                last_hoc_support = Some(support.clone());
            }
            prev_support = support;
        }

        let h: Vec<f64> = x
            .iter()
            .map(|&v| {
                if v > 0.0 {
                    1.0
                } else if v < 0.0 {
                    -1.0
                } else {
                    0.0
                }
            })
            .collect();
        let hh = norm2(&h).powi(2);
        let ah = a.matvec(&h).map_err(|e| backend(e, &run.trajectory))?;
        let w = spd.solve(&ah).map_err(|e| backend(e, &run.trajectory))?;
        run.affine += 1;
        let bound = dual_lower_bound(inst, &w);
        if bound > phi {
            phi = bound;
            phi_w = Some(w.clone());
        }
        let f = norm1(&x);
        let t = lambda * (f - phi).max(0.0) / hh;
        let atw = a.matvec_t(&w).map_err(|e| backend(e, &run.trajectory))?;
        let mut step = 0.0_f64;
        for ((xi, hi), gi) in x.iter_mut().zip(&h).zip(&atw) {
            let delta = t * (hi - gi);
            *xi -= delta;
            step += delta * delta;
        }
        k += 1;
        if k % REPROJECT_EVERY == 0 {
            x = proj.project(&x).map_err(|e| backend(e, &run.trajectory))?;
            run.affine += 1;
        }

        let f_new = norm1(&x);
        if f_new < best_f {
            best_f = f_new;
            best_x.clone_from(&x);
            stale = 0;
        } else {
            stale += 1;
            if stale >= PATIENCE {
                lambda *= 0.5;
                stale = 0;
                x.clone_from(&best_x);
            }
        }
        run.trajectory.push(OuterRecord {
            k,
            r: best_f,
            upper: None,
            width: None,
            norm_d: step.sqrt(),
            z_norm1: f_new,
            on_sphere: false,
            inner_iters: 0,
            elapsed_s: run.elapsed(),
        });
    };

    let x = proj
        .project(&best_x)
        .map_err(|e| backend(e, &run.trajectory))?;
    run.affine += 1;
    let mut res = run.finish(x, status, k)?;
    if status == SolveStatus::Optimal {
        if let Some(w) = phi_w {
            let atw = a.matvec_t(&w).map_err(|e| backend(e, &res.trajectory))?;
            let scale = norm_inf(&atw);
            let w: Vec<f64> = w.iter().map(|v| v / scale).collect();
            let gap = (res.objective - phi) / res.objective;
            res = res.with_certificate(w, gap);
        }
    }
    Ok(res)
}
