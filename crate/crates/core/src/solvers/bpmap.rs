use super::hoc::{hoc_check, hoc_trigger_policy, support_of, HocOutcome};
use super::{OuterRecord, Run, SolveError, SolveResult, SolveStatus, SolverOptions};
use crate::instances::BpInstance;
use crate::kernels::{dist2, norm1};
use crate::map::{run_map_traced, MapStatus, StallReason};
use crate::projections::L1Ball;

/// Growing-ball alternating projections.
///
/// Starting from `r₀ = 0`, `z⁰ = 0`, each outer step projects `zᵏ` onto the
/// affine set, grows the radius by `‖zᵏ − P_M(zᵏ)‖₂` and reruns MAP on the
/// larger ball from `zᵏ`. The first intersecting MAP run ends the solve.
pub fn bpmap_solve(inst: &BpInstance, opts: &SolverOptions) -> Result<SolveResult, SolveError> {
    opts.validate()?;
    let mut run = Run::new(inst, opts);
    let n = inst.cols();
    if inst.rhs_is_zero() {
        return run.finish(vec![0.0; n], SolveStatus::Optimal, 0);
    }
    let proj = run.projector(opts)?;

    let mut z = vec![0.0; n];
    let mut r = 0.0_f64;
    let mut prev_support: Vec<usize> = Vec::new();

    for k in 0..opts.max_outer {
        let x = proj
            .project(&z)
            .map_err(|e| SolveError::backend(e, &run.trajectory))?;
        run.affine += 1;
        if run.timed_out() {
            return run.finish(x, SolveStatus::TimeLimit, k);
        }

        if opts.hoc && k > 0 {
            let support = support_of(&z, opts.support_abs, opts.support_rel);
            if hoc_trigger_policy(&prev_support, &support) {
                run.hoc_calls += 1;
                if let HocOutcome::Success { x, w, gap } = hoc_check(inst, &z, opts) {
                    run.trajectory.push(record(&run, k, r, &z, &x, 0, true));
                    return Ok(run
                        .finish(x, SolveStatus::HocOptimal, k)?
                        .with_certificate(w, gap));
                }
            }
            prev_support = support;
        }

        let d_norm = dist2(&z, &x);
        let r_next = r + d_norm;
        let ball = L1Ball::new(r_next).map_err(|e| SolveError::backend(e, &run.trajectory))?;
        let out = run_map_traced(&ball, &proj, &z, &opts.map, Some(run.deadline), None)
            .map_err(|e| SolveError::backend(e, &run.trajectory))?;
        run.inner += out.iterations;
        run.affine += out.affine_projections;
        run.l1 += out.l1_projections;
        run.trajectory
            .push(record(&run, k, r, &z, &x, out.iterations, true));
        r = r_next;

        match out.status {
            MapStatus::Intersecting { point, ball_point } => {
                let last = OuterRecord {
                    k: k + 1,
                    r,
                    upper: None,
                    width: None,
                    norm_d: dist2(&ball_point, &point),
                    z_norm1: norm1(&ball_point),
                    on_sphere: false,
                    inner_iters: 0,
                    elapsed_s: run.elapsed(),
                };
                run.trajectory.push(last);
                if opts.hoc {
                    run.hoc_calls += 1;
                    if let HocOutcome::Success { x, w, gap } = hoc_check(inst, &ball_point, opts) {
                        return Ok(run
                            .finish(x, SolveStatus::HocOptimal, k + 1)?
                            .with_certificate(w, gap));
                    }
                }
                return run.finish(point, SolveStatus::Optimal, k + 1);
            }
            MapStatus::BestPair { z: zn, .. } => z = zn,
            MapStatus::Stalled { x: xs, reason, .. } => {
                let status = match reason {
                    StallReason::Deadline => SolveStatus::TimeLimit,
                    StallReason::IterationCap => SolveStatus::Stalled,
                };
                // the deadline can fire before the first sweep
                let sol = if xs.is_empty() { x } else { xs };
                return run.finish(sol, status, k + 1);
            }
        }
    }
    let x = proj
        .project(&z)
        .map_err(|e| SolveError::backend(e, &run.trajectory))?;
    run.affine += 1;
    run.finish(x, SolveStatus::IterLimit, opts.max_outer)
}

fn record(
    run: &Run<'_>,
    k: usize,
    r: f64,
    z: &[f64],
    x: &[f64],
    inner: usize,
    on_sphere: bool,
) -> OuterRecord {
    OuterRecord {
        k,
        r,
        upper: None,
        width: None,
        norm_d: dist2(z, x),
        z_norm1: norm1(z),
        on_sphere,
        inner_iters: inner,
        elapsed_s: run.elapsed(),
    }
}
