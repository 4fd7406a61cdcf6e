use super::hoc::{hoc_check, hoc_trigger_policy, support_of, HocOutcome};
use super::{OuterRecord, Run, SolveError, SolveResult, SolveStatus, SolverOptions};
use crate::instances::BpInstance;
use crate::kernels::{dist2, norm1};
use crate::map::{run_map_traced, MapStatus, StallReason};
use crate::projections::L1Ball;

/// Bracketing search for the optimal radius.
///
/// Keeps `r < r̄ ≤ R` and tests the radius `α·r + (1 − α)·R` with one MAP
/// run: an intersecting run lowers `R` and updates the incumbent, a best
/// approximation pair raises `r`. The bracket is stored as `(r, R − r)` so
/// the width shrinks by exactly `α` or `1 − α` per step.
pub fn bpmap_bin_solve(inst: &BpInstance, opts: &SolverOptions) -> Result<SolveResult, SolveError> {
    opts.validate()?;
    let mut run = Run::new(inst, opts);
    let n = inst.cols();
    if inst.rhs_is_zero() {
        let mut res = run.finish(vec![0.0; n], SolveStatus::Optimal, 0)?;
        res.bracket = Some((0.0, 0.0));
        return Ok(res);
    }
    let proj = run.projector(opts)?;
    let alpha = opts.alpha;

    let mut incumbent = proj
        .project(&vec![0.0; n])
        .map_err(|e| SolveError::backend(e, &[]))?;
    run.affine += 1;
    let mut lower = 0.0_f64;
    let mut width = norm1(&incumbent);
    let mut z = vec![0.0; n];
    let mut prev_support: Vec<usize> = Vec::new();

    let push = |run: &mut Run<'_>, k, lower: f64, width: f64, gap, z: &[f64], inner, on_sphere| {
        let rec = OuterRecord {
            k,
            r: lower,
            upper: Some(lower + width),
            width: Some(width),
            norm_d: gap,
            z_norm1: norm1(z),
            on_sphere,
            inner_iters: inner,
            elapsed_s: run.elapsed(),
        };
        run.trajectory.push(rec);
    };
    push(
        &mut run,
        0,
        lower,
        width,
        dist2(&z, &incumbent),
        &z,
        0,
        true,
    );

    let mut k = 0;
    let status = loop {
        let upper = lower + width;
        if width <= opts.bin_gap_tol || width <= opts.bin_gap_tol * upper {
            break SolveStatus::Optimal;
        }
        if k >= opts.max_outer {
            break SolveStatus::IterLimit;
        }
        if run.timed_out() {
            break SolveStatus::TimeLimit;
        }
        k += 1;
        let radius = lower + (1.0 - alpha) * width;
        let ball = L1Ball::new(radius).map_err(|e| SolveError::backend(e, &run.trajectory))?;
        let start = ball.project(&z);
        run.l1 += 1;
        let out = run_map_traced(&ball, &proj, &start, &opts.map, Some(run.deadline), None)
            .map_err(|e| SolveError::backend(e, &run.trajectory))?;
        run.inner += out.iterations;
        run.affine += out.affine_projections;
        run.l1 += out.l1_projections;

        match out.status {
            MapStatus::Intersecting { point, ball_point } => {
                width *= 1.0 - alpha;
                incumbent = point;
                z = ball_point;
                push(
                    &mut run,
                    k,
                    lower,
                    width,
                    out.final_gap,
                    &z,
                    out.iterations,
                    false,
                );
            }
            MapStatus::BestPair { z: zn, .. } => {
                lower += (1.0 - alpha) * width;
                width *= alpha;
                z = zn;
                push(
                    &mut run,
                    k,
                    lower,
                    width,
                    out.final_gap,
                    &z,
                    out.iterations,
                    true,
                );
            }
            MapStatus::Stalled { reason, .. } => {
                break match reason {
                    StallReason::Deadline => SolveStatus::TimeLimit,
                    StallReason::IterationCap => SolveStatus::Stalled,
                };
            }
        }

        if opts.hoc {
            let support = support_of(&z, opts.support_abs, opts.support_rel);
            if hoc_trigger_policy(&prev_support, &support) {
                run.hoc_calls += 1;
                if let HocOutcome::Success { x, w, gap } = hoc_check(inst, &z, opts) {
                    let mut res = run
                        .finish(x, SolveStatus::HocOptimal, k)?
                        .with_certificate(w, gap);
                    res.bracket = Some((lower, lower + width));
                    return Ok(res);
                }
            }
            prev_support = support;
        }
    };
    let mut res = run.finish(incumbent, status, k)?;
    res.bracket = Some((lower, lower + width));
    Ok(res)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{DenseMatrix, Matrix};

    fn line() -> BpInstance {
        BpInstance::new(
            Matrix::Dense(DenseMatrix::from_rows(&[vec![1.0, 2.0]]).unwrap()),
            vec![2.0],
        )
        .unwrap()
    }

    #[test]
    fn zero_rhs() {
        let inst = BpInstance::new(Matrix::Dense(DenseMatrix::identity(2)), vec![0.0; 2]).unwrap();
        let res = bpmap_bin_solve(&inst, &SolverOptions::default()).unwrap();
        assert_eq!(res.status, SolveStatus::Optimal);
        assert_eq!(res.solution, vec![0.0; 2]);
        assert_eq!(res.outer_iterations, 0);
    }

    #[test]
    fn single_row_bracket() {
        let res = bpmap_bin_solve(&line(), &SolverOptions::default().without_hoc()).unwrap();
        assert_eq!(res.status, SolveStatus::Optimal);
        let first = &res.trajectory[0];
        assert!((first.upper.unwrap() - 1.2).abs() < 1e-15);
        let (lo, hi) = res.bracket.unwrap();
        assert!(lo <= 1.0 + 1e-6 && hi >= 1.0 - 1e-6, "({lo}, {hi})");
        assert!(hi - lo <= 1e-6 * hi.max(1.0));
        assert!((res.objective - 1.0).abs() < 1e-5);
    }

    #[test]
    fn width_ratios_are_exact() {
        let res = bpmap_bin_solve(&line(), &SolverOptions::default().without_hoc()).unwrap();
        for w in res.trajectory.windows(2) {
            let q = w[1].width.unwrap() / w[0].width.unwrap();
            assert!((q - 0.9).abs() <= 1e-12 || (q - 0.1).abs() <= 1e-12, "{q}");
        }
    }

    #[test]
    fn hoc_shortcut() {
        let inst =
            crate::instances::generate(&crate::instances::GenSpec::new(20, 50, 3, 3)).unwrap();
        let res = bpmap_bin_solve(&inst, &SolverOptions::default()).unwrap();
        assert!(res.status.is_success());
        let planted = inst.planted.as_ref().unwrap();
        let err = res
            .solution
            .iter()
            .zip(planted)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(err <= 1e-4, "{err}");
    }
}
