//! Test-only oracles, independent of the library's solvers.

#![allow(dead_code)]

use l1pursuit::instances::LinearProgram;
use nalgebra::{DMatrix, DVector};

/// Optimal value of `min cᵀy s.t. Ey = h, y ≥ 0` by enumerating bases.
///
/// Every basic feasible solution picks `rank(E)` independent columns; the
/// rows are first reduced to an independent subset via SVD rank. Returns
/// `None` if the LP is infeasible.
pub fn standard_form_lp_value(lp: &LinearProgram) -> Option<f64> {
    let rows = lp.dense_rows();
    let (m, n) = (lp.rows(), lp.cols());
    let e = DMatrix::from_fn(m, n, |i, j| rows[i][j]);
    let h = DVector::from_column_slice(&lp.rhs);
    let rank = e.clone().svd(false, false).rank(1e-10);
    let mut best: Option<f64> = None;
    if h.norm() <= 1e-12 {
        return Some(0.0);
    }
    for basis in combinations(n, rank) {
        let eb = e.select_columns(basis.iter());
        if eb.clone().svd(false, false).rank(1e-10) < rank {
            continue;
        }
        let svd = eb.clone().svd(true, true);
        let Ok(yb) = svd.solve(&h, 1e-12) else {
            continue;
        };
        if (&eb * &yb - &h).norm() > 1e-9 * (1.0 + h.norm()) {
            continue;
        }
        if yb.iter().any(|&v| v < -1e-12) {
            continue;
        }
        let val: f64 = basis
            .iter()
            .zip(yb.iter())
            .map(|(&j, &v)| lp.objective[j] * v)
            .sum();
        best = Some(best.map_or(val, |b: f64| b.min(val)));
    }
    best
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for j in start..n {
            if n - j < k - cur.len() {
                break;
            }
            cur.push(j);
            rec(j + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Exact recovery coefficient `max_{i∉S} ‖A_S⁺ a_i‖₁` via an SVD pseudo-inverse.
pub fn erc_value(rows: &[Vec<f64>], support: &[usize]) -> f64 {
    let m = rows.len();
    let n = rows[0].len();
    let a = DMatrix::from_fn(m, n, |i, j| rows[i][j]);
    if support.is_empty() {
        return 0.0;
    }
    let a_s = a.select_columns(support.iter());
    let pinv = a_s.pseudo_inverse(1e-12).expect("pseudo-inverse");
    (0..n)
        .filter(|j| !support.contains(j))
        .map(|j| (&pinv * a.column(j)).abs().sum())
        .fold(0.0, f64::max)
}

/// Distance between the ℓ1-ball of radius `r` and `{x : Ax = b}`.
///
/// Uses the dual formulation `dist = max_{‖Aᵀu‖₂ ≤ 1} bᵀu − r‖Aᵀu‖_∞`.
/// For one row the feasible `u` form an interval; for two rows the maximum
/// over directions is found on a fine angle grid refined by golden-section
/// search. Only `m ≤ 2` is supported.
pub fn ball_affine_distance(rows: &[Vec<f64>], b: &[f64], r: f64) -> f64 {
    let m = rows.len();
    let n = rows[0].len();
    let at = |u: &[f64]| -> Vec<f64> {
        (0..n)
            .map(|j| (0..m).map(|i| rows[i][j] * u[i]).sum())
            .collect()
    };
    let value = |u: &[f64]| -> f64 {
        let g = at(u);
        let n2 = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if n2 == 0.0 {
            return 0.0;
        }
        let ninf = g.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
        // homogeneous objective: scale u so that ‖Aᵀu‖₂ = 1
        let bu: f64 = b.iter().zip(u).map(|(p, q)| p * q).sum();
        (bu - r * ninf) / n2
    };
    match m {
        1 => value(&[1.0]).max(value(&[-1.0])).max(0.0),
        2 => {
            let f = |t: f64| value(&[t.cos(), t.sin()]);
            let grid = 20_000;
            let h = std::f64::consts::TAU / grid as f64;
            let mut best = (0.0_f64, 0.0_f64);
            for i in 0..grid {
                let t = i as f64 * h;
                let v = f(t);
                if v > best.0 {
                    best = (v, t);
                }
            }
            // golden-section refinement on the bracketing cell
            let (mut lo, mut hi) = (best.1 - h, best.1 + h);
            let phi = (5f64.sqrt() - 1.0) / 2.0;
            for _ in 0..100 {
                let a = hi - phi * (hi - lo);
                let c = lo + phi * (hi - lo);
                if f(a) < f(c) {
                    lo = a;
                } else {
                    hi = c;
                }
            }
            best.0.max(f(0.5 * (lo + hi))).max(0.0)
        }
        _ => panic!("distance oracle supports at most two rows"),
    }
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
