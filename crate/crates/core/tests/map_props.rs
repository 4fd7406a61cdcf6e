mod common;

use l1pursuit::kernels::{dist2, norm1, DenseMatrix, Matrix};
use l1pursuit::map::{run_map, run_map_traced, MapConfig, MapStatus};
use l1pursuit::projections::{AffineProjector, L1Ball};
use proptest::prelude::*;

use common::ball_affine_distance;

/// `m ≤ 2` rows of length `n ≤ 6`, with a right-hand side away from zero.
fn small_system() -> impl Strategy<Value = (Vec<Vec<f64>>, Vec<f64>)> {
    (1usize..=2, 2usize..=6).prop_flat_map(|(m, n)| {
        (
            prop::collection::vec(prop::collection::vec(-3.0..3.0f64, n), m),
            prop::collection::vec(0.5..3.0f64, m),
            prop::collection::vec(any::<bool>(), m),
        )
            .prop_map(|(rows, mags, signs)| {
                let b = mags
                    .iter()
                    .zip(&signs)
                    .map(|(v, s)| if *s { *v } else { -*v })
                    .collect();
                (rows, b)
            })
    })
}

fn well_conditioned(rows: &[Vec<f64>]) -> bool {
    let norms: Vec<f64> = rows
        .iter()
        .map(|r| r.iter().map(|v| v * v).sum::<f64>().sqrt())
        .collect();
    if norms.iter().any(|&v| v < 0.5) {
        return false;
    }
    if rows.len() == 2 {
        let c: f64 = rows[0]
            .iter()
            .zip(&rows[1])
            .map(|(p, q)| p * q)
            .sum::<f64>()
            / (norms[0] * norms[1]);
        return c.abs() < 0.95;
    }
    true
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn displacement_matches_distance_oracle((rows, b) in small_system(), frac in 0.0..0.9f64) {
        prop_assume!(well_conditioned(&rows));
        let a = Matrix::Dense(DenseMatrix::from_rows(&rows).unwrap());
        let proj = AffineProjector::new(&a, &b).unwrap();
        let n = a.cols();
        let x0 = proj.project(&vec![0.0; n]).unwrap();
        let r = frac * norm1(&x0);
        let dist = ball_affine_distance(&rows, &b, r);
        prop_assume!(dist > 1e-3);
        let out = run_map(&L1Ball::new(r).unwrap(), &proj, &vec![0.0; n], &MapConfig::default()).unwrap();
        match out.status {
            MapStatus::BestPair { x, z, displacement } => {
                let d = dist2(&x, &z);
                prop_assert!((d - dist).abs() <= 1e-4, "map {d} oracle {dist}");
                let expect: Vec<f64> = z.iter().zip(&x).map(|(p, q)| p - q).collect();
                prop_assert_eq!(displacement, expect);
                prop_assert!(norm1(&z) <= r * (1.0 + 1e-12) + 1e-300);
                prop_assert!(proj.residual(&x).unwrap() <= 1e-8 * (1.0 + b.iter().map(|v| v * v).sum::<f64>().sqrt()));
            }
            other => prop_assert!(false, "expected a best pair, got {other:?}"),
        }
    }

    #[test]
    fn gap_is_monotone_and_counters_agree((rows, b) in small_system(), frac in 0.0..2.0f64) {
        prop_assume!(well_conditioned(&rows));
        let a = Matrix::Dense(DenseMatrix::from_rows(&rows).unwrap());
        let proj = AffineProjector::new(&a, &b).unwrap();
        let n = a.cols();
        let x0 = proj.project(&vec![0.0; n]).unwrap();
        let ball = L1Ball::new(frac * norm1(&x0)).unwrap();
        let mut gaps = Vec::new();
        let mut cb = |_: usize, g: f64| gaps.push(g);
        let out = run_map_traced(&ball, &proj, &vec![0.0; n], &MapConfig::default(), None, Some(&mut cb)).unwrap();
        for w in gaps.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-12 * (1.0 + w[0]));
        }
        prop_assert_eq!(gaps.len(), out.iterations);
        prop_assert_eq!(out.affine_projections, out.iterations);
        prop_assert_eq!(out.l1_projections, out.iterations);
        prop_assert_eq!(out.final_gap, *gaps.last().unwrap());
    }
}

#[test]
fn origin_to_line() {
    let rows = vec![vec![1.0, 2.0]];
    let a = Matrix::Dense(DenseMatrix::from_rows(&rows).unwrap());
    let proj = AffineProjector::new(&a, &[2.0]).unwrap();
    let out = run_map(
        &L1Ball::new(0.0).unwrap(),
        &proj,
        &[0.0, 0.0],
        &MapConfig::default(),
    )
    .unwrap();
    let MapStatus::BestPair {
        x, displacement, ..
    } = out.status
    else {
        panic!("expected a best pair");
    };
    assert!((x[0] - 0.4).abs() < 1e-15 && (x[1] - 0.8).abs() < 1e-15);
    let d = displacement.iter().map(|v| v * v).sum::<f64>().sqrt();
    assert!((d - 2.0 / 5f64.sqrt()).abs() < 1e-12);
    assert!((ball_affine_distance(&rows, &[2.0], 0.0) - d).abs() < 1e-12);
}
