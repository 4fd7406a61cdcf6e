use l1pursuit::bench::{
    emit_profile_plot, performance_profile, read_records_csv, run_suite, BenchRecord, BenchStatus,
    SuiteOptions,
};
use l1pursuit::instances::{generate, GenSpec};
use l1pursuit::{SolverKind, SolverOptions};
use proptest::prelude::*;

fn record(p: usize, s: usize, time: f64, solved: bool) -> BenchRecord {
    BenchRecord {
        instance: format!("p{p:02}"),
        solver: format!("s{s}"),
        status: if solved {
            BenchStatus::Optimal
        } else {
            BenchStatus::TimeLimit
        },
        time_s: time,
        objective: 1.0,
        residual: 0.0,
        outer_iters: 1,
        inner_iters: 1,
    }
}

/// Full grid of positive times; a few repeated values so ties occur.
fn grid() -> impl Strategy<Value = (usize, usize, Vec<BenchRecord>)> {
    (1usize..8, 1usize..5).prop_flat_map(|(np, ns)| {
        let cell = (
            prop_oneof![Just(0.5), Just(2.0), 0.01..10.0f64],
            prop::bool::weighted(0.8),
        );
        prop::collection::vec(cell, np * ns).prop_map(move |cells| {
            let recs = cells
                .iter()
                .enumerate()
                .map(|(k, &(t, ok))| record(k / ns, k % ns, t, ok))
                .collect();
            (np, ns, recs)
        })
    })
}

/// `ρ_s(τ)` straight from the definition.
fn rho_oracle(recs: &[BenchRecord], np: usize, solver: &str, tau: f64) -> f64 {
    let mut hits = 0;
    for p in 0..np {
        let name = format!("p{p:02}");
        let row: Vec<&BenchRecord> = recs.iter().filter(|r| r.instance == name).collect();
        let Some(best) = row
            .iter()
            .filter(|r| r.status.is_solved())
            .map(|r| r.time_s)
            .min_by(f64::total_cmp)
        else {
            continue;
        };
        let mine = row.iter().find(|r| r.solver == solver).unwrap();
        if mine.status.is_solved()
            && (mine.time_s <= best * (1.0 + 1e-9) || mine.time_s / best <= tau)
        {
            hits += 1;
        }
    }
    hits as f64 / np as f64
}

proptest! {
    #[test]
    fn profile_matches_definition((np, ns, recs) in grid(), taus in prop::collection::vec(1.0..50.0f64, 5)) {
        let prof = performance_profile(&recs).unwrap();
        prop_assert_eq!(prof.problems.len(), np);
        prop_assert_eq!(prof.curves.len(), ns);
        for c in &prof.curves {
            let mut probes = taus.clone();
            probes.extend(c.points.iter().map(|p| p.0));
            probes.push(1.0);
            for tau in probes {
                let expect = rho_oracle(&recs, np, &c.solver, tau);
                prop_assert!((c.rho(tau) - expect).abs() <= 1e-12, "{} at {}: {} vs {}", c.solver, tau, c.rho(tau), expect);
            }
        }
    }

    #[test]
    fn profile_invariants((np, _ns, recs) in grid()) {
        let prof = performance_profile(&recs).unwrap();
        for c in &prof.curves {
            prop_assert_eq!(c.points[0].0, 1.0);
            for w in c.points.windows(2) {
                prop_assert!(w[0].0 < w[1].0);
                prop_assert!(w[0].1 <= w[1].1);
            }
            for &(t, r) in &c.points {
                prop_assert!(t >= 1.0 && (0.0..=1.0).contains(&r));
            }
            prop_assert_eq!(c.ratios.len(), np);
            prop_assert!(c.ratios.iter().all(|r| *r >= 1.0));
        }
        // every problem solved by someone gives some solver ratio 1
        let solved = prof.problems.iter().filter(|p| recs.iter().any(|r| &r.instance == *p && r.status.is_solved())).count();
        let total: f64 = prof.curves.iter().map(|c| c.rho(1.0)).sum();
        prop_assert!(total * np as f64 >= solved as f64 - 1e-9);
    }

    #[test]
    fn failures_never_count((_np, _ns, mut recs) in grid()) {
        for r in recs.iter_mut().filter(|r| r.solver == "s0") {
            r.status = BenchStatus::Error;
        }
        let prof = performance_profile(&recs).unwrap();
        let c = prof.curve("s0").unwrap();
        prop_assert!(c.ratios.iter().all(|r| r.is_infinite()));
        prop_assert_eq!(c.rho(f64::MAX), 0.0);
    }
}

#[test]
fn suite_to_profile_pipeline() {
    let instances: Vec<_> = (0..3)
        .map(|seed| generate(&GenSpec::new(6, 14, 2, seed)).unwrap())
        .collect();
    let dir = tempfile::tempdir().unwrap();
    let stream = dir.path().join("records.csv");
    let opts = SuiteOptions {
        solver: SolverOptions::default(),
        workers: 2,
        stream: Some(stream.clone()),
    };
    let records = run_suite(
        &instances,
        &[SolverKind::BpmapHoc, SolverKind::Isal1],
        &opts,
    )
    .unwrap();
    assert_eq!(records.len(), 6);
    let mut streamed = read_records_csv(&stream).unwrap();
    l1pursuit::bench::sort_records(&mut streamed);
    assert_eq!(streamed.len(), 6);
    for (a, b) in streamed.iter().zip(&records) {
        assert_eq!(
            (&a.instance, &a.solver, a.status),
            (&b.instance, &b.solver, b.status)
        );
    }

    let prof = performance_profile(&records).unwrap();
    let svg = dir.path().join("profile.svg");
    emit_profile_plot(&prof, &svg).unwrap();
    assert!(std::fs::read_to_string(&svg).unwrap().starts_with("<svg"));
    let csv = std::fs::read_to_string(svg.with_extension("csv")).unwrap();
    assert!(csv.starts_with("solver,tau,rho"));
}
