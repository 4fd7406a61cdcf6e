mod common;

use std::fs;

use l1pursuit::instances::mtx::{parse_matrix, read_matrix, write_matrix};
use l1pursuit::instances::{
    check_erc, export_lp, generate, lp_oracle, read_instance, read_mps, write_instance, GenSpec,
    InstanceError,
};
use l1pursuit::kernels::{norm2, DenseMatrix, Matrix, SparseMatrixCsc};
use l1pursuit::BpInstance;
use proptest::prelude::*;

use common::{erc_value, standard_form_lp_value};

fn dense_rows(inst: &BpInstance) -> Vec<Vec<f64>> {
    let a = inst.matrix.to_dense();
    (0..a.rows())
        .map(|i| (0..a.cols()).map(|j| a.column(j)[i]).collect())
        .collect()
}

/// Values that stress the text round trip: tiny, huge, negative, subnormal.
fn entry() -> impl Strategy<Value = f64> {
    prop_oneof![
        -1e3..1e3f64,
        any::<f64>().prop_filter("finite", |v| v.is_finite()),
        Just(5e-324),
        Just(-0.1),
    ]
}

proptest! {
    #[test]
    fn dense_mtx_round_trip(m in 1usize..6, n in 1usize..6, seed in prop::collection::vec(entry(), 36)) {
        let a = Matrix::Dense(DenseMatrix::new(m, n, seed[..m * n].to_vec()).unwrap());
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("A.mtx");
        write_matrix(&path, &a).unwrap();
        prop_assert_eq!(read_matrix(&path).unwrap(), a);
    }

    #[test]
    fn sparse_mtx_round_trip(
        m in 1usize..6,
        n in 1usize..6,
        vals in prop::collection::vec(entry(), 36),
        keep in prop::collection::vec(any::<bool>(), 36),
    ) {
        let trip: Vec<(usize, usize, f64)> = (0..m * n)
            .filter(|&k| keep[k] && vals[k] != 0.0)
            .map(|k| (k % m, k / m, vals[k]))
            .collect();
        let a = Matrix::Sparse(SparseMatrixCsc::from_triplets(m, n, &trip).unwrap());
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("A.mtx");
        write_matrix(&path, &a).unwrap();
        prop_assert_eq!(read_matrix(&path).unwrap(), a);
    }

    #[test]
    fn generator_properties(m in 2usize..8, extra in 0usize..8, seed in any::<u64>(), d in 0.0..3.0f64) {
        let n = m + extra;
        let s = 1 + (seed as usize) % m;
        let inst = generate(&GenSpec::new(m, n, s, seed).with_dynrange(d)).unwrap();
        let a = inst.matrix.to_dense();
        for j in 0..n {
            prop_assert!((norm2(a.column(j)) - 1.0).abs() <= 1e-12);
        }
        let x = inst.planted.clone().unwrap();
        prop_assert_eq!(x.iter().filter(|v| **v != 0.0).count(), s);
        for v in x.iter().filter(|v| **v != 0.0) {
            prop_assert!(v.abs() >= 1.0 && v.abs() <= 10f64.powf(d) * (1.0 + 1e-12));
        }
        prop_assert!(inst.residual(&x).unwrap() <= 1e-10 * (1.0 + norm2(&inst.rhs)));
    }

    #[test]
    fn erc_matches_pseudoinverse_oracle(m in 3usize..8, extra in 1usize..8, seed in any::<u64>()) {
        let n = m + extra;
        let s = 1 + (seed as usize) % (m - 1);
        let inst = generate(&GenSpec::new(m, n, s, seed)).unwrap();
        let report = check_erc(&inst).unwrap();
        let expect = erc_value(&dense_rows(&inst), &inst.planted_support().unwrap());
        prop_assert!((report.value - expect).abs() <= 1e-8 * expect.max(1.0), "{} vs {}", report.value, expect);
        prop_assert_eq!(report.holds, report.value < 1.0);
    }

    #[test]
    fn erc_is_permutation_invariant(seed in any::<u64>(), perm_seed in any::<u64>()) {
        let inst = generate(&GenSpec::new(6, 12, 2, seed)).unwrap();
        let support = inst.planted_support().unwrap();
        // shuffle the off-support columns among themselves
        let mut off: Vec<usize> = (0..12).filter(|j| !support.contains(j)).collect();
        let mut state = perm_seed;
        for i in (1..off.len()).rev() {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            off.swap(i, (state >> 33) as usize % (i + 1));
        }
        let mut order = vec![0usize; 12];
        let mut it = off.into_iter();
        for (j, slot) in order.iter_mut().enumerate() {
            *slot = if support.contains(&j) { j } else { it.next().unwrap() };
        }
        let permuted = BpInstance::new(Matrix::Dense(inst.matrix.select_columns(&order)), inst.rhs.clone())
            .unwrap()
            .with_planted(order.iter().map(|&j| inst.planted.as_ref().unwrap()[j]).collect())
            .unwrap();
        let a = check_erc(&inst).unwrap().value;
        let b = check_erc(&permuted).unwrap().value;
        prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0));
    }
}

#[test]
fn duplicate_entry_is_reported_with_position() {
    let text =
        "%%MatrixMarket matrix coordinate real general\n% c\n2 2 3\n1 1 1.0\n2 2 2.0\n1 1 3.0\n";
    match parse_matrix(text, std::path::Path::new("dup.mtx")) {
        Err(InstanceError::Format { line, msg, .. }) => {
            assert_eq!(line, 6);
            assert!(msg.contains("(1, 1)") && msg.contains("line 4"), "{msg}");
        }
        other => panic!("expected a format error, got {other:?}"),
    }
}

#[test]
fn store_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    for (k, sparse) in [(0u64, false), (1, true)] {
        let mut inst = generate(&GenSpec::new(4, 9, 2, 31 + k).with_dynrange(2.5)).unwrap();
        if sparse {
            inst.matrix = Matrix::Sparse(SparseMatrixCsc::from_dense(&inst.matrix.to_dense()));
        }
        inst.meta.erc_value = Some(check_erc(&inst).unwrap().value);
        let path = dir.path().join(format!("inst{k}"));
        write_instance(&inst, &path).unwrap();
        assert_eq!(read_instance(&path).unwrap(), inst);
    }
}

#[test]
fn store_without_planted_solution() {
    let dir = tempfile::tempdir().unwrap();
    let inst = generate(&GenSpec::new(3, 5, 1, 2)).unwrap();
    write_instance(&inst, dir.path()).unwrap();
    let bare = BpInstance::new(inst.matrix.clone(), inst.rhs.clone())
        .unwrap()
        .with_label("bare");
    write_instance(&bare, dir.path()).unwrap();
    let back = read_instance(dir.path()).unwrap();
    assert_eq!(back.planted, None);
    assert_eq!(back, bare);
}

#[test]
fn wrong_rhs_length_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let inst = generate(&GenSpec::new(3, 5, 1, 2)).unwrap();
    write_instance(&inst, dir.path()).unwrap();
    fs::write(
        dir.path().join("b.mtx"),
        "%%MatrixMarket matrix array real general\n2 1\n1\n2\n",
    )
    .unwrap();
    assert!(matches!(
        read_instance(dir.path()),
        Err(InstanceError::Dimension(_))
    ));
}

fn lp_value_of(inst: &BpInstance) -> (usize, f64) {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.mps");
    export_lp(inst, &path).unwrap();
    let lp = read_mps(&path).unwrap();
    assert!(lp.objective.iter().all(|&c| c == 1.0));
    (lp.cols(), standard_form_lp_value(&lp).expect("feasible"))
}

#[test]
fn exported_lp_matches_examples() {
    let line = BpInstance::new(
        Matrix::Dense(DenseMatrix::from_rows(&[vec![1.0, 2.0]]).unwrap()),
        vec![2.0],
    )
    .unwrap();
    let (cols, v) = lp_value_of(&line);
    assert_eq!(cols, 4);
    assert!((v - 1.0).abs() <= 1e-12);

    let zero = BpInstance::new(line.matrix.clone(), vec![0.0]).unwrap();
    assert_eq!(lp_value_of(&zero).1, 0.0);
}

#[test]
fn exported_lp_matches_oracle() {
    for seed in 0..12 {
        let m = 2 + seed as usize % 3;
        let inst = generate(&GenSpec::new(m, m + 3, 1, seed).with_dynrange(1.5)).unwrap();
        let (cols, v) = lp_value_of(&inst);
        assert_eq!(cols, 2 * inst.cols());
        let o = lp_oracle(&inst).unwrap().objective;
        assert!(
            (v - o).abs() <= 1e-8 * o.max(1.0),
            "seed {seed}: {v} vs {o}"
        );
    }
}
