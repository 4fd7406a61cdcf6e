use super::{BpInstance, InstanceError};
use crate::kernels::{norm1, norm2, ThinQr};

/// Largest column count accepted by [`lp_oracle`].
pub const ORACLE_MAX_COLS: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleSolution {
    pub objective: f64,
    pub solution: Vec<f64>,
    /// Another basic solution with a different vector attains the optimum.
    pub tie: bool,
}

/// Exact basis pursuit optimum by enumerating basic solutions.
///
/// Every subset `S` with `|S| ≤ m` whose columns are independent and for
/// which `A_S x_S = b` is consistent yields a candidate; the ℓ1-minimal one
/// is returned, ties broken towards the lexicographically smallest support.
pub fn lp_oracle(inst: &BpInstance) -> Result<OracleSolution, InstanceError> {
    let (m, n) = (inst.rows(), inst.cols());
    if n > ORACLE_MAX_COLS {
        return Err(InstanceError::TooLarge {
            cols: n,
            limit: ORACLE_MAX_COLS,
        });
    }
    let b = &inst.rhs;
    let feas_tol = 1e-9 * (1.0 + norm2(b));
    let mut best: Option<(f64, Vec<f64>, Vec<usize>)> = None;
    let mut tie = false;

    for mask in 0u32..(1u32 << n) {
        let cols: Vec<usize> = (0..n).filter(|&j| mask & (1 << j) != 0).collect();
        if cols.len() > m {
            continue;
        }
        let x = if cols.is_empty() {
            if norm2(b) > feas_tol {
                continue;
            }
            vec![0.0; n]
        } else {
            let a_s = inst.matrix.select_columns(&cols);
            let Ok(qr) = ThinQr::new(&a_s) else {
                continue;
            };
            let xs = qr.least_squares(b);
            let mut x = vec![0.0; n];
            for (&j, &v) in cols.iter().zip(&xs) {
                x[j] = v;
            }
            if inst.residual(&x)? > feas_tol {
                continue;
            }
            x
        };
        let obj = norm1(&x);
        let support: Vec<usize> = (0..n).filter(|&j| x[j].abs() > 1e-12).collect();
        match &best {
            None => best = Some((obj, x, support)),
            Some((bo, bx, bs)) => {
                let scale = 1.0 + bo.abs();
                if obj < bo - 1e-9 * scale {
                    best = Some((obj, x, support));
                    tie = false;
                } else if (obj - bo).abs() <= 1e-9 * scale {
                    let same = bx
                        .iter()
                        .zip(&x)
                        .all(|(p, q)| (p - q).abs() <= 1e-9 * scale);
                    if !same {
                        tie = true;
                        if support < *bs {
                            best = Some((obj, x, support));
                        }
                    }
                }
            }
        }
    }
    let (objective, solution, _) = best.ok_or(InstanceError::Infeasible)?;
    Ok(OracleSolution {
        objective,
        solution,
        tie,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{DenseMatrix, Matrix};

    fn inst(rows: &[Vec<f64>], b: &[f64]) -> BpInstance {
        BpInstance::new(
            Matrix::Dense(DenseMatrix::from_rows(rows).unwrap()),
            b.to_vec(),
        )
        .unwrap()
    }

    #[test]
    fn single_row_line() {
        let o = lp_oracle(&inst(&[vec![1.0, 2.0]], &[2.0])).unwrap();
        assert!((o.objective - 1.0).abs() < 1e-15);
        assert!(o.solution[0].abs() < 1e-15 && (o.solution[1] - 1.0).abs() < 1e-15);
        assert!(!o.tie);
    }

    #[test]
    fn identity_returns_rhs() {
        let o = lp_oracle(&inst(
            &[
                vec![1.0, 0.0, 0.0],
                vec![0.0, 1.0, 0.0],
                vec![0.0, 0.0, 1.0],
            ],
            &[1.0, -2.0, 0.5],
        ))
        .unwrap();
        assert_eq!(o.solution, vec![1.0, -2.0, 0.5]);
        assert!((o.objective - 3.5).abs() < 1e-15);
    }

    #[test]
    fn equal_columns_tie() {
        let o = lp_oracle(&inst(&[vec![1.0, 1.0]], &[2.0])).unwrap();
        assert!((o.objective - 2.0).abs() < 1e-15);
        assert!(o.tie);
        // lexicographically smallest support
        assert_eq!(o.solution, vec![2.0, 0.0]);
    }

    #[test]
    fn zero_rhs() {
        let o = lp_oracle(&inst(&[vec![1.0, 2.0]], &[0.0])).unwrap();
        assert_eq!(o.objective, 0.0);
        assert!(!o.tie);
    }

    #[test]
    fn inconsistent_system() {
        let e = lp_oracle(&inst(&[vec![1.0, 1.0], vec![1.0, 1.0]], &[1.0, 2.0])).unwrap_err();
        assert!(matches!(e, InstanceError::Infeasible));
    }

    #[test]
    fn too_many_columns() {
        let a = vec![vec![1.0; 13]];
        assert!(matches!(
            lp_oracle(&inst(&a, &[1.0])),
            Err(InstanceError::TooLarge { .. })
        ));
    }
}
