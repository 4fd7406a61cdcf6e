use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{BpInstance, InstanceError, InstanceMeta};
use crate::kernels::{norm2, DenseMatrix, Matrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Ensemble {
    #[default]
    Gaussian,
}

/// Parameters of a synthetic instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub m: usize,
    pub n: usize,
    /// Number of nonzeros in the planted solution.
    pub s: usize,
    /// Magnitudes are `10^U[0, dynrange]`.
    pub dynrange: f64,
    pub seed: u64,
    #[serde(default)]
    pub ensemble: Ensemble,
}

impl GenSpec {
    pub fn new(m: usize, n: usize, s: usize, seed: u64) -> Self {
        GenSpec {
            m,
            n,
            s,
            dynrange: 1.0,
            seed,
            ensemble: Ensemble::Gaussian,
        }
    }

    pub fn with_dynrange(mut self, d: f64) -> Self {
        self.dynrange = d;
        self
    }

    pub fn validate(&self) -> Result<(), InstanceError> {
        if self.m == 0 {
            return Err(InstanceError::InvalidSpec("m must be positive".into()));
        }
        if self.m > self.n {
            return Err(InstanceError::InvalidSpec(format!(
                "m = {} exceeds n = {}",
                self.m, self.n
            )));
        }
        if self.s > self.m {
            return Err(InstanceError::InvalidSpec(format!(
                "s = {} exceeds m = {}",
                self.s, self.m
            )));
        }
        if !(self.dynrange >= 0.0) || !self.dynrange.is_finite() {
            return Err(InstanceError::InvalidSpec(
                "dynamic range must be finite and nonnegative".into(),
            ));
        }
        Ok(())
    }

    pub fn label(&self) -> String {
        format!(
            "gauss_m{}_n{}_s{}_d{}_seed{}",
            self.m, self.n, self.s, self.dynrange, self.seed
        )
    }
}

/// Gaussian matrix with unit-norm columns, planted `s`-sparse solution with
/// Rademacher signs, and `b = Ax*`. Deterministic in `spec.seed`.
pub fn generate(spec: &GenSpec) -> Result<BpInstance, InstanceError> {
    spec.validate()?;
    let (m, n) = (spec.m, spec.n);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let mut data: Vec<f64> = (0..m * n).map(|_| rng.sample(StandardNormal)).collect();
    for col in data.chunks_mut(m) {
        let nrm = norm2(col);
        col.iter_mut().for_each(|v| *v /= nrm);
    }
    let a = DenseMatrix::new(m, n, data)?;

    let mut support = index::sample(&mut rng, n, spec.s).into_vec();
    support.sort_unstable();
    let mut planted = vec![0.0; n];
    for &i in &support {
        let mag = 10f64.powf(spec.dynrange * rng.random::<f64>());
        let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        planted[i] = sign * mag;
    }

    let matrix = Matrix::Dense(a);
    let rhs = matrix.matvec(&planted)?;
    let mut inst = BpInstance::new(matrix, rhs)?.with_planted(planted)?;
    inst.meta = InstanceMeta {
        label: spec.label(),
        seed: Some(spec.seed),
        s: Some(spec.s),
        dynrange: Some(spec.dynrange),
        erc_value: None,
    };
    Ok(inst)
}
