//! Basis pursuit instances: the container type, synthetic generation,
//! recovery-condition checks, file formats and a small exact oracle.

mod erc;
mod generate;
mod mps;
pub mod mtx;
mod oracle;
mod store;

pub use erc::{check_erc, ErcReport};
pub use generate::{generate, Ensemble, GenSpec};
pub use mps::{export_lp, read_mps, write_mps, LinearProgram};
pub use oracle::{lp_oracle, OracleSolution, ORACLE_MAX_COLS};
pub use store::{read_instance, write_instance, InstanceMeta};

use std::path::PathBuf;

use thiserror::Error;

use crate::kernels::{norm2, KernelError, Matrix};

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {msg}")]
    Format {
        path: PathBuf,
        line: usize,
        msg: String,
    },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error("{path}: invalid metadata: {source}")]
    Meta {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),
    #[error("support columns are rank deficient")]
    RankDeficientSupport,
    #[error("instance has no planted solution")]
    NoPlantedSolution,
    #[error("linear system is inconsistent: no feasible point")]
    Infeasible,
    #[error("instance too large for enumeration oracle ({cols} columns, limit {limit})")]
    TooLarge { cols: usize, limit: usize },
}

impl InstanceError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        InstanceError::Io {
            path: path.into(),
            source,
        }
    }
}

/// `min ‖x‖₁ s.t. Ax = b`, optionally with a known planted solution.
#[derive(Debug, Clone, PartialEq)]
pub struct BpInstance {
    pub matrix: Matrix,
    pub rhs: Vec<f64>,
    pub planted: Option<Vec<f64>>,
    pub meta: InstanceMeta,
}

impl BpInstance {
    pub fn new(matrix: Matrix, rhs: Vec<f64>) -> Result<Self, InstanceError> {
        if rhs.len() != matrix.rows() {
            return Err(InstanceError::Dimension(format!(
                "b has length {} but A has {} rows",
                rhs.len(),
                matrix.rows()
            )));
        }
        if rhs.iter().any(|v| !v.is_finite()) {
            return Err(KernelError::NonFinite("right-hand side").into());
        }
        Ok(BpInstance {
            matrix,
            rhs,
            planted: None,
            meta: InstanceMeta::default(),
        })
    }

    /// Attaches a planted solution; it must satisfy `‖Ax* − b‖₂ ≤ 1e-10·(1 + ‖b‖₂)`.
    pub fn with_planted(mut self, planted: Vec<f64>) -> Result<Self, InstanceError> {
        if planted.len() != self.cols() {
            return Err(InstanceError::Dimension(format!(
                "planted solution has length {} but A has {} columns",
                planted.len(),
                self.cols()
            )));
        }
        let ax = self.matrix.matvec(&planted)?;
        let resid = ax
            .iter()
            .zip(&self.rhs)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        if resid > 1e-10 * (1.0 + norm2(&self.rhs)) {
            return Err(InstanceError::Dimension(format!(
                "planted solution violates Ax = b (residual {resid:e})"
            )));
        }
        self.planted = Some(planted);
        Ok(self)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.meta.label = label.into();
        self
    }

    pub fn rows(&self) -> usize {
        self.matrix.rows()
    }

    pub fn cols(&self) -> usize {
        self.matrix.cols()
    }

    pub fn rhs_is_zero(&self) -> bool {
        self.rhs.iter().all(|&v| v == 0.0)
    }

    /// Indices of the nonzero entries of the planted solution.
    pub fn planted_support(&self) -> Option<Vec<usize>> {
        self.planted.as_ref().map(|x| {
            x.iter()
                .enumerate()
                .filter(|(_, v)| **v != 0.0)
                .map(|(i, _)| i)
                .collect()
        })
    }

    /// `‖Ax − b‖₂`.
    pub fn residual(&self, x: &[f64]) -> Result<f64, KernelError> {
        let ax = self.matrix.matvec(x)?;
        Ok(ax
            .iter()
            .zip(&self.rhs)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt())
    }
}
