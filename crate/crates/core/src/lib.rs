//! Basis pursuit, `min ‖x‖₁ s.t. Ax = b`, solved by alternating projections
//! between growing ℓ1-balls and the affine solution set.
//!
//! The crate is layered bottom-up:
//!
//! * [`kernels`]: dense and sparse matrices, Gram-system solvers, thin QR.
//! * [`projections`]: projections onto `{x : Ax = b}` and onto ℓ1-balls.
//! * [`map`]: the alternating-projection engine with its stopping rules.
//! * [`solvers`]: the growing-ball method, its bracketing variant, the
//!   heuristic optimality check and a subgradient baseline.
//! * [`instances`]: instance I/O, synthetic generation and small exact oracles.
//! * [`bench`]: batch runs and performance profiles.
//!
//! ```
//! use l1pursuit::instances::{generate, GenSpec};
//! use l1pursuit::solvers::{bpmap_solve, SolverOptions};
//!
//! let inst = generate(&GenSpec::new(10, 30, 2, 7)).unwrap();
//! let res = bpmap_solve(&inst, &SolverOptions::default()).unwrap();
//! assert!(res.status.is_success());
//! ```

// `!(x > 0.0)` is used on purpose to reject NaN along with nonpositive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod instances;
pub mod kernels;
pub mod map;
pub mod projections;
pub mod solvers;

pub use instances::BpInstance;
pub use kernels::{DenseMatrix, Matrix, SparseMatrixCsc};
pub use solvers::{SolveResult, SolveStatus, SolverKind, SolverOptions};
