//! Low-rank matrix recovery from compressive linear measurements by
//! modified iterative hard thresholding (MIHT).
//!
//! The algorithm replaces the ℓ2 gradient step of classical iterative hard
//! thresholding by a signed-residual step,
//!
//! ```text
//! X_{n+1} = H_s(X_n + μ_n H_t(A* sgn(y − A X_n))),
//! ```
//!
//! which succeeds for measurement maps that only satisfy an ℓ1-based
//! rank-restricted isometry property, such as Gaussian rank-one projections
//! `y_i = a_iᵀ X b_i`.
//!
//! * [`matana`]: dense matrices, SVD, hard thresholding `H_k`
//! * [`measure`]: measurement ensembles and adjoints
//! * [`recover`]: MIHT and the IHT / NIHT baselines
//! * [`rripcheck`]: Monte-Carlo and exact estimates of the ℓ1 RRIP constants
//! * [`bench`]: the experiment harness behind the `miht` binary

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod error;
pub mod matana;
pub mod measure;
pub mod recover;
pub mod rng;
pub mod rripcheck;

pub use error::{Error, Result};
pub use matana::{eta, hard_threshold, sign_vector, svd, DenseMatrix, SvdFactors};
pub use measure::{make_dense_map, make_rank_one_map, Distribution, MeasurementMap};
pub use recover::{iht_classic, miht, niht, BaselineConfig, InnerThreshold, MihtConfig, RecoveryResult, StopReason};
pub use rng::RngSeed;
