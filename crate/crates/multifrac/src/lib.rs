//! Exact simulation and numerical verification toolkit for a family of
//! centred Gaussian processes: fractional Brownian motion, bifractional
//! Brownian motion, the standard multifractional Brownian motion, its
//! bifractional extension with a time-varying Hurst function, and the
//! auxiliary subordinator-driven process used in their decomposition in law.
//!
//! The library evaluates every covariance kernel in closed form, simulates
//! exact Gaussian sample paths by covariance factorization, and verifies the
//! family's quantitative properties numerically at desk scale:
//! positive-definiteness, the quasi-helix increment sandwich, Hölder bounds,
//! local asymptotic self-similarity and long-range-dependence exponents.

// `!(v > 0.0)`-style guards are deliberate: they reject NaN along with the
// out-of-domain values, which `v <= 0.0` would silently admit.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cli;
pub mod error;
pub mod estimate;
pub mod fit;
pub mod hurst;
pub mod kernels;
pub mod quad;
pub mod report;
pub mod rng;
pub mod simulate;
pub mod special;

pub use error::{Error, Result};
pub use hurst::HurstFunction;
pub use kernels::ProcessSpec;
pub use report::VerificationReport;
pub use simulate::{PathEnsemble, TimeGrid};
