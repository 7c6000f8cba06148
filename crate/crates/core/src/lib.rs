//! Differentially private K-armed bandits with batched successive elimination.
//!
//! The crate is organised bottom-up:
//!
//! - [`noise`]: splittable random streams and exact samplers for the Pólya,
//!   discrete Laplace, Skellam and discrete Gaussian distributions.
//! - [`protocol`]: the randomizer / secure aggregation / analyzer pipeline that
//!   turns a batch of rewards into a private sum, plus an exact LLR auditor.
//! - [`accountant`]: closed-form pure DP, RDP and CDP accounting.
//! - [`bandit`]: the batched successive-elimination engine and its baselines.
//! - [`experiments`]: instance generation, config files, CSV output.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod accountant;
pub mod bandit;
mod error;
pub mod experiments;
pub mod noise;
pub mod protocol;

pub use error::{Error, Result};
