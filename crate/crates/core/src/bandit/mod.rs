//! Batched successive elimination and its private variants.
//!
//! Batch b pulls every active arm l(b) = 2^b times, estimates each arm's mean
//! from the private batch sum, and drops arms whose upper confidence bound
//! falls below the best lower bound. The only trust-model-specific pieces are
//! how the batch sum is privatised and the noise constants in the radius.

mod engine;
mod instance;
mod radius;

pub use engine::{
    pseudo_regret, pseudo_regret_from_pulls, run_batched_se, run_dp_se_baseline, sample_laplace, RegretTrace,
};
pub use instance::{clipped_gaussian_mean, BanditInstance, RewardKind, DEFAULT_REWARD_STD};
pub use radius::{confidence_radius, noise_scale_constants, noise_scale_for, NoiseScale};
