use rand::Rng;

use super::InstanceKind;
use crate::bandit::{BanditInstance, RewardKind, DEFAULT_REWARD_STD};
use crate::error::{Error, Result};
use crate::noise::RngStream;

/// Interval of arm means for easy instances (large gaps).
pub const EASY_RANGE: (f64, f64) = (0.25, 0.75);
/// Interval of arm means for hard instances (small gaps).
pub const HARD_RANGE: (f64, f64) = (0.45, 0.55);

/// Instance with clipped Gaussian rewards of the default std.
pub fn generate_instance(kind: &InstanceKind, arms: usize, rng: &mut RngStream) -> Result<BanditInstance> {
    generate_instance_with(kind, arms, RewardKind::TruncatedGaussian { std: DEFAULT_REWARD_STD }, rng)
}

/// Draws K i.i.d. uniform means from the kind's interval. Explicit means are
/// used as given and consume no randomness.
pub fn generate_instance_with(
    kind: &InstanceKind,
    arms: usize,
    reward: RewardKind,
    rng: &mut RngStream,
) -> Result<BanditInstance> {
    if arms < 2 {
        return Err(Error::invalid(format!("need at least 2 arms, got {arms}")));
    }
    let (lo, hi) = match kind {
        InstanceKind::Easy => EASY_RANGE,
        InstanceKind::Hard => HARD_RANGE,
        InstanceKind::Explicit(means) => {
            if means.len() != arms {
                return Err(Error::invalid(format!("{} means given for {arms} arms", means.len())));
            }
            return BanditInstance::new(means.clone(), reward);
        }
    };
    let means = (0..arms).map(|_| rng.random_range(lo..=hi)).collect();
    BanditInstance::new(means, reward)
}
