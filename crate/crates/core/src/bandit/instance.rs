use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use statrs::distribution::{Continuous, ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::noise::RngStream;

pub const DEFAULT_REWARD_STD: f64 = 0.1;

/// Reward law of every arm.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum RewardKind {
    /// Bernoulli(μ_a).
    BernoulliExact,
    /// N(μ_a, std²) clipped to [0, 1].
    TruncatedGaussian { std: f64 },
}

/// A K-armed environment.
#[derive(Clone, Debug, PartialEq)]
pub struct BanditInstance {
    means: Vec<f64>,
    reward_kind: RewardKind,
    effective: Vec<f64>,
}

/// E[clip(X, 0, 1)] for X ~ N(μ, σ²).
pub fn clipped_gaussian_mean(mu: f64, std: f64) -> f64 {
    let z = Normal::new(0.0, 1.0).expect("unit normal");
    let lo = -mu / std;
    let hi = (1.0 - mu) / std;
    let inside = mu * (z.cdf(hi) - z.cdf(lo)) + std * (z.pdf(lo) - z.pdf(hi));
    (1.0 - z.cdf(hi)) + inside
}

impl BanditInstance {
    pub fn new(means: Vec<f64>, reward_kind: RewardKind) -> Result<Self> {
        if means.len() < 2 {
            return Err(Error::invalid(format!("need at least 2 arms, got {}", means.len())));
        }
        if let Some(&bad) = means.iter().find(|m| !(0.0..=1.0).contains(*m)) {
            return Err(Error::invalid(format!("arm mean {bad} outside [0, 1]")));
        }
        let effective = match reward_kind {
            RewardKind::BernoulliExact => means.clone(),
            RewardKind::TruncatedGaussian { std } => {
                if !(std > 0.0 && std.is_finite()) {
                    return Err(Error::invalid(format!("reward std must be positive, got {std}")));
                }
                means.iter().map(|&mu| clipped_gaussian_mean(mu, std)).collect()
            }
        };
        Ok(BanditInstance { means, reward_kind, effective })
    }

    pub fn num_arms(&self) -> usize {
        self.means.len()
    }

    /// Nominal means μ_a before any clipping.
    pub fn means(&self) -> &[f64] {
        &self.means
    }

    /// Means of the rewards actually played; regret is measured against these.
    pub fn effective_means(&self) -> &[f64] {
        &self.effective
    }

    pub fn reward_kind(&self) -> RewardKind {
        self.reward_kind
    }

    /// First arm with the largest effective mean.
    pub fn best_arm(&self) -> usize {
        let best = self.best_mean();
        self.effective.iter().position(|&m| m == best).unwrap_or(0)
    }

    pub fn best_mean(&self) -> f64 {
        self.effective.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Gaps Δ_a = μ* − μ_a.
    pub fn gaps(&self) -> Vec<f64> {
        let best = self.best_mean();
        self.effective.iter().map(|&m| best - m).collect()
    }

    pub fn sample_reward(&self, arm: usize, rng: &mut RngStream) -> f64 {
        let mu = self.means[arm];
        match self.reward_kind {
            RewardKind::BernoulliExact => {
                if rng.random::<f64>() < mu {
                    1.0
                } else {
                    0.0
                }
            }
            RewardKind::TruncatedGaussian { std } => {
                let z: f64 = rng.sample(StandardNormal);
                (mu + std * z).clamp(0.0, 1.0)
            }
        }
    }
}
