use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::bandit::{noise_scale_for, RewardKind, DEFAULT_REWARD_STD};
use crate::error::{Error, Result};
use crate::protocol::{Aggregation, Mechanism, ProtocolSpec, TrustModel, DEFAULT_LOCAL_C};

pub const DEFAULT_HORIZON: u64 = 200_000;
pub const DEFAULT_P: f64 = 0.1;
pub const DEFAULT_NUM_INSTANCES: usize = 20;
pub const DEFAULT_CHECKPOINTS: usize = 30;
/// Scaling factor used by Skellam and discrete Gaussian when none is given.
pub const DEFAULT_SCALE: f64 = 10.0;

/// How arm means are chosen.
#[derive(Clone, Debug, PartialEq)]
pub enum InstanceKind {
    /// Uniform on [0.25, 0.75].
    Easy,
    /// Uniform on [0.45, 0.55].
    Hard,
    Explicit(Vec<f64>),
}

/// One algorithm at one privacy level.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgorithmSpec {
    pub label: String,
    pub protocol: ProtocolSpec,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub arms: usize,
    pub horizon: u64,
    pub instance_kind: InstanceKind,
    pub reward: RewardKind,
    pub p: f64,
    pub num_instances: usize,
    pub seed: u64,
    pub checkpoints: Vec<u64>,
    pub output: Option<PathBuf>,
    pub algorithms: Vec<AlgorithmSpec>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    One(f64),
    Many(Vec<f64>),
}

#[derive(Deserialize, Clone, Copy, PartialEq)]
#[serde(rename_all = "lowercase")]
enum InstanceName {
    Easy,
    Hard,
    Explicit,
}

#[derive(Deserialize, Clone, Copy, PartialEq)]
#[serde(rename_all = "lowercase")]
enum RewardName {
    Gaussian,
    Bernoulli,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAlgorithm {
    label: String,
    trust: TrustModel,
    mechanism: Mechanism,
    epsilon: OneOrMany,
    s: Option<f64>,
    aggregation: Option<Aggregation>,
    local_c: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(rename = "K")]
    arms: Option<usize>,
    #[serde(rename = "T")]
    horizon: Option<u64>,
    instance: Option<InstanceName>,
    means: Option<Vec<f64>>,
    reward: Option<RewardName>,
    reward_std: Option<f64>,
    p: Option<f64>,
    num_instances: Option<usize>,
    seed: Option<u64>,
    checkpoints: Option<Vec<u64>>,
    output: Option<PathBuf>,
    #[serde(rename = "algorithm", default)]
    algorithms: Vec<RawAlgorithm>,
}

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

/// `count` roughly geometric pull counts from 1 to `horizon`, strictly
/// increasing; fewer when `horizon < count`.
pub fn geometric_checkpoints(horizon: u64, count: usize) -> Vec<u64> {
    if horizon == 0 || count == 0 {
        return Vec::new();
    }
    if count == 1 {
        return vec![horizon];
    }
    let top = (horizon as f64).ln();
    let mut points: Vec<u64> = Vec::with_capacity(count);
    for i in 0..count {
        let geo = (top * i as f64 / (count - 1) as f64).exp().round() as u64;
        let prev = points.last().copied().unwrap_or(0);
        // reserve room so the remaining points still fit below the horizon
        let room = horizon.saturating_sub((count - 1 - i) as u64);
        let v = geo.max(prev + 1).min(room.max(prev + 1)).min(horizon);
        if v > prev {
            points.push(v);
        }
    }
    *points.last_mut().expect("nonempty") = horizon;
    points
}

fn check_label(label: &str) -> Result<()> {
    if label.is_empty() || label.contains([',', '"', '\n', '\r']) {
        return Err(config_err(format!("label {label:?} must be nonempty without commas, quotes or newlines")));
    }
    Ok(())
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| config_err(e.to_string()))?;
        Self::from_raw(raw)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    fn from_raw(raw: RawConfig) -> Result<Self> {
        let instance_kind = match (raw.instance, raw.means) {
            (Some(InstanceName::Explicit) | None, Some(means)) => InstanceKind::Explicit(means),
            (Some(InstanceName::Explicit), None) => return Err(config_err("explicit instances need `means`")),
            (Some(_), Some(_)) => return Err(config_err("`means` is only allowed with instance = \"explicit\"")),
            (Some(InstanceName::Hard), None) => InstanceKind::Hard,
            (Some(InstanceName::Easy) | None, None) => InstanceKind::Easy,
        };
        let arms = match (&instance_kind, raw.arms) {
            (InstanceKind::Explicit(means), Some(k)) if k != means.len() => {
                return Err(config_err(format!("K = {k} but {} means given", means.len())))
            }
            (InstanceKind::Explicit(means), _) => means.len(),
            (_, Some(k)) => k,
            (_, None) => return Err(config_err("missing `K`")),
        };
        let reward = match (raw.reward.unwrap_or(RewardName::Gaussian), raw.reward_std) {
            (RewardName::Gaussian, std) => RewardKind::TruncatedGaussian { std: std.unwrap_or(DEFAULT_REWARD_STD) },
            (RewardName::Bernoulli, None) => RewardKind::BernoulliExact,
            (RewardName::Bernoulli, Some(_)) => {
                return Err(config_err("`reward_std` applies to gaussian rewards only"))
            }
        };
        let horizon = raw.horizon.unwrap_or(DEFAULT_HORIZON);
        let p = raw.p.unwrap_or(DEFAULT_P);
        let mut algorithms = Vec::new();
        for a in raw.algorithms {
            check_label(&a.label)?;
            let epsilons = match a.epsilon {
                OneOrMany::One(e) => vec![e],
                OneOrMany::Many(v) => v,
            };
            if epsilons.is_empty() {
                return Err(config_err(format!("algorithm {:?} lists no epsilon", a.label)));
            }
            let s = a.s.unwrap_or(match a.mechanism {
                Mechanism::Skellam | Mechanism::DiscreteGaussian => DEFAULT_SCALE,
                _ => 1.0,
            });
            for epsilon in epsilons {
                let protocol = ProtocolSpec::new(a.trust, a.mechanism, epsilon, s, p)
                    .with_aggregation(a.aggregation.unwrap_or_default())
                    .with_local_c(a.local_c.unwrap_or(DEFAULT_LOCAL_C));
                algorithms.push(AlgorithmSpec { label: a.label.clone(), protocol });
            }
        }
        let config = ExperimentConfig {
            arms,
            horizon,
            instance_kind,
            reward,
            p,
            num_instances: raw.num_instances.unwrap_or(DEFAULT_NUM_INSTANCES),
            seed: raw.seed.unwrap_or(0),
            checkpoints: raw.checkpoints.unwrap_or_else(|| geometric_checkpoints(horizon, DEFAULT_CHECKPOINTS)),
            output: raw.output,
            algorithms,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.arms < 2 {
            return Err(config_err(format!("K must be at least 2, got {}", self.arms)));
        }
        if self.horizon < 2 * self.arms as u64 {
            return Err(config_err(format!("T = {} is below 2K = {}", self.horizon, 2 * self.arms)));
        }
        if !(self.p > 0.0 && self.p <= 1.0) {
            return Err(config_err(format!("p must lie in (0, 1], got {}", self.p)));
        }
        if self.num_instances == 0 {
            return Err(config_err("num_instances must be at least 1"));
        }
        if self.checkpoints.is_empty() {
            return Err(config_err("checkpoints must not be empty"));
        }
        if self.checkpoints[0] == 0 || self.checkpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(config_err("checkpoints must be positive and strictly ascending"));
        }
        if *self.checkpoints.last().expect("nonempty") > self.horizon {
            return Err(config_err("last checkpoint exceeds T"));
        }
        if let InstanceKind::Explicit(means) = &self.instance_kind {
            if means.len() != self.arms || means.iter().any(|m| !(0.0..=1.0).contains(m)) {
                return Err(config_err("explicit means must be K values in [0, 1]"));
            }
        }
        if let RewardKind::TruncatedGaussian { std } = self.reward {
            if !(std > 0.0 && std.is_finite()) {
                return Err(config_err(format!("reward_std must be positive, got {std}")));
            }
        }
        if self.algorithms.is_empty() {
            return Err(config_err("at least one [[algorithm]] block is required"));
        }
        let mut seen = HashSet::new();
        for a in &self.algorithms {
            check_label(&a.label)?;
            if !seen.insert((a.label.clone(), a.protocol.epsilon.to_bits())) {
                return Err(config_err(format!(
                    "algorithm {:?} appears twice at epsilon {}",
                    a.label, a.protocol.epsilon
                )));
            }
            // surfaces unsupported combinations and bad numbers before any run starts
            let checked = noise_scale_for(&a.protocol, 2).and_then(|_| match a.protocol.mechanism {
                Mechanism::ContinuousLaplaceCentral => Ok(()),
                _ => a.protocol.derive(2).map(|_| ()),
            });
            checked.map_err(|e| config_err(format!("algorithm {:?}: {e}", a.label)))?;
        }
        Ok(())
    }
}
