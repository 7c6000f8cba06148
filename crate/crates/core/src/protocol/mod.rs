//! The privacy protocol: per-user randomizers, simulated secure aggregation
//! and the analyzers that decode a private batch sum, plus an exact
//! likelihood-ratio auditor for tiny instances.
//!
//! A batch flows through [`Randomizer::randomize`] for every user, then
//! [`secagg`] (or [`relaxed_secagg`] / [`shuffle`]), then [`analyze`] or
//! [`analyze_central`]. [`run_batch`] wires the three stages together.

mod aggregate;
mod analyzer;
mod audit;
mod params;
mod randomizer;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

pub use aggregate::{relaxed_secagg, secagg, shuffle, AggregatePayload, AggregateView};
pub use analyzer::{analyze, analyze_central, decode, end_to_end_batch_sum, run_batch, BatchOutcome};
pub use audit::{audit_llr, audit_pair, AuditReport, AUTO_TRUNCATION};
pub use params::{
    derive_protocol_params, derive_relaxed_protocol_params, Aggregation, ProtocolParams, ProtocolSpec,
    RelaxedAggregation, DEFAULT_LOCAL_C,
};
pub use randomizer::{encode_reward, randomize, Randomizer};

/// Who is trusted with raw rewards.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrustModel {
    Central,
    Local,
    Distributed,
}

/// Noise family used by the protocol.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mechanism {
    /// Pure DP through discrete Laplace noise, split into Pólya shares when
    /// distributed.
    DiscreteLaplacePolya,
    /// RDP through Skellam noise.
    Skellam,
    /// CDP through discrete Gaussian noise.
    DiscreteGaussian,
    /// Continuous Laplace on raw sums; central baseline only.
    ContinuousLaplaceCentral,
    /// No noise at all. Used as a reference and in tests.
    NonPrivate,
}

impl Mechanism {
    pub const ALL: [Mechanism; 5] = [
        Mechanism::DiscreteLaplacePolya,
        Mechanism::Skellam,
        Mechanism::DiscreteGaussian,
        Mechanism::ContinuousLaplaceCentral,
        Mechanism::NonPrivate,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Mechanism::DiscreteLaplacePolya => "discrete-laplace-polya",
            Mechanism::Skellam => "skellam",
            Mechanism::DiscreteGaussian => "discrete-gaussian",
            Mechanism::ContinuousLaplaceCentral => "continuous-laplace-central",
            Mechanism::NonPrivate => "non-private",
        }
    }
}

impl TrustModel {
    pub const ALL: [TrustModel; 3] = [TrustModel::Central, TrustModel::Local, TrustModel::Distributed];

    pub fn name(self) -> &'static str {
        match self {
            TrustModel::Central => "central",
            TrustModel::Local => "local",
            TrustModel::Distributed => "distributed",
        }
    }
}

impl fmt::Display for Mechanism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl fmt::Display for TrustModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mechanism {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Mechanism::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown mechanism {s:?}")))
    }
}

impl FromStr for TrustModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        TrustModel::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown trust model {s:?}")))
    }
}
