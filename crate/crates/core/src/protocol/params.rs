use serde::{Deserialize, Serialize};

use super::{Mechanism, TrustModel};
use crate::error::{Error, Result};

/// Default absolute constant in the local-model accuracy radius.
pub const DEFAULT_LOCAL_C: f64 = 2.0;

/// How the per-batch messages are combined before the analyzer.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Aggregation {
    /// Exact modular sum.
    #[default]
    Perfect,
    /// Shuffle-style aggregation that is correct except with probability q̂
    /// and leaks ε̂ beyond the sum. The privacy budget is split ε̂ = ε/4,
    /// ε′ = ε/2 and the noise is calibrated to ε′.
    Relaxed,
}

impl std::str::FromStr for Aggregation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "perfect" => Ok(Aggregation::Perfect),
            "relaxed" => Ok(Aggregation::Relaxed),
            _ => Err(Error::invalid(format!("unknown aggregation {s:?}"))),
        }
    }
}

/// Leakage and failure probability of a relaxed aggregator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RelaxedAggregation {
    pub eps_hat: f64,
    pub q_hat: f64,
}

/// All per-batch protocol constants.
///
/// `epsilon` is the budget the integer noise is calibrated to. Under relaxed
/// aggregation this is ε′ = ε/2 and the leakage terms sit in `eps_hat` and
/// `q_hat`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolParams {
    pub trust: TrustModel,
    pub mechanism: Mechanism,
    pub epsilon: f64,
    pub s: f64,
    pub n: u64,
    pub g: u64,
    pub tau: u64,
    pub m: u64,
    pub p: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_hat: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q_hat: Option<f64>,
}

impl ProtocolParams {
    /// Builds params with an explicit precision and accuracy radius; the
    /// modulus is always n·g + 2τ + 1.
    pub fn with_precision(
        trust: TrustModel,
        mechanism: Mechanism,
        epsilon: f64,
        n: u64,
        g: u64,
        tau: u64,
        p: f64,
    ) -> Result<Self> {
        let params = ProtocolParams {
            trust,
            mechanism,
            epsilon,
            s: 1.0,
            n,
            g,
            tau,
            m: modulus(n, g, tau)?,
            p,
            eps_hat: None,
            q_hat: None,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn relaxed(&self) -> Option<RelaxedAggregation> {
        match (self.eps_hat, self.q_hat) {
            (Some(eps_hat), Some(q_hat)) => Some(RelaxedAggregation { eps_hat, q_hat }),
            _ => None,
        }
    }

    /// Largest encoded value that is not treated as an underflow.
    pub fn upper_threshold(&self) -> u64 {
        self.n * self.g + self.tau
    }

    pub fn validate(&self) -> Result<()> {
        check_combination(self.trust, self.mechanism)?;
        let eps_ok = if self.mechanism == Mechanism::NonPrivate {
            self.epsilon > 0.0
        } else {
            self.epsilon.is_finite() && self.epsilon > 0.0
        };
        if !eps_ok {
            return Err(Error::invalid(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        if !(self.s >= 1.0) || !self.s.is_finite() {
            return Err(Error::invalid(format!("scaling factor must be >= 1, got {}", self.s)));
        }
        if !(self.p > 0.0) {
            return Err(Error::invalid(format!("p must be positive, got {}", self.p)));
        }
        if self.n == 0 || self.g == 0 || self.tau == 0 {
            return Err(Error::invalid("n, g and tau must all be at least 1"));
        }
        if self.m != modulus(self.n, self.g, self.tau)? {
            return Err(Error::invalid(format!(
                "modulus {} differs from n*g + 2*tau + 1 = {}",
                self.m,
                self.n * self.g + 2 * self.tau + 1
            )));
        }
        match (self.eps_hat, self.q_hat) {
            (None, None) => {}
            (Some(eps_hat), Some(q_hat)) => {
                if !(eps_hat >= 0.0) || !(0.0..1.0).contains(&q_hat) {
                    return Err(Error::invalid(format!(
                        "relaxed aggregation needs eps_hat >= 0 and q_hat in [0, 1), got ({eps_hat}, {q_hat})"
                    )));
                }
                if self.trust != TrustModel::Distributed {
                    return Err(Error::UnsupportedCombination(
                        "relaxed aggregation is only defined for the distributed model".into(),
                    ));
                }
            }
            _ => return Err(Error::invalid("eps_hat and q_hat must be given together")),
        }
        Ok(())
    }
}

fn modulus(n: u64, g: u64, tau: u64) -> Result<u64> {
    n.checked_mul(g)
        .and_then(|ng| tau.checked_mul(2).and_then(|t| ng.checked_add(t)))
        .and_then(|x| x.checked_add(1))
        .ok_or_else(|| Error::invalid("modulus overflows u64"))
}

pub(crate) fn check_combination(trust: TrustModel, mechanism: Mechanism) -> Result<()> {
    use Mechanism::*;
    use TrustModel::*;
    let ok = match mechanism {
        NonPrivate | DiscreteLaplacePolya => true,
        Skellam | DiscreteGaussian => trust == Distributed,
        ContinuousLaplaceCentral => false,
    };
    if ok {
        Ok(())
    } else if mechanism == ContinuousLaplaceCentral {
        Err(Error::UnsupportedCombination("continuous Laplace noise bypasses the integer protocol".into()))
    } else {
        Err(Error::UnsupportedCombination(format!("{mechanism} under the {trust} model")))
    }
}

/// Ceiling that ignores float noise a few ulps above an integer, clamped to 1.
pub(crate) fn ceil_at_least_one(x: f64) -> u64 {
    let c = (x - 1e-9 * x.abs().max(1.0)).ceil();
    if c < 1.0 {
        1
    } else {
        c as u64
    }
}

/// Recipe from which per-batch [`ProtocolParams`] are derived.
#[derive(Clone, Debug, PartialEq)]
pub struct ProtocolSpec {
    pub trust: TrustModel,
    pub mechanism: Mechanism,
    pub epsilon: f64,
    pub s: f64,
    pub p: f64,
    pub aggregation: Aggregation,
    pub local_c: f64,
}

impl ProtocolSpec {
    pub fn new(trust: TrustModel, mechanism: Mechanism, epsilon: f64, s: f64, p: f64) -> Self {
        ProtocolSpec { trust, mechanism, epsilon, s, p, aggregation: Aggregation::Perfect, local_c: DEFAULT_LOCAL_C }
    }

    pub fn with_aggregation(mut self, aggregation: Aggregation) -> Self {
        self.aggregation = aggregation;
        self
    }

    pub fn with_local_c(mut self, c: f64) -> Self {
        self.local_c = c;
        self
    }

    fn validate(&self, n: u64) -> Result<()> {
        check_combination(self.trust, self.mechanism)?;
        if !(self.epsilon > 0.0) || (self.mechanism != Mechanism::NonPrivate && !self.epsilon.is_finite()) {
            return Err(Error::invalid(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        if n == 0 {
            return Err(Error::invalid("batch size must be at least 1"));
        }
        if !(self.p > 0.0) {
            return Err(Error::invalid(format!("p must be positive, got {}", self.p)));
        }
        if matches!(self.mechanism, Mechanism::Skellam | Mechanism::DiscreteGaussian)
            && !(self.s >= 1.0 && self.s.is_finite())
        {
            return Err(Error::invalid(format!("scaling factor must be >= 1, got {}", self.s)));
        }
        if !(self.local_c > 0.0 && self.local_c.is_finite()) {
            return Err(Error::invalid(format!("local constant must be positive, got {}", self.local_c)));
        }
        if self.aggregation == Aggregation::Relaxed
            && !(self.trust == TrustModel::Distributed && self.mechanism == Mechanism::DiscreteLaplacePolya)
        {
            return Err(Error::UnsupportedCombination(
                "relaxed aggregation is only defined for distributed discrete Laplace noise".into(),
            ));
        }
        Ok(())
    }

    /// Noise budget after the relaxed-aggregation split.
    fn noise_epsilon(&self) -> f64 {
        match self.aggregation {
            Aggregation::Perfect => self.epsilon,
            Aggregation::Relaxed => self.epsilon / 2.0,
        }
    }

    fn precision(&self, n: u64) -> u64 {
        let root_n = (n as f64).sqrt();
        let eps = self.noise_epsilon();
        match self.mechanism {
            Mechanism::Skellam | Mechanism::DiscreteGaussian => ceil_at_least_one(self.s * eps * root_n),
            Mechanism::NonPrivate if !eps.is_finite() => ceil_at_least_one(root_n),
            _ => ceil_at_least_one(eps * root_n),
        }
    }

    fn accuracy(&self, n: u64, g: u64) -> u64 {
        let eps = self.noise_epsilon();
        let g = g as f64;
        // negative logs (p > 2) are clamped so every radius degenerates to 1
        let log_term = (2.0 / self.p).ln().max(0.0);
        if self.mechanism == Mechanism::NonPrivate {
            return 1;
        }
        match self.trust {
            TrustModel::Local => ceil_at_least_one(self.local_c * g / eps * (2.0 * n as f64 * log_term).sqrt()),
            _ => match self.mechanism {
                Mechanism::Skellam => {
                    ceil_at_least_one(2.0 * g / eps * log_term.sqrt() + std::f64::consts::SQRT_2 * log_term)
                }
                Mechanism::DiscreteGaussian => ceil_at_least_one(g / eps * (2.0 * log_term).sqrt()),
                _ => ceil_at_least_one(g / eps * log_term),
            },
        }
    }

    /// Parameters for a batch of `n` users.
    pub fn derive(&self, n: u64) -> Result<ProtocolParams> {
        self.validate(n)?;
        let g = self.precision(n);
        self.derive_with_precision(n, g)
    }

    /// Parameters for a batch of `n` users with a caller-chosen precision.
    pub fn derive_with_precision(&self, n: u64, g: u64) -> Result<ProtocolParams> {
        self.validate(n)?;
        if g == 0 {
            return Err(Error::invalid("precision must be at least 1"));
        }
        let tau = self.accuracy(n, g);
        let (eps_hat, q_hat) = match self.aggregation {
            Aggregation::Perfect => (None, None),
            Aggregation::Relaxed => (Some(self.epsilon / 4.0), Some(self.p.min(1.0 - f64::EPSILON))),
        };
        let params = ProtocolParams {
            trust: self.trust,
            mechanism: self.mechanism,
            epsilon: self.noise_epsilon(),
            s: if self.s.is_finite() && self.s >= 1.0 { self.s } else { 1.0 },
            n,
            g,
            tau,
            m: modulus(n, g, tau)?,
            p: self.p,
            eps_hat,
            q_hat,
        };
        params.validate()?;
        Ok(params)
    }
}

/// Mechanism-specific (g, τ, m) for a batch of `n` users under perfect aggregation.
pub fn derive_protocol_params(
    trust: TrustModel,
    mechanism: Mechanism,
    epsilon: f64,
    s: f64,
    n: u64,
    p: f64,
) -> Result<ProtocolParams> {
    ProtocolSpec::new(trust, mechanism, epsilon, s, p).derive(n)
}

/// Same as [`derive_protocol_params`] with the relaxed-aggregation budget split.
pub fn derive_relaxed_protocol_params(epsilon: f64, n: u64, p: f64) -> Result<ProtocolParams> {
    ProtocolSpec::new(TrustModel::Distributed, Mechanism::DiscreteLaplacePolya, epsilon, 1.0, p)
        .with_aggregation(Aggregation::Relaxed)
        .derive(n)
}
