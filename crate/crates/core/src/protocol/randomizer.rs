use rand::Rng;

use super::{Mechanism, ProtocolParams, TrustModel};
use crate::error::{Error, Result};
use crate::noise::{
    DiscreteGaussian, DiscreteGaussianParams, DiscreteLaplace, DiscreteLaplaceParams, Polya, PolyaParams, RngStream,
    Skellam, SkellamParams,
};

/// Randomized rounding of `x ∈ [0, 1]` onto {0, …, g}.
pub fn encode_reward(x: f64, g: u64, rng: &mut RngStream) -> Result<u64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::RewardOutOfRange(x));
    }
    if g == 0 {
        return Err(Error::invalid("precision must be at least 1"));
    }
    let scaled = x * g as f64;
    let floor = scaled.floor();
    let frac = scaled - floor;
    let up = frac > 0.0 && rng.random::<f64>() < frac;
    Ok(floor as u64 + u64::from(up))
}

#[derive(Clone, Debug)]
enum UserNoise {
    Zero,
    PolyaShares(Polya),
    Laplace(DiscreteLaplace),
    Skellam(Skellam),
    Gaussian(DiscreteGaussian),
}

/// Per-user encoder with the batch's noise sampler built once.
#[derive(Clone, Debug)]
pub struct Randomizer {
    params: ProtocolParams,
    noise: UserNoise,
}

impl Randomizer {
    pub fn new(params: &ProtocolParams) -> Result<Self> {
        params.validate()?;
        let g = params.g as f64;
        let n = params.n as f64;
        let eps = params.epsilon;
        let noise = match (params.trust, params.mechanism) {
            (_, Mechanism::NonPrivate) | (TrustModel::Central, _) => UserNoise::Zero,
            (TrustModel::Local, Mechanism::DiscreteLaplacePolya) => {
                UserNoise::Laplace(DiscreteLaplace::new(DiscreteLaplaceParams::new(g / eps)?)?)
            }
            (TrustModel::Distributed, Mechanism::DiscreteLaplacePolya) => {
                UserNoise::PolyaShares(Polya::new(PolyaParams::new(1.0 / n, (-eps / g).exp())?)?)
            }
            (TrustModel::Distributed, Mechanism::Skellam) => {
                UserNoise::Skellam(Skellam::new(SkellamParams::new(g * g / (n * eps * eps))?)?)
            }
            (TrustModel::Distributed, Mechanism::DiscreteGaussian) => {
                UserNoise::Gaussian(DiscreteGaussian::new(DiscreteGaussianParams::new(g * g / (n * eps * eps))?)?)
            }
            (trust, mechanism) => {
                return Err(Error::UnsupportedCombination(format!("{mechanism} under the {trust} model")))
            }
        };
        Ok(Randomizer { params: params.clone(), noise })
    }

    pub fn params(&self) -> &ProtocolParams {
        &self.params
    }

    /// One user's integer noise share η.
    pub fn noise(&self, rng: &mut RngStream) -> i64 {
        match &self.noise {
            UserNoise::Zero => 0,
            UserNoise::PolyaShares(polya) => polya.sample(rng) as i64 - polya.sample(rng) as i64,
            UserNoise::Laplace(d) => d.sample(rng),
            UserNoise::Skellam(d) => d.sample(rng),
            UserNoise::Gaussian(d) => d.sample(rng),
        }
    }

    /// Encodes, noises and reduces one reward; returns the message and the
    /// encoded value and noise that produced it.
    pub fn randomize_parts(&self, x: f64, rng: &mut RngStream) -> Result<(u64, u64, i64)> {
        let encoded = encode_reward(x, self.params.g, rng)?;
        let eta = self.noise(rng);
        let m = self.params.m as i128;
        let y = (encoded as i128 + eta as i128).rem_euclid(m) as u64;
        Ok((y, encoded, eta))
    }

    /// y = (x̂ + η) mod m.
    pub fn randomize(&self, x: f64, rng: &mut RngStream) -> Result<u64> {
        self.randomize_parts(x, rng).map(|(y, _, _)| y)
    }
}

/// One-shot form of [`Randomizer::randomize`].
pub fn randomize(x: f64, params: &ProtocolParams, rng: &mut RngStream) -> Result<u64> {
    Randomizer::new(params)?.randomize(x, rng)
}
