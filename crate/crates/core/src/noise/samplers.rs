//! Exact samplers for the integer noise distributions.
//!
//! Gamma and Poisson variates come from `rand_distr` (Marsaglia–Tsang with the
//! `U^{1/r}` boost for shapes below one, inversion / transformed rejection for
//! Poisson). Everything on top of them is built here.

use rand::Rng;
use rand_distr::{Distribution, Gamma, Poisson};
use serde::{Deserialize, Serialize};

use super::RngStream;
use crate::error::{Error, Result};

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} must be positive and finite, got {v}")))
    }
}

/// Pólya(r, β): negative-binomial law with real shape `r`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolyaParams {
    pub r: f64,
    pub beta: f64,
}

impl PolyaParams {
    pub fn new(r: f64, beta: f64) -> Result<Self> {
        let p = Self { r, beta };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        check_positive("polya shape r", self.r)?;
        if !(0.0..1.0).contains(&self.beta) {
            return Err(Error::invalid(format!("polya beta must lie in [0, 1), got {}", self.beta)));
        }
        Ok(())
    }

    pub fn mean(&self) -> f64 {
        self.r * self.beta / (1.0 - self.beta)
    }
}

/// Discrete Laplace with scale `b`: pmf ∝ e^{-|x|/b} on the integers.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscreteLaplaceParams {
    pub b: f64,
}

impl DiscreteLaplaceParams {
    pub fn new(b: f64) -> Result<Self> {
        check_positive("discrete laplace scale", b)?;
        Ok(Self { b })
    }
}

/// Zero-mean Skellam with variance `sigma2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SkellamParams {
    pub sigma2: f64,
}

impl SkellamParams {
    pub fn new(sigma2: f64) -> Result<Self> {
        check_positive("skellam variance", sigma2)?;
        Ok(Self { sigma2 })
    }
}

/// Zero-centred discrete Gaussian with scale parameter `sigma2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscreteGaussianParams {
    pub sigma2: f64,
}

impl DiscreteGaussianParams {
    pub fn new(sigma2: f64) -> Result<Self> {
        check_positive("discrete gaussian sigma2", sigma2)?;
        Ok(Self { sigma2 })
    }
}

/// Pólya sampler drawing λ ~ Gamma(r, β/(1-β)) and then Poisson(λ).
#[derive(Clone, Debug)]
pub struct Polya {
    mixing: Option<Gamma<f64>>,
}

impl Polya {
    pub fn new(params: PolyaParams) -> Result<Self> {
        params.validate()?;
        if params.beta == 0.0 {
            return Ok(Self { mixing: None });
        }
        let scale = params.beta / (1.0 - params.beta);
        let gamma = Gamma::new(params.r, scale).map_err(|e| Error::invalid(e.to_string()))?;
        Ok(Self { mixing: Some(gamma) })
    }

    pub fn sample(&self, rng: &mut RngStream) -> u64 {
        let Some(gamma) = &self.mixing else { return 0 };
        let lambda = gamma.sample(rng);
        poisson(lambda, rng)
    }
}

/// One Poisson(λ) draw; λ = 0 (reachable by Gamma underflow) yields 0.
fn poisson(lambda: f64, rng: &mut RngStream) -> u64 {
    if lambda <= 0.0 {
        return 0;
    }
    match Poisson::new(lambda) {
        Ok(d) => {
            let x: f64 = d.sample(rng);
            x as u64
        }
        // λ beyond Poisson::MAX_LAMBDA only arises for scales far outside any
        // protocol configuration; the normal limit is exact to f64 there.
        Err(_) => {
            let z: f64 = rng.sample(rand_distr::StandardNormal);
            (lambda + lambda.sqrt() * z).round().max(0.0) as u64
        }
    }
}

/// Lap_Z(b) as the difference of two Pólya(1, e^{-1/b}) draws.
#[derive(Clone, Debug)]
pub struct DiscreteLaplace {
    half: Polya,
}

impl DiscreteLaplace {
    pub fn new(params: DiscreteLaplaceParams) -> Result<Self> {
        check_positive("discrete laplace scale", params.b)?;
        let half = Polya::new(PolyaParams::new(1.0, (-1.0 / params.b).exp())?)?;
        Ok(Self { half })
    }

    pub fn sample(&self, rng: &mut RngStream) -> i64 {
        let plus = self.half.sample(rng) as i64;
        let minus = self.half.sample(rng) as i64;
        plus - minus
    }
}

/// Sk(0, σ²) as the difference of two Poisson(σ²/2) draws.
#[derive(Clone, Debug)]
pub struct Skellam {
    half: Poisson<f64>,
}

impl Skellam {
    pub fn new(params: SkellamParams) -> Result<Self> {
        check_positive("skellam variance", params.sigma2)?;
        let half = Poisson::new(params.sigma2 / 2.0).map_err(|e| Error::invalid(e.to_string()))?;
        Ok(Self { half })
    }

    pub fn sample(&self, rng: &mut RngStream) -> i64 {
        let a: f64 = self.half.sample(rng);
        let b: f64 = self.half.sample(rng);
        a as i64 - b as i64
    }
}

/// N_Z(0, σ²) by rejection from a discrete Laplace proposal with integer
/// scale t = ⌊σ⌋ + 1. A proposal y is kept with probability
/// exp(-(|y| - σ²/t)² / (2σ²)), realised by [`bernoulli_exp`] so no
/// exponential is ever rounded and the support is never truncated.
#[derive(Clone, Debug)]
pub struct DiscreteGaussian {
    sigma2: f64,
    shift: f64,
    proposal: DiscreteLaplace,
}

impl DiscreteGaussian {
    pub fn new(params: DiscreteGaussianParams) -> Result<Self> {
        check_positive("discrete gaussian sigma2", params.sigma2)?;
        let t = params.sigma2.sqrt().floor() + 1.0;
        Ok(Self {
            sigma2: params.sigma2,
            shift: params.sigma2 / t,
            proposal: DiscreteLaplace::new(DiscreteLaplaceParams::new(t)?)?,
        })
    }

    pub fn sample(&self, rng: &mut RngStream) -> i64 {
        loop {
            let y = self.proposal.sample(rng);
            let d = (y.unsigned_abs() as f64) - self.shift;
            if bernoulli_exp(d * d / (2.0 * self.sigma2), rng) {
                return y;
            }
        }
    }
}

/// Bernoulli(e^{-γ}) for γ ≥ 0 using only Bernoulli(γ/k) coins.
pub fn bernoulli_exp(gamma: f64, rng: &mut RngStream) -> bool {
    debug_assert!(gamma >= 0.0);
    let mut gamma = gamma;
    while gamma > 1.0 {
        if !bernoulli_exp_unit(1.0, rng) {
            return false;
        }
        gamma -= 1.0;
    }
    bernoulli_exp_unit(gamma, rng)
}

// γ ∈ [0, 1]: count k until the first failure of Bernoulli(γ/k); accept iff k is odd.
fn bernoulli_exp_unit(gamma: f64, rng: &mut RngStream) -> bool {
    let mut k = 1u64;
    loop {
        let u: f64 = rng.random();
        if u < gamma / k as f64 {
            k += 1;
        } else {
            return k % 2 == 1;
        }
    }
}

pub fn sample_polya(p: &PolyaParams, rng: &mut RngStream) -> Result<u64> {
    Ok(Polya::new(*p)?.sample(rng))
}

pub fn sample_discrete_laplace(p: &DiscreteLaplaceParams, rng: &mut RngStream) -> Result<i64> {
    Ok(DiscreteLaplace::new(*p)?.sample(rng))
}

pub fn sample_skellam(p: &SkellamParams, rng: &mut RngStream) -> Result<i64> {
    Ok(Skellam::new(*p)?.sample(rng))
}

pub fn sample_discrete_gaussian(p: &DiscreteGaussianParams, rng: &mut RngStream) -> Result<i64> {
    Ok(DiscreteGaussian::new(*p)?.sample(rng))
}
