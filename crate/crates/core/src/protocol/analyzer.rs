use super::{relaxed_secagg, secagg, AggregateView, Mechanism, ProtocolParams, Randomizer, TrustModel};
use crate::error::{Error, Result};
use crate::noise::{DiscreteLaplace, DiscreteLaplaceParams, RngStream};

/// Maps a residue y ∈ [0, m) back to a real sum, undoing wrap-around below 0.
pub fn decode(y: u64, params: &ProtocolParams) -> f64 {
    let g = params.g as f64;
    if y > params.upper_threshold() {
        (y as f64 - params.m as f64) / g
    } else {
        y as f64 / g
    }
}

fn check_view(view: &AggregateView, params: &ProtocolParams) -> Result<u64> {
    params.validate()?;
    if view.modulus() != params.m {
        return Err(Error::invalid(format!(
            "view modulus {} differs from protocol modulus {}",
            view.modulus(),
            params.m
        )));
    }
    Ok(view.value())
}

fn needs_central_noise(params: &ProtocolParams) -> bool {
    params.trust == TrustModel::Central && params.mechanism != Mechanism::NonPrivate
}

/// Decodes the aggregate for the distributed and local models.
pub fn analyze(view: &AggregateView, params: &ProtocolParams) -> Result<f64> {
    let y = check_view(view, params)?;
    if needs_central_noise(params) {
        return Err(Error::UnsupportedCombination("the central analyzer adds noise; use analyze_central".into()));
    }
    Ok(decode(y, params))
}

fn central_noise(params: &ProtocolParams, rng: &mut RngStream) -> Result<i64> {
    if !needs_central_noise(params) {
        return Ok(0);
    }
    let scale = params.g as f64 / params.epsilon;
    Ok(DiscreteLaplace::new(DiscreteLaplaceParams::new(scale)?)?.sample(rng))
}

fn add_mod(y: u64, eta: i64, m: u64) -> u64 {
    let m = m as i128;
    (y as i128 + (eta as i128).rem_euclid(m)).rem_euclid(m) as u64
}

/// Central-model analyzer: adds Lap_Z(g/ε) to the aggregate, reduces mod m,
/// then decodes.
pub fn analyze_central(view: &AggregateView, params: &ProtocolParams, rng: &mut RngStream) -> Result<f64> {
    let y = check_view(view, params)?;
    let eta = central_noise(params, rng)?;
    Ok(decode(add_mod(y, eta, params.m), params))
}

/// One batch pushed through randomizer, aggregator and analyzer, with the
/// intermediate quantities kept for inspection.
#[derive(Clone, Debug, PartialEq)]
pub struct BatchOutcome {
    pub estimate: f64,
    pub encoded_sum: u64,
    /// Total integer noise, including the analyzer's share in the central model.
    pub noise_sum: i64,
    pub corrupted: bool,
}

/// Runs a full batch; `rewards.len()` must equal `n`.
pub fn run_batch(rewards: &[f64], randomizer: &Randomizer, rng: &mut RngStream) -> Result<BatchOutcome> {
    let params = randomizer.params();
    if rewards.len() as u64 != params.n {
        return Err(Error::MismatchedDimensions(format!(
            "batch of {} rewards for protocol size {}",
            rewards.len(),
            params.n
        )));
    }
    let mut messages = Vec::with_capacity(rewards.len());
    let mut encoded_sum = 0u64;
    let mut noise_sum = 0i64;
    for &x in rewards {
        let (y, encoded, eta) = randomizer.randomize_parts(x, rng)?;
        messages.push(y);
        encoded_sum += encoded;
        noise_sum += eta;
    }
    let view = match params.relaxed() {
        Some(r) => relaxed_secagg(&messages, params.m, r.eps_hat, r.q_hat, rng)?,
        None => secagg(&messages, params.m)?,
    };
    let eta = central_noise(params, rng)?;
    noise_sum += eta;
    let estimate = decode(add_mod(view.value(), eta, params.m), params);
    Ok(BatchOutcome { estimate, encoded_sum, noise_sum, corrupted: view.corrupted() })
}

/// Private estimate of Σ rewards for one batch.
pub fn end_to_end_batch_sum(rewards: &[f64], params: &ProtocolParams, rng: &mut RngStream) -> Result<f64> {
    let randomizer = Randomizer::new(params)?;
    Ok(run_batch(rewards, &randomizer, rng)?.estimate)
}
