use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::noise::RngStream;

/// What the aggregator hands to the analyzer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AggregatePayload {
    /// A single modular sum.
    Sum(u64),
    /// A permuted multiset of the messages.
    Multiset(Vec<u64>),
}

/// Output of the secure computation for one batch.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AggregateView {
    payload: AggregatePayload,
    modulus: u64,
    corrupted: bool,
}

impl AggregateView {
    pub fn payload(&self) -> &AggregatePayload {
        &self.payload
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// The modular sum in [0, m).
    pub fn value(&self) -> u64 {
        match &self.payload {
            AggregatePayload::Sum(v) => *v,
            AggregatePayload::Multiset(items) => modular_sum(items, self.modulus),
        }
    }

    /// Whether a relaxed aggregator replaced the sum with garbage. Exposed for
    /// tests; analyzers never look at it.
    pub fn corrupted(&self) -> bool {
        self.corrupted
    }
}

fn check_messages(messages: &[u64], m: u64) -> Result<()> {
    if m == 0 {
        return Err(Error::invalid("modulus must be positive"));
    }
    match messages.iter().find(|&&v| v >= m) {
        Some(&value) => Err(Error::MessageOutOfRange { value, modulus: m }),
        None => Ok(()),
    }
}

fn modular_sum(messages: &[u64], m: u64) -> u64 {
    let m = m as u128;
    messages.iter().fold(0u128, |acc, &v| (acc + v as u128) % m) as u64
}

/// Exact modular sum of the messages.
pub fn secagg(messages: &[u64], m: u64) -> Result<AggregateView> {
    check_messages(messages, m)?;
    Ok(AggregateView { payload: AggregatePayload::Sum(modular_sum(messages, m)), modulus: m, corrupted: false })
}

/// Aggregator that returns the exact sum with probability 1 − q̂ and a uniform
/// value in [0, m) otherwise. ε̂ only enters the accountant.
pub fn relaxed_secagg(
    messages: &[u64],
    m: u64,
    eps_hat: f64,
    q_hat: f64,
    rng: &mut RngStream,
) -> Result<AggregateView> {
    check_messages(messages, m)?;
    if !(eps_hat >= 0.0) || !(0.0..1.0).contains(&q_hat) {
        return Err(Error::invalid(format!(
            "relaxed aggregation needs eps_hat >= 0 and q_hat in [0, 1), got ({eps_hat}, {q_hat})"
        )));
    }
    let corrupted = q_hat > 0.0 && rng.random::<f64>() < q_hat;
    let value = if corrupted { rng.random_range(0..m) } else { modular_sum(messages, m) };
    Ok(AggregateView { payload: AggregatePayload::Sum(value), modulus: m, corrupted })
}

/// Shuffler view: the messages in uniformly random order.
pub fn shuffle(messages: &[u64], m: u64, rng: &mut RngStream) -> Result<AggregateView> {
    check_messages(messages, m)?;
    let mut items = messages.to_vec();
    items.shuffle(rng);
    Ok(AggregateView { payload: AggregatePayload::Multiset(items), modulus: m, corrupted: false })
}
