//! Exact LLR audit of the pure-DP protocols on tiny instances.
//!
//! The output H(D) = Σ x̂ + Σ η is computed as an explicit pmf by convolving
//! truncated Pólya pmfs. Each Pólya component is cut at K where its tail
//! mass drops below 1e-12. Any output whose noise offset lies within K/2 of
//! zero then has relative pmf error of order β^K, so the LLR is taken over
//! that window only.

use super::{Mechanism, ProtocolParams, TrustModel};
use crate::error::{Error, Result};
use crate::noise::{polya_pmf, PolyaParams};

/// Pass as `truncation` to pick the cut automatically.
pub const AUTO_TRUNCATION: u64 = 0;

const TAIL_MASS: f64 = 1e-12;
const MAX_TRUNCATION: u64 = 1 << 20;
const MAX_USERS: u64 = 3;

#[derive(Clone, Debug, PartialEq)]
pub struct AuditReport {
    /// Max |log P[H(D) = y] − log P[H(D′) = y]| over neighbouring pairs and
    /// outputs in the reliable window.
    pub max_llr: f64,
    /// Same maximum for the outputs reduced mod m, when every residue is
    /// reachable inside the window.
    pub max_llr_modular: Option<f64>,
    /// Per-component support cap K.
    pub truncation: u64,
    /// Noise offsets |η| ≤ window are audited.
    pub window: u64,
    /// Noise mass outside the window, truncated tails included.
    pub truncated_mass: f64,
    pub pairs: usize,
}

/// Noise pmf over [−offset, offset], indexed by η + offset.
struct NoisePmf {
    values: Vec<f64>,
    offset: i64,
    components: u64,
}

impl NoisePmf {
    fn at(&self, eta: i64) -> f64 {
        let idx = eta + self.offset;
        if idx < 0 || idx as usize >= self.values.len() {
            0.0
        } else {
            self.values[idx as usize]
        }
    }
}

fn convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0.0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn pick_truncation(params: &PolyaParams) -> Result<u64> {
    let mut cdf = 0.0;
    for k in 0..=MAX_TRUNCATION {
        cdf += polya_pmf(params, k);
        if 1.0 - cdf < TAIL_MASS {
            return Ok(k);
        }
    }
    Err(Error::invalid("noise too wide to audit exactly"))
}

/// Shares: number of users contributing noise and the Pólya shape each one uses.
fn noise_structure(params: &ProtocolParams) -> Result<(u64, f64)> {
    match params.mechanism {
        Mechanism::DiscreteLaplacePolya => {}
        other => return Err(Error::UnsupportedMechanism(other.to_string())),
    }
    // under relaxed aggregation the garbage branch is data independent, so
    // only the exact branch is audited
    Ok(match params.trust {
        TrustModel::Distributed => (params.n, 1.0 / params.n as f64),
        // a single Lap_Z(g/ε): two Pólya(1) components
        TrustModel::Central | TrustModel::Local => (1, 1.0),
    })
}

fn noise_pmf(params: &ProtocolParams, truncation: u64) -> Result<NoisePmf> {
    let (components, shape) = noise_structure(params)?;
    let polya = PolyaParams::new(shape, (-params.epsilon / params.g as f64).exp())?;
    let k = if truncation == AUTO_TRUNCATION { pick_truncation(&polya)? } else { truncation };
    let component: Vec<f64> = (0..=k).map(|x| polya_pmf(&polya, x)).collect();
    let reversed: Vec<f64> = component.iter().rev().copied().collect();
    // one user's share γ⁺ − γ⁻ on [−K, K]
    let share = convolve(&component, &reversed);
    let mut total = share.clone();
    for _ in 1..components {
        total = convolve(&total, &share);
    }
    Ok(NoisePmf { offset: (components * k) as i64, values: total, components })
}

fn encoded_sum(data: &[bool], g: u64) -> i64 {
    data.iter().filter(|&&x| x).count() as i64 * g as i64
}

/// The audited user count: local outputs are per-user messages, so a single
/// user's message is audited.
fn audited_users(params: &ProtocolParams) -> u64 {
    match params.trust {
        TrustModel::Local => 1,
        _ => params.n,
    }
}

fn pair_llr(pmf: &NoisePmf, shift_a: i64, shift_b: i64, window: i64) -> f64 {
    let lo = shift_a.max(shift_b) - window;
    let hi = shift_a.min(shift_b) + window;
    let mut best = 0.0f64;
    for y in lo..=hi {
        let a = pmf.at(y - shift_a);
        let b = pmf.at(y - shift_b);
        if a > 0.0 && b > 0.0 {
            best = best.max((a.ln() - b.ln()).abs());
        }
    }
    best
}

fn folded(pmf: &NoisePmf, shift: i64, m: u64) -> Vec<f64> {
    let mut out = vec![0.0; m as usize];
    for (i, &v) in pmf.values.iter().enumerate() {
        let y = i as i64 - pmf.offset + shift;
        out[y.rem_euclid(m as i64) as usize] += v;
    }
    out
}

fn modular_llr(pmf: &NoisePmf, shift_a: i64, shift_b: i64, m: u64) -> f64 {
    let a = folded(pmf, shift_a, m);
    let b = folded(pmf, shift_b, m);
    a.iter().zip(&b).filter(|(x, y)| **x > 0.0 && **y > 0.0).map(|(x, y)| (x.ln() - y.ln()).abs()).fold(0.0, f64::max)
}

fn check_dataset(params: &ProtocolParams, d: &[bool]) -> Result<()> {
    if d.len() as u64 != audited_users(params) {
        return Err(Error::MismatchedDimensions(format!(
            "dataset of {} users for an audit of {}",
            d.len(),
            audited_users(params)
        )));
    }
    Ok(())
}

/// Max LLR between the outputs on two explicit datasets of {0, 1} rewards.
pub fn audit_pair(params: &ProtocolParams, d: &[bool], d_prime: &[bool], truncation: u64) -> Result<f64> {
    params.validate()?;
    check_dataset(params, d)?;
    check_dataset(params, d_prime)?;
    let pmf = noise_pmf(params, truncation)?;
    let window = pmf.offset / pmf.components as i64 / 2;
    Ok(pair_llr(&pmf, encoded_sum(d, params.g), encoded_sum(d_prime, params.g), window))
}

/// Max LLR over all neighbouring datasets in {0, 1}^n.
pub fn audit_llr(params: &ProtocolParams, truncation: u64) -> Result<AuditReport> {
    params.validate()?;
    if params.n > MAX_USERS {
        return Err(Error::invalid(format!("exact audit supports at most {MAX_USERS} users, got {}", params.n)));
    }
    let users = audited_users(params) as usize;
    let pmf = noise_pmf(params, truncation)?;
    let k = pmf.offset / pmf.components as i64;
    let window = k / 2;
    let modular_ok = (params.m as i64) / 2 <= window;

    let mut max_llr = 0.0f64;
    let mut max_mod = 0.0f64;
    let mut pairs = 0;
    for mask in 0u32..(1 << users) {
        for flip in 0..users {
            let other = mask ^ (1 << flip);
            if other < mask {
                continue;
            }
            let d: Vec<bool> = (0..users).map(|i| mask >> i & 1 == 1).collect();
            let d_prime: Vec<bool> = (0..users).map(|i| other >> i & 1 == 1).collect();
            let (sa, sb) = (encoded_sum(&d, params.g), encoded_sum(&d_prime, params.g));
            max_llr = max_llr.max(pair_llr(&pmf, sa, sb, window));
            if modular_ok {
                max_mod = max_mod.max(modular_llr(&pmf, sa, sb, params.m));
            }
            pairs += 1;
        }
    }
    let inside: f64 = (-window..=window).map(|eta| pmf.at(eta)).sum();
    let truncated_mass = (1.0 - inside).max(0.0);
    Ok(AuditReport {
        max_llr,
        max_llr_modular: modular_ok.then_some(max_mod),
        truncation: k as u64,
        window: window as u64,
        truncated_mass,
        pairs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::derive_protocol_params;

    fn params(trust: TrustModel, eps: f64, n: u64, g: u64) -> ProtocolParams {
        let tau = super::super::params::ceil_at_least_one(g as f64 / eps * 200f64.ln());
        ProtocolParams::with_precision(trust, Mechanism::DiscreteLaplacePolya, eps, n, g, tau, 0.01).unwrap()
    }

    #[test]
    fn single_user_budget() {
        let r = audit_llr(&params(TrustModel::Distributed, 1.0, 1, 1), AUTO_TRUNCATION).unwrap();
        assert!(r.max_llr <= 1.0 + 1e-9, "{r:?}");
        assert!(r.max_llr > 1.0 - 1e-9);
        assert_eq!(r.pairs, 1);
        assert!(r.truncated_mass < 1e-5);
        assert!(r.max_llr_modular.unwrap() <= 1.0 + 1e-9);
    }

    #[test]
    fn two_users_budget() {
        let r = audit_llr(&params(TrustModel::Distributed, 0.5, 2, 1), AUTO_TRUNCATION).unwrap();
        assert!(r.max_llr <= 0.5 + 1e-9, "{r:?}");
        assert!(r.max_llr > 0.5 - 1e-6);
        assert_eq!(r.pairs, 4);
    }

    #[test]
    fn identical_datasets_have_zero_llr() {
        let p = params(TrustModel::Distributed, 1.0, 3, 2);
        let d = [true, false, true];
        assert_eq!(audit_pair(&p, &d, &d, AUTO_TRUNCATION).unwrap(), 0.0);
    }

    #[test]
    fn central_and_local() {
        for trust in [TrustModel::Central, TrustModel::Local] {
            let r = audit_llr(&params(trust, 1.0, 3, 2), AUTO_TRUNCATION).unwrap();
            assert!(r.max_llr <= 1.0 + 1e-9, "{trust}: {r:?}");
        }
    }

    #[test]
    fn unsupported_inputs() {
        let p = derive_protocol_params(TrustModel::Distributed, Mechanism::Skellam, 1.0, 1.0, 2, 0.1).unwrap();
        assert!(matches!(audit_llr(&p, AUTO_TRUNCATION), Err(Error::UnsupportedMechanism(_))));
        assert!(audit_llr(&params(TrustModel::Distributed, 1.0, 4, 1), AUTO_TRUNCATION).is_err());
    }

    #[test]
    fn explicit_truncation_is_used() {
        let r = audit_llr(&params(TrustModel::Distributed, 1.0, 2, 1), 40).unwrap();
        assert_eq!(r.truncation, 40);
        assert_eq!(r.window, 20);
    }
}
