//! Closed-form privacy accounting: pure DP, RDP curves, CDP, conversion to
//! approximate DP, advanced composition and returning-user budgets.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::protocol::{Aggregation, Mechanism, ProtocolSpec};

/// Largest order scanned when converting RDP to approximate DP.
pub const MAX_ORDER: u64 = 256;
/// Real-valued curves are additionally scanned on this many points per unit.
const REAL_GRID_PER_UNIT: u64 = 64;

/// Orders at which a curve is defined.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum OrderDomain {
    /// Every real α > 1.
    Real,
    /// Integers α ≥ 2.
    Integer,
}

/// An RDP guarantee ε(α).
#[derive(Clone, Debug, PartialEq)]
pub enum RdpCurve {
    /// ε(α) = ½ε²α for every α > 1; covers ½ε²-CDP and pure ε-DP.
    Concentrated { epsilon: f64 },
    /// Distributed Skellam protocol. `batch = None` gives the bound that holds
    /// uniformly over batch sizes.
    Skellam { epsilon: f64, s: f64, batch: Option<u64> },
    /// `times`-fold adaptive composition of `base`.
    Composed { base: Box<RdpCurve>, times: u64 },
}

impl RdpCurve {
    pub fn domain(&self) -> OrderDomain {
        match self {
            RdpCurve::Concentrated { .. } => OrderDomain::Real,
            RdpCurve::Skellam { .. } => OrderDomain::Integer,
            RdpCurve::Composed { base, .. } => base.domain(),
        }
    }

    pub fn eval(&self, alpha: f64) -> Result<f64> {
        match self {
            RdpCurve::Concentrated { epsilon } => pure_dp_to_rdp(*epsilon, alpha),
            RdpCurve::Skellam { epsilon, s, batch: None } => rdp_skellam(alpha, *epsilon, *s),
            RdpCurve::Skellam { epsilon, s, batch: Some(n) } => rdp_skellam_batch(alpha, *epsilon, *s, *n),
            RdpCurve::Composed { base, times } => Ok(*times as f64 * base.eval(alpha)?),
        }
    }

    pub fn compose(self, times: u64) -> RdpCurve {
        RdpCurve::Composed { base: Box::new(self), times }
    }

    fn candidate_orders(&self) -> Vec<f64> {
        let mut orders: Vec<f64> = (2..=MAX_ORDER).map(|a| a as f64).collect();
        if self.domain() == OrderDomain::Real {
            orders.extend((1..=40).map(|k| 1.0 + 0.5f64.powi(k)));
            let steps = (MAX_ORDER - 1) * REAL_GRID_PER_UNIT;
            orders.extend((1..steps).map(|i| 1.0 + i as f64 / REAL_GRID_PER_UNIT as f64));
        }
        orders
    }
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon.is_finite() && epsilon > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("epsilon must be positive, got {epsilon}")))
    }
}

fn check_scale(s: f64) -> Result<()> {
    if s.is_finite() && s >= 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("scaling factor must be >= 1, got {s}")))
    }
}

fn check_integer_order(alpha: f64) -> Result<()> {
    if alpha >= 2.0 && alpha.fract() == 0.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidOrder(alpha))
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta < 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("delta must lie in (0, 1), got {delta}")))
    }
}

/// RDP of adding Sk(0, σ²) to a sensitivity-Δ integer query, integer α ≥ 2.
pub fn rdp_skellam_lemma(alpha: f64, sensitivity: f64, variance: f64) -> Result<f64> {
    check_integer_order(alpha)?;
    if !(sensitivity > 0.0 && variance > 0.0) {
        return Err(Error::invalid("sensitivity and variance must be positive"));
    }
    let d2 = sensitivity * sensitivity;
    let v2 = variance * variance;
    let fourth = ((2.0 * alpha - 1.0) * d2 + 6.0 * sensitivity) / (4.0 * v2);
    let linear = 3.0 * sensitivity / (2.0 * variance);
    Ok(alpha * d2 / (2.0 * variance) + fourth.min(linear))
}

/// Per-batch Skellam RDP for a batch of `n` users.
pub fn rdp_skellam_batch(alpha: f64, epsilon: f64, s: f64, n: u64) -> Result<f64> {
    check_integer_order(alpha)?;
    check_epsilon(epsilon)?;
    check_scale(s)?;
    if n == 0 {
        return Err(Error::invalid("batch size must be at least 1"));
    }
    let n = n as f64;
    let eps2 = epsilon * epsilon;
    let fourth = (2.0 * alpha - 1.0) * eps2 / (4.0 * s * s * n) + 3.0 * epsilon / (2.0 * s.powi(3) * n.powf(1.5));
    let linear = 3.0 * eps2 / (2.0 * s * n.sqrt());
    Ok(alpha * eps2 / 2.0 + fourth.min(linear))
}

/// Skellam RDP that holds for every batch size.
pub fn rdp_skellam(alpha: f64, epsilon: f64, s: f64) -> Result<f64> {
    rdp_skellam_batch(alpha, epsilon, s, 1)
}

/// CDP parameter ε̂ of the distributed discrete Gaussian protocol over horizon
/// `horizon`; the mechanism is ½ε̂²-CDP.
pub fn cdp_discrete_gaussian(epsilon: f64, s: f64, horizon: u64) -> Result<f64> {
    check_epsilon(epsilon)?;
    check_scale(s)?;
    if horizon < 2 {
        return Err(Error::invalid(format!("horizon must be at least 2, got {horizon}")));
    }
    let xi = discrete_gaussian_xi(s, horizon);
    Ok((epsilon * epsilon + xi / 2.0).sqrt().min(epsilon + xi))
}

/// ξ = 10 Σ_{k=1}^{T/2 − 1} exp(−2π²s²·k/(k+1)).
pub fn discrete_gaussian_xi(s: f64, horizon: u64) -> f64 {
    let c = 2.0 * std::f64::consts::PI.powi(2) * s * s;
    let last = (horizon / 2).saturating_sub(1);
    let mut sum = 0.0;
    for k in 1..=last {
        let kf = k as f64;
        let term = (-c * kf / (kf + 1.0)).exp();
        if term < 1e-30 {
            break;
        }
        // terms decrease in k, so the remainder is negligible too
        sum += term;
    }
    10.0 * sum
}

/// Value of the conversion bound at one order.
pub fn conversion_at(curve: &RdpCurve, alpha: f64, delta: f64) -> Result<f64> {
    let e = curve.eval(alpha)?;
    Ok(e + (1.0 / (alpha * delta)).ln() / (alpha - 1.0) + (1.0 - 1.0 / alpha).ln())
}

/// ε such that the curve implies (ε, δ)-DP, minimised over a fixed grid of
/// orders in the curve's domain and clamped at 0.
pub fn rdp_to_approx_dp(curve: &RdpCurve, delta: f64) -> Result<f64> {
    check_delta(delta)?;
    rdp_to_approx_dp_with_order(curve, delta).map(|(eps, _)| eps)
}

/// Like [`rdp_to_approx_dp`] and also returns the optimal order.
pub fn rdp_to_approx_dp_with_order(curve: &RdpCurve, delta: f64) -> Result<(f64, f64)> {
    check_delta(delta)?;
    let mut best: Option<(f64, f64)> = None;
    for alpha in curve.candidate_orders() {
        let Ok(v) = conversion_at(curve, alpha, delta) else { continue };
        if v.is_finite() && best.is_none_or(|(b, _)| v < b) {
            best = Some((v, alpha));
        }
    }
    best.map(|(v, a)| (v.max(0.0), a)).ok_or(Error::EmptyDomain)
}

/// Pure ε-DP implies (α, ½ε²α)-RDP for all α > 1.
pub fn pure_dp_to_rdp(epsilon: f64, alpha: f64) -> Result<f64> {
    if !(epsilon >= 0.0 && epsilon.is_finite()) {
        return Err(Error::invalid(format!("epsilon must be nonnegative, got {epsilon}")));
    }
    if !(alpha > 1.0 && alpha.is_finite()) {
        return Err(Error::InvalidOrder(alpha));
    }
    Ok(0.5 * epsilon * epsilon * alpha)
}

/// Per-mechanism ε so that k-fold composition is (ε_total, kδ + δ′)-DP.
pub fn advanced_composition(eps_total: f64, delta_prime: f64, k: u64) -> Result<f64> {
    if !(eps_total > 0.0 && eps_total < 1.0) {
        return Err(Error::invalid(format!("total epsilon must lie in (0, 1), got {eps_total}")));
    }
    check_delta(delta_prime)?;
    if k == 0 {
        return Err(Error::invalid("k must be at least 1"));
    }
    Ok(eps_total / (2.0 * (2.0 * k as f64 * (1.0 / delta_prime).ln()).sqrt()))
}

/// Guarantee used when a user may return in up to B batches.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReturningMode {
    ApproxDp,
    Rdp,
}

/// Per-batch noise variance for users returning up to `batches` times, with
/// unit leading constant. Only ratios between modes are meaningful.
pub fn returning_users_variance(batches: u64, epsilon: f64, delta: f64, mode: ReturningMode) -> Result<f64> {
    if batches == 0 {
        return Err(Error::invalid("B must be at least 1"));
    }
    check_epsilon(epsilon)?;
    check_delta(delta)?;
    let b = batches as f64;
    let base = b * (1.0 / delta).ln() / (epsilon * epsilon);
    Ok(match mode {
        ReturningMode::ApproxDp => base * (b / delta).ln(),
        ReturningMode::Rdp => base,
    })
}

/// Pure ε of relaxed aggregation: 2ε̂ + ε′.
pub fn relaxed_pure_epsilon(eps_prime: f64, eps_hat: f64) -> f64 {
    2.0 * eps_hat + eps_prime
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ApproxDp {
    pub epsilon: f64,
    pub delta: f64,
}

/// Everything the accountant can say about one protocol.
#[derive(Clone, Debug, PartialEq)]
pub struct PrivacyReport {
    pub pure_eps: Option<f64>,
    pub rdp: Option<RdpCurve>,
    /// ε̂ with the mechanism ½ε̂²-CDP.
    pub cdp_eps: Option<f64>,
    pub approx: Option<ApproxDp>,
}

impl PrivacyReport {
    /// Report for the protocol described by `spec` over a horizon `horizon`;
    /// approximate DP is filled in when `delta` is given.
    pub fn for_protocol(spec: &ProtocolSpec, horizon: u64, delta: Option<f64>) -> Result<Self> {
        check_epsilon(spec.epsilon).or_else(
            |e| {
                if spec.mechanism == Mechanism::NonPrivate {
                    Ok(())
                } else {
                    Err(e)
                }
            },
        )?;
        let mut report = PrivacyReport { pure_eps: None, rdp: None, cdp_eps: None, approx: None };
        match spec.mechanism {
            Mechanism::DiscreteLaplacePolya | Mechanism::ContinuousLaplaceCentral => {
                let eps = match spec.aggregation {
                    Aggregation::Perfect => spec.epsilon,
                    Aggregation::Relaxed => relaxed_pure_epsilon(spec.epsilon / 2.0, spec.epsilon / 4.0),
                };
                report.pure_eps = Some(eps);
                report.rdp = Some(RdpCurve::Concentrated { epsilon: eps });
            }
            Mechanism::Skellam => {
                check_scale(spec.s)?;
                report.rdp = Some(RdpCurve::Skellam { epsilon: spec.epsilon, s: spec.s, batch: None });
            }
            Mechanism::DiscreteGaussian => {
                let cdp = cdp_discrete_gaussian(spec.epsilon, spec.s, horizon)?;
                report.cdp_eps = Some(cdp);
                report.rdp = Some(RdpCurve::Concentrated { epsilon: cdp });
            }
            Mechanism::NonPrivate => report.pure_eps = Some(f64::INFINITY),
        }
        if let (Some(delta), Some(curve)) = (delta, &report.rdp) {
            report.approx = Some(ApproxDp { epsilon: rdp_to_approx_dp(curve, delta)?, delta });
        }
        Ok(report)
    }

    /// `key: value` lines.
    pub fn render(&self) -> String {
        let mut out = String::new();
        if let Some(e) = self.pure_eps {
            let _ = writeln!(out, "pure_eps: {e}");
        }
        if let Some(c) = self.cdp_eps {
            let _ = writeln!(out, "cdp_eps: {c}");
            let _ = writeln!(out, "cdp_half_eps2: {}", 0.5 * c * c);
        }
        if let Some(curve) = &self.rdp {
            for alpha in [2.0, 4.0, 8.0, 16.0, 32.0, 64.0] {
                if let Ok(v) = curve.eval(alpha) {
                    let _ = writeln!(out, "rdp_alpha_{alpha}: {v}");
                }
            }
        }
        if let Some(a) = self.approx {
            let _ = writeln!(out, "approx_eps: {}", a.epsilon);
            let _ = writeln!(out, "approx_delta: {}", a.delta);
        }
        out
    }
}
