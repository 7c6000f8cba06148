//! Closed-form pmfs and tail bounds.

use crate::error::{Error, Result};

use super::PolyaParams;

/// P[Y > m] for Y ~ Lap_Z(scale), where `scale` is Δ/ε.
pub fn discrete_laplace_tail(scale: f64, m: u64) -> Result<f64> {
    if !(scale.is_finite() && scale > 0.0) {
        return Err(Error::invalid(format!("laplace scale must be positive, got {scale}")));
    }
    Ok((-(m as f64) / scale).exp() / ((1.0 / scale).exp() + 1.0))
}

/// Radius r with P[|X| > r] ≤ p for X ~ Sk(0, σ²), from the
/// (2σ², √2/2) sub-exponential bound.
pub fn skellam_tail_radius(sigma: f64, p: f64) -> Result<f64> {
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::invalid(format!("sigma must be positive, got {sigma}")));
    }
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::invalid(format!("p must lie in (0, 1], got {p}")));
    }
    Ok(skellam_radius_formula(sigma, p))
}

pub(crate) fn skellam_radius_formula(sigma: f64, p: f64) -> f64 {
    let l = (2.0 / p).ln();
    2.0 * sigma * l.sqrt() + std::f64::consts::SQRT_2 * l
}

/// Sub-Gaussian tail bound 2e^{-t²/(2σ²)} for the discrete Gaussian.
pub fn discrete_gaussian_tail_bound(sigma2: f64, t: f64) -> f64 {
    (2.0 * (-t * t / (2.0 * sigma2)).exp()).min(1.0)
}

pub fn discrete_laplace_pmf(scale: f64, x: i64) -> f64 {
    let a = (1.0 / scale).exp();
    (a - 1.0) / (a + 1.0) * (-(x.unsigned_abs() as f64) / scale).exp()
}

/// Γ(x+r)/(x!Γ(r)) β^x (1-β)^r, evaluated through log-gamma.
pub fn polya_pmf(p: &PolyaParams, x: u64) -> f64 {
    use statrs::function::gamma::ln_gamma;
    if p.beta == 0.0 {
        return if x == 0 { 1.0 } else { 0.0 };
    }
    let xf = x as f64;
    let ln = ln_gamma(xf + p.r) - ln_gamma(xf + 1.0) - ln_gamma(p.r) + xf * p.beta.ln() + p.r * (1.0 - p.beta).ln();
    ln.exp()
}

/// Unnormalised discrete Gaussian weight and its normaliser over all of Z.
fn discrete_gaussian_normaliser(sigma2: f64) -> f64 {
    let mut total = 1.0;
    let mut k = 1.0f64;
    loop {
        let w = (-k * k / (2.0 * sigma2)).exp();
        total += 2.0 * w;
        if w < 1e-300 || w < total * 1e-18 {
            return total;
        }
        k += 1.0;
    }
}

pub fn discrete_gaussian_pmf(sigma2: f64, x: i64) -> f64 {
    let xf = x as f64;
    (-xf * xf / (2.0 * sigma2)).exp() / discrete_gaussian_normaliser(sigma2)
}

/// Sk(0, σ²) pmf as the convolution of two Poisson(σ²/2) pmfs.
pub fn skellam_pmf(sigma2: f64, x: i64) -> f64 {
    let mu = sigma2 / 2.0;
    let d = x.unsigned_abs();
    // P[N1 - N2 = d] = Σ_k P[N2 = k] P[N1 = k + d]
    let ln_pois = |k: u64| -> f64 {
        let kf = k as f64;
        kf * mu.ln() - mu - statrs::function::gamma::ln_gamma(kf + 1.0)
    };
    let mut total = 0.0;
    let mut k = 0u64;
    loop {
        let term = (ln_pois(k) + ln_pois(k + d)).exp();
        total += term;
        if (k as f64) > mu && term < total * 1e-17 {
            return total;
        }
        k += 1;
    }
}
