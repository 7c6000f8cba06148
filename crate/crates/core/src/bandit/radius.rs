use crate::error::{Error, Result};
use crate::protocol::{Aggregation, Mechanism, ProtocolSpec, TrustModel, DEFAULT_LOCAL_C};

/// Concentration constants of the private noise: with probability 1 − p the
/// estimation error of a batch sum is at most σ√log(2/p) + h·log(2/p).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseScale {
    pub sigma: f64,
    pub h: f64,
}

impl NoiseScale {
    pub const ZERO: NoiseScale = NoiseScale { sigma: 0.0, h: 0.0 };

    pub fn new(sigma: f64, h: f64) -> Result<Self> {
        if sigma >= 0.0 && h >= 0.0 && sigma.is_finite() && h.is_finite() {
            Ok(NoiseScale { sigma, h })
        } else {
            Err(Error::invalid(format!("noise scale must be finite and nonnegative, got ({sigma}, {h})")))
        }
    }
}

/// (σ, h) for one batch of `batch` users. Only the local model depends on
/// the batch size.
pub fn noise_scale_for(spec: &ProtocolSpec, batch: u64) -> Result<NoiseScale> {
    use Mechanism::*;
    use TrustModel::*;
    let eps = match spec.aggregation {
        Aggregation::Perfect => spec.epsilon,
        Aggregation::Relaxed => spec.epsilon / 2.0,
    };
    if spec.mechanism == NonPrivate {
        return Ok(NoiseScale::ZERO);
    }
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::invalid(format!("epsilon must be positive, got {eps}")));
    }
    let root2 = std::f64::consts::SQRT_2;
    let s = spec.s;
    let scale = match (spec.trust, spec.mechanism) {
        (Central, ContinuousLaplaceCentral) => NoiseScale::new(root2 / eps, 1.0 / eps)?,
        (Central | Distributed, DiscreteLaplacePolya) => NoiseScale::new(root2 / eps, 2.0 / eps)?,
        (Local, DiscreteLaplacePolya) => NoiseScale::new(spec.local_c * (2.0 * batch as f64).sqrt() / eps, 0.0)?,
        (Distributed, Skellam) => NoiseScale::new((2.0 + root2 / s) / eps, root2 / (s * eps))?,
        (Distributed, DiscreteGaussian) => NoiseScale::new((root2 + root2 / s) / eps, 0.0)?,
        (trust, mechanism) => {
            return Err(Error::UnsupportedCombination(format!("{mechanism} under the {trust} model")))
        }
    };
    if matches!(spec.mechanism, Skellam | DiscreteGaussian) && !(s >= 1.0 && s.is_finite()) {
        return Err(Error::invalid(format!("scaling factor must be >= 1, got {s}")));
    }
    Ok(scale)
}

/// [`noise_scale_for`] with perfect aggregation and the default local constant.
pub fn noise_scale_constants(
    mechanism: Mechanism,
    trust: TrustModel,
    epsilon: f64,
    s: f64,
    batch: u64,
) -> Result<NoiseScale> {
    let spec = ProtocolSpec::new(trust, mechanism, epsilon, s, 0.1).with_local_c(DEFAULT_LOCAL_C);
    noise_scale_for(&spec, batch)
}

/// β(b) = √(log(4|Φ|b²/p)/(2l)) + σ√log(2|Φ|b²/p)/l + h·log(2|Φ|b²/p)/l.
///
/// Logs of arguments below 1 are clamped to 0.
pub fn confidence_radius(b: u32, active_count: usize, l_b: u64, scale: NoiseScale, p: f64) -> Result<f64> {
    if b == 0 || active_count == 0 || l_b == 0 {
        return Err(Error::invalid("batch index, active count and batch size must be positive"));
    }
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::invalid(format!("p must be positive, got {p}")));
    }
    NoiseScale::new(scale.sigma, scale.h)?;
    let base = active_count as f64 * (b as f64).powi(2) / p;
    let sampling_log = (4.0 * base).ln().max(0.0);
    let noise_log = (2.0 * base).ln().max(0.0);
    let l = l_b as f64;
    Ok((sampling_log / (2.0 * l)).sqrt() + scale.sigma * noise_log.sqrt() / l + scale.h * noise_log / l)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scale_examples() {
        use Mechanism::*;
        use TrustModel::*;
        let pure = noise_scale_constants(DiscreteLaplacePolya, Distributed, 1.0, 1.0, 8).unwrap();
        assert_eq!(pure, NoiseScale { sigma: 2f64.sqrt(), h: 2.0 });
        let sk = noise_scale_constants(Skellam, Distributed, 1.0, 1e9, 8).unwrap();
        assert!(sk.h < 1e-8);
        assert!((sk.sigma - 2.0).abs() < 1e-8);
        let dg = noise_scale_constants(DiscreteGaussian, Distributed, 0.5, 4.0, 8).unwrap();
        assert_eq!(dg.h, 0.0);
        let local = noise_scale_constants(DiscreteLaplacePolya, Local, 0.5, 1.0, 32).unwrap();
        assert!((local.sigma - 2.0 * 8.0 / 0.5).abs() < 1e-12);
        assert_eq!(local.h, 0.0);
        let base = noise_scale_constants(ContinuousLaplaceCentral, Central, 0.5, 1.0, 8).unwrap();
        assert_eq!(base, NoiseScale { sigma: 2f64.sqrt() / 0.5, h: 2.0 });
        assert_eq!(noise_scale_constants(NonPrivate, Local, 1.0, 1.0, 8).unwrap(), NoiseScale::ZERO);
        assert!(noise_scale_constants(Skellam, Central, 1.0, 1.0, 8).is_err());
        assert!(noise_scale_constants(ContinuousLaplaceCentral, Distributed, 1.0, 1.0, 8).is_err());
    }

    #[test]
    fn relaxed_uses_half_budget() {
        let spec = ProtocolSpec::new(TrustModel::Distributed, Mechanism::DiscreteLaplacePolya, 1.0, 1.0, 0.1)
            .with_aggregation(Aggregation::Relaxed);
        assert_eq!(noise_scale_for(&spec, 4).unwrap(), NoiseScale { sigma: 2.0 * 2f64.sqrt(), h: 4.0 });
    }

    #[test]
    fn radius_examples() {
        assert_eq!(confidence_radius(1, 1, 2, NoiseScale::ZERO, 4.0).unwrap(), 0.0);
        let scale = NoiseScale::new(2f64.sqrt(), 2.0).unwrap();
        let beta = confidence_radius(1, 10, 2, scale, 0.1).unwrap();
        let expected = (400f64.ln() / 4.0).sqrt() + 2f64.sqrt() * 200f64.ln().sqrt() / 2.0 + 200f64.ln();
        assert!((beta - expected).abs() < 1e-14);
        assert!((beta - 8.149_814_412_607_174).abs() < 1e-12);
        assert!(confidence_radius(0, 1, 2, scale, 0.1).is_err());
        assert!(confidence_radius(1, 1, 2, scale, 0.0).is_err());
    }

    #[test]
    fn radius_decreases_in_batch_size() {
        let scale = NoiseScale::new(1.3, 0.7).unwrap();
        let mut prev = f64::INFINITY;
        for k in 1..=15 {
            let beta = confidence_radius(3, 5, 1 << k, scale, 0.05).unwrap();
            assert!(beta < prev);
            prev = beta;
        }
    }
}
