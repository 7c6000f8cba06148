use rand::Rng;

use super::{confidence_radius, noise_scale_for, BanditInstance};
use crate::error::{Error, Result};
use crate::noise::RngStream;
use crate::protocol::{run_batch, Mechanism, ProtocolSpec, Randomizer, TrustModel};

/// Cumulative pseudo-regret of one run.
///
/// Regret is piecewise linear in t because each batch pulls a single arm, so
/// the breakpoints at batch boundaries determine it exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct RegretTrace {
    breakpoints: Vec<(u64, f64)>,
    pulls_per_arm: Vec<u64>,
    eliminated_optimal: bool,
    /// Batch index after which each arm left the active set.
    eliminated_after: Vec<Option<u32>>,
}

impl RegretTrace {
    /// (t, cumulative regret) at every batch boundary, starting at (0, 0).
    pub fn breakpoints(&self) -> &[(u64, f64)] {
        &self.breakpoints
    }

    pub fn pulls_per_arm(&self) -> &[u64] {
        &self.pulls_per_arm
    }

    pub fn total_pulls(&self) -> u64 {
        self.pulls_per_arm.iter().sum()
    }

    pub fn eliminated_optimal(&self) -> bool {
        self.eliminated_optimal
    }

    pub fn eliminated_after(&self) -> &[Option<u32>] {
        &self.eliminated_after
    }

    pub fn final_regret(&self) -> f64 {
        self.breakpoints.last().map_or(0.0, |&(_, r)| r)
    }

    /// Cumulative regret after the first `t` pulls (clamped to the run length).
    pub fn regret_at(&self, t: u64) -> f64 {
        let idx = self.breakpoints.partition_point(|&(bt, _)| bt < t);
        if idx == 0 {
            return 0.0;
        }
        if idx == self.breakpoints.len() {
            return self.final_regret();
        }
        let (t1, r1) = self.breakpoints[idx];
        if t1 == t {
            return r1;
        }
        let (t0, r0) = self.breakpoints[idx - 1];
        r0 + (r1 - r0) * (t - t0) as f64 / (t1 - t0) as f64
    }

    /// (t, regret) at each requested checkpoint.
    pub fn at_checkpoints(&self, checkpoints: &[u64]) -> Vec<(u64, f64)> {
        checkpoints.iter().map(|&t| (t, self.regret_at(t))).collect()
    }
}

/// Σ_a Δ_a N_a.
pub fn pseudo_regret_from_pulls(pulls: &[u64], instance: &BanditInstance) -> Result<f64> {
    if pulls.len() != instance.num_arms() {
        return Err(Error::MismatchedDimensions(format!(
            "{} pull counts for {} arms",
            pulls.len(),
            instance.num_arms()
        )));
    }
    Ok(pulls.iter().zip(instance.gaps()).map(|(&n, gap)| n as f64 * gap).sum())
}

pub fn pseudo_regret(trace: &RegretTrace, instance: &BanditInstance) -> Result<f64> {
    pseudo_regret_from_pulls(trace.pulls_per_arm(), instance)
}

/// Laplace(0, scale) by inversion.
pub fn sample_laplace(scale: f64, rng: &mut RngStream) -> f64 {
    let u: f64 = rng.random::<f64>() - 0.5;
    -scale * u.signum() * (1.0 - 2.0 * u.abs()).ln()
}

struct Recorder<'a> {
    gaps: Vec<f64>,
    pulls: Vec<u64>,
    breakpoints: Vec<(u64, f64)>,
    instance: &'a BanditInstance,
}

impl Recorder<'_> {
    fn pull(&mut self, arm: usize, count: u64) {
        let (t, r) = *self.breakpoints.last().expect("starts at origin");
        self.pulls[arm] += count;
        self.breakpoints.push((t + count, r + self.gaps[arm] * count as f64));
    }

    fn t(&self) -> u64 {
        self.breakpoints.last().expect("starts at origin").0
    }
}

enum BatchSum {
    Raw,
    ContinuousLaplace(f64),
    Protocol(Randomizer),
}

/// Batched successive elimination with batch sizes 2^b, each batch sum
/// privatised by the protocol in `spec`. Stops exactly at `horizon` pulls.
pub fn run_batched_se(
    instance: &BanditInstance,
    spec: &ProtocolSpec,
    horizon: u64,
    rng: &RngStream,
) -> Result<RegretTrace> {
    let k = instance.num_arms();
    let needed = 2 * k as u64;
    if horizon < needed {
        return Err(Error::HorizonTooSmall { horizon, arms: k, needed });
    }
    if spec.mechanism == Mechanism::ContinuousLaplaceCentral && spec.trust != TrustModel::Central {
        return Err(Error::UnsupportedCombination(
            "continuous Laplace noise is only defined for the central model".into(),
        ));
    }
    let best = instance.best_arm();
    let mut rec = Recorder { gaps: instance.gaps(), pulls: vec![0; k], breakpoints: vec![(0, 0.0)], instance };
    let mut active: Vec<usize> = (0..k).collect();
    let mut estimates = vec![0.0; k];
    let mut eliminated_after = vec![None; k];
    let mut rewards = Vec::new();

    let mut b: u32 = 1;
    while rec.t() < horizon {
        if active.len() == 1 {
            // a lone arm can never be eliminated
            rec.pull(active[0], horizon - rec.t());
            break;
        }
        let l = 1u64.checked_shl(b).filter(|&l| l <= horizon).unwrap_or(horizon);
        let beta = confidence_radius(b, active.len(), l, noise_scale_for(spec, l)?, spec.p)?;
        let summer = match spec.mechanism {
            Mechanism::NonPrivate => BatchSum::Raw,
            Mechanism::ContinuousLaplaceCentral => BatchSum::ContinuousLaplace(1.0 / spec.epsilon),
            _ => BatchSum::Protocol(Randomizer::new(&spec.derive(l)?)?),
        };
        let batch_rng = rng.split(u64::from(b));
        for &arm in &active {
            let remaining = horizon - rec.t();
            if remaining < l {
                // partial batch: the pulls count, the incomplete sum is never aggregated
                rec.pull(arm, remaining);
                break;
            }
            let mut stream = batch_rng.split(arm as u64);
            rewards.clear();
            rewards.extend((0..l).map(|_| rec.instance.sample_reward(arm, &mut stream)));
            let sum = match &summer {
                BatchSum::Raw => rewards.iter().sum(),
                BatchSum::ContinuousLaplace(scale) => rewards.iter().sum::<f64>() + sample_laplace(*scale, &mut stream),
                BatchSum::Protocol(randomizer) => run_batch(&rewards, randomizer, &mut stream)?.estimate,
            };
            rec.pull(arm, l);
            estimates[arm] = sum / l as f64;
        }
        if rec.t() >= horizon {
            break;
        }
        let max_lcb = active.iter().map(|&a| estimates[a] - beta).fold(f64::NEG_INFINITY, f64::max);
        active.retain(|&a| {
            let keep = estimates[a] + beta >= max_lcb;
            if !keep {
                eliminated_after[a] = Some(b);
            }
            keep
        });
        b += 1;
    }

    Ok(RegretTrace {
        breakpoints: rec.breakpoints,
        pulls_per_arm: rec.pulls,
        eliminated_optimal: eliminated_after[best].is_some(),
        eliminated_after,
    })
}

/// Central continuous-Laplace baseline: raw batch sums plus Laplace(1/ε).
pub fn run_dp_se_baseline(
    instance: &BanditInstance,
    epsilon: f64,
    horizon: u64,
    p: f64,
    rng: &RngStream,
) -> Result<RegretTrace> {
    let spec = ProtocolSpec::new(TrustModel::Central, Mechanism::ContinuousLaplaceCentral, epsilon, 1.0, p);
    run_batched_se(instance, &spec, horizon, rng)
}
