//! Shared statistics for the integration suites.
#![allow(dead_code)]

use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Bins |x| > this go into two overflow bins.
pub const TAIL_CUTOFF: i64 = 12;

/// Counts over [< −C], −C..=C, [> C].
pub fn symmetric_bins(samples: impl IntoIterator<Item = i64>) -> Vec<u64> {
    let mut counts = vec![0u64; (2 * TAIL_CUTOFF + 3) as usize];
    for x in samples {
        let idx = x.clamp(-TAIL_CUTOFF - 1, TAIL_CUTOFF + 1) + TAIL_CUTOFF + 1;
        counts[idx as usize] += 1;
    }
    counts
}

/// Bin probabilities matching [`symmetric_bins`] for a symmetric pmf.
pub fn symmetric_probs(pmf: impl Fn(i64) -> f64) -> Vec<f64> {
    let inner: Vec<f64> = (-TAIL_CUTOFF..=TAIL_CUTOFF).map(&pmf).collect();
    let tail = ((1.0 - inner.iter().sum::<f64>()) / 2.0).max(0.0);
    let mut probs = vec![tail];
    probs.extend(inner);
    probs.push(tail);
    probs
}

/// Merges adjacent bins until each pooled bin has weight ≥ `min_weight`;
/// a light remainder joins the last pooled bin.
fn pool(columns: &[Vec<f64>], weight: impl Fn(&[f64]) -> f64, min_weight: f64) -> Vec<Vec<f64>> {
    let mut pooled: Vec<Vec<f64>> = vec![Vec::new(); columns.len()];
    let mut acc = vec![0.0; columns.len()];
    for i in 0..columns[0].len() {
        for (a, col) in acc.iter_mut().zip(columns) {
            *a += col[i];
        }
        if weight(&acc) >= min_weight {
            for (p, a) in pooled.iter_mut().zip(acc.iter_mut()) {
                p.push(std::mem::take(a));
            }
        }
    }
    for (p, a) in pooled.iter_mut().zip(&acc) {
        match p.last_mut() {
            Some(last) => *last += a,
            None => p.push(*a),
        }
    }
    pooled
}

fn p_value(stat: f64, df: usize) -> f64 {
    if df == 0 {
        return 1.0;
    }
    1.0 - ChiSquared::new(df as f64).expect("df > 0").cdf(stat)
}

/// Pearson goodness-of-fit p-value; bins pooled to expected count ≥ 5.
pub fn goodness_of_fit(counts: &[u64], probs: &[f64]) -> f64 {
    let total: u64 = counts.iter().sum();
    let observed: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
    let expected: Vec<f64> = probs.iter().map(|&p| p * total as f64).collect();
    let pooled = pool(&[observed, expected], |acc| acc[1], 5.0);
    let stat: f64 = pooled[0].iter().zip(&pooled[1]).map(|(o, e)| (o - e).powi(2) / e).sum();
    p_value(stat, pooled[0].len() - 1)
}

/// Two-sample chi-square p-value for equal sample sizes:
/// Σ (a − b)² / (a + b), bins pooled to combined count ≥ 10.
pub fn two_sample(a: &[u64], b: &[u64]) -> f64 {
    assert_eq!(a.iter().sum::<u64>(), b.iter().sum::<u64>(), "equal sample sizes");
    let a: Vec<f64> = a.iter().map(|&c| c as f64).collect();
    let b: Vec<f64> = b.iter().map(|&c| c as f64).collect();
    let pooled = pool(&[a, b], |acc| acc[0] + acc[1], 10.0);
    let stat: f64 = pooled[0].iter().zip(&pooled[1]).map(|(x, y)| (x - y).powi(2) / (x + y)).sum();
    p_value(stat, pooled[0].len() - 1)
}

/// Standard error of a frequency estimate.
pub fn binomial_se(p: f64, trials: usize) -> f64 {
    (p * (1.0 - p) / trials as f64).sqrt()
}
