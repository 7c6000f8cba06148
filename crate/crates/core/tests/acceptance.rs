//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary (`harness = false`) so the lines are always shown:
//! `cargo test -p dpbandit --test acceptance`.

mod common;

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{binomial_se, goodness_of_fit, symmetric_bins, symmetric_probs, two_sample};
use dpbandit::accountant::{advanced_composition, cdp_discrete_gaussian, rdp_skellam};
use dpbandit::bandit::run_batched_se;
use dpbandit::experiments::{generate_instance, run_experiment, ExperimentConfig, InstanceKind, ResultRow};
use dpbandit::noise::{
    discrete_gaussian_pmf, discrete_laplace_tail, DiscreteGaussian, DiscreteGaussianParams, DiscreteLaplace,
    DiscreteLaplaceParams, Polya, PolyaParams, RngStream, Skellam, SkellamParams,
};
use dpbandit::protocol::{
    analyze, audit_llr, decode, secagg, Mechanism, ProtocolParams, ProtocolSpec, TrustModel, AUTO_TRUNCATION,
};

const SAMPLES: usize = 1_000_000;
const MIN_P_VALUE: f64 = 0.01;
const DISTRIBUTION_BUDGET: Duration = Duration::from_secs(120);
const TAIL_TOLERANCE: f64 = 0.003;
const AUDIT_SLACK: f64 = 1e-6;
const SURVIVAL_BUDGET: Duration = Duration::from_secs(300);
const FIGURE_BUDGET: Duration = Duration::from_secs(1800);
const MATCH_FACTOR: f64 = 1.5;

type Criterion = (&'static str, fn() -> Verdict);

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn laplace(b: f64) -> DiscreteLaplace {
    DiscreteLaplace::new(DiscreteLaplaceParams::new(b).unwrap()).unwrap()
}

fn skellam(sigma2: f64) -> Skellam {
    Skellam::new(SkellamParams::new(sigma2).unwrap()).unwrap()
}

fn distributional() -> Verdict {
    let start = Instant::now();
    let mut worst = (f64::INFINITY, String::new());
    let mut record = |p: f64, what: String| {
        if p < worst.0 {
            worst = (p, what);
        }
    };
    for n in [2u32, 8, 32] {
        for b in [1.0f64, 2.0] {
            let polya = Polya::new(PolyaParams::new(1.0 / n as f64, (-1.0 / b).exp()).unwrap()).unwrap();
            let mut rng = RngStream::new(1).split(u64::from(n)).split(b as u64);
            let sums =
                symmetric_bins((0..SAMPLES).map(|_| {
                    (0..n).map(|_| polya.sample(&mut rng) as i64 - polya.sample(&mut rng) as i64).sum::<i64>()
                }));
            let direct = laplace(b);
            let reference = symmetric_bins((0..SAMPLES).map(|_| direct.sample(&mut rng)));
            record(two_sample(&sums, &reference), format!("polya n={n} b={b}"));
        }
    }
    let mut rng = RngStream::new(2);
    let (a, b, whole) = (skellam(1.5), skellam(2.5), skellam(4.0));
    let sums = symmetric_bins((0..SAMPLES).map(|_| a.sample(&mut rng) + b.sample(&mut rng)));
    let direct = symmetric_bins((0..SAMPLES).map(|_| whole.sample(&mut rng)));
    record(two_sample(&sums, &direct), "skellam closure".into());

    let gauss = DiscreteGaussian::new(DiscreteGaussianParams::new(1.0).unwrap()).unwrap();
    let counts = symmetric_bins((0..SAMPLES).map(|_| gauss.sample(&mut rng)));
    record(goodness_of_fit(&counts, &symmetric_probs(|x| discrete_gaussian_pmf(1.0, x))), "discrete gaussian".into());

    let elapsed = start.elapsed();
    verdict(
        worst.0 > MIN_P_VALUE && elapsed < DISTRIBUTION_BUDGET,
        format!("min p = {:.4} ({}), {:.1}s", worst.0, worst.1, elapsed.as_secs_f64()),
    )
}

fn tail_formula() -> Verdict {
    let mut worst: f64 = 0.0;
    for (i, b) in [0.5, 1.0, 2.0, 5.0].into_iter().enumerate() {
        let dist = laplace(b);
        let mut rng = RngStream::new(3).split(i as u64);
        let draws: Vec<i64> = (0..SAMPLES).map(|_| dist.sample(&mut rng)).collect();
        for m in [0u64, 1, 2, 3, 5, 10] {
            let freq = draws.iter().filter(|&&x| x > m as i64).count() as f64 / SAMPLES as f64;
            worst = worst.max((freq - discrete_laplace_tail(b, m).unwrap()).abs());
        }
    }
    verdict(worst <= TAIL_TOLERANCE, format!("max |MC - closed form| = {worst:.2e} (tol {TAIL_TOLERANCE})"))
}

fn privacy_audit() -> Verdict {
    let mut worst_excess = f64::NEG_INFINITY;
    let mut cases = 0;
    for eps in [0.5, 1.0] {
        let spec = ProtocolSpec::new(TrustModel::Distributed, Mechanism::DiscreteLaplacePolya, eps, 1.0, 0.1);
        for n in 1..=3u64 {
            let derived = spec.derive(n).unwrap().g;
            for g in [1, 2, 3, derived] {
                let report = audit_llr(&spec.derive_with_precision(n, g).unwrap(), AUTO_TRUNCATION).unwrap();
                worst_excess = worst_excess.max(report.max_llr - eps);
                cases += 1;
            }
        }
    }
    verdict(
        worst_excess <= AUDIT_SLACK,
        format!("max(LLR - eps) = {worst_excess:.3e} over {cases} cases (slack {AUDIT_SLACK})"),
    )
}

fn accountant_formulas() -> Verdict {
    let skellam = rdp_skellam(2.0, 1.0, 1.0).unwrap();
    let cdp = cdp_discrete_gaussian(1.0, 1.0, 4).unwrap();
    let comp = advanced_composition(0.5, 1e-6, 10).unwrap();
    verdict(
        skellam == 2.5 && (cdp - 1.000129).abs() <= 1e-5 && (comp - 0.01504).abs() <= 1e-5,
        format!("rdp_skellam = {skellam}, cdp = {cdp:.7}, advanced = {comp:.7}"),
    )
}

fn analyzer_exactness() -> Verdict {
    let mut checked = 0;
    let mut wrong = 0;
    for n in 1..=4u64 {
        for g in 1..=4u64 {
            for tau in 1..=4u64 {
                let params = ProtocolParams::with_precision(
                    TrustModel::Distributed,
                    Mechanism::DiscreteLaplacePolya,
                    1.0,
                    n,
                    g,
                    tau,
                    0.1,
                )
                .unwrap();
                for noisy in -(tau as i64)..=(n * g + tau) as i64 {
                    let y = noisy.rem_euclid(params.m as i64) as u64;
                    let expected = noisy as f64 / g as f64;
                    let via_view = analyze(&secagg(&[y], params.m).unwrap(), &params).unwrap();
                    if decode(y, &params) != expected || via_view != expected {
                        wrong += 1;
                    }
                    checked += 1;
                }
            }
        }
    }
    verdict(wrong == 0, format!("{wrong} mismatches over {checked} noisy sums"))
}

fn optimal_arm_survival() -> Verdict {
    const RUNS: usize = 200;
    let p = 0.05;
    let start = Instant::now();
    let spec = ProtocolSpec::new(TrustModel::Distributed, Mechanism::DiscreteLaplacePolya, 0.5, 1.0, p);
    let mut eliminated = 0;
    for run in 0..RUNS {
        let root = RngStream::new(5).split(run as u64);
        let inst = generate_instance(&InstanceKind::Easy, 5, &mut root.split_named("instance")).unwrap();
        eliminated +=
            run_batched_se(&inst, &spec, 50_000, &root.split_named("run")).unwrap().eliminated_optimal() as usize;
    }
    let frac = eliminated as f64 / RUNS as f64;
    let bound = 3.0 * p + 3.0 * binomial_se(3.0 * p, RUNS);
    let elapsed = start.elapsed();
    verdict(
        frac <= bound && elapsed < SURVIVAL_BUDGET,
        format!("a* eliminated in {eliminated}/{RUNS} = {frac:.3} (bound {bound:.3}), {:.1}s", elapsed.as_secs_f64()),
    )
}

/// Mean final time-average regret per (label, ε).
fn final_means(rows: &[ResultRow], horizon: u64) -> BTreeMap<(String, u64), f64> {
    let mut acc: BTreeMap<(String, u64), (f64, usize)> = BTreeMap::new();
    for r in rows.iter().filter(|r| r.t == horizon) {
        let e = acc.entry((r.label.clone(), r.epsilon.to_bits())).or_default();
        e.0 += r.time_avg_regret;
        e.1 += 1;
    }
    acc.into_iter().map(|(k, (sum, n))| (k, sum / n as f64)).collect()
}

const FIGURE_GRID: &str = r#"
K = 10
T = 200000
instance = "easy"
p = 0.1
num_instances = 20
seed = 2022

[[algorithm]]
label = "Dist-DP-SE"
trust = "distributed"
mechanism = "discrete-laplace-polya"
epsilon = [0.1, 0.5, 1.0]

[[algorithm]]
label = "Dist-RDP-SE"
trust = "distributed"
mechanism = "skellam"
s = 10
epsilon = [0.1, 0.5, 1.0]

[[algorithm]]
label = "DP-SE"
trust = "central"
mechanism = "continuous-laplace-central"
epsilon = [0.1, 0.5, 1.0]
"#;

fn figure_one() -> Verdict {
    let start = Instant::now();
    let config = ExperimentConfig::from_toml_str(FIGURE_GRID).unwrap();
    let means = final_means(&run_experiment(&config).unwrap(), config.horizon);
    let at = |label: &str, eps: f64| means[&(label.to_string(), eps.to_bits())];
    let ratio = at("Dist-DP-SE", 0.5) / at("DP-SE", 0.5);
    let matched = (1.0 / MATCH_FACTOR..=MATCH_FACTOR).contains(&ratio);
    let rdp_wins = at("Dist-RDP-SE", 0.1) <= at("Dist-DP-SE", 0.1);
    let monotone =
        ["Dist-DP-SE", "Dist-RDP-SE", "DP-SE"].iter().all(|l| at(l, 0.1) >= at(l, 0.5) && at(l, 0.5) >= at(l, 1.0));
    let elapsed = start.elapsed();
    verdict(
        matched && rdp_wins && monotone && elapsed < FIGURE_BUDGET,
        format!(
            "(i) Dist-DP-SE/DP-SE at 0.5 = {ratio:.3} [{}]; (ii) RDP {:.4} vs DP {:.4} at 0.1 [{}]; (iii) monotone in eps [{}]; {:.1}s",
            ok(matched),
            at("Dist-RDP-SE", 0.1),
            at("Dist-DP-SE", 0.1),
            ok(rdp_wins),
            ok(monotone),
            elapsed.as_secs_f64()
        ),
    )
}

const TRUST_GRID: &str = r#"
K = 10
T = 200000
instance = "easy"
p = 0.1
num_instances = 20
seed = 7

[[algorithm]]
label = "central"
trust = "central"
mechanism = "continuous-laplace-central"
epsilon = 0.5

[[algorithm]]
label = "distributed"
trust = "distributed"
mechanism = "discrete-laplace-polya"
epsilon = 0.5

[[algorithm]]
label = "local"
trust = "local"
mechanism = "discrete-laplace-polya"
epsilon = 0.5
"#;

fn trust_ordering() -> Verdict {
    let config = ExperimentConfig::from_toml_str(TRUST_GRID).unwrap();
    let means = final_means(&run_experiment(&config).unwrap(), config.horizon);
    let at = |label: &str| means[&(label.to_string(), 0.5f64.to_bits())];
    let (c, d, l) = (at("central"), at("distributed"), at("local"));
    verdict(c <= d && d <= l, format!("central {c:.4} <= distributed {d:.4} <= local {l:.4}"))
}

fn ok(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "fails"
    }
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("distributional correctness", distributional),
        ("exact tail formula", tail_formula),
        ("privacy audit", privacy_audit),
        ("accountant formulas", accountant_formulas),
        ("analyzer exactness", analyzer_exactness),
        ("optimal-arm survival", optimal_arm_survival),
        ("figure-1 qualitative reproduction", figure_one),
        ("trust-model ordering", trust_ordering),
    ];
    let mut failures = 0;
    for (name, check) in criteria {
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| verdict(false, "panicked"));
        println!("{} {name}: {}", if result.pass { "PASS" } else { "FAIL" }, result.detail);
        failures += usize::from(!result.pass);
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
