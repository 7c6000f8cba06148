//! `dpbandit` command-line front end.
//!
//! Exit codes: 0 on success, 2 for bad configs or parameters, 3 when a run
//! fails for any other reason.

mod kv;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use dpbandit::accountant::{
    advanced_composition, rdp_to_approx_dp_with_order, returning_users_variance, PrivacyReport, RdpCurve, ReturningMode,
};
use dpbandit::experiments::{run_experiment_with_jobs, write_csv, write_csv_path, ExperimentConfig};
use dpbandit::noise::{
    discrete_gaussian_tail_bound, discrete_laplace_tail, skellam_tail_radius, DiscreteGaussian, DiscreteGaussianParams,
    DiscreteLaplace, DiscreteLaplaceParams, Polya, PolyaParams, RngStream, Skellam, SkellamParams,
};
use dpbandit::protocol::{audit_llr, Aggregation, Mechanism, ProtocolSpec, TrustModel, AUTO_TRUNCATION};
use dpbandit::{Error, Result};

use kv::KeyValues;

#[derive(Parser)]
#[command(name = "dpbandit", version, about = "Differentially private bandit simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment config and write the results CSV.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        /// Worker threads (default: all cores).
        #[arg(long)]
        jobs: Option<usize>,
        /// Output path; overrides the config's `output`. `-` means stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Draw from a noise distribution or evaluate its tail.
    Noise {
        action: NoiseAction,
        #[arg(long)]
        mechanism: NoiseKind,
        #[arg(long, num_args = 0.., value_name = "KEY=VALUE")]
        params: Vec<String>,
    },
    /// Privacy accounting.
    Account {
        action: AccountAction,
        #[arg(long, num_args = 0.., value_name = "KEY=VALUE")]
        params: Vec<String>,
    },
    /// Exact LLR audit of the pure-DP protocol on n ≤ 3 users.
    Audit {
        #[arg(long)]
        epsilon: f64,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        g: u64,
        #[arg(long, default_value = "distributed")]
        trust: String,
        #[arg(long, default_value_t = 0.1)]
        p: f64,
        /// Per-component support cap; 0 picks one automatically.
        #[arg(long, default_value_t = AUTO_TRUNCATION)]
        truncation: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum NoiseAction {
    Sample,
    Tail,
}

#[derive(Clone, Copy, ValueEnum)]
enum NoiseKind {
    Polya,
    DiscreteLaplace,
    Skellam,
    DiscreteGaussian,
}

#[derive(Clone, Copy, ValueEnum)]
enum AccountAction {
    Rdp,
    Convert,
    Compose,
    Returning,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut stdout = std::io::stdout().lock();
    match run(cli.command, &mut stdout) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_config_error() {
                ExitCode::from(2)
            } else {
                ExitCode::from(3)
            }
        }
    }
}

fn parse_config<T: std::str::FromStr<Err = Error>>(raw: &str) -> Result<T> {
    raw.parse().map_err(|e: Error| Error::Config(e.to_string()))
}

fn run(command: Command, out: &mut impl Write) -> Result<()> {
    match command {
        Command::Simulate { config, jobs, out: path } => simulate(config, jobs, path, out),
        Command::Noise { action, mechanism, params } => noise(action, mechanism, KeyValues::parse(&params)?, out),
        Command::Account { action, params } => account(action, KeyValues::parse(&params)?, out),
        Command::Audit { epsilon, n, g, trust, p, truncation } => {
            let spec = ProtocolSpec::new(parse_config(&trust)?, Mechanism::DiscreteLaplacePolya, epsilon, 1.0, p);
            let params = spec.derive_with_precision(n, g)?;
            let report = audit_llr(&params, truncation)?;
            writeln!(out, "max_llr: {}", report.max_llr)?;
            if let Some(m) = report.max_llr_modular {
                writeln!(out, "max_llr_modular: {m}")?;
            }
            writeln!(out, "epsilon: {epsilon}")?;
            writeln!(out, "within_budget: {}", report.max_llr <= epsilon + 1e-6)?;
            writeln!(out, "truncation: {}", report.truncation)?;
            writeln!(out, "window: {}", report.window)?;
            writeln!(out, "truncated_mass: {:e}", report.truncated_mass)?;
            writeln!(out, "pairs: {}", report.pairs)?;
            Ok(())
        }
    }
}

fn simulate(config: PathBuf, jobs: Option<usize>, path: Option<PathBuf>, out: &mut impl Write) -> Result<()> {
    let config = ExperimentConfig::from_path(&config)?;
    let rows = run_experiment_with_jobs(&config, jobs)?;
    match path.or_else(|| config.output.clone()) {
        Some(p) if p.as_os_str() != "-" => {
            write_csv_path(&rows, &p)?;
            eprintln!("wrote {} rows to {}", rows.len(), p.display());
        }
        _ => write_csv(&rows, &mut *out)?,
    }
    Ok(())
}

fn noise(action: NoiseAction, kind: NoiseKind, mut params: KeyValues, out: &mut impl Write) -> Result<()> {
    match action {
        NoiseAction::Sample => {
            let count: u64 = params.get_or("count", 1)?;
            let mut rng = RngStream::new(params.get_or("seed", 0)?);
            let mut draw: Box<dyn FnMut(&mut RngStream) -> i64> = match kind {
                NoiseKind::Polya => {
                    let sampler = Polya::new(PolyaParams::new(params.require("r")?, params.require("beta")?)?)?;
                    Box::new(move |rng| sampler.sample(rng) as i64)
                }
                NoiseKind::DiscreteLaplace => {
                    let sampler = DiscreteLaplace::new(DiscreteLaplaceParams::new(params.require("b")?)?)?;
                    Box::new(move |rng| sampler.sample(rng))
                }
                NoiseKind::Skellam => {
                    let sampler = Skellam::new(SkellamParams::new(params.require("sigma2")?)?)?;
                    Box::new(move |rng| sampler.sample(rng))
                }
                NoiseKind::DiscreteGaussian => {
                    let sampler = DiscreteGaussian::new(DiscreteGaussianParams::new(params.require("sigma2")?)?)?;
                    Box::new(move |rng| sampler.sample(rng))
                }
            };
            params.finish()?;
            for _ in 0..count {
                writeln!(out, "{}", draw(&mut rng))?;
            }
        }
        NoiseAction::Tail => {
            let (key, value) = match kind {
                NoiseKind::DiscreteLaplace => {
                    ("tail", discrete_laplace_tail(params.require("b")?, params.require("m")?)?)
                }
                NoiseKind::Skellam => {
                    let sigma2: f64 = params.require("sigma2")?;
                    ("radius", skellam_tail_radius(sigma2.sqrt(), params.require("p")?)?)
                }
                NoiseKind::DiscreteGaussian => {
                    let sigma2: f64 = params.require("sigma2")?;
                    if sigma2.is_nan() || sigma2 <= 0.0 {
                        return Err(Error::Config(format!("sigma2 must be positive, got {sigma2}")));
                    }
                    ("tail_bound", discrete_gaussian_tail_bound(sigma2, params.require("t")?))
                }
                NoiseKind::Polya => return Err(Error::Config("no tail formula for polya".into())),
            };
            params.finish()?;
            writeln!(out, "{key}: {value}")?;
        }
    }
    Ok(())
}

fn account(action: AccountAction, mut params: KeyValues, out: &mut impl Write) -> Result<()> {
    match action {
        AccountAction::Rdp => {
            let trust: TrustModel = parse_config(&params.get_or("trust", "distributed".to_string())?)?;
            let mechanism: Mechanism = parse_config(&params.require::<String>("mechanism")?)?;
            let aggregation: Aggregation = parse_config(&params.get_or("aggregation", "perfect".to_string())?)?;
            let default_s =
                if matches!(mechanism, Mechanism::Skellam | Mechanism::DiscreteGaussian) { 10.0 } else { 1.0 };
            let spec =
                ProtocolSpec::new(trust, mechanism, params.require("epsilon")?, params.get_or("s", default_s)?, 0.1)
                    .with_aggregation(aggregation);
            let horizon = params.get_or("T", 200_000u64)?;
            let delta = params.optional("delta")?;
            let alpha: Option<f64> = params.optional("alpha")?;
            params.finish()?;
            let report = PrivacyReport::for_protocol(&spec, horizon, delta)?;
            write!(out, "{}", report.render())?;
            if let (Some(alpha), Some(curve)) = (alpha, &report.rdp) {
                writeln!(out, "rdp_at_alpha: {}", curve.eval(alpha)?)?;
            }
        }
        AccountAction::Convert => {
            let epsilon: f64 = params.require("epsilon")?;
            let curve = match params.get_or("curve", "concentrated".to_string())?.as_str() {
                "concentrated" => RdpCurve::Concentrated { epsilon },
                "skellam" => RdpCurve::Skellam { epsilon, s: params.get_or("s", 10.0)?, batch: params.optional("n")? },
                other => return Err(Error::Config(format!("unknown curve {other:?}"))),
            };
            let curve = curve.compose(params.get_or("times", 1)?);
            let delta: f64 = params.require("delta")?;
            params.finish()?;
            let (eps, alpha) = rdp_to_approx_dp_with_order(&curve, delta)?;
            writeln!(out, "approx_eps: {eps}")?;
            writeln!(out, "approx_delta: {delta}")?;
            writeln!(out, "best_alpha: {alpha}")?;
        }
        AccountAction::Compose => {
            let total: f64 = params.require("epsilon")?;
            let delta_prime: f64 = params.require("delta")?;
            let k: u64 = params.require("k")?;
            params.finish()?;
            writeln!(out, "per_step_eps: {}", advanced_composition(total, delta_prime, k)?)?;
        }
        AccountAction::Returning => {
            let batches: u64 = params.require("B")?;
            let epsilon: f64 = params.require("epsilon")?;
            let delta: f64 = params.require("delta")?;
            params.finish()?;
            let approx = returning_users_variance(batches, epsilon, delta, ReturningMode::ApproxDp)?;
            let rdp = returning_users_variance(batches, epsilon, delta, ReturningMode::Rdp)?;
            writeln!(out, "variance_approx_dp: {approx}")?;
            writeln!(out, "variance_rdp: {rdp}")?;
            writeln!(out, "ratio: {}", approx / rdp)?;
        }
    }
    Ok(())
}
