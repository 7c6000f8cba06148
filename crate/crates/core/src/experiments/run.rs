use rayon::prelude::*;

use super::{generate_instance_with, AlgorithmSpec, ExperimentConfig};
use crate::bandit::{run_batched_se, BanditInstance};
use crate::error::{Error, Result};
use crate::noise::RngStream;

/// One checkpoint of one cell.
#[derive(Clone, Debug, PartialEq)]
pub struct ResultRow {
    pub instance_id: usize,
    pub seed: u64,
    pub label: String,
    pub epsilon: f64,
    pub s: f64,
    pub t: u64,
    pub cumulative_regret: f64,
    pub time_avg_regret: f64,
    pub eliminated_optimal: bool,
}

/// Stream that draws the means of instance `instance_id`.
pub fn instance_stream(seed: u64, instance_id: usize) -> RngStream {
    RngStream::new(seed).split_named("instance").split(instance_id as u64)
}

/// Stream of one (instance, algorithm, ε) cell.
pub fn cell_stream(seed: u64, instance_id: usize, label: &str, epsilon: f64) -> RngStream {
    RngStream::new(seed).split_named("cell").split(instance_id as u64).split_named(label).split(epsilon.to_bits())
}

/// Runs every instance × algorithm cell on the global rayon pool.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    run_experiment_with_jobs(config, None)
}

/// Runs every cell with at most `jobs` worker threads (all cores if `None`).
/// Rows are sorted by (instance_id, label, epsilon, t).
pub fn run_experiment_with_jobs(config: &ExperimentConfig, jobs: Option<usize>) -> Result<Vec<ResultRow>> {
    config.validate()?;
    let instances = (0..config.num_instances)
        .map(|id| {
            let mut rng = instance_stream(config.seed, id);
            generate_instance_with(&config.instance_kind, config.arms, config.reward, &mut rng)
        })
        .collect::<Result<Vec<_>>>()?;
    let cells: Vec<(usize, &AlgorithmSpec)> =
        (0..instances.len()).flat_map(|id| config.algorithms.iter().map(move |a| (id, a))).collect();
    let work = || {
        cells
            .par_iter()
            .map(|&(id, alg)| run_cell(config, id, &instances[id], alg))
            .collect::<Result<Vec<Vec<ResultRow>>>>()
    };
    let per_cell = match jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::Io(format!("cannot start worker pool: {e}")))?
            .install(work),
        None => work(),
    }?;
    let mut rows: Vec<ResultRow> = per_cell.into_iter().flatten().collect();
    rows.sort_by(|a, b| {
        a.instance_id
            .cmp(&b.instance_id)
            .then_with(|| a.label.cmp(&b.label))
            .then_with(|| a.epsilon.total_cmp(&b.epsilon))
            .then_with(|| a.t.cmp(&b.t))
    });
    Ok(rows)
}

fn run_cell(
    config: &ExperimentConfig,
    instance_id: usize,
    instance: &BanditInstance,
    alg: &AlgorithmSpec,
) -> Result<Vec<ResultRow>> {
    let rng = cell_stream(config.seed, instance_id, &alg.label, alg.protocol.epsilon);
    let trace = run_batched_se(instance, &alg.protocol, config.horizon, &rng).map_err(|e| Error::Cell {
        instance_id,
        label: alg.label.clone(),
        source: Box::new(e),
    })?;
    Ok(trace
        .at_checkpoints(&config.checkpoints)
        .into_iter()
        .map(|(t, regret)| ResultRow {
            instance_id,
            seed: config.seed,
            label: alg.label.clone(),
            epsilon: alg.protocol.epsilon,
            s: alg.protocol.s,
            t,
            cumulative_regret: regret,
            time_avg_regret: regret / t as f64,
            eliminated_optimal: trace.eliminated_optimal(),
        })
        .collect())
}
