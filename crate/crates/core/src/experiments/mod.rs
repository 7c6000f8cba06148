//! Experiment orchestration: instance generation, config files, the cell
//! runner and the versioned CSV format read by the plotting script.
//!
//! Every (instance, algorithm, ε) cell draws from its own stream derived from
//! the config seed, so results do not depend on scheduling or on which other
//! algorithms are configured.

mod config;
mod instance;
mod output;
mod run;

pub use config::{
    geometric_checkpoints, AlgorithmSpec, ExperimentConfig, InstanceKind, DEFAULT_CHECKPOINTS, DEFAULT_HORIZON,
    DEFAULT_NUM_INSTANCES, DEFAULT_P, DEFAULT_SCALE,
};
pub use instance::{generate_instance, generate_instance_with, EASY_RANGE, HARD_RANGE};
pub use output::{format_float, read_csv, read_csv_path, write_csv, write_csv_path, CSV_COLUMNS, SCHEMA_TAG};
pub use run::{cell_stream, instance_stream, run_experiment, run_experiment_with_jobs, ResultRow};
