//! Experiment runner behind the `spike-engine` binary: config resolution,
//! experiment execution and artifact writing.

pub mod config;
pub mod error;
pub mod experiments;
pub mod output;

use std::path::PathBuf;
use std::time::Instant;

pub use config::{Experiment, ExperimentConfig, Overrides};
pub use error::CliError;

/// Environment variable naming the default output directory.
pub const OUT_ENV: &str = "SPIKE_ENGINE_OUT";

/// Output directory: the explicit choice, else `$SPIKE_ENGINE_OUT/<experiment>`,
/// else `spike-engine-out/<experiment>`.
pub fn output_dir(cfg: &ExperimentConfig, env: Option<PathBuf>) -> PathBuf {
    cfg.output_dir
        .clone()
        .unwrap_or_else(|| env.unwrap_or_else(|| PathBuf::from("spike-engine-out")).join(cfg.experiment.as_str()))
}

/// Runs `cfg` on `workers` threads (global pool when `None`) and writes
/// its artifacts. Returns the manifest path.
pub fn run_and_write(
    cfg: &ExperimentConfig,
    workers: Option<usize>,
    gnuplot_friendly: bool,
    env_out: Option<PathBuf>,
) -> Result<PathBuf, CliError> {
    let dir = output_dir(cfg, env_out);
    let start = Instant::now();
    let (artifacts, used) = spike_core::par::install(workers, || {
        experiments::run(cfg).map(|a| (a, spike_core::par::current_workers()))
    })
    .map_err(CliError::Workers)??;
    let opts = output::WriteOptions { gnuplot_friendly, wall_time_s: start.elapsed().as_secs_f64(), workers: used };
    output::write_run(&dir, cfg, &artifacts, &opts)
}
