//! Scenario runner behind the `fluxshot` binary: config loading, experiment
//! execution, sweeps, result directories and reports.

pub mod config;
pub mod error;
pub mod experiments;
pub mod output;
pub mod report;
pub mod svg;
pub mod sweep;
pub mod table;

use std::path::{Path, PathBuf};
use std::time::Instant;

pub use config::ScenarioConfig;
pub use error::CliError;

/// Load, run and write one scenario; returns the result directory.
pub fn run_config(path: &Path, svg: bool) -> Result<PathBuf, CliError> {
    let cfg = ScenarioConfig::load(path)?;
    let start = Instant::now();
    let out = experiments::run_experiment(&cfg, svg)?;
    let dir = output::run_dir(&cfg.output_dir, cfg.experiment.name(), &cfg.short_hash());
    output::write_run(&dir, &out.files, &out.summary.config_hash, cfg.seed, &out.summary.experiment, start.elapsed().as_secs_f64())?;
    Ok(dir)
}

pub fn sweep_config(path: &Path, axis: sweep::Axis, grid: &[f64], svg: bool) -> Result<(PathBuf, usize), CliError> {
    let cfg = ScenarioConfig::load(path)?;
    let start = Instant::now();
    let out = sweep::run_sweep(&cfg, axis, grid, svg)?;
    let hash = &out.summary.config_hash;
    let dir = output::run_dir(&cfg.output_dir, &out.summary.experiment, &hash[..16]);
    output::write_run(&dir, &out.files, hash, cfg.seed, &out.summary.experiment, start.elapsed().as_secs_f64())?;
    Ok((dir, out.warnings))
}
