//! One-dimensional sweeps of the single-shot (or QND) pipeline.

use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::cells;
use crate::config::ScenarioConfig;
use crate::error::CliError;
use crate::experiments::{point_report, Outputs, RunSummary};
use crate::svg::{plot, Series, Style};
use crate::table::Table;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    /// Scale factor `a` on the drive amplitude; photon number becomes `a^2 n_bar`.
    DriveAmp,
    TauInt,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::DriveAmp => "drive_amp",
            Axis::TauInt => "tau_int",
        }
    }
}

impl FromStr for Axis {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "drive_amp" => Ok(Axis::DriveAmp),
            "tau_int" => Ok(Axis::TauInt),
            other => Err(CliError::Validation(format!("unknown sweep axis `{other}` (use drive_amp or tau_int)"))),
        }
    }
}

pub fn parse_grid(text: &str) -> Result<Vec<f64>, CliError> {
    let grid = text
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| CliError::Validation(format!("grid value `{t}`: {e}"))))
        .collect::<Result<Vec<_>, _>>()?;
    check_grid(&grid)?;
    Ok(grid)
}

fn check_grid(grid: &[f64]) -> Result<(), CliError> {
    if grid.is_empty() {
        return Err(CliError::Validation("sweep grid is empty".into()));
    }
    if grid.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(CliError::Validation("sweep grid values must be finite and > 0".into()));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(CliError::Validation("sweep grid must be strictly ascending".into()));
    }
    Ok(())
}

/// Scenario with the readout moved to `value` along `axis`.
pub fn at_point(cfg: &ScenarioConfig, axis: Axis, value: f64) -> ScenarioConfig {
    let readout = match axis {
        Axis::DriveAmp => cfg.readout.with_n_bar(value * value * cfg.readout.n_bar),
        Axis::TauInt => cfg.readout.with_tau_int(value),
    };
    ScenarioConfig {
        readout,
        ..cfg.clone()
    }
}

/// Hash of the scenario together with the sweep definition.
pub fn sweep_hash(cfg: &ScenarioConfig, axis: Axis, grid: &[f64]) -> String {
    let text = format!("{}|{}|{:?}", cfg.hash(), axis.name(), grid);
    crate::output::sha256_hex(text.as_bytes())
}

pub fn run_sweep(cfg: &ScenarioConfig, axis: Axis, grid: &[f64], svg: bool) -> Result<Outputs, CliError> {
    cfg.validate()?;
    check_grid(grid)?;
    for &v in grid {
        at_point(cfg, axis, v).validate()?;
    }
    // Fail early on experiment kinds that cannot be swept.
    if !matches!(
        cfg.experiment,
        crate::config::Experiment::SingleShot { .. } | crate::config::Experiment::Qnd { .. }
    ) {
        return Err(CliError::Validation(format!(
            "sweeps need a single_shot or qnd experiment, found {}",
            cfg.experiment.name()
        )));
    }
    let results: Vec<_> = grid.par_iter().map(|&v| point_report(&at_point(cfg, axis, v))).collect();

    let mut table = Table::new(&[axis.name(), "n_bar", "tau_int", "F", "eps_snr", "eps_prep_mix", "snr", "threshold", "F_Q"]);
    let mut warnings = 0;
    let mut err_pts = Vec::new();
    let mut eps_pts = Vec::new();
    for (&v, res) in grid.iter().zip(&results) {
        let point = at_point(cfg, axis, v);
        let (n, t) = (point.readout.n_bar, point.readout.tau_int);
        match res {
            Ok(r) => {
                table.row(cells![v, n, t, r.fidelity, r.eps_snr, r.eps_prep_mix, r.snr, r.threshold, r.f_q.unwrap_or(f64::NAN)]);
                err_pts.push((v, 1.0 - r.fidelity));
                eps_pts.push((v, r.eps_snr));
            }
            Err(e) => {
                eprintln!("warning: {} = {v}: {e}", axis.name());
                warnings += 1;
                table.row(cells![v, n, t, f64::NAN, f64::NAN, f64::NAN, f64::NAN, f64::NAN, f64::NAN]);
            }
        }
    }
    let hash = sweep_hash(cfg, axis, grid);
    let mut files = vec![("sweep.csv".to_string(), table.into_bytes())];
    if svg {
        let text = plot(
            &format!("Errors along {}", axis.name()),
            axis.name(),
            "error",
            &[Series::new("1 - F", err_pts), Series::new("eps_snr", eps_pts)],
            Style::Line,
            true,
        );
        files.push(("sweep.svg".to_string(), text.into_bytes()));
    }
    let summary = RunSummary {
        experiment: format!("sweep_{}", axis.name()),
        config_hash: hash,
        seed: cfg.seed,
        metrics: [("points".to_string(), grid.len() as f64), ("warnings".to_string(), warnings as f64)]
            .into_iter()
            .collect(),
        details: json!({ "axis": axis, "grid": grid, "base": cfg.experiment.name() }),
    };
    let mut bytes = serde_json::to_vec_pretty(&summary).expect("serializable");
    bytes.push(b'\n');
    files.push(("result.json".to_string(), bytes));
    Ok(Outputs { files, summary, warnings })
}
