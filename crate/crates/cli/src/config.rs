//! Scenario files: one JSON document describing the device, rates, readout,
//! amplifier chains and the experiment to run.

use std::path::{Path, PathBuf};

use fluxshot_core::dynamics::{RateModel, ResetConfig};
use fluxshot_core::model::{CavityParams, FluxoniumParams};
use fluxshot_core::shots::{CkpGrid, NoiseConfig, ReadoutConfig};
use fluxshot_core::LevelLabel;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Coherence {
    pub t1_us: f64,
    pub t2r_us: f64,
    pub t2e_us: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Device {
    pub fluxonium: FluxoniumParams,
    pub cavity: CavityParams,
    pub coherence: Coherence,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoisePair {
    pub jpa_off: NoiseConfig,
    pub jpa_on: NoiseConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Amplifier {
    JpaOff,
    JpaOn,
}

impl NoisePair {
    pub fn pick(&self, amp: Amplifier) -> NoiseConfig {
        match amp {
            Amplifier::JpaOff => self.jpa_off,
            Amplifier::JpaOn => self.jpa_on,
        }
    }
}

fn default_bins() -> usize {
    60
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Experiment {
    SingleShot {
        amplifier: Amplifier,
        #[serde(default = "default_bins")]
        bins: usize,
    },
    /// Two identical readout pulses separated by `gap` seconds.
    Qnd {
        amplifier: Amplifier,
        gap: f64,
        #[serde(default = "default_bins")]
        bins: usize,
    },
    /// Full photon-number by integration-time grid.
    PowerSweep {
        amplifier: Amplifier,
        n_bar: Vec<f64>,
        tau_int: Vec<f64>,
        targets: Vec<f64>,
    },
    TimeSweep {
        amplifier: Amplifier,
        tau_int: Vec<f64>,
    },
    Backaction {
        prepared: LevelLabel,
        a_r: Vec<f64>,
        tau_leak: Vec<f64>,
        n_traj: usize,
    },
    Ckp {
        /// Undriven qubit frequency, GHz.
        qubit_freq: f64,
        /// Photon number at the dressed resonance, fixes the drive amplitude.
        n_bar_peak: f64,
        grid: CkpGrid,
    },
    Reset {
        reset: ResetConfig,
        /// Defaults to the thermal population of the rate model's anchor.
        #[serde(default)]
        p_e_initial: Option<f64>,
        #[serde(default = "default_trace_points")]
        points: usize,
    },
    Efficiency {
        amplifier: Amplifier,
        n_bar: Vec<f64>,
    },
}

fn default_trace_points() -> usize {
    101
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::SingleShot { .. } => "single_shot",
            Experiment::Qnd { .. } => "qnd",
            Experiment::PowerSweep { .. } => "power_sweep",
            Experiment::TimeSweep { .. } => "time_sweep",
            Experiment::Backaction { .. } => "backaction",
            Experiment::Ckp { .. } => "ckp",
            Experiment::Reset { .. } => "reset",
            Experiment::Efficiency { .. } => "efficiency",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub version: u32,
    pub device: Device,
    pub rates: RateModel,
    pub readout: ReadoutConfig,
    pub noise: NoisePair,
    pub experiment: Experiment,
    /// Shots per prepared state.
    pub n_shots: usize,
    pub seed: u64,
    pub output_dir: PathBuf,
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

fn check_grid(name: &str, grid: &[f64], positive: bool) -> Result<(), CliError> {
    if grid.is_empty() {
        return Err(invalid(format!("{name}: grid is empty")));
    }
    if grid.iter().any(|v| !v.is_finite() || (positive && *v <= 0.0) || *v < 0.0) {
        return Err(invalid(format!("{name}: grid values must be finite and {}", if positive { "> 0" } else { ">= 0" })));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid(format!("{name}: grid must be strictly ascending")));
    }
    Ok(())
}

impl ScenarioConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: ScenarioConfig = serde_json::from_str(text).map_err(|e| invalid(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.version != SCHEMA_VERSION {
            return Err(invalid(format!("unsupported config version {} (expected {SCHEMA_VERSION})", self.version)));
        }
        self.device.fluxonium.validate()?;
        self.device.cavity.validate()?;
        let c = &self.device.coherence;
        for (name, v) in [("t1_us", c.t1_us), ("t2r_us", c.t2r_us), ("t2e_us", c.t2e_us)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(invalid(format!("device.coherence.{name} must be > 0")));
            }
        }
        self.rates.validate()?;
        for level in &self.rates.levels {
            self.device.cavity.chi_of(*level)?;
        }
        self.readout.validate()?;
        self.noise.jpa_off.validate()?;
        self.noise.jpa_on.validate()?;
        if self.n_shots == 0 {
            return Err(invalid("n_shots must be >= 1"));
        }
        match &self.experiment {
            Experiment::SingleShot { bins, .. } | Experiment::Qnd { bins, .. } if *bins == 0 => {
                return Err(invalid("bins must be >= 1"));
            }
            Experiment::Qnd { gap, .. } if !(gap.is_finite() && *gap >= 0.0) => {
                return Err(invalid("qnd gap must be >= 0"));
            }
            Experiment::PowerSweep {
                n_bar, tau_int, targets, ..
            } => {
                check_grid("n_bar", n_bar, true)?;
                check_grid("tau_int", tau_int, true)?;
                if targets.is_empty() || targets.iter().any(|t| !(*t > 0.0 && *t < 0.5)) {
                    return Err(invalid("targets must lie in (0, 0.5)"));
                }
            }
            Experiment::TimeSweep { tau_int, .. } => check_grid("tau_int", tau_int, true)?,
            Experiment::Backaction {
                prepared, a_r, tau_leak, ..
            } => {
                self.rates.index_of(*prepared)?;
                check_grid("a_r", a_r, false)?;
                check_grid("tau_leak", tau_leak, false)?;
            }
            Experiment::Ckp {
                qubit_freq,
                n_bar_peak,
                grid,
            } => {
                grid.validate()?;
                if !(qubit_freq.is_finite() && *qubit_freq > 0.0) || !(n_bar_peak.is_finite() && *n_bar_peak >= 0.0) {
                    return Err(invalid("ckp qubit_freq must be > 0 and n_bar_peak >= 0"));
                }
            }
            Experiment::Reset {
                reset, p_e_initial, points,
            } => {
                reset.validate()?;
                if let Some(p) = p_e_initial {
                    if !(0.0..=1.0).contains(p) {
                        return Err(invalid("p_e_initial must lie in [0, 1]"));
                    }
                } else if self.rates.thermal.is_none() {
                    return Err(invalid("reset needs p_e_initial or a thermal anchor in rates"));
                }
                if *points < 2 {
                    return Err(invalid("reset trace needs at least 2 points"));
                }
            }
            Experiment::Efficiency { n_bar, .. } => {
                check_grid("n_bar", n_bar, true)?;
                if n_bar.len() < 4 {
                    return Err(invalid("efficiency needs at least 4 photon numbers"));
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// SHA-256 over the canonical serialization with `output_dir` blanked, so
    /// the same scenario written to different places hashes identically.
    pub fn hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.output_dir = PathBuf::new();
        let bytes = serde_json::to_vec(&canonical).expect("config serializes");
        hex::encode(Sha256::digest(&bytes))
    }

    /// Short form used in directory names.
    pub fn short_hash(&self) -> String {
        self.hash()[..16].to_string()
    }

    pub fn noise_for(&self, amp: Amplifier) -> NoiseConfig {
        self.noise.pick(amp)
    }
}
