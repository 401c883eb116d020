//! Relaxation in the presence of leaked readout photons: prepare a level,
//! hold the cavity at a fraction `a_r` of the optimal readout amplitude for
//! `tau_leak`, then read out the ensemble.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::jump::{evolve, LevelTrajectory};
use super::rates::RateModel;
use super::schedule::ConstantPhotons;
use crate::model::{reflection, CavityParams};
use crate::rng;
use crate::shots::ReadoutConfig;
use crate::{Error, LevelLabel, Result};

pub const MIN_TRAJECTORIES: usize = 1000;
pub const MAX_AMPLITUDE_FRACTION: f64 = 1.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BackactionCurve {
    pub prepared: LevelLabel,
    pub a_r: f64,
    pub n_bar_leak: f64,
    pub tau_leak: Vec<f64>,
    /// Ensemble readout signal, 0 for pure g and 1 for pure e.
    pub signal: Vec<f64>,
}

/// Readout signal of `level` projected onto the g->e pointer axis, normalized
/// so g maps to 0 and e to 1.
pub fn level_signal(cavity: &CavityParams, drive_freq: f64, level: LevelLabel) -> Result<f64> {
    let g = reflection(cavity, drive_freq, LevelLabel::G)?;
    let e = reflection(cavity, drive_freq, LevelLabel::E)?;
    let x = reflection(cavity, drive_freq, level)?;
    let axis = e - g;
    if axis.norm_sqr() == 0.0 {
        return Err(Error::DegenerateInput("g and e pointer states coincide".into()));
    }
    Ok(((x - g) * axis.conj()).re / axis.norm_sqr())
}

#[allow(clippy::too_many_arguments)]
pub fn backaction_experiment(
    prepared: LevelLabel,
    a_r: f64,
    tau_leak_grid: &[f64],
    rates: &RateModel,
    cavity: &CavityParams,
    readout: &ReadoutConfig,
    n_traj: usize,
    seed: u64,
) -> Result<BackactionCurve> {
    if !(0.0..=MAX_AMPLITUDE_FRACTION).contains(&a_r) {
        return Err(Error::param("a_r", format!("must lie in [0, {MAX_AMPLITUDE_FRACTION}], got {a_r}")));
    }
    if n_traj < MIN_TRAJECTORIES {
        return Err(Error::param("n_traj", format!("need at least {MIN_TRAJECTORIES}, got {n_traj}")));
    }
    if tau_leak_grid.is_empty() || tau_leak_grid.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
        return Err(Error::param("tau_leak_grid", "must be a nonempty list of times >= 0"));
    }
    rates.validate()?;
    cavity.validate()?;
    let signals = rates
        .levels
        .iter()
        .map(|&l| level_signal(cavity, readout.drive_freq, l))
        .collect::<Result<Vec<_>>>()?;

    let n_bar_leak = a_r * a_r * readout.n_bar;
    let schedule = ConstantPhotons(n_bar_leak);
    let horizon = tau_leak_grid.iter().copied().fold(0.0, f64::max).max(f64::MIN_POSITIVE);

    // One trajectory per repetition, sampled at every grid time: the process
    // up to tau is the same as a fresh experiment of length tau.
    let trajectories: Vec<LevelTrajectory> = (0..n_traj)
        .into_par_iter()
        .map(|k| {
            let mut rng = rng::stream(seed, k as u64);
            evolve(prepared, rates, &schedule, horizon, &mut rng)
        })
        .collect::<Result<_>>()?;

    let signal = tau_leak_grid
        .iter()
        .map(|&tau| {
            let total: f64 = trajectories
                .iter()
                .map(|traj| signals[rates.index_of(traj.level_at(tau)).unwrap_or(0)])
                .sum();
            total / n_traj as f64
        })
        .collect();

    Ok(BackactionCurve {
        prepared,
        a_r,
        n_bar_leak,
        tau_leak: tau_leak_grid.to_vec(),
        signal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_signal_endpoints() {
        let c = CavityParams::reference_device();
        assert!(level_signal(&c, 7.167, LevelLabel::G).unwrap().abs() < 1e-12);
        assert!((level_signal(&c, 7.167, LevelLabel::E).unwrap() - 1.0).abs() < 1e-12);
        assert!(level_signal(&c, 7.167, LevelLabel::H).unwrap() > 1.0);
    }

    #[test]
    fn zero_amplitude_decays_to_thermal_level() {
        let c = CavityParams::reference_device();
        let t1 = 50e-6;
        let rates = RateModel::thermal_qubit(t1, 0.025, 0.32812).unwrap();
        let readout = ReadoutConfig::reference_jpa_off();
        let grid: Vec<f64> = (0..=10).map(|k| k as f64 * 0.2 * t1).collect();
        let curve = backaction_experiment(LevelLabel::E, 0.0, &grid, &rates, &c, &readout, 20_000, 4).unwrap();
        let p_eq = rates.base_rates[0][1] * t1;
        for (tau, s) in grid.iter().zip(&curve.signal) {
            let want = p_eq + (1.0 - p_eq) * (-tau / t1).exp();
            assert!((s - want).abs() < 0.015, "tau {tau}: {s} vs {want}");
        }
    }

    #[test]
    fn validation() {
        let c = CavityParams::reference_device();
        let rates = RateModel::thermal_qubit(50e-6, 0.025, 0.32812).unwrap();
        let r = ReadoutConfig::reference_jpa_off();
        assert!(backaction_experiment(LevelLabel::E, 2.0, &[0.0], &rates, &c, &r, 1000, 0).is_err());
        assert!(backaction_experiment(LevelLabel::E, 0.5, &[0.0], &rates, &c, &r, 10, 0).is_err());
        assert!(backaction_experiment(LevelLabel::E, 0.5, &[], &rates, &c, &r, 1000, 0).is_err());
    }
}
