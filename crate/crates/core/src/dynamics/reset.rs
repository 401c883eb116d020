//! Sideband cooling as a three-state rate problem over `|e,0>`, `|g,1>` and
//! `|g,0>`: the two-photon drive exchanges the first two at `sideband_rate`,
//! the cavity photon leaks out at `cavity_kappa`, and optional
//! re-thermalization moves population between `|g,0>` and `|e,0>`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::master::propagate_populations;
use crate::error::{ensure_non_negative, ensure_positive};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResetConfig {
    /// `|e,0> <-> |g,1>` exchange rate, 1/s.
    pub sideband_rate: f64,
    /// Cooling pulse length, s.
    pub duration: f64,
    /// Cavity energy decay rate, 1/s.
    pub cavity_kappa: f64,
    /// `|g,0> -> |e,0>` rate during the pulse, 1/s.
    #[serde(default)]
    pub rethermalization_up: f64,
    /// `|e,0> -> |g,0>` rate during the pulse (qubit T1), 1/s.
    #[serde(default)]
    pub rethermalization_down: f64,
}

// State order in the generator.
const EXCITED: usize = 0;
const PHOTON: usize = 1;
const GROUND: usize = 2;

impl ResetConfig {
    pub fn validate(&self) -> Result<()> {
        ensure_non_negative("sideband_rate", self.sideband_rate)?;
        ensure_positive("duration", self.duration)?;
        ensure_positive("cavity_kappa", self.cavity_kappa)?;
        ensure_non_negative("rethermalization_up", self.rethermalization_up)?;
        ensure_non_negative("rethermalization_down", self.rethermalization_down)
    }

    pub fn generator(&self) -> DMatrix<f64> {
        let s = self.sideband_rate;
        let mut q = DMatrix::zeros(3, 3);
        q[(EXCITED, PHOTON)] = s;
        q[(PHOTON, EXCITED)] = s;
        q[(PHOTON, GROUND)] = self.cavity_kappa;
        q[(EXCITED, GROUND)] = self.rethermalization_down;
        q[(GROUND, EXCITED)] = self.rethermalization_up;
        for i in 0..3 {
            let total: f64 = (0..3).filter(|&j| j != i).map(|j| q[(i, j)]).sum();
            q[(i, i)] = -total;
        }
        q
    }

    /// Long-pulse limit of the residual excited population.
    pub fn steady_residual(&self) -> f64 {
        let (s, k, u) = (self.sideband_rate, self.cavity_kappa, self.rethermalization_up);
        if u == 0.0 {
            return 0.0;
        }
        let r = self.rethermalization_down + s * k / (s + k);
        1.0 / (1.0 + s / (s + k) + r / u)
    }

    /// Re-thermalization (up) rate for which the long-pulse residual equals
    /// `target`, keeping the other rates.
    pub fn rethermalization_for_residual(&self, target: f64) -> Result<f64> {
        let (s, k) = (self.sideband_rate, self.cavity_kappa);
        let denom = 1.0 / target - 1.0 - s / (s + k);
        if !(target > 0.0) || denom <= 0.0 {
            return Err(Error::param("target", format!("residual {target} is not reachable")));
        }
        let r = self.rethermalization_down + s * k / (s + k);
        Ok(r / denom)
    }
}

/// Populations `[|e,0>, |g,1>, |g,0>]` after `time` starting from a thermal
/// qubit with excited population `p_e_initial` and an empty cavity.
fn populations(p_e_initial: f64, cfg: &ResetConfig, time: f64) -> Vec<f64> {
    let p0 = [p_e_initial, 0.0, 1.0 - p_e_initial];
    propagate_populations(&cfg.generator(), &p0, time)
}

/// Residual qubit excited-state population after the cooling pulse.
pub fn reset_simulate(p_e_initial: f64, cfg: &ResetConfig) -> Result<f64> {
    check_initial(p_e_initial)?;
    cfg.validate()?;
    Ok(populations(p_e_initial, cfg, cfg.duration)[EXCITED])
}

/// `(t, [|e,0>, |g,1>, |g,0>])` sampled at `points + 1` evenly spaced times.
pub fn reset_trace(p_e_initial: f64, cfg: &ResetConfig, points: usize) -> Result<Vec<(f64, [f64; 3])>> {
    check_initial(p_e_initial)?;
    cfg.validate()?;
    let points = points.max(1);
    Ok((0..=points)
        .map(|k| {
            let t = cfg.duration * k as f64 / points as f64;
            let p = populations(p_e_initial, cfg, t);
            (t, [p[0], p[1], p[2]])
        })
        .collect())
}

fn check_initial(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::param("p_e_initial", format!("must lie in [0, 1], got {p}")))
    }
}
