//! Transition-rate model `r_ij(n) = base_ij + sum c_ij n^p_ij` over a finite set
//! of fluxonium levels.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::thermal::thermal_population;
use crate::error::{ensure_non_negative, ensure_positive};
use crate::{Error, LevelLabel, Result};

/// Photon-activated transition `from -> to` with rate `coeff * n^exponent`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MistTerm {
    pub from: LevelLabel,
    pub to: LevelLabel,
    /// 1/s at one photon.
    pub coeff: f64,
    pub exponent: f64,
}

/// Temperature and qubit frequency that fix the g<->e detailed-balance ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThermalAnchor {
    pub temperature: f64,
    pub qubit_freq: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RateModel {
    /// State space; matrix indices refer to positions in this list.
    pub levels: Vec<LevelLabel>,
    /// Photon-independent rates in 1/s, `base_rates[from][to]`.
    pub base_rates: Vec<Vec<f64>>,
    #[serde(default)]
    pub mist: Vec<MistTerm>,
    #[serde(default)]
    pub thermal: Option<ThermalAnchor>,
    /// Photon-independent rates are divided by this while at least one photon
    /// is in the cavity.
    #[serde(default = "one")]
    pub readout_t1_scale: f64,
}

fn one() -> f64 {
    1.0
}

const REF_H_DECAY: f64 = 500.0;
const REF_MIX_LINEAR: f64 = 20.0;
const REF_MIX_STEEP: f64 = 4e-6;
const REF_LEAK: f64 = 0.14;

/// Photon number above which the readout T1 scaling applies.
const READOUT_PHOTON_FLOOR: f64 = 1.0;

impl RateModel {
    /// Rate-free model over `levels`.
    pub fn empty(levels: Vec<LevelLabel>) -> Self {
        let n = levels.len();
        RateModel {
            levels,
            base_rates: vec![vec![0.0; n]; n],
            mist: Vec::new(),
            thermal: None,
            readout_t1_scale: 1.0,
        }
    }

    /// g/e model whose relaxation time is `t1` (s) and whose stationary excited
    /// population is the Boltzmann value at `temperature`:
    /// `down = (1 - p_eq) / t1`, `up = p_eq / t1`.
    pub fn thermal_qubit(t1: f64, temperature: f64, qubit_freq: f64) -> Result<Self> {
        ensure_positive("t1", t1)?;
        let p_eq = thermal_population(qubit_freq, temperature)?;
        let mut model = RateModel::empty(vec![LevelLabel::G, LevelLabel::E]);
        model.base_rates[1][0] = (1.0 - p_eq) / t1;
        model.base_rates[0][1] = p_eq / t1;
        model.thermal = Some(ThermalAnchor {
            temperature,
            qubit_freq,
        });
        Ok(model)
    }

    /// Thermal g/e qubit (T1 = 402 us, 25 mK, 328.12 MHz) plus h, with
    /// photon-activated g<->e mixing (linear, and a steep high-power term) and
    /// leakage into h. The photon-activated coefficients are not measured
    /// quantities; they are set so that the readout operating points, the
    /// back-action experiment and the power sweeps behave like the device.
    pub fn reference_device() -> Self {
        let mut model = RateModel::thermal_qubit(402e-6, 0.025, 0.32812)
            .expect("valid constants")
            .with_level(LevelLabel::H);
        model.base_rates[2][0] = REF_H_DECAY;
        model.base_rates[2][1] = REF_H_DECAY;
        model
            .with_mist(LevelLabel::G, LevelLabel::E, REF_MIX_LINEAR, 1.0)
            .with_mist(LevelLabel::E, LevelLabel::G, REF_MIX_LINEAR, 1.0)
            .with_mist(LevelLabel::G, LevelLabel::E, REF_MIX_STEEP, 4.0)
            .with_mist(LevelLabel::E, LevelLabel::G, REF_MIX_STEEP, 4.0)
            .with_mist(LevelLabel::G, LevelLabel::H, REF_LEAK, 2.0)
            .with_mist(LevelLabel::E, LevelLabel::H, REF_LEAK, 2.0)
    }

    /// Append a level with no rates attached.
    pub fn with_level(mut self, level: LevelLabel) -> Self {
        if !self.levels.contains(&level) {
            self.levels.push(level);
            for row in &mut self.base_rates {
                row.push(0.0);
            }
            self.base_rates.push(vec![0.0; self.levels.len()]);
        }
        self
    }

    pub fn with_base_rate(mut self, from: LevelLabel, to: LevelLabel, rate: f64) -> Result<Self> {
        let (i, j) = (self.index_of(from)?, self.index_of(to)?);
        self.base_rates[i][j] = rate;
        Ok(self)
    }

    pub fn with_mist(mut self, from: LevelLabel, to: LevelLabel, coeff: f64, exponent: f64) -> Self {
        self.mist.push(MistTerm {
            from,
            to,
            coeff,
            exponent,
        });
        self
    }

    pub fn n_levels(&self) -> usize {
        self.levels.len()
    }

    pub fn index_of(&self, level: LevelLabel) -> Result<usize> {
        self.levels
            .iter()
            .position(|l| *l == level)
            .ok_or(Error::UnknownLevel(level))
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.levels.len();
        if n == 0 {
            return Err(Error::param("levels", "rate model needs at least one level"));
        }
        if self.base_rates.len() != n || self.base_rates.iter().any(|r| r.len() != n) {
            return Err(Error::param("base_rates", format!("must be a {n}x{n} matrix")));
        }
        for row in &self.base_rates {
            for &r in row {
                ensure_non_negative("base_rates", r)?;
            }
        }
        for term in &self.mist {
            self.index_of(term.from)?;
            self.index_of(term.to)?;
            ensure_non_negative("mist.coeff", term.coeff)?;
            ensure_non_negative("mist.exponent", term.exponent)?;
        }
        ensure_positive("readout_t1_scale", self.readout_t1_scale)?;
        if let Some(anchor) = self.thermal {
            let (Ok(g), Ok(e)) = (self.index_of(LevelLabel::G), self.index_of(LevelLabel::E)) else {
                return Ok(());
            };
            let p = thermal_population(anchor.qubit_freq, anchor.temperature)?;
            let up = self.base_rates[g][e];
            let down = self.base_rates[e][g];
            let want = p / (1.0 - p);
            if (up > 0.0 || down > 0.0) && (up - want * down).abs() > 1e-6 * up.max(want * down) {
                return Err(Error::param(
                    "base_rates",
                    format!("g<->e rates {up}/{down} violate detailed balance at {} K", anchor.temperature),
                ));
            }
        }
        Ok(())
    }

    fn base_factor(&self, n_bar: f64) -> f64 {
        if n_bar >= READOUT_PHOTON_FLOOR {
            1.0 / self.readout_t1_scale
        } else {
            1.0
        }
    }

    /// Rate `i -> j` (indices into `levels`) at photon number `n_bar`.
    pub fn rate(&self, i: usize, j: usize, n_bar: f64) -> f64 {
        if i == j {
            return 0.0;
        }
        let mut r = self.base_rates[i][j] * self.base_factor(n_bar);
        for term in &self.mist {
            if self.levels[i] == term.from && self.levels[j] == term.to {
                r += mist_rate(term, n_bar);
            }
        }
        r
    }

    pub fn exit_rate(&self, i: usize, n_bar: f64) -> f64 {
        (0..self.levels.len()).map(|j| self.rate(i, j, n_bar)).sum()
    }

    /// Upper bound on the exit rate of level `i` for any photon number in
    /// `[0, n_max]`. Rates are nondecreasing in photon number apart from the
    /// readout T1 factor, which is bounded separately.
    pub fn exit_rate_bound(&self, i: usize, n_max: f64) -> f64 {
        let base: f64 = self.base_rates[i].iter().enumerate().filter(|(j, _)| *j != i).map(|(_, r)| r).sum();
        let factor = if n_max >= READOUT_PHOTON_FLOOR {
            (1.0 / self.readout_t1_scale).max(1.0)
        } else {
            1.0
        };
        let mist: f64 = self
            .mist
            .iter()
            .filter(|t| t.from == self.levels[i] && t.to != t.from)
            .map(|t| mist_rate(t, n_max))
            .sum();
        base * factor + mist
    }

    /// Generator `Q` with `Q[i][j] = r_ij` off the diagonal and rows summing
    /// to zero; populations evolve as `dp/dt = p Q`.
    pub fn generator(&self, n_bar: f64) -> DMatrix<f64> {
        let n = self.levels.len();
        let mut q = DMatrix::zeros(n, n);
        for i in 0..n {
            let mut total = 0.0;
            for j in 0..n {
                if i != j {
                    let r = self.rate(i, j, n_bar);
                    q[(i, j)] = r;
                    total += r;
                }
            }
            q[(i, i)] = -total;
        }
        q
    }

    /// Largest exit rate over all levels at `n_bar`.
    pub fn max_exit_rate(&self, n_bar: f64) -> f64 {
        (0..self.levels.len()).map(|i| self.exit_rate(i, n_bar)).fold(0.0, f64::max)
    }
}

fn mist_rate(term: &MistTerm, n_bar: f64) -> f64 {
    if term.coeff == 0.0 || n_bar <= 0.0 {
        return 0.0;
    }
    term.coeff * n_bar.powf(term.exponent)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thermal_qubit_obeys_detailed_balance() {
        let m = RateModel::thermal_qubit(402e-6, 0.025, 0.32812).unwrap();
        m.validate().unwrap();
        let up = m.base_rates[0][1];
        let down = m.base_rates[1][0];
        assert!(((up + down) * 402e-6 - 1.0).abs() < 1e-12);
        let p = up / (up + down);
        assert!((p - thermal_population(0.32812, 0.025).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn generator_rows_sum_to_zero() {
        let m = RateModel::thermal_qubit(100e-6, 0.03, 0.3)
            .unwrap()
            .with_level(LevelLabel::H)
            .with_mist(LevelLabel::G, LevelLabel::H, 0.1, 2.0)
            .with_mist(LevelLabel::G, LevelLabel::E, 5.0, 1.0)
            .with_base_rate(LevelLabel::H, LevelLabel::E, 1e3)
            .unwrap();
        m.validate().unwrap();
        let q = m.generator(50.0);
        for i in 0..3 {
            let s: f64 = q.row(i).iter().sum();
            assert!(s.abs() < 1e-9 * q[(i, i)].abs().max(1.0));
        }
        assert!((q[(0, 2)] - 0.1 * 2500.0).abs() < 1e-9);
        assert!(m.exit_rate_bound(0, 50.0) >= m.exit_rate(0, 30.0));
    }

    #[test]
    fn broken_detailed_balance_rejected() {
        let mut m = RateModel::thermal_qubit(100e-6, 0.03, 0.3).unwrap();
        m.base_rates[0][1] *= 2.0;
        assert!(m.validate().is_err());
        m.thermal = None;
        m.validate().unwrap();
    }

    #[test]
    fn negative_rates_rejected() {
        let mut m = RateModel::empty(vec![LevelLabel::G, LevelLabel::E]);
        m.base_rates[0][1] = -1.0;
        assert!(m.validate().is_err());
        let m = RateModel::empty(vec![LevelLabel::G]).with_mist(LevelLabel::G, LevelLabel::H, 1.0, 1.0);
        assert!(matches!(m.validate(), Err(Error::UnknownLevel(_))));
    }

    #[test]
    fn readout_scale_slows_base_rates_under_photons() {
        let mut m = RateModel::thermal_qubit(100e-6, 0.03, 0.3).unwrap();
        m.readout_t1_scale = 2.0;
        let quiet = m.rate(1, 0, 0.0);
        assert_eq!(m.rate(1, 0, 10.0), 0.5 * quiet);
        m.readout_t1_scale = 0.5;
        assert!(m.exit_rate_bound(1, 10.0) >= m.exit_rate(1, 10.0));
    }
}
