//! Synthetic chi-kappa-power maps: qubit spectroscopy under a steady
//! resonator drive, swept over both drive frequencies.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_non_negative, ensure_positive};
use crate::model::{steady_photon_number, CavityParams};
use crate::rng;
use crate::{Error, LevelLabel, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CkpGrid {
    /// Resonator drive frequencies, GHz.
    pub resonator_freqs: Vec<f64>,
    /// Qubit drive frequencies, GHz.
    pub qubit_freqs: Vec<f64>,
    /// Half width of the qubit line, MHz.
    pub linewidth: f64,
    /// Additive Gaussian noise on the flip signal; zero for a clean map.
    #[serde(default)]
    pub noise: f64,
    #[serde(default)]
    pub seed: u64,
}

impl CkpGrid {
    /// Uniform grid with `nr` x `nq` points.
    pub fn uniform(resonator: (f64, f64), nr: usize, qubit: (f64, f64), nq: usize, linewidth: f64) -> Self {
        CkpGrid {
            resonator_freqs: linspace(resonator.0, resonator.1, nr),
            qubit_freqs: linspace(qubit.0, qubit.1, nq),
            linewidth,
            noise: 0.0,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.resonator_freqs.len() < 3 || self.qubit_freqs.len() < 3 {
            return Err(Error::param("grid", "need at least 3 points on each axis"));
        }
        ensure_positive("linewidth", self.linewidth)?;
        ensure_non_negative("noise", self.noise)
    }
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n < 2 {
        return vec![a; n];
    }
    (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect()
}

/// Qubit-flip probability indexed as `values[resonator][qubit]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CkpMap {
    pub prepared: LevelLabel,
    pub resonator_freqs: Vec<f64>,
    pub qubit_freqs: Vec<f64>,
    pub values: Vec<Vec<f64>>,
}

impl CkpMap {
    /// Qubit frequency of the strongest response in each resonator column.
    pub fn ridge(&self) -> Vec<f64> {
        self.values
            .iter()
            .map(|col| {
                let k = col
                    .iter()
                    .enumerate()
                    .max_by(|a, b| a.1.total_cmp(b.1))
                    .map_or(0, |(k, _)| k);
                self.qubit_freqs[k]
            })
            .collect()
    }
}

/// Stark-shifted qubit frequency (GHz) for resonator drive `drive_freq`.
pub fn stark_shifted_frequency(
    cavity: &CavityParams,
    qubit_freq: f64,
    drive_amp: f64,
    drive_freq: f64,
    prepared: LevelLabel,
) -> Result<f64> {
    let n = steady_photon_number(cavity, prepared, drive_amp, drive_freq)?;
    Ok(qubit_freq + cavity.chi_ge()? * n * 1e-3)
}

/// Flip-probability map for the qubit prepared in `prepared` (g or e).
pub fn ckp_map(
    cavity: &CavityParams,
    qubit_freq: f64,
    drive_amp: f64,
    grid: &CkpGrid,
    prepared: LevelLabel,
) -> Result<CkpMap> {
    cavity.validate()?;
    grid.validate()?;
    ensure_positive("qubit_freq", qubit_freq)?;
    ensure_non_negative("drive_amp", drive_amp)?;
    if !prepared.is_computational() {
        return Err(Error::param("prepared", "must be g or e"));
    }
    let mut noise_rng = rng::stream(grid.seed, prepared.index() as u64);
    let width = grid.linewidth * 1e-3;
    let mut values = Vec::with_capacity(grid.resonator_freqs.len());
    for &fr in &grid.resonator_freqs {
        let center = stark_shifted_frequency(cavity, qubit_freq, drive_amp, fr, prepared)?;
        let col = grid
            .qubit_freqs
            .iter()
            .map(|&fq| {
                let x = (fq - center) / width;
                let clean = 1.0 / (1.0 + x * x);
                if grid.noise > 0.0 {
                    let z: f64 = noise_rng.sample(StandardNormal);
                    clean + grid.noise * z
                } else {
                    clean
                }
            })
            .collect();
        values.push(col);
    }
    Ok(CkpMap {
        prepared,
        resonator_freqs: grid.resonator_freqs.clone(),
        qubit_freqs: grid.qubit_freqs.clone(),
        values,
    })
}
