//! Reductions over sweeps: shortest integration time reaching a target
//! overlap error, blob-mean trajectories over drive amplitude, histograms.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::shots::ShotBatch;
use crate::{Error, LevelLabel, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeToThreshold {
    Reached(f64),
    Unreachable,
}

impl TimeToThreshold {
    pub fn tau(self) -> Option<f64> {
        match self {
            TimeToThreshold::Reached(t) => Some(t),
            TimeToThreshold::Unreachable => None,
        }
    }
}

/// Smallest `tau_int` among `(tau_int, eps_snr)` grid points with
/// `eps_snr <= target`.
pub fn time_to_threshold(points: &[(f64, f64)], target: f64) -> Result<TimeToThreshold> {
    if !(target > 0.0 && target < 0.5) {
        return Err(Error::param("target_eps", format!("must lie in (0, 0.5), got {target}")));
    }
    Ok(points
        .iter()
        .filter(|p| p.1 <= target)
        .map(|p| p.0)
        .min_by(f64::total_cmp)
        .map_or(TimeToThreshold::Unreachable, TimeToThreshold::Reached))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlobMeans {
    pub amplitude: f64,
    pub mean_g: Complex64,
    pub mean_e: Complex64,
    /// Pooled per-quadrature standard deviation about the two means.
    pub sigma: f64,
}

impl BlobMeans {
    pub fn separation(&self) -> f64 {
        (self.mean_e - self.mean_g).norm()
    }
}

/// Sample means of the g- and e-prepared shots at each drive amplitude.
pub fn blob_mean_trajectory(batches: &[(f64, ShotBatch)]) -> Result<Vec<BlobMeans>> {
    batches
        .iter()
        .map(|(amplitude, batch)| {
            let g = batch.iq_for(LevelLabel::G);
            let e = batch.iq_for(LevelLabel::E);
            if g.len() < 2 || e.len() < 2 {
                return Err(Error::DegenerateInput(format!("amplitude {amplitude}: too few g/e shots")));
            }
            let mg = g.iter().sum::<Complex64>() / g.len() as f64;
            let me = e.iter().sum::<Complex64>() / e.len() as f64;
            let ss: f64 = g.iter().map(|z| (z - mg).norm_sqr()).sum::<f64>()
                + e.iter().map(|z| (z - me).norm_sqr()).sum::<f64>();
            let dof = 2.0 * (g.len() + e.len() - 2) as f64;
            Ok(BlobMeans {
                amplitude: *amplitude,
                mean_g: mg,
                mean_e: me,
                sigma: (ss / dof).sqrt(),
            })
        })
        .collect()
}

/// `bin_center,count_g,count_e` over `bins` equal bins spanning all I values.
pub fn histogram_csv(g: &[f64], e: &[f64], bins: usize) -> Result<String> {
    if bins == 0 || (g.is_empty() && e.is_empty()) {
        return Err(Error::DegenerateInput("histogram needs data and at least one bin".into()));
    }
    let (lo, hi) = g
        .iter()
        .chain(e)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let width = if hi > lo { (hi - lo) / bins as f64 } else { 1.0 };
    let index = |v: f64| (((v - lo) / width) as usize).min(bins - 1);
    let mut counts = vec![[0usize; 2]; bins];
    for &v in g {
        counts[index(v)][0] += 1;
    }
    for &v in e {
        counts[index(v)][1] += 1;
    }
    let mut out = String::from("bin_center,count_g,count_e\n");
    for (k, c) in counts.iter().enumerate() {
        let center = lo + (k as f64 + 0.5) * width;
        writeln!(out, "{center},{},{}", c[0], c[1]).expect("write to string");
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn picks_shortest_qualifying_time() {
        let pts = [(1e-6, 0.02), (2e-6, 0.006), (3e-6, 0.004), (4e-6, 0.001)];
        assert_eq!(time_to_threshold(&pts, 0.005).unwrap(), TimeToThreshold::Reached(3e-6));
        assert_eq!(time_to_threshold(&pts, 1e-4).unwrap(), TimeToThreshold::Unreachable);
        assert!(time_to_threshold(&pts, 0.5).is_err());
    }

    #[test]
    fn histogram_counts_everything() {
        let g = [0.0, 0.1, 0.2, 0.9];
        let e = [1.0, 0.95];
        let csv = histogram_csv(&g, &e, 4).unwrap();
        let rows: Vec<&str> = csv.lines().collect();
        assert_eq!(rows.len(), 5);
        let total: usize = rows[1..]
            .iter()
            .map(|r| r.split(',').skip(1).map(|c| c.parse::<usize>().unwrap()).sum::<usize>())
            .sum();
        assert_eq!(total, 6);
    }
}
