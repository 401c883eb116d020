//! Measurement efficiency and effective noise temperature from the slope of
//! SNR against `sqrt(n_bar)`.

use serde::{Deserialize, Serialize};

use crate::error::ensure_positive;
use crate::model::{phase_separation, CavityParams};
use crate::shots::{ReadoutConfig, ShotBatch};
use crate::LevelLabel;
use crate::units::{ghz_to_hz, BOLTZMANN, PLANCK};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyFit {
    pub n_n: f64,
    pub eta: f64,
    /// Effective noise temperature, K.
    pub t_n_eff: f64,
    pub slope: f64,
    pub slope_err: f64,
    pub intercept: f64,
    pub intercept_err: f64,
    pub r_squared: f64,
}

/// `eta = 2 sigma0^2 / n_n` with vacuum `sigma0^2 = 1/2`.
pub fn efficiency(n_n: f64) -> Result<f64> {
    ensure_positive("n_n", n_n)?;
    Ok(1.0 / n_n)
}

/// `n_n h f_r / k_B` in kelvin, `f_r` in GHz.
pub fn noise_temperature(n_n: f64, omega_r: f64) -> Result<f64> {
    ensure_positive("n_n", n_n)?;
    ensure_positive("omega_r", omega_r)?;
    Ok(n_n * PLANCK * ghz_to_hz(omega_r) / BOLTZMANN)
}

/// Ordinary least squares `y = slope x + intercept` with standard errors and R^2.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<(f64, f64, f64, f64, f64)> {
    if x.len() != y.len() || x.len() < 3 {
        return Err(Error::DegenerateInput("need at least 3 paired points".into()));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(Error::DegenerateInput("x values are all equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = x.iter().zip(y).map(|(a, b)| (b - slope * a - intercept).powi(2)).sum();
    let s2 = sse / (n - 2.0);
    let slope_err = (s2 / sxx).sqrt();
    let intercept_err = (s2 * (1.0 / n + mx * mx / sxx)).sqrt();
    let r_squared = if syy > 0.0 { 1.0 - sse / syy } else { 1.0 };
    Ok((slope, slope_err, intercept, intercept_err, r_squared))
}

/// SNR from sample moments of the I projection, `|mean_e - mean_g| / (sd_g + sd_e)`.
/// Unlike the mixture route this stays unbiased when the blobs overlap, which
/// is the regime the efficiency calibration works in.
pub fn moment_snr(batch: &ShotBatch) -> Result<f64> {
    let moments = |level| -> Result<(f64, f64)> {
        let v = batch.i_for(level);
        if v.len() < 2 {
            return Err(Error::DegenerateInput(format!("{} shots prepared in {level}", v.len())));
        }
        let n = v.len() as f64;
        let mean = v.iter().sum::<f64>() / n;
        let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        Ok((mean, var.sqrt()))
    };
    let (mg, sg) = moments(LevelLabel::G)?;
    let (me, se) = moments(LevelLabel::E)?;
    if !(sg + se > 0.0) {
        return Err(Error::DegenerateInput("zero variance".into()));
    }
    Ok((me - mg).abs() / (sg + se))
}

/// Invert `SNR = sqrt(2 n_bar kappa tau f / n_n) sin(phi)` from the slope of
/// `(sqrt(n_bar), SNR)` points taken at low photon number.
pub fn efficiency_fit(points: &[(f64, f64)], cavity: &CavityParams, cfg: &ReadoutConfig) -> Result<EfficiencyFit> {
    if points.len() < 4 {
        return Err(Error::DegenerateInput(format!("{} points; need at least 4", points.len())));
    }
    cavity.validate()?;
    cfg.validate()?;
    let x: Vec<f64> = points.iter().map(|p| p.0).collect();
    let y: Vec<f64> = points.iter().map(|p| p.1).collect();
    let (slope, slope_err, intercept, intercept_err, r_squared) = linear_fit(&x, &y)?;
    if !(slope > 0.0) {
        let sse = x.iter().zip(&y).map(|(a, b)| (b - slope * a - intercept).powi(2)).sum::<f64>();
        return Err(Error::Fit {
            reason: format!("nonpositive SNR slope {slope}"),
            residual: sse.sqrt(),
        });
    }
    let half = 0.5 * phase_separation(cavity, cfg.drive_freq)?;
    let n_n = 2.0 * cavity.kappa_angular() * cfg.tau_int * cfg.f_factor() * half.sin().powi(2) / (slope * slope);
    Ok(EfficiencyFit {
        n_n,
        eta: efficiency(n_n)?,
        t_n_eff: noise_temperature(n_n, cavity.omega_r)?,
        slope,
        slope_err,
        intercept,
        intercept_err,
        r_squared,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shots::{expected_snr, NoiseConfig};

    #[test]
    fn hemt_chain_numbers() {
        assert!((efficiency(37.5).unwrap() - 0.02667).abs() < 1e-4);
        assert!((noise_temperature(37.5, 7.167).unwrap() - 12.90).abs() < 0.01);
    }

    #[test]
    fn amplified_chain_numbers() {
        let eta = efficiency(1.7).unwrap();
        assert!((0.57..=0.59).contains(&eta));
        assert!((noise_temperature(1.7, 7.167).unwrap() - 0.5847).abs() < 1e-3);
    }

    #[test]
    fn forward_model_inverts_exactly() {
        let c = CavityParams::reference_device();
        let cfg = ReadoutConfig::reference_jpa_on();
        let noise = NoiseConfig { n_n: 10.0, jpa_on: true };
        let pts: Vec<(f64, f64)> = [2.0, 4.0, 6.0, 8.0, 10.0]
            .iter()
            .map(|&n: &f64| (n.sqrt(), expected_snr(n, &c, &cfg, &noise).unwrap()))
            .collect();
        let fit = efficiency_fit(&pts, &c, &cfg).unwrap();
        assert!((fit.n_n - 10.0).abs() < 1e-9);
        assert!(fit.intercept.abs() < 1e-9);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn flat_data_is_a_fit_error() {
        let c = CavityParams::reference_device();
        let cfg = ReadoutConfig::reference_jpa_on();
        let pts = [(1.0, 1.0), (2.0, 0.9), (3.0, 0.8), (4.0, 0.7)];
        assert!(matches!(efficiency_fit(&pts, &c, &cfg), Err(Error::Fit { .. })));
        assert!(efficiency_fit(&pts[..3], &c, &cfg).is_err());
    }
}
