//! Dispersive shift and photon number from a pair of CKP maps.

use serde::{Deserialize, Serialize};

use super::lsq::{fit_lorentzian, LsqFit};
use crate::shots::CkpMap;
use crate::{Error, LevelLabel, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RidgeFit {
    pub prepared: LevelLabel,
    /// Dressed cavity frequency, GHz.
    pub center: f64,
    /// Half width at half maximum in resonator drive frequency, GHz.
    pub width: f64,
    /// Peak Stark shift, MHz.
    pub peak_shift: f64,
    /// Undriven qubit frequency, GHz.
    pub baseline: f64,
    pub residual_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CkpFit {
    /// MHz.
    pub chi_ge: f64,
    pub n_bar_peak: f64,
    pub ridge_g: RidgeFit,
    pub ridge_e: RidgeFit,
}

/// Per resonator column, the qubit frequency of the line center from a
/// Lorentzian fit over the qubit axis.
pub fn ridge_points(map: &CkpMap) -> Result<Vec<(f64, f64)>> {
    map.values
        .iter()
        .zip(&map.resonator_freqs)
        .map(|(col, &fr)| {
            let fit = fit_lorentzian(&map.qubit_freqs, col)?;
            Ok((fr, fit.params[1]))
        })
        .collect()
}

/// Lorentzian fit of the Stark-shifted qubit frequency against resonator
/// drive frequency.
pub fn fit_ridge(map: &CkpMap) -> Result<RidgeFit> {
    let pts = ridge_points(map)?;
    let x: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let y: Vec<f64> = pts.iter().map(|p| p.1).collect();
    let LsqFit {
        params, residual_norm, ..
    } = fit_lorentzian(&x, &y)?;
    let (lo, hi) = (x[0].min(x[x.len() - 1]), x[0].max(x[x.len() - 1]));
    if params[1] < lo || params[1] > hi {
        return Err(Error::Fit {
            reason: format!("ridge center {} GHz outside the swept range", params[1]),
            residual: residual_norm,
        });
    }
    Ok(RidgeFit {
        prepared: map.prepared,
        center: params[1],
        width: params[2],
        peak_shift: params[0] * 1e3,
        baseline: params[3],
        residual_norm,
    })
}

/// `chi_ge` from the separation of the two dressed resonances and `n_bar`
/// from the peak Stark shift, averaged over both maps.
pub fn fit_ckp(map_g: &CkpMap, map_e: &CkpMap) -> Result<CkpFit> {
    let ridge_g = fit_ridge(map_g)?;
    let ridge_e = fit_ridge(map_e)?;
    let chi_ge = (ridge_e.center - ridge_g.center) * 1e3;
    let n_bar_peak = if chi_ge.abs() > 0.0 {
        0.5 * (ridge_g.peak_shift + ridge_e.peak_shift) / chi_ge
    } else {
        f64::NAN
    };
    Ok(CkpFit {
        chi_ge,
        n_bar_peak,
        ridge_g,
        ridge_e,
    })
}
