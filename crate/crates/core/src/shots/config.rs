use serde::{Deserialize, Serialize};

use crate::error::{ensure_non_negative, ensure_positive};
use crate::model::{steady_photon_number, CavityParams};
use crate::units::db_to_linear;
use crate::{Error, LevelLabel, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Demodulation {
    /// Plain integration over the window.
    #[default]
    Boxcar,
    /// Weighted by the cavity ring-up envelope.
    Matched,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReadoutConfig {
    /// Drive frequency in GHz.
    pub drive_freq: f64,
    /// Steady photon number, averaged over the g and e cavity responses. The
    /// drive amplitude is derived from it.
    pub n_bar: f64,
    /// Integration time in s. The window is the final `tau_int` of the pulse.
    pub tau_int: f64,
    /// Square-pulse length in s.
    pub pulse_len: f64,
    /// Measured-to-radiated power ratio in dB.
    pub f_factor_db: f64,
    #[serde(default)]
    pub demod: Demodulation,
    /// Probability that a g/e preparation ends up in the other state.
    #[serde(default)]
    pub prep_error: f64,
    /// Added-noise photon number whose per-quadrature sigma defines one unit
    /// of I/Q (the amplifier-off chain).
    #[serde(default = "default_reference_noise")]
    pub reference_noise_photons: f64,
}

fn default_reference_noise() -> f64 {
    37.5
}

/// Cavity settling time allowed before the integration window opens.
pub const DEFAULT_RING_UP_MARGIN: f64 = 200e-9;

impl ReadoutConfig {
    /// Best operating point without the parametric amplifier.
    pub fn reference_jpa_off() -> Self {
        ReadoutConfig {
            drive_freq: 7.167,
            n_bar: 112.0,
            tau_int: 2.82e-6,
            pulse_len: 2.82e-6 + DEFAULT_RING_UP_MARGIN,
            f_factor_db: -11.67,
            demod: Demodulation::Boxcar,
            prep_error: 0.03,
            reference_noise_photons: 37.5,
        }
    }

    /// Best operating point with the parametric amplifier.
    pub fn reference_jpa_on() -> Self {
        ReadoutConfig {
            n_bar: 126.0,
            tau_int: 260e-9,
            pulse_len: 260e-9 + DEFAULT_RING_UP_MARGIN,
            ..Self::reference_jpa_off()
        }
    }

    pub fn validate(&self) -> Result<()> {
        ensure_positive("drive_freq", self.drive_freq)?;
        ensure_non_negative("n_bar", self.n_bar)?;
        ensure_positive("tau_int", self.tau_int)?;
        ensure_positive("reference_noise_photons", self.reference_noise_photons)?;
        if !(self.pulse_len >= self.tau_int) || !self.pulse_len.is_finite() {
            return Err(Error::param(
                "pulse_len",
                format!("must be >= tau_int ({}), got {}", self.tau_int, self.pulse_len),
            ));
        }
        if !(self.f_factor_db <= 0.0) {
            return Err(Error::param("f_factor_db", format!("must be <= 0 dB, got {}", self.f_factor_db)));
        }
        if !(0.0..=1.0).contains(&self.prep_error) {
            return Err(Error::param("prep_error", format!("must lie in [0, 1], got {}", self.prep_error)));
        }
        Ok(())
    }

    pub fn f_factor(&self) -> f64 {
        db_to_linear(self.f_factor_db)
    }

    /// Same readout with a different integration time; the ring-up margin in
    /// front of the window is kept.
    pub fn with_tau_int(&self, tau_int: f64) -> Self {
        ReadoutConfig {
            tau_int,
            pulse_len: tau_int + (self.pulse_len - self.tau_int),
            ..self.clone()
        }
    }

    pub fn with_n_bar(&self, n_bar: f64) -> Self {
        ReadoutConfig { n_bar, ..self.clone() }
    }

    /// Drive amplitude (sqrt(photons/s)) giving `n_bar` photons on average
    /// over the g and e responses.
    pub fn drive_amp(&self, cavity: &CavityParams) -> Result<f64> {
        let unit = 0.5
            * (steady_photon_number(cavity, LevelLabel::G, 1.0, self.drive_freq)?
                + steady_photon_number(cavity, LevelLabel::E, 1.0, self.drive_freq)?);
        if unit <= 0.0 {
            return Err(Error::param("kappa_s", "drive does not couple into the cavity"));
        }
        Ok((self.n_bar / unit).sqrt())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    /// Added noise photons referred to the cavity output.
    pub n_n: f64,
    #[serde(default)]
    pub jpa_on: bool,
}

impl NoiseConfig {
    pub fn hemt_only() -> Self {
        NoiseConfig { n_n: 37.5, jpa_on: false }
    }

    pub fn with_jpa() -> Self {
        NoiseConfig { n_n: 1.7, jpa_on: true }
    }

    pub fn validate(&self) -> Result<()> {
        ensure_positive("n_n", self.n_n)
    }

    /// Per-quadrature noise standard deviation in sqrt(photon) units.
    pub fn sigma(&self) -> f64 {
        (0.5 * self.n_n).sqrt()
    }
}
