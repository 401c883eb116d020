//! Two-port readout cavity seen in reflection from the strong port.
//!
//! Linewidths and dispersive pulls are stored in MHz (ordinary frequency).
//! The intracavity amplitude `alpha` (with `|alpha|^2` in photons) obeys, in the
//! frame rotating at the drive,
//!
//! `d alpha/dt = (i D - kappa/2) alpha - sqrt(kappa_s) eps`
//!
//! with `D = 2 pi (f_drive - f_r - chi[level])` and `kappa` the total angular
//! linewidth. Its steady state gives the strong-port reflection
//! `Gamma = 1 - kappa_s / (kappa/2 - i D)`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_non_negative, ensure_positive};
use crate::units::mhz_to_angular;
use crate::{Error, LevelLabel, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CavityParams {
    /// Bare cavity frequency in GHz.
    pub omega_r: f64,
    /// Strong-port external coupling in MHz.
    pub kappa_s: f64,
    /// Weak-port external coupling in MHz.
    pub kappa_w: f64,
    /// Internal loss in MHz.
    pub kappa_int: f64,
    /// Cavity pull (MHz) when the qubit occupies each level.
    pub chi: BTreeMap<LevelLabel, f64>,
}

impl CavityParams {
    /// 7.167 GHz cavity, 11.6 MHz strong port, weak port at a third of that and
    /// enough internal loss to make the reflected linewidth 15.6 MHz. The g/e
    /// pulls are -/+0.6 MHz; `h` sits at +1.5 MHz.
    pub fn reference_device() -> Self {
        let kappa_s = 11.6;
        let kappa_w = kappa_s / 3.0;
        CavityParams {
            omega_r: 7.167,
            kappa_s,
            kappa_w,
            kappa_int: 15.6 - kappa_s - kappa_w,
            chi: BTreeMap::from([
                (LevelLabel::G, -0.6),
                (LevelLabel::E, 0.6),
                (LevelLabel::H, 1.5),
            ]),
        }
    }

    pub fn validate(&self) -> Result<()> {
        ensure_positive("omega_r", self.omega_r)?;
        ensure_non_negative("kappa_s", self.kappa_s)?;
        ensure_non_negative("kappa_w", self.kappa_w)?;
        ensure_non_negative("kappa_int", self.kappa_int)?;
        ensure_positive("kappa_tot", self.kappa_tot())?;
        for level in [LevelLabel::G, LevelLabel::E] {
            if !self.chi.contains_key(&level) {
                return Err(Error::param("chi", format!("missing entry for level {level}")));
            }
        }
        if self.chi.values().any(|c| !c.is_finite()) {
            return Err(Error::param("chi", "entries must be finite"));
        }
        Ok(())
    }

    /// Total linewidth in MHz.
    pub fn kappa_tot(&self) -> f64 {
        self.kappa_s + self.kappa_w + self.kappa_int
    }

    /// Total linewidth as an angular rate in 1/s.
    pub fn kappa_angular(&self) -> f64 {
        mhz_to_angular(self.kappa_tot())
    }

    pub fn chi_of(&self, level: LevelLabel) -> Result<f64> {
        self.chi.get(&level).copied().ok_or(Error::UnknownLevel(level))
    }

    /// g-e cavity pull difference in MHz.
    pub fn chi_ge(&self) -> Result<f64> {
        Ok(self.chi_of(LevelLabel::E)? - self.chi_of(LevelLabel::G)?)
    }

    /// Drive detuning from the level-dressed cavity, MHz (ordinary).
    pub fn detuning_mhz(&self, drive_freq: f64, level: LevelLabel) -> Result<f64> {
        Ok((drive_freq - self.omega_r) * 1e3 - self.chi_of(level)?)
    }

    /// Complex rate `i D - kappa/2` (1/s) governing relaxation of the field
    /// while the qubit is in `level`.
    pub fn field_eigenvalue(&self, drive_freq: f64, level: LevelLabel) -> Result<Complex64> {
        let detuning = mhz_to_angular(self.detuning_mhz(drive_freq, level)?);
        Ok(Complex64::new(-0.5 * self.kappa_angular(), detuning))
    }

    /// Drive amplitude (sqrt(photons/s)) that puts `n_bar` photons in the cavity
    /// when the qubit is in `level`.
    pub fn drive_for_photons(&self, n_bar: f64, drive_freq: f64, level: LevelLabel) -> Result<f64> {
        ensure_non_negative("n_bar", n_bar)?;
        let unit = steady_photon_number(self, level, 1.0, drive_freq)?;
        if unit <= 0.0 {
            return Err(Error::param("kappa_s", "strong port is uncoupled; no drive reaches the cavity"));
        }
        Ok((n_bar / unit).sqrt())
    }
}

/// Strong-port reflection coefficient for the qubit in `level`.
pub fn reflection(cavity: &CavityParams, drive_freq: f64, level: LevelLabel) -> Result<Complex64> {
    let detuning = cavity.detuning_mhz(drive_freq, level)?;
    let denom = Complex64::new(0.5 * cavity.kappa_tot(), -detuning);
    Ok(Complex64::new(1.0, 0.0) - cavity.kappa_s / denom)
}

/// Angle `2 phi` (radians, in `[0, pi]`) between the g and e pointer states of
/// the reflected field.
pub fn phase_separation(cavity: &CavityParams, drive_freq: f64) -> Result<f64> {
    let g = reflection(cavity, drive_freq, LevelLabel::G)?;
    let e = reflection(cavity, drive_freq, LevelLabel::E)?;
    Ok((g * e.conj()).arg().abs())
}

/// Steady intracavity amplitude for drive amplitude `drive_amp`.
pub fn steady_amplitude(
    cavity: &CavityParams,
    level: LevelLabel,
    drive_amp: f64,
    drive_freq: f64,
) -> Result<Complex64> {
    let lambda = cavity.field_eigenvalue(drive_freq, level)?;
    Ok(mhz_to_angular(cavity.kappa_s).sqrt() * drive_amp / lambda)
}

/// `kappa_s eps^2 / ((kappa/2)^2 + D^2)` photons.
pub fn steady_photon_number(
    cavity: &CavityParams,
    level: LevelLabel,
    drive_amp: f64,
    drive_freq: f64,
) -> Result<f64> {
    Ok(steady_amplitude(cavity, level, drive_amp, drive_freq)?.norm_sqr())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointerTrajectory {
    pub times: Vec<f64>,
    pub alpha: Vec<Complex64>,
    pub level: LevelLabel,
}

impl PointerTrajectory {
    pub fn photons(&self) -> impl Iterator<Item = f64> + '_ {
        self.alpha.iter().map(|a| a.norm_sqr())
    }
}

/// Integrate the driven cavity from vacuum with a fixed-step RK4 scheme.
///
/// `dt` is an upper bound; the step is shrunk so that an integer number of
/// steps spans `duration` exactly.
pub fn ring_up(
    cavity: &CavityParams,
    level: LevelLabel,
    drive_amp: f64,
    drive_freq: f64,
    duration: f64,
    dt: f64,
) -> Result<PointerTrajectory> {
    ensure_positive("duration", duration)?;
    ensure_positive("dt", dt)?;
    let max_dt = 0.05 / cavity.kappa_angular();
    if dt > max_dt {
        return Err(Error::Discretization { dt, max_dt });
    }
    let lambda = cavity.field_eigenvalue(drive_freq, level)?;
    let source = Complex64::new(-mhz_to_angular(cavity.kappa_s).sqrt() * drive_amp, 0.0);
    let rhs = |a: Complex64| lambda * a + source;

    let steps = (duration / dt).ceil() as usize;
    let h = duration / steps as f64;
    let mut times = Vec::with_capacity(steps + 1);
    let mut alpha = Vec::with_capacity(steps + 1);
    let mut a = Complex64::new(0.0, 0.0);
    times.push(0.0);
    alpha.push(a);
    for k in 1..=steps {
        let k1 = rhs(a);
        let k2 = rhs(a + k1 * (0.5 * h));
        let k3 = rhs(a + k2 * (0.5 * h));
        let k4 = rhs(a + k3 * h);
        a += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        times.push(k as f64 * h);
        alpha.push(a);
    }
    Ok(PointerTrajectory { times, alpha, level })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn device() -> CavityParams {
        CavityParams::reference_device()
    }

    #[test]
    fn far_detuned_reflection_is_unity() {
        let c = device();
        for f in [1e5, -1e5] {
            let gamma = reflection(&c, c.omega_r + f, LevelLabel::G).unwrap();
            assert!((gamma - Complex64::new(1.0, 0.0)).norm() < 1e-6);
        }
    }

    #[test]
    fn on_resonance_reflection_matches_closed_form() {
        let c = device();
        let f = c.omega_r + c.chi[&LevelLabel::G] * 1e-3;
        let gamma = reflection(&c, f, LevelLabel::G).unwrap();
        let want = 1.0 - 2.0 * 11.6 / 15.6;
        assert!((gamma.re - want).abs() < 1e-12 && gamma.im.abs() < 1e-12);
        assert!((gamma.re + 0.487).abs() < 1e-3);
    }

    #[test]
    fn pointer_phase_difference_near_32_degrees() {
        let diff = phase_separation(&device(), 7.167).unwrap().to_degrees();
        assert!((diff - 32.0).abs() <= 8.0, "phase difference {diff}");
    }

    #[test]
    fn unknown_level_is_an_error() {
        assert!(matches!(
            reflection(&device(), 7.167, LevelLabel::I),
            Err(Error::UnknownLevel(LevelLabel::I))
        ));
    }

    #[test]
    fn zero_drive_stays_in_vacuum() {
        let c = device();
        let traj = ring_up(&c, LevelLabel::G, 0.0, 7.167, 1e-6, 1e-10).unwrap();
        assert!(traj.alpha.iter().all(|a| a.norm() == 0.0));
        assert_eq!(steady_photon_number(&c, LevelLabel::G, 0.0, 7.167).unwrap(), 0.0);
    }

    #[test]
    fn ring_up_reaches_steady_state_photons() {
        let c = device();
        let f = c.omega_r + c.chi[&LevelLabel::G] * 1e-3;
        let eps = c.drive_for_photons(112.0, f, LevelLabel::G).unwrap();
        // 10 / kappa_tot with kappa_tot as an ordinary rate (15.6 MHz).
        let duration = 10.0 / (c.kappa_tot() * 1e6);
        let dt = 0.01 / c.kappa_angular();
        let traj = ring_up(&c, LevelLabel::G, eps, f, duration, dt).unwrap();
        let ratio = traj.alpha.last().unwrap().norm_sqr() / 112.0;
        assert!((0.99..=1.0).contains(&ratio), "ratio {ratio}");

        // |alpha| grows monotonically from vacuum.
        let mags: Vec<f64> = traj.alpha.iter().map(|a| a.norm()).collect();
        assert!(mags.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn ring_up_matches_closed_form_exponential() {
        let c = device();
        let f = c.omega_r + c.chi[&LevelLabel::E] * 1e-3;
        let eps = 3e4;
        let kappa = c.kappa_angular();
        let traj = ring_up(&c, LevelLabel::E, eps, f, 8.0 / kappa, 0.02 / kappa).unwrap();
        let a_ss = -2.0 * mhz_to_angular(c.kappa_s).sqrt() * eps / kappa;
        for (t, a) in traj.times.iter().zip(&traj.alpha).skip(1) {
            let exact = a_ss * (1.0 - (-0.5 * kappa * t).exp());
            assert!((a.re - exact).abs() <= 1e-4 * exact.abs() && a.im.abs() < 1e-6 * exact.abs());
        }
    }

    #[test]
    fn coarse_step_rejected() {
        let c = device();
        let dt = 0.1 / c.kappa_angular();
        assert!(matches!(
            ring_up(&c, LevelLabel::G, 1.0, 7.167, 1e-6, dt),
            Err(Error::Discretization { .. })
        ));
    }

    #[test]
    fn photon_number_is_lorentzian_with_half_width_kappa_over_two() {
        let c = device();
        let center = c.omega_r + c.chi[&LevelLabel::G] * 1e-3;
        let peak = steady_photon_number(&c, LevelLabel::G, 1e4, center).unwrap();
        let hw = 0.5 * c.kappa_tot() * 1e-3;
        for f in [center - hw, center + hw] {
            let n = steady_photon_number(&c, LevelLabel::G, 1e4, f).unwrap();
            assert!((n / peak - 0.5).abs() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn lossless_single_port_reflection_is_unitary(detuning in -200.0f64..200.0) {
            let mut c = device();
            c.kappa_w = 0.0;
            c.kappa_int = 0.0;
            let gamma = reflection(&c, c.omega_r + detuning * 1e-3, LevelLabel::G).unwrap();
            prop_assert!((gamma.norm() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn lossy_reflection_is_passive(detuning in -200.0f64..200.0) {
            let c = device();
            let gamma = reflection(&c, c.omega_r + detuning * 1e-3, LevelLabel::E).unwrap();
            prop_assert!(gamma.norm() <= 1.0 + 1e-12);
        }

        #[test]
        fn reflection_phase_is_odd_in_detuning(d in 0.01f64..50.0) {
            let c = device();
            let center = c.omega_r + c.chi[&LevelLabel::G] * 1e-3;
            let plus = reflection(&c, center + d * 1e-3, LevelLabel::G).unwrap();
            let minus = reflection(&c, center - d * 1e-3, LevelLabel::G).unwrap();
            let on = reflection(&c, center, LevelLabel::G).unwrap();
            // Phases measured from the on-resonance value are opposite.
            let a = (plus / on).arg();
            let b = (minus / on).arg();
            prop_assert!((a + b).abs() < 1e-9);
        }
    }
}
