use crate::error::ensure_positive;
use crate::units::{ghz_to_hz, BOLTZMANN, PLANCK};
use crate::{Error, Result};

/// Two-level Boltzmann occupancy of the upper level,
/// `1 / (1 + exp(h f / k_B T))`.
pub fn thermal_population(qubit_freq_ghz: f64, temperature_k: f64) -> Result<f64> {
    ensure_positive("qubit_freq", qubit_freq_ghz)?;
    ensure_positive("temperature", temperature_k)?;
    let x = PLANCK * ghz_to_hz(qubit_freq_ghz) / (BOLTZMANN * temperature_k);
    Ok(1.0 / (1.0 + x.exp()))
}

/// Temperature (K) at which `thermal_population` equals `p_e`.
pub fn effective_temperature(p_e: f64, qubit_freq_ghz: f64) -> Result<f64> {
    ensure_positive("qubit_freq", qubit_freq_ghz)?;
    if !(p_e > 0.0) {
        return Err(Error::param("p_e", format!("must be > 0, got {p_e}")));
    }
    if p_e >= 0.5 {
        return Err(Error::NoFiniteTemperature(p_e));
    }
    let ratio = (1.0 / p_e - 1.0).ln();
    Ok(PLANCK * ghz_to_hz(qubit_freq_ghz) / (BOLTZMANN * ratio))
}

/// Two-photon red-sideband drive frequency `(f_r - f_q) / 2` in GHz.
pub fn sideband_frequency(omega_r: f64, omega_q: f64) -> Result<f64> {
    if !(omega_r > omega_q) || !omega_r.is_finite() || !omega_q.is_finite() {
        return Err(Error::param(
            "omega_r",
            format!("cavity ({omega_r} GHz) must lie above the qubit ({omega_q} GHz)"),
        ));
    }
    Ok(0.5 * (omega_r - omega_q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const F_GE: f64 = 0.32812;

    #[test]
    fn thermal_population_at_25_mk() {
        let p = thermal_population(F_GE, 0.025).unwrap();
        assert!((p - 0.35).abs() <= 0.01, "p = {p}");
    }

    #[test]
    fn high_temperature_limit() {
        let p = thermal_population(F_GE, 1e6).unwrap();
        assert!((p - 0.5).abs() < 1e-6);
    }

    #[test]
    fn cold_qubit_population() {
        let p = thermal_population(F_GE, 0.0045).unwrap();
        assert!((p - 0.030).abs() < 0.002, "p = {p}");
    }

    #[test]
    fn effective_temperatures_from_populations() {
        let t = effective_temperature(0.35, F_GE).unwrap();
        assert!((t - 0.025).abs() <= 0.001, "T = {t}");
        let t = effective_temperature(0.03, F_GE).unwrap();
        assert!((t - 0.0045).abs() < 0.0002, "T = {t}");
    }

    #[test]
    fn invalid_populations() {
        assert!(matches!(effective_temperature(0.5, F_GE), Err(Error::NoFiniteTemperature(_))));
        assert!(matches!(effective_temperature(0.7, F_GE), Err(Error::NoFiniteTemperature(_))));
        assert!(matches!(effective_temperature(0.0, F_GE), Err(Error::Parameter { .. })));
        assert!(thermal_population(F_GE, 0.0).is_err());
        assert!(thermal_population(F_GE, -1.0).is_err());
    }

    #[test]
    fn sideband_frequencies() {
        assert!((sideband_frequency(7.167, F_GE).unwrap() - 3.41944).abs() < 1e-9);
        assert!((sideband_frequency(2.0 * 1.3, 0.0).unwrap() - 1.3).abs() < 1e-15);
        assert_eq!(sideband_frequency(10.0, 4.0).unwrap(), 3.0);
        assert!(sideband_frequency(4.0, 10.0).is_err());
        assert!(sideband_frequency(4.0, 4.0).is_err());
    }

    proptest! {
        #[test]
        fn temperature_round_trip(t in 1e-3f64..1.0, f in 0.05f64..8.0) {
            let p = thermal_population(f, t).unwrap();
            prop_assert!(p > 0.0 && p < 0.5);
            let back = effective_temperature(p, f).unwrap();
            prop_assert!((back - t).abs() <= 1e-9 * t);
            let p2 = thermal_population(f, back).unwrap();
            prop_assert!((p2 - p).abs() <= 1e-9 * p);
        }
    }
}
