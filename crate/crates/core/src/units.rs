//! Physical constants and unit helpers. Frequencies are stored as ordinary
//! frequencies (GHz or MHz); conversion to angular rates happens only where a
//! dynamical equation needs it.

use std::f64::consts::TAU;

pub const PLANCK: f64 = 6.626_070_15e-34;
pub const BOLTZMANN: f64 = 1.380_649e-23;

/// MHz (ordinary) to angular rate in 1/s.
pub fn mhz_to_angular(mhz: f64) -> f64 {
    TAU * mhz * 1e6
}

pub fn ghz_to_hz(ghz: f64) -> f64 {
    ghz * 1e9
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(ratio: f64) -> f64 {
    10.0 * ratio.log10()
}
