//! Fluxonium Hamiltonian `H/h = 4 E_C n^2 + E_L phi^2 / 2 - E_J cos(phi - phi_ext)`
//! diagonalized in a truncated harmonic-oscillator basis.
//!
//! The inductive and charging terms form an oscillator with frequency
//! `sqrt(8 E_C E_L)` and phase length `l = (8 E_C / E_L)^(1/4)`. The Josephson
//! term is assembled from exact displacement-operator matrix elements
//! `<m| exp(i phi) |n>`, so no padding of the basis is needed.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{ensure_non_negative, ensure_positive};
use crate::{Error, Result};

/// Doubling the basis must move each of the lowest levels by less than this.
const CONVERGENCE_TOL_GHZ: f64 = 1e-5;
const CHECKED_LEVELS: usize = 6;
pub const MIN_BASIS: usize = 20;
pub const MAX_BASIS: usize = 640;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FluxoniumParams {
    /// Josephson energy / h in GHz.
    pub e_j: f64,
    /// Charging energy / h in GHz.
    pub e_c: f64,
    /// Inductive energy / h in GHz.
    pub e_l: f64,
    /// External flux in radians; pi is half a flux quantum.
    pub phi_ext: f64,
}

impl FluxoniumParams {
    /// Table values of the tantalum device at half flux.
    pub fn reference_device() -> Self {
        FluxoniumParams {
            e_j: 4.098,
            e_c: 0.754,
            e_l: 0.998,
            phi_ext: std::f64::consts::PI,
        }
    }

    /// `e_j = 0` is accepted: it is the harmonic limit.
    pub fn validate(&self) -> Result<()> {
        ensure_non_negative("e_j", self.e_j)?;
        ensure_positive("e_c", self.e_c)?;
        ensure_positive("e_l", self.e_l)?;
        if !self.phi_ext.is_finite() {
            return Err(Error::param("phi_ext", "must be finite"));
        }
        Ok(())
    }

    pub fn plasma_frequency(&self) -> f64 {
        (8.0 * self.e_c * self.e_l).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergySpectrum {
    /// Eigenenergies in GHz relative to the ground state, ascending.
    pub levels: Vec<f64>,
    pub basis_size: usize,
    pub converged: bool,
}

impl EnergySpectrum {
    /// Transition frequency between two levels in GHz.
    pub fn transition(&self, from: usize, to: usize) -> f64 {
        self.levels[to] - self.levels[from]
    }
}

/// Diagonalize starting at `basis_size`, doubling until the lowest six levels
/// move by less than 10 kHz. The returned spectrum is the one computed at the
/// accepted basis size.
pub fn diagonalize(params: &FluxoniumParams, basis_size: usize) -> Result<EnergySpectrum> {
    params.validate()?;
    if basis_size < MIN_BASIS {
        return Err(Error::param(
            "basis_size",
            format!("must be >= {MIN_BASIS}, got {basis_size}"),
        ));
    }
    let mut n = basis_size;
    let mut current = spectrum_at(params, n);
    let mut last_change = f64::NAN;
    loop {
        if 2 * n > MAX_BASIS {
            return Err(Error::Convergence {
                basis_size: n,
                max_change_ghz: last_change,
            });
        }
        let doubled = spectrum_at(params, 2 * n);
        let change = current
            .iter()
            .zip(&doubled)
            .take(CHECKED_LEVELS)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if change < CONVERGENCE_TOL_GHZ {
            current.truncate((n / 2).max(CHECKED_LEVELS));
            return Ok(EnergySpectrum {
                levels: current,
                basis_size: n,
                converged: true,
            });
        }
        n *= 2;
        current = doubled;
        last_change = change;
    }
}

/// All eigenvalues (GHz, relative to the ground state) in a basis of `n`
/// oscillator states, without any convergence check.
pub fn spectrum_at(params: &FluxoniumParams, n: usize) -> Vec<f64> {
    let h = hamiltonian(params, n);
    let mut values: Vec<f64> = SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
    values.sort_by(|a, b| a.total_cmp(b));
    let ground = values[0];
    values.iter_mut().for_each(|v| *v -= ground);
    values
}

fn hamiltonian(params: &FluxoniumParams, n: usize) -> DMatrix<f64> {
    let (cos_phi, sin_phi) = josephson_blocks(params, n);
    let omega = params.plasma_frequency();
    let mut h = cos_phi * (-params.e_j * params.phi_ext.cos())
        + sin_phi * (-params.e_j * params.phi_ext.sin());
    for k in 0..n {
        h[(k, k)] += omega * (k as f64 + 0.5);
    }
    h
}

/// Matrix elements of `cos(phi)` and `sin(phi)` in the oscillator basis.
///
/// With `phi = b (a + a^dag)` and `b = l / sqrt(2)`, `exp(i phi)` is a
/// displacement by `i b`, whose elements are
/// `i^k b^k sqrt(j!/(j+k)!) exp(-b^2/2) L_j^(k)(b^2)` for `k = |m - n|`,
/// `j = min(m, n)`. The normalized Laguerre factor is generated by a
/// three-term recurrence so no factorials are formed.
fn josephson_blocks(params: &FluxoniumParams, n: usize) -> (DMatrix<f64>, DMatrix<f64>) {
    let l = (8.0 * params.e_c / params.e_l).powf(0.25);
    let b = l / std::f64::consts::SQRT_2;
    let x = b * b;
    let mut cos_phi = DMatrix::zeros(n, n);
    let mut sin_phi = DMatrix::zeros(n, n);
    let mut g = vec![0.0; n];
    for k in 0..n {
        let len = n - k;
        let kf = k as f64;
        g[0] = (kf * b.ln() - 0.5 * ln_factorial(k) - 0.5 * x).exp();
        if len > 1 {
            g[1] = g[0] * (1.0 + kf - x) / (kf + 1.0).sqrt();
        }
        for j in 1..len.saturating_sub(1) {
            let jf = j as f64;
            g[j + 1] = ((2.0 * jf + 1.0 + kf - x) * g[j] - (jf * (jf + kf)).sqrt() * g[j - 1])
                / ((jf + 1.0) * (jf + kf + 1.0)).sqrt();
        }
        // i^k: real for even k, imaginary for odd k.
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        let target = if k % 2 == 0 { &mut cos_phi } else { &mut sin_phi };
        for (j, &gj) in g.iter().enumerate().take(len) {
            let v = sign * gj;
            target[(j + k, j)] = v;
            target[(j, j + k)] = v;
        }
    }
    (cos_phi, sin_phi)
}

fn ln_factorial(k: usize) -> f64 {
    statrs::function::factorial::ln_factorial(k as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn table_parameters_reproduce_qubit_and_ef_frequencies() {
        let spectrum = diagonalize(&FluxoniumParams::reference_device(), 60).unwrap();
        assert!(spectrum.converged);
        let f_ge = spectrum.levels[1];
        let f_ef = spectrum.levels[2] - spectrum.levels[1];
        assert!((f_ge - 0.32812).abs() / 0.32812 < 0.02, "f_ge = {f_ge}");
        assert!((f_ef - 3.062).abs() / 3.062 < 0.02, "f_ef = {f_ef}");
    }

    #[test]
    fn cavity_sits_between_g_to_h_and_e_to_i() {
        let spectrum = diagonalize(&FluxoniumParams::reference_device(), 60).unwrap();
        assert!(spectrum.levels.len() >= 5);
        assert!(spectrum.levels[3] < 7.167);
        assert!(7.167 < spectrum.levels[4] - spectrum.levels[1]);
    }

    #[test]
    fn harmonic_limit_is_equally_spaced() {
        let params = FluxoniumParams {
            e_j: 0.0,
            e_c: 0.5,
            e_l: 1.0,
            phi_ext: 0.7,
        };
        let spectrum = diagonalize(&params, 40).unwrap();
        for k in 1..6 {
            assert!((spectrum.levels[k] - spectrum.levels[k - 1] - 2.0).abs() < 1e-9);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let mut p = FluxoniumParams::reference_device();
        assert!(matches!(diagonalize(&p, 10), Err(Error::Parameter { .. })));
        p.e_c = -1.0;
        assert!(matches!(diagonalize(&p, 60), Err(Error::Parameter { .. })));
        p.e_c = 0.754;
        p.phi_ext = f64::NAN;
        assert!(diagonalize(&p, 60).is_err());
    }

    #[test]
    fn cos_sin_blocks_match_unitary_identity() {
        // cos^2 + sin^2 = 1 holds on the low-lying block once the basis is large.
        let p = FluxoniumParams::reference_device();
        let (c, s) = josephson_blocks(&p, 120);
        let id = &c * &c + &s * &s;
        for i in 0..20 {
            for j in 0..20 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((id[(i, j)] - want).abs() < 1e-10);
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]

        #[test]
        fn flux_symmetric_about_half_quantum(delta in -1.5f64..1.5) {
            let base = FluxoniumParams::reference_device();
            let plus = spectrum_at(&FluxoniumParams { phi_ext: PI + delta, ..base }, 60);
            let minus = spectrum_at(&FluxoniumParams { phi_ext: PI - delta, ..base }, 60);
            for k in 1..8 {
                prop_assert!((plus[k] - minus[k]).abs() <= 1e-8 * plus[k].abs().max(1.0));
            }
        }

        #[test]
        fn converged_spectra_are_stable_under_doubling(
            e_j in 0.1f64..10.0, e_c in 0.1f64..10.0, e_l in 0.1f64..10.0, phi in 0.0f64..6.3,
        ) {
            let p = FluxoniumParams { e_j, e_c, e_l, phi_ext: phi };
            let spectrum = diagonalize(&p, 60).unwrap();
            prop_assert!(spectrum.converged);
            let doubled = spectrum_at(&p, 2 * spectrum.basis_size);
            for k in 0..6 {
                prop_assert!((spectrum.levels[k] - doubled[k]).abs() < 1e-5);
            }
            prop_assert!(spectrum.levels.windows(2).all(|w| w[0] <= w[1]));
            prop_assert_eq!(spectrum.levels[0], 0.0);
        }
    }
}
