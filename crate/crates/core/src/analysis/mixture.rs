//! Two-component Gaussian mixtures on the I projection of one prepared state,
//! fitted by expectation-maximization.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::shots::ShotBatch;
use crate::{Error, LevelLabel, Result};

/// Fewest shots accepted for one prepared state.
pub const MIN_SHOTS: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SigmaMode {
    #[default]
    Shared,
    Separate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixtureOptions {
    pub sigma: SigmaMode,
    pub rel_tol: f64,
    pub max_iter: usize,
}

impl Default for MixtureOptions {
    fn default() -> Self {
        MixtureOptions {
            sigma: SigmaMode::Shared,
            rel_tol: 1e-8,
            max_iter: 500,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureFit {
    pub prepared: LevelLabel,
    pub dominant_mean: Complex64,
    pub secondary_mean: Complex64,
    pub sigma_dominant: f64,
    pub sigma_secondary: f64,
    pub dominant_weight: f64,
    pub log_likelihood: f64,
    pub converged: bool,
    pub iterations: usize,
    pub n_shots: usize,
}

impl MixtureFit {
    pub fn secondary_weight(&self) -> f64 {
        1.0 - self.dominant_weight
    }
}

/// Starting point: component means and common sigma.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixtureInit {
    pub low: f64,
    pub high: f64,
    pub sigma: f64,
}

impl MixtureInit {
    /// Split `values` at their median; means of the halves and the pooled
    /// within-half sigma.
    pub fn median_split(values: &[f64]) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::DegenerateInput("need at least two values".into()));
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let mid = sorted.len() / 2;
        let (lo, hi) = sorted.split_at(mid);
        let (m_lo, m_hi) = (mean(lo), mean(hi));
        let ss: f64 = lo.iter().map(|x| (x - m_lo).powi(2)).sum::<f64>()
            + hi.iter().map(|x| (x - m_hi).powi(2)).sum::<f64>();
        let mut sigma = (ss / sorted.len() as f64).sqrt();
        if !(sigma > 0.0) {
            sigma = std_dev(values);
        }
        if !(sigma > 0.0) {
            return Err(Error::DegenerateInput("values have zero variance".into()));
        }
        Ok(MixtureInit {
            low: m_lo,
            high: m_hi,
            sigma,
        })
    }
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn std_dev(v: &[f64]) -> f64 {
    let m = mean(v);
    (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / v.len() as f64).sqrt()
}

/// Fit the shots prepared in `prepared`, initialized from the pooled g/e
/// projection of the whole batch.
pub fn fit_mixture(batch: &ShotBatch, prepared: LevelLabel) -> Result<MixtureFit> {
    fit_mixture_with(batch, prepared, &MixtureOptions::default())
}

pub fn fit_mixture_with(batch: &ShotBatch, prepared: LevelLabel, opts: &MixtureOptions) -> Result<MixtureFit> {
    batch.check()?;
    let pooled: Vec<f64> = batch
        .prepared
        .iter()
        .zip(&batch.i_vals)
        .filter(|(p, _)| p.is_computational())
        .map(|(_, &i)| i)
        .collect();
    let init = MixtureInit::median_split(&pooled)?;
    let iq = batch.iq_for(prepared);
    fit_mixture_iq(&iq, prepared, init, opts)
}

/// EM on `Re(iq)`; the Q coordinate of each mean is the responsibility-weighted
/// average of `Im(iq)`.
pub fn fit_mixture_iq(
    iq: &[Complex64],
    prepared: LevelLabel,
    init: MixtureInit,
    opts: &MixtureOptions,
) -> Result<MixtureFit> {
    if iq.len() < MIN_SHOTS {
        return Err(Error::DegenerateInput(format!(
            "{} shots prepared in {prepared}; need at least {MIN_SHOTS}",
            iq.len()
        )));
    }
    let x: Vec<f64> = iq.iter().map(|z| z.re).collect();
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::DegenerateInput("non-finite I values".into()));
    }
    let spread = std_dev(&x);
    if !(spread > 0.0) {
        return Err(Error::DegenerateInput(format!("shots prepared in {prepared} have zero variance")));
    }

    let n = x.len() as f64;
    let mut mu = [init.low, init.high];
    let mut sigma = [init.sigma; 2];
    let mut w = [0.5, 0.5];
    let mut resp = vec![0.0; x.len()];
    let mut ll = log_likelihood(&x, mu, sigma, w, &mut resp);
    let mut converged = false;
    let mut iterations = 0;
    let floor = 1e-6 * spread;
    while iterations < opts.max_iter {
        iterations += 1;
        // M step; `resp` holds the responsibility of component 1.
        let r1: f64 = resp.iter().sum();
        let r0 = n - r1;
        if r0 < 1e-9 || r1 < 1e-9 {
            converged = true;
            break;
        }
        mu[0] = x.iter().zip(&resp).map(|(xi, r)| (1.0 - r) * xi).sum::<f64>() / r0;
        mu[1] = x.iter().zip(&resp).map(|(xi, r)| r * xi).sum::<f64>() / r1;
        let ss0: f64 = x.iter().zip(&resp).map(|(xi, r)| (1.0 - r) * (xi - mu[0]).powi(2)).sum();
        let ss1: f64 = x.iter().zip(&resp).map(|(xi, r)| r * (xi - mu[1]).powi(2)).sum();
        match opts.sigma {
            SigmaMode::Shared => {
                let s = ((ss0 + ss1) / n).sqrt().max(floor);
                sigma = [s, s];
            }
            SigmaMode::Separate => {
                sigma = [(ss0 / r0).sqrt().max(floor), (ss1 / r1).sqrt().max(floor)];
            }
        }
        w = [r0 / n, r1 / n];
        let next = log_likelihood(&x, mu, sigma, w, &mut resp);
        let change = (next - ll).abs() / ll.abs().max(1.0);
        ll = next;
        if change < opts.rel_tol {
            converged = true;
            break;
        }
    }

    let (r1, r0) = {
        let r1: f64 = resp.iter().sum();
        (r1, n - r1)
    };
    let q_mean = |weights: &dyn Fn(f64) -> f64, total: f64| -> f64 {
        if total < 1e-9 {
            f64::NAN
        } else {
            iq.iter().zip(&resp).map(|(z, &r)| weights(r) * z.im).sum::<f64>() / total
        }
    };
    let q = [q_mean(&|r| 1.0 - r, r0), q_mean(&|r| r, r1)];
    let (d, s) = if w[0] >= w[1] { (0, 1) } else { (1, 0) };

    let mut fit = MixtureFit {
        prepared,
        dominant_mean: Complex64::new(mu[d], q[d]),
        secondary_mean: Complex64::new(mu[s], q[s]),
        sigma_dominant: sigma[d],
        sigma_secondary: sigma[s],
        dominant_weight: w[d],
        log_likelihood: ll,
        converged,
        iterations,
        n_shots: x.len(),
    };
    // Components closer than half a sigma describe one blob, as does a second
    // component that does not pay for its parameters under BIC.
    let single = single_gaussian(iq);
    let extra = match opts.sigma {
        SigmaMode::Shared => 2.0,
        SigmaMode::Separate => 3.0,
    };
    let bic_gain = ll - single.2 - 0.5 * extra * (x.len() as f64).ln();
    if (mu[0] - mu[1]).abs() < 0.5 * sigma[d] || !fit.secondary_mean.re.is_finite() || w[s] < 1e-9 || bic_gain <= 0.0 {
        fit.dominant_mean = single.0;
        fit.secondary_mean = single.0;
        fit.sigma_dominant = single.1;
        fit.sigma_secondary = single.1;
        fit.dominant_weight = 1.0;
        fit.log_likelihood = single.2;
    }
    Ok(fit)
}

/// Mean, sigma and log-likelihood of a single Gaussian on `Re(iq)`.
fn single_gaussian(iq: &[Complex64]) -> (Complex64, f64, f64) {
    let n = iq.len() as f64;
    let m = iq.iter().sum::<Complex64>() / n;
    let s = (iq.iter().map(|z| (z.re - m.re).powi(2)).sum::<f64>() / n).sqrt();
    let ll = -0.5 * n * (1.0 + (std::f64::consts::TAU * s * s).ln());
    (m, s, ll)
}

fn log_likelihood(x: &[f64], mu: [f64; 2], sigma: [f64; 2], w: [f64; 2], resp: &mut [f64]) -> f64 {
    let half_ln_tau = 0.5 * std::f64::consts::TAU.ln();
    let lw = [w[0].max(1e-300).ln(), w[1].max(1e-300).ln()];
    let ls = [sigma[0].ln(), sigma[1].ln()];
    let mut total = 0.0;
    for (xi, r) in x.iter().zip(resp.iter_mut()) {
        let a = lw[0] - ls[0] - half_ln_tau - 0.5 * ((xi - mu[0]) / sigma[0]).powi(2);
        let b = lw[1] - ls[1] - half_ln_tau - 0.5 * ((xi - mu[1]) / sigma[1]).powi(2);
        let m = a.max(b);
        let lse = m + ((a - m).exp() + (b - m).exp()).ln();
        *r = (b - lse).exp();
        total += lse;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand_distr::StandardNormal;

    fn draw(n: usize, seed: u64, w: f64, mu: (f64, f64), sigma: f64) -> Vec<Complex64> {
        let mut rng = crate::rng::stream(seed, 0);
        (0..n)
            .map(|_| {
                let m = if rng.gen::<f64>() < w { mu.0 } else { mu.1 };
                let a: f64 = rng.sample(StandardNormal);
                let b: f64 = rng.sample(StandardNormal);
                Complex64::new(m + sigma * a, 0.3 + sigma * b)
            })
            .collect()
    }

    #[test]
    fn pure_component_keeps_full_weight() {
        let iq = draw(10_000, 1, 1.0, (0.0, 6.0), 1.0);
        let init = MixtureInit { low: 0.0, high: 6.0, sigma: 1.0 };
        let fit = fit_mixture_iq(&iq, LevelLabel::G, init, &MixtureOptions::default()).unwrap();
        assert!(fit.dominant_weight >= 0.995);
        assert!(fit.dominant_mean.re.abs() < 0.05);
    }

    #[test]
    fn unresolved_split_falls_back_to_one_gaussian() {
        // Initial means inside one blob: EM can split it, BIC must undo that.
        let iq = draw(50_000, 4, 1.0, (0.0, 0.0), 1.0);
        let init = MixtureInit { low: -0.8, high: 0.8, sigma: 0.6 };
        let fit = fit_mixture_iq(&iq, LevelLabel::G, init, &MixtureOptions::default()).unwrap();
        assert_eq!(fit.dominant_weight, 1.0);
        assert!((fit.sigma_dominant - 1.0).abs() < 0.02);
    }

    #[test]
    fn known_mixture_round_trip() {
        let iq = draw(10_000, 2, 0.97, (0.0, 6.0), 1.0);
        let init = MixtureInit { low: 0.0, high: 6.0, sigma: 1.0 };
        let fit = fit_mixture_iq(&iq, LevelLabel::G, init, &MixtureOptions::default()).unwrap();
        assert!(fit.converged);
        assert!((fit.dominant_weight - 0.97).abs() < 0.01);
        assert!(fit.dominant_mean.re.abs() < 0.1);
        assert!((fit.secondary_mean.re - 6.0).abs() < 0.1);
        assert!((fit.dominant_mean.im - 0.3).abs() < 0.05);
        assert!((fit.sigma_dominant - 1.0).abs() < 0.03);
    }

    #[test]
    fn mixture_beats_single_gaussian() {
        let iq = draw(5_000, 3, 0.8, (0.0, 3.0), 1.0);
        let init = MixtureInit::median_split(&iq.iter().map(|z| z.re).collect::<Vec<_>>()).unwrap();
        let fit = fit_mixture_iq(&iq, LevelLabel::E, init, &MixtureOptions::default()).unwrap();
        assert!(fit.log_likelihood >= single_gaussian(&iq).2);
        let (lo, hi) = iq.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), z| (a.min(z.re), b.max(z.re)));
        assert!(fit.dominant_mean.re > lo && fit.dominant_mean.re < hi);
    }

    #[test]
    fn separate_sigmas() {
        let mut iq = draw(8_000, 4, 1.0, (0.0, 0.0), 1.0);
        iq.extend(draw(2_000, 5, 1.0, (8.0, 8.0), 2.0));
        let init = MixtureInit { low: 0.0, high: 8.0, sigma: 1.5 };
        let opts = MixtureOptions {
            sigma: SigmaMode::Separate,
            ..Default::default()
        };
        let fit = fit_mixture_iq(&iq, LevelLabel::G, init, &opts).unwrap();
        assert!((fit.sigma_dominant - 1.0).abs() < 0.05);
        assert!((fit.sigma_secondary - 2.0).abs() < 0.1);
        assert!((fit.dominant_weight - 0.8).abs() < 0.01);
    }

    #[test]
    fn degenerate_inputs() {
        let flat = vec![Complex64::new(1.0, 0.0); 600];
        let init = MixtureInit { low: 0.0, high: 1.0, sigma: 1.0 };
        assert!(matches!(
            fit_mixture_iq(&flat, LevelLabel::G, init, &MixtureOptions::default()),
            Err(Error::DegenerateInput(_))
        ));
        let few = draw(100, 6, 1.0, (0.0, 0.0), 1.0);
        assert!(fit_mixture_iq(&few, LevelLabel::G, init, &MixtureOptions::default()).is_err());
    }
}
