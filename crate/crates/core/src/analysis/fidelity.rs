//! Assignment and repeatability fidelities, the overlap error of the dominant
//! Gaussians and the split of the remaining error into preparation/mixing.

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use super::mixture::{fit_mixture_with, MixtureFit, MixtureOptions};
use super::threshold::{optimal_threshold, Threshold};
use crate::shots::ShotBatch;
use crate::{Error, LevelLabel, Result};

/// Wilson score interval for `k` successes out of `n` at 95% confidence.
pub fn wilson_interval(k: usize, n: usize) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959_963_984_540_054;
    let n = n as f64;
    let p = k as f64 / n;
    let denom = 1.0 + z * z / n;
    let center = (p + z * z / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// `counts[prepared][outcome]`, prepared 0 = g, 1 = e.
pub type Confusion = [[usize; 2]; 2];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assignment {
    pub fidelity: f64,
    pub p0_given_g: f64,
    pub p1_given_e: f64,
    pub p0_given_g_ci: (f64, f64),
    pub p1_given_e_ci: (f64, f64),
    pub counts: Confusion,
}

/// `F = [P(0|g) + P(1|e)] / 2`.
pub fn fidelity_from_conditionals(p0_given_g: f64, p1_given_e: f64) -> f64 {
    0.5 * (p0_given_g + p1_given_e)
}

pub fn assignment_fidelity(g: &[f64], e: &[f64], threshold: &Threshold) -> Result<Assignment> {
    if g.is_empty() || e.is_empty() {
        return Err(Error::DegenerateInput("assignment needs shots of both states".into()));
    }
    let mut counts = [[0usize; 2]; 2];
    for &v in g {
        counts[0][threshold.classify(v) as usize] += 1;
    }
    for &v in e {
        counts[1][threshold.classify(v) as usize] += 1;
    }
    let p0 = counts[0][0] as f64 / g.len() as f64;
    let p1 = counts[1][1] as f64 / e.len() as f64;
    Ok(Assignment {
        fidelity: fidelity_from_conditionals(p0, p1),
        p0_given_g: p0,
        p1_given_e: p1,
        p0_given_g_ci: wilson_interval(counts[0][0], g.len()),
        p1_given_e_ci: wilson_interval(counts[1][1], e.len()),
        counts,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Qnd {
    pub f_q: f64,
    /// P(M2 = 0 | M1 = 0).
    pub p00: f64,
    /// P(M2 = 1 | M1 = 1).
    pub p11: f64,
    pub p00_ci: (f64, f64),
    pub p11_ci: (f64, f64),
    /// `counts[m1][m2]`.
    pub counts: Confusion,
}

/// `F_Q = [P(0|0) + P(1|1)] / 2`.
pub fn qnd_from_conditionals(p00: f64, p11: f64) -> f64 {
    0.5 * (p00 + p11)
}

/// Repeatability of two successive binary outcomes per repetition.
pub fn qnd_fidelity(m1: &[u8], m2: &[u8]) -> Result<Qnd> {
    if m1.len() != m2.len() {
        return Err(Error::DegenerateInput("M1 and M2 outcome arrays differ in length".into()));
    }
    let mut counts = [[0usize; 2]; 2];
    for (&a, &b) in m1.iter().zip(m2) {
        if a > 1 || b > 1 {
            return Err(Error::DegenerateInput("outcomes must be 0 or 1".into()));
        }
        counts[a as usize][b as usize] += 1;
    }
    let n0 = counts[0][0] + counts[0][1];
    let n1 = counts[1][0] + counts[1][1];
    if n0 == 0 {
        return Err(Error::UndefinedConditional(0));
    }
    if n1 == 0 {
        return Err(Error::UndefinedConditional(1));
    }
    let p00 = counts[0][0] as f64 / n0 as f64;
    let p11 = counts[1][1] as f64 / n1 as f64;
    Ok(Qnd {
        f_q: qnd_from_conditionals(p00, p11),
        p00,
        p11,
        p00_ci: wilson_interval(counts[0][0], n0),
        p11_ci: wilson_interval(counts[1][1], n1),
        counts,
    })
}

/// Mass of `N(mean, sigma)` on the side of `t` that reads as `outcome`.
fn mass(mean: f64, sigma: f64, threshold: &Threshold, outcome: u8) -> f64 {
    let z = (threshold.value - mean) / (sigma * std::f64::consts::SQRT_2);
    let above = 0.5 * erfc(z);
    let reads_above = (outcome == 1) == threshold.e_above;
    if reads_above {
        above
    } else {
        1.0 - above
    }
}

/// Overlap error of the two dominant Gaussians at `threshold`.
pub fn epsilon_snr(fit_g: &MixtureFit, fit_e: &MixtureFit, threshold: &Threshold) -> f64 {
    let tail_g = mass(fit_g.dominant_mean.re, fit_g.sigma_dominant, threshold, 1);
    let tail_e = mass(fit_e.dominant_mean.re, fit_e.sigma_dominant, threshold, 0);
    0.5 * (tail_g + tail_e)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorBudget {
    pub eps_snr: f64,
    pub eps_prep_mix: f64,
}

/// Split the model error `1 - F` into dominant overlap and the share carried
/// by the secondary components; the two add up to the fitted `1 - F`.
pub fn error_decomposition(fit_g: &MixtureFit, fit_e: &MixtureFit, threshold: &Threshold) -> ErrorBudget {
    let part = |fit: &MixtureFit, wrong: u8| {
        let dom = mass(fit.dominant_mean.re, fit.sigma_dominant, threshold, wrong);
        let sec = mass(fit.secondary_mean.re, fit.sigma_secondary, threshold, wrong);
        fit.secondary_weight() * (sec - dom)
    };
    ErrorBudget {
        eps_snr: epsilon_snr(fit_g, fit_e, threshold),
        eps_prep_mix: 0.5 * (part(fit_g, 1) + part(fit_e, 0)),
    }
}

/// `|mu_e - mu_g| / (sigma_g + sigma_e)` of the dominant components.
pub fn fit_snr(fit_g: &MixtureFit, fit_e: &MixtureFit) -> f64 {
    (fit_e.dominant_mean.re - fit_g.dominant_mean.re).abs() / (fit_g.sigma_dominant + fit_e.sigma_dominant)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FidelityReport {
    pub threshold: f64,
    pub e_above: bool,
    pub degenerate: bool,
    #[serde(rename = "F")]
    pub fidelity: f64,
    #[serde(rename = "F_ci")]
    pub fidelity_ci: (f64, f64),
    #[serde(rename = "F_Q")]
    pub f_q: Option<f64>,
    /// Equal to `F_Q` by construction: M1 heralds the state M2 assigns.
    pub heralded_fidelity: Option<f64>,
    pub p00: Option<f64>,
    pub p11: Option<f64>,
    pub eps_snr: f64,
    pub eps_prep_mix: f64,
    pub snr: f64,
    pub counts: Confusion,
    pub fit_g: MixtureFit,
    pub fit_e: MixtureFit,
}

impl FidelityReport {
    pub fn with_qnd(mut self, qnd: &Qnd) -> Self {
        self.f_q = Some(qnd.f_q);
        self.heralded_fidelity = Some(qnd.f_q);
        self.p00 = Some(qnd.p00);
        self.p11 = Some(qnd.p11);
        self
    }
}

/// Full single-shot pipeline on a g/e batch.
pub fn analyze_single_shot(batch: &ShotBatch) -> Result<FidelityReport> {
    analyze_single_shot_with(batch, &MixtureOptions::default())
}

pub fn analyze_single_shot_with(batch: &ShotBatch, opts: &MixtureOptions) -> Result<FidelityReport> {
    let g = batch.i_for(LevelLabel::G);
    let e = batch.i_for(LevelLabel::E);
    let fit_g = fit_mixture_with(batch, LevelLabel::G, opts)?;
    let fit_e = fit_mixture_with(batch, LevelLabel::E, opts)?;
    let threshold = optimal_threshold(&g, &e)?;
    let assignment = assignment_fidelity(&g, &e, &threshold)?;
    let budget = error_decomposition(&fit_g, &fit_e, &threshold);
    // F = (k_g + k_e) / (n_g + n_e) when the preparations are balanced.
    let correct = assignment.counts[0][0] + assignment.counts[1][1];
    Ok(FidelityReport {
        threshold: threshold.value,
        e_above: threshold.e_above,
        degenerate: threshold.degenerate,
        fidelity: assignment.fidelity,
        fidelity_ci: wilson_interval(correct, g.len() + e.len()),
        f_q: None,
        heralded_fidelity: None,
        p00: None,
        p11: None,
        eps_snr: budget.eps_snr,
        eps_prep_mix: budget.eps_prep_mix,
        snr: fit_snr(&fit_g, &fit_e),
        counts: assignment.counts,
        fit_g,
        fit_e,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn fit(prepared: LevelLabel, mu: f64, sigma: f64, w: f64, mu2: f64) -> MixtureFit {
        MixtureFit {
            prepared,
            dominant_mean: Complex64::new(mu, 0.0),
            secondary_mean: Complex64::new(mu2, 0.0),
            sigma_dominant: sigma,
            sigma_secondary: sigma,
            dominant_weight: w,
            log_likelihood: 0.0,
            converged: true,
            iterations: 1,
            n_shots: 10_000,
        }
    }

    fn cut(value: f64) -> Threshold {
        Threshold {
            value,
            e_above: true,
            fidelity: 1.0,
            degenerate: false,
        }
    }

    #[test]
    fn conditional_formulas() {
        assert_eq!(fidelity_from_conditionals(1.0, 1.0), 1.0);
        assert_eq!(fidelity_from_conditionals(0.5, 0.5), 0.5);
        assert!((qnd_from_conditionals(0.995, 0.997) - 0.996).abs() < 1e-12);
    }

    #[test]
    fn perfect_repeatability() {
        let m1: Vec<u8> = (0..100).map(|k| (k % 3 == 0) as u8).collect();
        let q = qnd_fidelity(&m1, &m1).unwrap();
        assert_eq!(q.f_q, 1.0);
        assert_eq!(q.p00 + (q.counts[0][1] as f64 / (q.counts[0][0] + q.counts[0][1]) as f64), 1.0);
    }

    #[test]
    fn empty_m1_class_is_undefined() {
        assert!(matches!(qnd_fidelity(&[0, 0], &[0, 1]), Err(Error::UndefinedConditional(1))));
        assert!(matches!(qnd_fidelity(&[1], &[1]), Err(Error::UndefinedConditional(0))));
    }

    #[test]
    fn overlap_matches_erfc() {
        // SNR = 0 -> one half.
        let t = cut(0.0);
        assert!((epsilon_snr(&fit(LevelLabel::G, 0.0, 1.0, 1.0, 0.0), &fit(LevelLabel::E, 0.0, 1.0, 1.0, 0.0), &t) - 0.5).abs() < 1e-15);
        // Delta mu = 8 sigma -> erfc(4 / sqrt 2) / 2 = 3.167e-5.
        let eps = epsilon_snr(&fit(LevelLabel::G, -4.0, 1.0, 1.0, 0.0), &fit(LevelLabel::E, 4.0, 1.0, 1.0, 0.0), &t);
        assert!((eps - 3.167_124_183e-5).abs() / eps < 1e-6, "{eps}");
        // SNR giving 0.5%: Delta mu / (2 sigma) = sqrt(2) erfc^-1(0.01).
        let snr = std::f64::consts::SQRT_2 * statrs::function::erf::erfc_inv(0.01);
        assert!((snr - 2.575_829).abs() < 1e-5);
        let eps = epsilon_snr(&fit(LevelLabel::G, -snr, 1.0, 1.0, 0.0), &fit(LevelLabel::E, snr, 1.0, 1.0, 0.0), &t);
        assert!((eps - 0.005).abs() < 1e-9);
    }

    #[test]
    fn decomposition_of_prep_error() {
        let t = cut(5.0);
        let g = fit(LevelLabel::G, 0.0, 1.0, 0.97, 10.0);
        let e = fit(LevelLabel::E, 10.0, 1.0, 1.0, 10.0);
        let b = error_decomposition(&g, &e, &t);
        assert!(b.eps_snr < 1e-6);
        assert!((b.eps_prep_mix - 0.015).abs() < 1e-5);

        let clean = error_decomposition(&fit(LevelLabel::G, 0.0, 1.0, 1.0, 0.0), &e, &t);
        assert_eq!(clean.eps_prep_mix, 0.0);
    }

    #[test]
    fn wilson_bounds() {
        let (lo, hi) = wilson_interval(9_950, 10_000);
        assert!(lo < 0.995 && hi > 0.995 && hi - lo < 0.004);
        assert_eq!(wilson_interval(0, 0), (0.0, 1.0));
    }
}
