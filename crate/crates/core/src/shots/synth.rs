//! Closed-form integration of the reflected field along a level trajectory.
//!
//! Between events (jumps, pulse edges, window edges) the qubit level and the
//! drive are constant, so the intracavity field relaxes exponentially toward
//! the level's steady state and every window integral is a sum of
//! exponentials. The reflected field is scaled by a fixed gain such that a
//! steady pointer carries `f kappa n_bar` photons per second; integrating for
//! `tau` and normalizing by `sqrt(tau)` gives shots in sqrt(photon) units with
//! magnitude `sqrt(n_m)`. Amplifier noise adds `sqrt(n_n / 2)` per quadrature.
//!
//! Batches are then divided by the reference sigma (one unit = amplifier-off
//! noise) and rotated so that the g -> e pointer separation lies along +I.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{Demodulation, NoiseConfig, ReadoutConfig};
use crate::dynamics::{evolve, DriveSegment, LevelTrajectory, PulseTrain, RateModel};
use crate::model::{reflection, steady_amplitude, CavityParams};
use crate::rng::{self, StreamRng};
use crate::units::mhz_to_angular;
use crate::{Error, LevelLabel, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShotBatch {
    pub i_vals: Vec<f64>,
    pub q_vals: Vec<f64>,
    pub prepared: Vec<LevelLabel>,
    pub config: ReadoutConfig,
    pub noise: NoiseConfig,
    pub seed: u64,
}

impl ShotBatch {
    pub fn len(&self) -> usize {
        self.i_vals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.i_vals.is_empty()
    }

    /// I values of shots prepared in `level`.
    pub fn i_for(&self, level: LevelLabel) -> Vec<f64> {
        self.select(level).map(|k| self.i_vals[k]).collect()
    }

    /// Complex I + iQ values of shots prepared in `level`.
    pub fn iq_for(&self, level: LevelLabel) -> Vec<Complex64> {
        self.select(level)
            .map(|k| Complex64::new(self.i_vals[k], self.q_vals[k]))
            .collect()
    }

    fn select(&self, level: LevelLabel) -> impl Iterator<Item = usize> + '_ {
        self.prepared
            .iter()
            .enumerate()
            .filter(move |(_, p)| **p == level)
            .map(|(k, _)| k)
    }

    pub fn check(&self) -> Result<()> {
        if self.q_vals.len() != self.i_vals.len() || self.prepared.len() != self.i_vals.len() {
            return Err(Error::Format("I, Q and label columns differ in length".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
struct LevelField {
    /// `i D - kappa/2`, 1/s.
    lambda: Complex64,
    /// Steady intracavity amplitude with the drive on.
    steady: Complex64,
}

#[derive(Debug, Clone, Copy)]
struct Window {
    start: f64,
    end: f64,
    pulse_start: f64,
}

/// Turns level trajectories into integrated I/Q records for one readout
/// configuration and a sequence of identical pulses.
#[derive(Debug, Clone)]
pub struct ShotSynthesizer {
    cfg: ReadoutConfig,
    noise: NoiseConfig,
    eps: f64,
    sqrt_kappa_s: f64,
    kappa: f64,
    gain: f64,
    /// `exp(-i theta) / reference sigma`.
    to_batch_units: Complex64,
    fields: Vec<Option<LevelField>>,
    pulses: Vec<(f64, f64)>,
    windows: Vec<Window>,
}

impl ShotSynthesizer {
    /// One pulse starting at t = 0.
    pub fn new(cavity: &CavityParams, cfg: &ReadoutConfig, noise: &NoiseConfig) -> Result<Self> {
        Self::with_pulses(cavity, cfg, noise, &[0.0])
    }

    /// Identical pulses starting at each of `starts` (ascending); each is
    /// integrated over its final `tau_int`.
    pub fn with_pulses(
        cavity: &CavityParams,
        cfg: &ReadoutConfig,
        noise: &NoiseConfig,
        starts: &[f64],
    ) -> Result<Self> {
        cavity.validate()?;
        cfg.validate()?;
        noise.validate()?;
        if starts.is_empty() || starts.windows(2).any(|w| w[1] < w[0] + cfg.pulse_len) {
            return Err(Error::param("pulses", "pulse starts must be ascending and non-overlapping"));
        }
        let eps = cfg.drive_amp(cavity)?;
        let kappa = cavity.kappa_angular();
        let mut fields = Vec::new();
        for &level in cavity.chi.keys() {
            let idx = level.index();
            if fields.len() <= idx {
                fields.resize(idx + 1, None);
            }
            fields[idx] = Some(LevelField {
                lambda: cavity.field_eigenvalue(cfg.drive_freq, level)?,
                steady: steady_amplitude(cavity, level, eps, cfg.drive_freq)?,
            });
        }

        let gamma_g = reflection(cavity, cfg.drive_freq, LevelLabel::G)?;
        let gamma_e = reflection(cavity, cfg.drive_freq, LevelLabel::E)?;
        let mean_gamma = 0.5 * (gamma_g.norm() + gamma_e.norm());
        let gain = if mean_gamma > 0.0 && eps > 0.0 {
            (cfg.f_factor() * kappa * cfg.n_bar).sqrt() / (eps * mean_gamma)
        } else {
            0.0
        };
        let axis = gamma_e - gamma_g;
        let rotation = if axis.norm() > 0.0 {
            Complex64::from_polar(1.0, -axis.arg())
        } else {
            Complex64::new(1.0, 0.0)
        };
        let reference_sigma = (0.5 * cfg.reference_noise_photons).sqrt();

        let pulses: Vec<(f64, f64)> = starts.iter().map(|&s| (s, s + cfg.pulse_len)).collect();
        let windows = pulses
            .iter()
            .map(|&(s, e)| Window {
                start: e - cfg.tau_int,
                end: e,
                pulse_start: s,
            })
            .collect();
        Ok(ShotSynthesizer {
            cfg: cfg.clone(),
            noise: *noise,
            eps,
            sqrt_kappa_s: mhz_to_angular(cavity.kappa_s).sqrt(),
            kappa,
            gain,
            to_batch_units: rotation / reference_sigma,
            fields,
            pulses,
            windows,
        })
    }

    /// End of the last pulse.
    pub fn duration(&self) -> f64 {
        self.pulses.last().map_or(0.0, |p| p.1)
    }

    pub fn config(&self) -> &ReadoutConfig {
        &self.cfg
    }

    /// Photon-number schedule seen by the rate model.
    pub fn photon_schedule(&self) -> PulseTrain {
        let segments: Vec<DriveSegment> = self
            .pulses
            .iter()
            .map(|&(start, end)| DriveSegment {
                start,
                end,
                n_bar: self.cfg.n_bar,
            })
            .collect();
        PulseTrain::new(&segments, self.kappa)
    }

    /// Per-quadrature noise sigma in batch units.
    pub fn noise_sigma(&self) -> f64 {
        self.noise.sigma() * self.to_batch_units.norm()
    }

    fn field(&self, level: LevelLabel) -> Result<LevelField> {
        self.fields
            .get(level.index())
            .copied()
            .flatten()
            .ok_or(Error::UnknownLevel(level))
    }

    /// Noiseless integrated record (one value per pulse) in batch units.
    pub fn noiseless(&self, traj: &LevelTrajectory) -> Result<Vec<Complex64>> {
        let end = self.duration();
        let mut events: Vec<f64> = vec![0.0, end];
        for &(s, e) in &self.pulses {
            events.extend([s, e]);
        }
        for w in &self.windows {
            events.extend([w.start, w.end]);
        }
        events.extend(traj.jump_times.iter().copied().filter(|&t| t > 0.0 && t < end));
        events.sort_by(f64::total_cmp);
        events.dedup();

        let mut sums = vec![Complex64::new(0.0, 0.0); self.windows.len()];
        let mut alpha = Complex64::new(0.0, 0.0);
        for span in events.windows(2) {
            let (a, b) = (span[0], span[1]);
            if b <= a {
                continue;
            }
            let field = self.field(traj.level_at(a))?;
            let driven = self.pulses.iter().any(|&(s, e)| a >= s && a < e);
            let target = if driven { field.steady } else { Complex64::new(0.0, 0.0) };
            let drive = if driven { self.eps } else { 0.0 };
            // b(t) = gain (drive + sqrt(kappa_s) alpha(t)), alpha = target + (alpha0 - target) e^{lambda (t - a)}
            let constant = self.gain * (drive + self.sqrt_kappa_s * target);
            let transient = self.gain * self.sqrt_kappa_s * (alpha - target);
            for (w, sum) in self.windows.iter().zip(sums.iter_mut()) {
                if a >= w.start && b <= w.end {
                    *sum += self.window_integral(w, a, b, constant, transient, field.lambda);
                }
            }
            alpha = target + (alpha - target) * (field.lambda * (b - a)).exp();
        }
        Ok(sums
            .into_iter()
            .zip(&self.windows)
            .map(|(s, w)| s * self.to_batch_units / self.weight_norm(w))
            .collect())
    }

    /// Noisy record: noiseless record plus independent Gaussian noise on each
    /// quadrature of each window.
    pub fn sample(&self, traj: &LevelTrajectory, rng: &mut StreamRng) -> Result<Vec<Complex64>> {
        let sigma = self.noise_sigma();
        Ok(self
            .noiseless(traj)?
            .into_iter()
            .map(|z| {
                let ni: f64 = rng.sample(StandardNormal);
                let nq: f64 = rng.sample(StandardNormal);
                z + Complex64::new(ni, nq) * sigma
            })
            .collect())
    }

    /// Steady shot for a level that never jumps.
    pub fn pointer(&self, level: LevelLabel) -> Result<Complex64> {
        let traj = LevelTrajectory {
            initial: level,
            jump_times: Vec::new(),
            levels: Vec::new(),
        };
        Ok(self.noiseless(&traj)?[0])
    }

    /// Weight terms `(c, mu)` with `w(t) = sum c exp(mu (t - pulse_start))`.
    fn weights(&self) -> &'static [(f64, f64)] {
        match self.cfg.demod {
            Demodulation::Boxcar => &[(1.0, 0.0)],
            Demodulation::Matched => &[(1.0, 0.0), (-1.0, -0.5)],
        }
    }

    fn window_integral(
        &self,
        w: &Window,
        a: f64,
        b: f64,
        constant: Complex64,
        transient: Complex64,
        lambda: Complex64,
    ) -> Complex64 {
        let mut total = Complex64::new(0.0, 0.0);
        for &(c, mu_scale) in self.weights() {
            let mu = Complex64::new(mu_scale * self.kappa, 0.0);
            let shift = (mu * (a - w.pulse_start)).exp();
            total += constant * c * shift * exp_integral(mu, b - a);
            total += transient * c * shift * exp_integral(mu + lambda, b - a);
        }
        total
    }

    /// `sqrt(integral of w^2)` over the window.
    fn weight_norm(&self, w: &Window) -> f64 {
        let terms = self.weights();
        let mut total = 0.0;
        for &(c1, m1) in terms {
            for &(c2, m2) in terms {
                let mu = Complex64::new((m1 + m2) * self.kappa, 0.0);
                let shift = (mu * (w.start - w.pulse_start)).exp();
                total += c1 * c2 * (shift * exp_integral(mu, w.end - w.start)).re;
            }
        }
        total.sqrt()
    }
}

/// `integral_0^d exp(nu t) dt`, stable as `nu -> 0`.
fn exp_integral(nu: Complex64, d: f64) -> Complex64 {
    let x = nu * d;
    if x.norm() < 1e-5 {
        d * (1.0 + x / 2.0 + x * x / 6.0)
    } else {
        (x.exp() - 1.0) / nu
    }
}

/// Integrated records (one complex value per pulse) for every label in
/// `prepared_list`, `n_shots` each, grouped in list order. Repetition `k`
/// (global index) uses random stream `k` of `seed` for preparation, level
/// dynamics and noise.
#[allow(clippy::too_many_arguments)]
pub fn synthesize_records(
    synth: &ShotSynthesizer,
    prepared_list: &[LevelLabel],
    rates: &RateModel,
    n_shots: usize,
    seed: u64,
) -> Result<(Vec<LevelLabel>, Vec<Vec<Complex64>>)> {
    if n_shots == 0 {
        return Err(Error::param("n_shots", "must be >= 1"));
    }
    rates.validate()?;
    for &level in &rates.levels {
        synth.field(level)?;
    }
    let schedule = synth.photon_schedule();
    let duration = synth.duration();
    let prep_error = synth.cfg.prep_error;

    let jobs: Vec<LevelLabel> = prepared_list
        .iter()
        .flat_map(|&l| std::iter::repeat_n(l, n_shots))
        .collect();
    let records = jobs
        .par_iter()
        .enumerate()
        .map(|(k, &prepared)| {
            let mut rng = rng::stream(seed, k as u64);
            let initial = prepare(prepared, prep_error, &mut rng);
            let traj = evolve(initial, rates, &schedule, duration, &mut rng)?;
            synth.sample(&traj, &mut rng)
        })
        .collect::<Result<_>>()?;
    Ok((jobs, records))
}

/// Single-pulse shots for every label in `prepared_list`, `n_shots` each.
pub fn synthesize_batch(
    prepared_list: &[LevelLabel],
    cavity: &CavityParams,
    cfg: &ReadoutConfig,
    noise: &NoiseConfig,
    rates: &RateModel,
    n_shots: usize,
    seed: u64,
) -> Result<ShotBatch> {
    let synth = ShotSynthesizer::new(cavity, cfg, noise)?;
    let (prepared, records) = synthesize_records(&synth, prepared_list, rates, n_shots, seed)?;
    Ok(ShotBatch {
        i_vals: records.iter().map(|r| r[0].re).collect(),
        q_vals: records.iter().map(|r| r[0].im).collect(),
        prepared,
        config: cfg.clone(),
        noise: *noise,
        seed,
    })
}

/// Imperfect preparation swaps g and e with probability `prep_error`.
pub fn prepare(level: LevelLabel, prep_error: f64, rng: &mut StreamRng) -> LevelLabel {
    let flip = prep_error > 0.0 && rng.gen::<f64>() < prep_error;
    match (level, flip) {
        (LevelLabel::G, true) => LevelLabel::E,
        (LevelLabel::E, true) => LevelLabel::G,
        (l, _) => l,
    }
}
