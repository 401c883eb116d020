//! Continuous-time Markov jump process with time-dependent rates, sampled by
//! thinning against a per-piece upper bound of the exit rate.

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::rates::RateModel;
use super::schedule::PhotonSchedule;
use crate::error::ensure_positive;
use crate::rng::{self, StreamRng};
use crate::{LevelLabel, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelTrajectory {
    pub initial: LevelLabel,
    /// Strictly increasing jump times in seconds.
    pub jump_times: Vec<f64>,
    /// Level entered at each jump.
    pub levels: Vec<LevelLabel>,
}

impl LevelTrajectory {
    pub fn level_at(&self, t: f64) -> LevelLabel {
        let k = self.jump_times.partition_point(|&tj| tj <= t);
        if k == 0 {
            self.initial
        } else {
            self.levels[k - 1]
        }
    }

    pub fn final_level(&self) -> LevelLabel {
        self.levels.last().copied().unwrap_or(self.initial)
    }

    /// `(start, end, level)` pieces covering `[t0, t1]`.
    pub fn pieces(&self, t0: f64, t1: f64) -> Vec<(f64, f64, LevelLabel)> {
        let mut out = Vec::new();
        let mut start = t0;
        let mut level = self.level_at(t0);
        for (&tj, &lj) in self.jump_times.iter().zip(&self.levels) {
            if tj <= t0 {
                continue;
            }
            if tj >= t1 {
                break;
            }
            out.push((start, tj, level));
            start = tj;
            level = lj;
        }
        out.push((start, t1, level));
        out
    }
}

/// Sample one trajectory of length `duration` starting in `initial`.
pub fn evolve<S: PhotonSchedule + ?Sized>(
    initial: LevelLabel,
    rates: &RateModel,
    schedule: &S,
    duration: f64,
    rng: &mut StreamRng,
) -> Result<LevelTrajectory> {
    ensure_positive("duration", duration)?;
    let mut state = rates.index_of(initial)?;
    let mut traj = LevelTrajectory {
        initial,
        jump_times: Vec::new(),
        levels: Vec::new(),
    };
    let n = rates.n_levels();
    let mut t = 0.0;
    while t < duration {
        let piece_end = schedule.piece_end(t).min(duration);
        let bound = rates.exit_rate_bound(state, schedule.bound(t, piece_end));
        if bound <= 0.0 {
            t = piece_end;
            continue;
        }
        let wait: f64 = Exp1.sample(rng);
        let candidate = t + wait / bound;
        if candidate >= piece_end {
            t = piece_end;
            continue;
        }
        t = candidate;
        let n_bar = schedule.photons(t);
        let exit = rates.exit_rate(state, n_bar);
        let u: f64 = rng.gen::<f64>() * bound;
        if u >= exit {
            continue;
        }
        // Pick the destination in proportion to its rate.
        let mut pick = rng.gen::<f64>() * exit;
        let mut next = None;
        for j in 0..n {
            let r = if j == state { 0.0 } else { rates.rate(state, j, n_bar) };
            if r <= 0.0 {
                continue;
            }
            next = Some(j);
            if pick < r {
                break;
            }
            pick -= r;
        }
        if let Some(next) = next {
            state = next;
            traj.jump_times.push(t);
            traj.levels.push(rates.levels[state]);
        }
    }
    Ok(traj)
}

/// `count` independent trajectories; trajectory `k` uses stream `k` of `seed`,
/// so the result is independent of the rayon thread count.
pub fn evolve_ensemble<S: PhotonSchedule + ?Sized>(
    initial: LevelLabel,
    rates: &RateModel,
    schedule: &S,
    duration: f64,
    seed: u64,
    count: usize,
) -> Result<Vec<LevelTrajectory>> {
    rates.validate()?;
    (0..count)
        .into_par_iter()
        .map(|k| {
            let mut rng = rng::stream(seed, k as u64);
            evolve(initial, rates, schedule, duration, &mut rng)
        })
        .collect()
}

/// Fraction of trajectories in each of `rates.levels` at time `t`.
pub fn occupations_at(trajectories: &[LevelTrajectory], rates: &RateModel, t: f64) -> Result<Vec<f64>> {
    let mut counts = vec![0usize; rates.n_levels()];
    for traj in trajectories {
        counts[rates.index_of(traj.level_at(t))?] += 1;
    }
    let total = trajectories.len().max(1) as f64;
    Ok(counts.into_iter().map(|c| c as f64 / total).collect())
}
