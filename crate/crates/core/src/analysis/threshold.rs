//! Exhaustive empirical threshold search on the I axis.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Threshold {
    pub value: f64,
    /// `true` when outcome 1 (e) is assigned to `I > value`.
    pub e_above: bool,
    /// Assignment fidelity achieved on the data the threshold was chosen on.
    pub fidelity: f64,
    /// The two distributions are statistically indistinguishable; `value` is
    /// the midpoint of their means.
    pub degenerate: bool,
}

impl Threshold {
    pub fn classify(&self, i: f64) -> u8 {
        u8::from((i > self.value) == self.e_above)
    }
}

/// Threshold maximizing `[P(0|g) + P(1|e)] / 2` over all midpoints between
/// consecutive distinct values; among maximizers the lowest wins.
pub fn optimal_threshold(g: &[f64], e: &[f64]) -> Result<Threshold> {
    if g.is_empty() || e.is_empty() {
        return Err(Error::DegenerateInput("threshold search needs shots of both states".into()));
    }
    if g.iter().chain(e).any(|v| !v.is_finite()) {
        return Err(Error::DegenerateInput("non-finite I values".into()));
    }
    let mut tagged: Vec<(f64, bool)> = g.iter().map(|&v| (v, false)).chain(e.iter().map(|&v| (v, true))).collect();
    tagged.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (ng, ne) = (g.len() as f64, e.len() as f64);

    // Fidelity with e above the cut is (g_below / ng + e_above / ne) / 2; the
    // flipped orientation scores 1 minus that.
    let mut g_below = 0usize;
    let mut e_below = 0usize;
    let mut best: Option<(f64, f64, bool)> = None;
    let mut k = 0;
    while k < tagged.len() {
        let v = tagged[k].0;
        while k < tagged.len() && tagged[k].0 == v {
            if tagged[k].1 {
                e_below += 1;
            } else {
                g_below += 1;
            }
            k += 1;
        }
        if k == tagged.len() {
            break;
        }
        let cut = 0.5 * (v + tagged[k].0);
        let f_up = 0.5 * (g_below as f64 / ng + (ne - e_below as f64) / ne);
        for (f, up) in [(f_up, true), (1.0 - f_up, false)] {
            if best.is_none_or(|b| f > b.1) {
                best = Some((cut, f, up));
            }
        }
    }

    let min_n = ng.min(ne);
    let mid = 0.5 * (mean(g) + mean(e));
    match best {
        Some((value, fidelity, e_above)) if fidelity - 0.5 >= 2.0 / min_n.sqrt() => Ok(Threshold {
            value,
            e_above,
            fidelity,
            degenerate: false,
        }),
        _ => {
            let e_above = mean(e) >= mean(g);
            let at_mid = |v: &[f64], above: bool| v.iter().filter(|&&x| (x > mid) == above).count() as f64;
            let fidelity = 0.5 * (at_mid(g, !e_above) / ng + at_mid(e, e_above) / ne);
            Ok(Threshold {
                value: mid,
                e_above,
                fidelity,
                degenerate: true,
            })
        }
    }
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}
