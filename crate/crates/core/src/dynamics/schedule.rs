//! Intracavity photon number as a function of time, as seen by the rate model.
//!
//! Jump sampling needs, besides `n(t)`, the end of the current smooth piece and
//! an upper bound of `n` on it (for thinning).

/// Time-dependent mean photon number.
pub trait PhotonSchedule: Sync {
    fn photons(&self, t: f64) -> f64;

    /// End of the piece containing `t`; `f64::INFINITY` if `n` stays smooth.
    fn piece_end(&self, t: f64) -> f64;

    /// Upper bound on `photons` over `[t0, t1]`.
    fn bound(&self, t0: f64, t1: f64) -> f64;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantPhotons(pub f64);

impl PhotonSchedule for ConstantPhotons {
    fn photons(&self, _t: f64) -> f64 {
        self.0
    }

    fn piece_end(&self, _t: f64) -> f64 {
        f64::INFINITY
    }

    fn bound(&self, _t0: f64, _t1: f64) -> f64 {
        self.0
    }
}

/// Arbitrary schedule with a caller-supplied global upper bound.
pub struct FnSchedule<F> {
    pub f: F,
    pub max_photons: f64,
}

impl<F: Fn(f64) -> f64 + Sync> PhotonSchedule for FnSchedule<F> {
    fn photons(&self, t: f64) -> f64 {
        (self.f)(t)
    }

    fn piece_end(&self, _t: f64) -> f64 {
        f64::INFINITY
    }

    fn bound(&self, _t0: f64, _t1: f64) -> f64 {
        self.max_photons
    }
}

/// A drive held at a steady photon number between `start` and `end`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveSegment {
    pub start: f64,
    pub end: f64,
    pub n_bar: f64,
}

/// Square drive pulses filtered by the cavity: the field amplitude
/// `a = sqrt(n)` relaxes toward each pulse's target at rate `kappa / 2`, both
/// on ring-up and ring-down.
#[derive(Debug, Clone, PartialEq)]
pub struct PulseTrain {
    /// `(time, target amplitude, amplitude at that time)` for each breakpoint.
    breaks: Vec<(f64, f64, f64)>,
    half_kappa: f64,
}

impl PulseTrain {
    /// `kappa` is the angular linewidth in 1/s. Segments must be sorted and
    /// non-overlapping.
    pub fn new(segments: &[DriveSegment], kappa: f64) -> Self {
        let half_kappa = 0.5 * kappa;
        let mut breaks = vec![(0.0, 0.0, 0.0)];
        let push = |breaks: &mut Vec<(f64, f64, f64)>, t: f64, target: f64| {
            let &(t0, target0, a0) = breaks.last().unwrap();
            let a = target0 + (a0 - target0) * (-half_kappa * (t - t0)).exp();
            breaks.push((t, target, a));
        };
        for seg in segments {
            push(&mut breaks, seg.start, seg.n_bar.sqrt());
            push(&mut breaks, seg.end, 0.0);
        }
        PulseTrain { breaks, half_kappa }
    }

    fn piece(&self, t: f64) -> usize {
        self.breaks.partition_point(|b| b.0 <= t).saturating_sub(1)
    }

    fn amplitude(&self, t: f64) -> f64 {
        let (t0, target, a0) = self.breaks[self.piece(t)];
        target + (a0 - target) * (-self.half_kappa * (t - t0)).exp()
    }
}

impl PhotonSchedule for PulseTrain {
    fn photons(&self, t: f64) -> f64 {
        self.amplitude(t).powi(2)
    }

    fn piece_end(&self, t: f64) -> f64 {
        self.breaks
            .get(self.piece(t) + 1)
            .map_or(f64::INFINITY, |b| b.0)
    }

    fn bound(&self, t0: f64, t1: f64) -> f64 {
        // Amplitude is monotone within a piece; check both ends of every piece
        // that overlaps the interval.
        let first = self.piece(t0);
        let last = self.piece(t1);
        let mut best = self.photons(t0).max(self.photons(t1));
        for k in first..=last {
            let (_, target, a0) = self.breaks[k];
            best = best.max(target * target).max(if k > first { a0 * a0 } else { 0.0 });
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pulse_rings_up_and_down() {
        let kappa = 1e8;
        let train = PulseTrain::new(
            &[DriveSegment {
                start: 0.0,
                end: 1e-6,
                n_bar: 100.0,
            }],
            kappa,
        );
        assert_eq!(train.photons(0.0), 0.0);
        let t = 2.0 / kappa;
        let want = 100.0 * (1.0 - (-1.0f64).exp()).powi(2);
        assert!((train.photons(t) - want).abs() < 1e-9);
        assert!((train.photons(0.9e-6) - 100.0).abs() < 1e-9);
        assert!(train.photons(1e-6 + 1e-7) < 1e-2);
        assert_eq!(train.piece_end(0.5e-6), 1e-6);
        assert_eq!(train.piece_end(2e-6), f64::INFINITY);
        assert!(train.bound(0.0, 1e-6) >= 100.0 - 1e-9);
        assert!(train.bound(1e-6, 2e-6) <= 100.0 + 1e-9);
    }

    #[test]
    fn bound_covers_samples() {
        let kappa = 5e7;
        let train = PulseTrain::new(
            &[
                DriveSegment { start: 0.0, end: 3e-7, n_bar: 50.0 },
                DriveSegment { start: 5e-7, end: 8e-7, n_bar: 20.0 },
            ],
            kappa,
        );
        let mut t0 = 0.0;
        while t0 < 1e-6 {
            let t1 = train.piece_end(t0).min(1.2e-6);
            let b = train.bound(t0, t1);
            for k in 0..=50 {
                let t = t0 + (t1 - t0) * k as f64 / 50.0;
                assert!(train.photons(t) <= b + 1e-9);
            }
            t0 = t1;
        }
    }
}
