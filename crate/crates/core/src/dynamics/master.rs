use nalgebra::DMatrix;

/// Propagate populations `dp/dt = p Q` for a constant generator with
/// fixed-step RK4. The step is at most `0.01 / max|Q_ii|`, so the result is
/// accurate to ~1e-9 for any horizon; total probability is conserved to
/// rounding because every stage preserves `sum(p)`.
pub fn propagate_populations(generator: &DMatrix<f64>, p0: &[f64], duration: f64) -> Vec<f64> {
    let n = p0.len();
    let max_rate = (0..n).map(|i| generator[(i, i)].abs()).fold(0.0, f64::max);
    if max_rate == 0.0 || duration <= 0.0 {
        return p0.to_vec();
    }
    let steps = ((duration * max_rate) / 0.01).ceil().max(1.0) as usize;
    let h = duration / steps as f64;
    let qt = generator.transpose();
    let mut p = nalgebra::DVector::from_column_slice(p0);
    for _ in 0..steps {
        let k1 = &qt * &p;
        let k2 = &qt * (&p + &k1 * (0.5 * h));
        let k3 = &qt * (&p + &k2 * (0.5 * h));
        let k4 = &qt * (&p + &k3 * h);
        p += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
    }
    p.iter().copied().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_state_relaxation_closed_form() {
        let (up, down) = (2.0, 5.0);
        let q = DMatrix::from_row_slice(2, 2, &[-up, up, down, -down]);
        let t = 0.3;
        let p = propagate_populations(&q, &[0.0, 1.0], t);
        let eq = up / (up + down);
        let want = eq + (1.0 - eq) * (-(up + down) * t).exp();
        assert!((p[1] - want).abs() < 1e-10);
        assert!((p[0] + p[1] - 1.0).abs() < 1e-12);
    }
}
