//! Small dense Levenberg-Marquardt solver with a finite-difference Jacobian,
//! plus the model curves fitted elsewhere in the pipeline.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LsqFit {
    pub params: Vec<f64>,
    /// One-sigma parameter uncertainties from the scaled covariance.
    pub errors: Vec<f64>,
    /// Euclidean norm of the final residual vector.
    pub residual_norm: f64,
    pub iterations: usize,
}

const MAX_ITER: usize = 400;
const TOL: f64 = 1e-12;

/// Minimize `sum r_k(p)^2` starting from `p0`.
pub fn levenberg_marquardt<F>(residuals: F, p0: &[f64]) -> Result<LsqFit>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let n = p0.len();
    let mut p = p0.to_vec();
    let mut r = DVector::from_vec(residuals(&p));
    let m = r.len();
    if m < n {
        return Err(Error::Fit {
            reason: format!("{m} residuals for {n} parameters"),
            residual: f64::NAN,
        });
    }
    if r.iter().any(|x| !x.is_finite()) {
        return Err(Error::Fit {
            reason: "non-finite residual at the starting point".into(),
            residual: f64::NAN,
        });
    }
    let mut cost = r.norm_squared();
    let mut lambda = 1e-3;
    let mut iterations = 0;
    let mut jac = jacobian(&residuals, &p, m);
    while iterations < MAX_ITER {
        iterations += 1;
        let jt = jac.transpose();
        let jtj = &jt * &jac;
        let grad = &jt * &r;
        if grad.amax() <= TOL * (1.0 + cost) {
            break;
        }
        let mut accepted = false;
        while lambda < 1e16 {
            let mut a = jtj.clone();
            for k in 0..n {
                a[(k, k)] += lambda * jtj[(k, k)].max(1e-300);
            }
            let Some(step) = a.lu().solve(&(-&grad)) else {
                lambda *= 10.0;
                continue;
            };
            let trial: Vec<f64> = p.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
            let rt = DVector::from_vec(residuals(&trial));
            let ct = rt.norm_squared();
            if ct.is_finite() && ct < cost {
                let small = step.norm() <= TOL.sqrt() * (1e-12 + DVector::from_column_slice(&p).norm());
                let flat = (cost - ct) <= TOL * cost;
                p = trial;
                r = rt;
                cost = ct;
                lambda = (lambda / 10.0).max(1e-12);
                accepted = true;
                if small || flat {
                    lambda = f64::INFINITY;
                }
                break;
            }
            lambda *= 10.0;
        }
        if !accepted || lambda.is_infinite() {
            break;
        }
        jac = jacobian(&residuals, &p, m);
    }

    let jtj = jac.transpose() * &jac;
    let dof = (m - n).max(1) as f64;
    let scale = cost / dof;
    let errors = match jtj.try_inverse() {
        Some(cov) => (0..n).map(|k| (cov[(k, k)] * scale).max(0.0).sqrt()).collect(),
        None => vec![f64::NAN; n],
    };
    Ok(LsqFit {
        params: p,
        errors,
        residual_norm: cost.sqrt(),
        iterations,
    })
}

fn jacobian<F>(residuals: &F, p: &[f64], m: usize) -> DMatrix<f64>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let mut jac = DMatrix::zeros(m, p.len());
    let mut q = p.to_vec();
    for k in 0..p.len() {
        let h = 1e-6 * p[k].abs().max(1e-6);
        q[k] = p[k] + h;
        let up = residuals(&q);
        q[k] = p[k] - h;
        let down = residuals(&q);
        q[k] = p[k];
        for i in 0..m {
            jac[(i, k)] = (up[i] - down[i]) / (2.0 * h);
        }
    }
    jac
}

/// `amplitude / (1 + ((x - center) / width)^2) + offset`.
pub fn lorentzian(x: f64, amplitude: f64, center: f64, width: f64, offset: f64) -> f64 {
    let u = (x - center) / width;
    amplitude / (1.0 + u * u) + offset
}

/// Lorentzian peak fit; parameters are `[amplitude, center, width, offset]`.
pub fn fit_lorentzian(x: &[f64], y: &[f64]) -> Result<LsqFit> {
    check_xy(x, y, 4)?;
    let (kmax, &ymax) = y
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty");
    let ymin = y.iter().copied().fold(f64::INFINITY, f64::min);
    let half = 0.5 * (ymax + ymin);
    let above = x
        .iter()
        .zip(y)
        .filter(|(_, &v)| v >= half)
        .map(|(&xi, _)| xi);
    let (lo, hi) = above.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    let spacing = (x[x.len() - 1] - x[0]).abs() / (x.len() - 1) as f64;
    let width0 = (0.5 * (hi - lo)).max(spacing);
    let p0 = [ymax - ymin, x[kmax], width0, ymin];
    let fit = levenberg_marquardt(
        |p| x.iter().zip(y).map(|(&xi, &yi)| lorentzian(xi, p[0], p[1], p[2], p[3]) - yi).collect(),
        &p0,
    )?;
    if fit.params.iter().any(|v| !v.is_finite()) || fit.params[2] == 0.0 {
        return Err(Error::Fit {
            reason: "Lorentzian fit diverged".into(),
            residual: fit.residual_norm,
        });
    }
    let mut fit = fit;
    fit.params[2] = fit.params[2].abs();
    Ok(fit)
}

/// `amplitude exp(-rate t) + offset`; parameters are `[amplitude, rate, offset]`.
pub fn fit_exponential_decay(t: &[f64], y: &[f64]) -> Result<LsqFit> {
    check_xy(t, y, 3)?;
    let last = y[y.len() - 1];
    let first = y[0];
    let span = t[t.len() - 1] - t[0];
    if span <= 0.0 {
        return Err(Error::DegenerateInput("decay times must span a positive interval".into()));
    }
    let p0 = [first - last, 3.0 / span, last];
    let fit = levenberg_marquardt(
        |p| {
            t.iter()
                .zip(y)
                .map(|(&ti, &yi)| p[0] * (-p[1] * (ti - t[0])).exp() + p[2] - yi)
                .collect()
        },
        &p0,
    )?;
    if fit.params.iter().any(|v| !v.is_finite()) {
        return Err(Error::Fit {
            reason: "exponential fit diverged".into(),
            residual: fit.residual_norm,
        });
    }
    // Referenced to t[0] internally; shift the amplitude back to t = 0.
    let mut fit = fit;
    fit.params[0] *= (fit.params[1] * t[0]).exp();
    Ok(fit)
}

fn check_xy(x: &[f64], y: &[f64], n_params: usize) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::DegenerateInput("x and y lengths differ".into()));
    }
    if x.len() <= n_params {
        return Err(Error::DegenerateInput(format!(
            "{} points cannot constrain {n_params} parameters",
            x.len()
        )));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::DegenerateInput("non-finite data".into()));
    }
    Ok(())
}
