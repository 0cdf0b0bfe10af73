//! Least-squares helpers: ordinary linear regression and a small
//! Levenberg–Marquardt solver with a finite-difference Jacobian.

use nalgebra::{DMatrix, DVector};

use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual.
    pub rms: f64,
}

pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(Error::Fit("linear fit needs at least two points".into()));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Fit("degenerate abscissae".into()));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rms = (x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - intercept - slope * a).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(LinearFit {
        slope,
        intercept,
        rms,
    })
}

#[derive(Clone, Debug)]
pub struct LmOptions {
    pub max_iter: usize,
    /// Stop when the relative decrease of the cost falls below this.
    pub ftol: f64,
    /// Stop when the relative parameter step falls below this.
    pub xtol: f64,
}

impl Default for LmOptions {
    fn default() -> Self {
        LmOptions {
            max_iter: 500,
            ftol: 1e-15,
            xtol: 1e-14,
        }
    }
}

#[derive(Clone, Debug)]
pub struct LmResult {
    pub params: Vec<f64>,
    pub rms: f64,
    pub iterations: usize,
}

fn cost<F: Fn(&[f64], f64) -> f64>(model: &F, p: &[f64], x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(xi, yi)| (yi - model(p, *xi)).powi(2)).sum()
}

/// Minimizes `Σ (y_i - model(p, x_i))^2` starting from `p0`.
pub fn levenberg_marquardt<F>(
    model: F,
    x: &[f64],
    y: &[f64],
    p0: &[f64],
    opts: &LmOptions,
) -> Result<LmResult>
where
    F: Fn(&[f64], f64) -> f64,
{
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    let np = p0.len();
    if x.len() < np {
        return Err(Error::Fit(format!("{} points for {np} parameters", x.len())));
    }
    let mut p = p0.to_vec();
    let mut current = cost(&model, &p, x, y);
    let mut lambda = 1e-3;
    let mut iterations = 0;

    while iterations < opts.max_iter {
        iterations += 1;
        let mut jac = DMatrix::<f64>::zeros(x.len(), np);
        let mut res = DVector::<f64>::zeros(x.len());
        for (i, (xi, yi)) in x.iter().zip(y).enumerate() {
            res[i] = yi - model(&p, *xi);
        }
        for k in 0..np {
            let step = 1e-7 * p[k].abs().max(1e-7);
            let mut hi = p.clone();
            let mut lo = p.clone();
            hi[k] += step;
            lo[k] -= step;
            for (i, xi) in x.iter().enumerate() {
                jac[(i, k)] = (model(&hi, *xi) - model(&lo, *xi)) / (2.0 * step);
            }
        }
        let jtj = jac.transpose() * &jac;
        let jtr = jac.transpose() * &res;

        let mut accepted = false;
        for _ in 0..60 {
            let mut a = jtj.clone();
            for k in 0..np {
                a[(k, k)] += lambda * jtj[(k, k)].max(1e-300);
            }
            let Some(delta) = a.lu().solve(&jtr) else {
                lambda *= 10.0;
                continue;
            };
            let trial: Vec<f64> = p.iter().zip(delta.iter()).map(|(a, b)| a + b).collect();
            let c = cost(&model, &trial, x, y);
            if c.is_finite() && c <= current {
                let rel_step = delta
                    .iter()
                    .zip(&p)
                    .map(|(d, v)| d.abs() / v.abs().max(1e-300))
                    .fold(0.0, f64::max);
                let rel_drop = (current - c) / current.max(1e-300);
                p = trial;
                current = c;
                lambda = (lambda / 10.0).max(1e-15);
                accepted = true;
                if rel_step < opts.xtol || rel_drop < opts.ftol {
                    return Ok(LmResult {
                        params: p,
                        rms: (current / x.len() as f64).sqrt(),
                        iterations,
                    });
                }
                break;
            }
            lambda *= 10.0;
        }
        if !accepted {
            // No downhill step at any damping: at a minimum to working precision.
            break;
        }
    }
    Ok(LmResult {
        params: p,
        rms: (current / x.len() as f64).sqrt(),
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y: Vec<f64> = x.iter().map(|v| 3.0 - 0.5 * v).collect();
        let f = linear_fit(&x, &y).unwrap();
        assert!((f.slope + 0.5).abs() < 1e-14);
        assert!((f.intercept - 3.0).abs() < 1e-14);
        assert!(f.rms < 1e-14);
    }

    #[test]
    fn recovers_exponential_decay() {
        let x: Vec<f64> = (0..30).map(|i| i as f64 * 0.2).collect();
        let y: Vec<f64> = x.iter().map(|v| 2.5 * (-0.7 * v).exp() + 0.1).collect();
        let model = |p: &[f64], t: f64| p[0] * (-p[1] * t).exp() + p[2];
        let r = levenberg_marquardt(model, &x, &y, &[1.0, 0.3, 0.0], &LmOptions::default())
            .unwrap();
        assert!((r.params[0] - 2.5).abs() < 1e-8);
        assert!((r.params[1] - 0.7).abs() < 1e-8);
        assert!((r.params[2] - 0.1).abs() < 1e-8);
    }
}
