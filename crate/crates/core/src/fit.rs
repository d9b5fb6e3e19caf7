//! Small least-squares toolbox: Levenberg-Marquardt for the exponential and
//! Gaussian fits used by the analysis paths, plus a linear fit.

use crate::error::{Error, Result};

/// Result of a nonlinear fit: parameter values with standard errors from the
/// residual variance and the Gauss-Newton approximation of the covariance.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub params: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub iterations: usize,
    pub residual_sum_sq: f64,
}

/// Exponential decay fit y = A exp(-t / tau).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentialFit {
    pub amplitude: f64,
    /// Decay constant; `f64::INFINITY` for data with no measurable decay.
    pub tau: f64,
    pub tau_std_error: f64,
    /// Set when the data are consistent with a constant (tau sentinel).
    pub no_decay: bool,
}

/// Gaussian fit y = A exp(-(x - x0)^2 / (2 sigma^2)) + offset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianFit {
    pub center: f64,
    pub sigma: f64,
    pub amplitude: f64,
    pub offset: f64,
    pub center_std_error: f64,
    pub sigma_std_error: f64,
    pub converged: bool,
}

/// Dense column-major-free tiny linear algebra: solve (J^T J + lambda D) x = J^T r
/// via Gaussian elimination with partial pivoting. n is small (<= 4).
fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for col in (0..n).rev() {
        let mut s = b[col];
        for k in col + 1..n {
            s -= a[col][k] * x[k];
        }
        x[col] = s / a[col][col];
    }
    Some(x)
}

/// Levenberg-Marquardt minimization of sum_i (y_i - f(x_i, p))^2.
///
/// `model` returns the model value and its gradient with respect to the
/// parameters at one sample point.
pub fn levenberg_marquardt<F>(
    xs: &[f64],
    ys: &[f64],
    mut params: Vec<f64>,
    model: F,
    max_iterations: usize,
) -> Result<FitResult>
where
    F: Fn(f64, &[f64]) -> (f64, Vec<f64>),
{
    assert_eq!(xs.len(), ys.len());
    let n = xs.len();
    let np = params.len();
    if n < np {
        return Err(Error::Domain(format!(
            "need at least {np} points for a {np}-parameter fit"
        )));
    }

    let chi2 = |p: &[f64]| -> f64 {
        xs.iter()
            .zip(ys)
            .map(|(&x, &y)| {
                let (f, _) = model(x, p);
                (y - f) * (y - f)
            })
            .sum()
    };

    let mut lambda = 1e-3;
    let mut current = chi2(&params);
    let mut iterations = 0;
    let mut stalled = 0_u32;

    while iterations < max_iterations {
        iterations += 1;
        // normal equations
        let mut jtj = vec![vec![0.0; np]; np];
        let mut jtr = vec![0.0; np];
        for (&x, &y) in xs.iter().zip(ys) {
            let (f, grad) = model(x, &params);
            let r = y - f;
            for i in 0..np {
                jtr[i] += grad[i] * r;
                for j in 0..np {
                    jtj[i][j] += grad[i] * grad[j];
                }
            }
        }
        let mut damped = jtj.clone();
        for i in 0..np {
            damped[i][i] += lambda * (jtj[i][i].max(1e-12));
        }
        let Some(step) = solve(damped, jtr.clone()) else {
            return Err(Error::FitDidNotConverge {
                iterations,
                last: params,
            });
        };
        let trial: Vec<f64> = params.iter().zip(&step).map(|(p, s)| p + s).collect();
        let trial_chi2 = chi2(&trial);
        if trial_chi2.is_finite() && trial_chi2 < current {
            let rel = (current - trial_chi2) / current.max(1e-300);
            params = trial;
            current = trial_chi2;
            lambda = (lambda * 0.33).max(1e-12);
            if rel < 1e-12 {
                stalled += 1;
            } else {
                stalled = 0;
            }
        } else {
            lambda *= 8.0;
            if lambda > 1e12 {
                stalled += 1;
            }
        }
        if stalled >= 3 {
            break;
        }
    }

    if iterations >= max_iterations && stalled == 0 {
        return Err(Error::FitDidNotConverge {
            iterations,
            last: params,
        });
    }

    // covariance from the undamped normal equations
    let mut jtj = vec![vec![0.0; np]; np];
    for &x in xs {
        let (_, grad) = model(x, &params);
        for i in 0..np {
            for j in 0..np {
                jtj[i][j] += grad[i] * grad[j];
            }
        }
    }
    let dof = (n.saturating_sub(np)).max(1) as f64;
    let sigma2 = current / dof;
    let mut std_errors = vec![f64::NAN; np];
    for i in 0..np {
        // invert by solving for unit vectors
        let mut e = vec![0.0; np];
        e[i] = 1.0;
        if let Some(col) = solve(jtj.clone(), e) {
            if col[i] >= 0.0 {
                std_errors[i] = (sigma2 * col[i]).sqrt();
            }
        }
    }

    Ok(FitResult {
        params,
        std_errors,
        iterations,
        residual_sum_sq: current,
    })
}

/// Least-squares fit of A exp(-t / tau) to strictly positive samples.
///
/// A constant series yields the infinite-tau sentinel with `no_decay` set;
/// non-positive values are a domain error.
pub fn fit_exponential(times: &[f64], values: &[f64]) -> Result<ExponentialFit> {
    if times.len() != values.len() {
        return Err(Error::Domain("times and values must have equal length".into()));
    }
    if times.len() < 3 {
        return Err(Error::Domain("need at least 3 points".into()));
    }
    if values.iter().any(|&v| !(v > 0.0)) {
        return Err(Error::Domain("exponential fit requires positive values".into()));
    }

    // log-linear seed
    let logs: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let (slope, intercept) = linear_fit(times, &logs);
    let spread = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - logs.iter().cloned().fold(f64::INFINITY, f64::min);
    let t_span = times.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - times.iter().cloned().fold(f64::INFINITY, f64::min);
    if spread < 1e-12 || slope >= 0.0 || !slope.is_finite() {
        return Ok(ExponentialFit {
            amplitude: values.iter().sum::<f64>() / values.len() as f64,
            tau: f64::INFINITY,
            tau_std_error: f64::INFINITY,
            no_decay: true,
        });
    }
    let _ = t_span;

    let seed = vec![intercept.exp(), -1.0 / slope];
    let fit = levenberg_marquardt(
        times,
        values,
        seed,
        |t, p| {
            let (a, tau) = (p[0], p[1]);
            let e = (-t / tau).exp();
            (a * e, vec![e, a * e * t / (tau * tau)])
        },
        200,
    )?;
    Ok(ExponentialFit {
        amplitude: fit.params[0],
        tau: fit.params[1],
        tau_std_error: fit.std_errors[1],
        no_decay: false,
    })
}

/// Nonlinear Gaussian fit used for centroid extraction of camera profiles.
pub fn fit_gaussian_1d(xs: &[f64], ys: &[f64]) -> Result<GaussianFit> {
    if xs.len() != ys.len() {
        return Err(Error::Domain("xs and ys must have equal length".into()));
    }
    if xs.len() < 5 {
        return Err(Error::Domain("need at least 5 points".into()));
    }
    let y_max = ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let y_min = ys.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(y_max - y_min).is_finite() || (y_max - y_min) <= 1e-300 {
        return Err(Error::FitDidNotConverge {
            iterations: 0,
            last: vec![f64::NAN; 4],
        });
    }

    // moment seeds over the background-subtracted profile
    let weights: Vec<f64> = ys.iter().map(|&y| (y - y_min).max(0.0)).collect();
    let w_sum: f64 = weights.iter().sum();
    let center0 = xs.iter().zip(&weights).map(|(x, w)| x * w).sum::<f64>() / w_sum;
    let var0 = xs
        .iter()
        .zip(&weights)
        .map(|(x, w)| w * (x - center0) * (x - center0))
        .sum::<f64>()
        / w_sum;
    let sigma0 = var0.sqrt().max((xs[1] - xs[0]).abs());
    let seed = vec![y_max - y_min, center0, sigma0, y_min];

    let fit = levenberg_marquardt(
        xs,
        ys,
        seed,
        |x, p| {
            let (a, x0, s, off) = (p[0], p[1], p[2], p[3]);
            let u = (x - x0) / s;
            let e = (-0.5 * u * u).exp();
            (
                a * e + off,
                vec![e, a * e * u / s, a * e * u * u / s, 1.0],
            )
        },
        300,
    )?;
    // a flat-ish fit that collapsed the amplitude is a non-convergence signal
    let amp = fit.params[0];
    if !amp.is_finite() || amp.abs() < 1e-6 * (y_max - y_min) {
        return Err(Error::FitDidNotConverge {
            iterations: fit.iterations,
            last: fit.params,
        });
    }
    Ok(GaussianFit {
        amplitude: fit.params[0],
        center: fit.params[1],
        sigma: fit.params[2].abs(),
        offset: fit.params[3],
        center_std_error: fit.std_errors[1],
        sigma_std_error: fit.std_errors[2],
        converged: true,
    })
}

/// Ordinary least-squares line y = slope * x + intercept.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-300 {
        return (f64::NAN, f64::NAN);
    }
    let slope = (n * sxy - sx * sy) / denom;
    (slope, (sy - slope * sx) / n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn exponential_exact_recovery() {
        let tau = 0.1;
        let times: Vec<f64> = (0..10).map(|i| i as f64 * 0.03).collect();
        let values: Vec<f64> = times.iter().map(|t| 2.5 * (-t / tau).exp()).collect();
        let fit = fit_exponential(&times, &values).unwrap();
        assert!(!fit.no_decay);
        assert_abs_diff_eq!(fit.tau, tau, epsilon = 1e-6 * tau);
        assert_abs_diff_eq!(fit.amplitude, 2.5, epsilon = 1e-6);
    }

    #[test]
    fn exponential_constant_series_sentinel() {
        let times: Vec<f64> = (0..8).map(|i| i as f64).collect();
        let values = vec![3.0; 8];
        let fit = fit_exponential(&times, &values).unwrap();
        assert!(fit.no_decay);
        assert!(fit.tau.is_infinite());
    }

    #[test]
    fn exponential_rejects_nonpositive() {
        let times = [0.0, 1.0, 2.0];
        assert!(matches!(
            fit_exponential(&times, &[1.0, 0.0, 0.5]),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            fit_exponential(&times, &[1.0, -0.5, 0.5]),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn exponential_noisy_monte_carlo() {
        // Monte-Carlo oracle with a fixed seed: 5% multiplicative noise,
        // 20 points; at least 95 of 100 trials within 10% of truth.
        let tau = 0.25;
        let times: Vec<f64> = (0..20).map(|i| i as f64 * 0.05).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let mut ok = 0;
        let trials = 100;
        for _ in 0..trials {
            let values: Vec<f64> = times
                .iter()
                .map(|t| (-t / tau).exp() * (1.0 + 0.05 * rng.gen_range(-1.0..1.0)))
                .collect();
            let fit = fit_exponential(&times, &values).unwrap();
            if (fit.tau - tau).abs() / tau < 0.10 {
                ok += 1;
            }
        }
        assert!(ok >= 95, "only {ok}/{trials} trials within 10%");
    }

    #[test]
    fn gaussian_exact_recovery() {
        let xs: Vec<f64> = (0..41).map(|i| -2.0 + i as f64 * 0.1).collect();
        let ys: Vec<f64> = xs
            .iter()
            .map(|x| 1.7 * (-(x - 0.3) * (x - 0.3) / (2.0 * 0.5 * 0.5)).exp() + 0.2)
            .collect();
        let fit = fit_gaussian_1d(&xs, &ys).unwrap();
        assert_abs_diff_eq!(fit.center, 0.3, epsilon = 1e-8);
        assert_abs_diff_eq!(fit.sigma, 0.5, epsilon = 1e-8);
        assert_abs_diff_eq!(fit.amplitude, 1.7, epsilon = 1e-8);
        assert_abs_diff_eq!(fit.offset, 0.2, epsilon = 1e-8);
    }

    #[test]
    fn gaussian_noisy_center_recovery() {
        let xs: Vec<f64> = (0..81).map(|i| -4.0 + i as f64 * 0.1).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let sigma = 0.8;
        let ys: Vec<f64> = xs
            .iter()
            .map(|x| {
                (-(x - 0.9) * (x - 0.9) / (2.0 * sigma * sigma)).exp()
                    * (1.0 + 0.05 * rng.gen_range(-1.0..1.0))
            })
            .collect();
        let fit = fit_gaussian_1d(&xs, &ys).unwrap();
        assert!((fit.center - 0.9).abs() < 0.02 * sigma);
    }

    #[test]
    fn gaussian_flat_data_errors() {
        let xs: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let ys = vec![1.0; 10];
        assert!(matches!(
            fit_gaussian_1d(&xs, &ys),
            Err(Error::FitDidNotConverge { .. })
        ));
    }

    #[test]
    fn linear_fit_exact() {
        let xs: Vec<f64> = (0..7).map(|i| i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x - 1.5).collect();
        let (slope, intercept) = linear_fit(&xs, &ys);
        assert_abs_diff_eq!(slope, 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(intercept, -1.5, epsilon = 1e-12);
    }
}
