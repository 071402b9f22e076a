//! Gaussian-plus-constant fit to the inter-detector time-difference profile.
//!
//! Counts are Poisson, and most bins of a short run hold zero or one count,
//! so the fit is iteratively reweighted least squares with weights from the
//! current model variance (Fisher scoring on the Poisson likelihood), damped
//! Levenberg-Marquardt style. Starting values come from moments of the
//! baseline-subtracted profile.

use nalgebra::{Matrix4, Vector4};

use super::CorrelationMap;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct TimeProfileFit {
    /// Gaussian standard deviation, ns.
    pub sigma: f64,
    /// Gaussian centre, ns.
    pub center: f64,
    /// Peak height above baseline, counts per bin.
    pub amplitude: f64,
    /// Constant level, counts per bin.
    pub baseline: f64,
    pub sigma_error: f64,
    pub center_error: f64,
    pub amplitude_error: f64,
    pub baseline_error: f64,
    /// Pearson chi-square of the final model.
    pub chi2: f64,
    pub dof: usize,
}

impl TimeProfileFit {
    pub fn fwhm(&self) -> f64 {
        self.sigma * crate::units::FWHM_PER_SIGMA
    }
}

/// Fits the full time-difference marginal of `map`.
pub fn fit_time_profile(map: &CorrelationMap) -> Result<TimeProfileFit> {
    let y: Vec<f64> = map
        .dt_marginal(None)
        .into_iter()
        .map(|c| c as f64)
        .collect();
    fit_time_series(&map.dt_axis().centers(), &y)
}

/// Fits the time-difference marginal restricted to E1 in `[lo, hi]` eV.
pub fn fit_time_profile_in_band(map: &CorrelationMap, lo: f64, hi: f64) -> Result<TimeProfileFit> {
    let y: Vec<f64> = map
        .dt_marginal(Some((lo, hi)))
        .into_iter()
        .map(|c| c as f64)
        .collect();
    fit_time_series(&map.dt_axis().centers(), &y)
}

// Parameter order: baseline, amplitude, centre, sigma.
type Params = Vector4<f64>;

fn model(p: &Params, x: f64) -> f64 {
    let z = (x - p[2]) / p[3];
    p[0] + p[1] * (-0.5 * z * z).exp()
}

fn gradient(p: &Params, x: f64) -> Vector4<f64> {
    let d = x - p[2];
    let s = p[3];
    let g = (-0.5 * d * d / (s * s)).exp();
    Vector4::new(
        1.0,
        g,
        p[1] * g * d / (s * s),
        p[1] * g * d * d / (s * s * s),
    )
}

/// Fits `baseline + amplitude · exp(-(x - centre)² / 2σ²)` to counts `y` at
/// bin centres `x` (equally spaced, ascending).
pub fn fit_time_series(x: &[f64], y: &[f64]) -> Result<TimeProfileFit> {
    let n = x.len();
    if n != y.len() || n < 5 {
        return Err(Error::Fit("need at least five bins".into()));
    }
    let first = y[0];
    if y.iter().all(|&v| v == first) {
        return Err(Error::Fit("profile has zero variance".into()));
    }
    let mean_y = y.iter().sum::<f64>() / n as f64;
    let floor = 1e-3 * mean_y.max(1e-3);
    let bin = (x[n - 1] - x[0]) / (n - 1) as f64;
    let span = x[n - 1] - x[0];
    let (x_lo, x_hi) = (x[0], x[n - 1]);
    let sigma_bounds = (0.25 * bin, span);

    let loglik = |p: &Params| -> f64 {
        x.iter()
            .zip(y)
            .map(|(&xi, &yi)| {
                let mu = model(p, xi).max(floor);
                yi * mu.ln() - mu
            })
            .sum()
    };
    let feasible = |p: &Params| {
        p[0] >= 0.0
            && p[3] >= sigma_bounds.0
            && p[3] <= sigma_bounds.1
            && p[2] >= x_lo
            && p[2] <= x_hi
            && x.iter().all(|&xi| model(p, xi) >= 0.0)
    };
    let normal_equations = |p: &Params| -> (Matrix4<f64>, Vector4<f64>) {
        let mut h = Matrix4::zeros();
        let mut g = Vector4::zeros();
        for (&xi, &yi) in x.iter().zip(y) {
            let mu = model(p, xi).max(floor);
            let j = gradient(p, xi);
            let w = 1.0 / mu;
            h += w * j * j.transpose();
            g += (yi - mu) * w * j;
        }
        (h, g)
    };

    let mut p = initial_guess(x, y, sigma_bounds);
    let mut ll = loglik(&p);
    let mut lambda = 1e-3;
    for _ in 0..1_000 {
        let (h, g) = normal_equations(&p);
        let mut damped = h;
        for k in 0..4 {
            damped[(k, k)] += lambda * h[(k, k)].max(1e-12);
        }
        let Some(step) = damped.try_inverse().map(|inv| inv * g) else {
            lambda *= 10.0;
            if lambda > 1e15 {
                break;
            }
            continue;
        };
        let trial = p + step;
        let trial_ll = if feasible(&trial) {
            loglik(&trial)
        } else {
            f64::NEG_INFINITY
        };
        if trial_ll > ll {
            let gain = trial_ll - ll;
            p = trial;
            ll = trial_ll;
            lambda = (lambda * 0.3).max(1e-12);
            if gain < 1e-12 * ll.abs().max(1.0) {
                break;
            }
        } else {
            lambda *= 10.0;
            if lambda > 1e15 {
                break;
            }
        }
    }

    let (h, _) = normal_equations(&p);
    let errors = h
        .try_inverse()
        .map(|cov| Vector4::from_fn(|k, _| cov[(k, k)].max(0.0).sqrt()))
        .unwrap_or_else(|| Vector4::repeat(f64::INFINITY));
    let chi2 = x
        .iter()
        .zip(y)
        .map(|(&xi, &yi)| {
            let mu = model(&p, xi).max(floor);
            (yi - mu).powi(2) / mu
        })
        .sum();
    Ok(TimeProfileFit {
        baseline: p[0],
        amplitude: p[1],
        center: p[2],
        sigma: p[3],
        baseline_error: errors[0],
        amplitude_error: errors[1],
        center_error: errors[2],
        sigma_error: errors[3],
        chi2,
        dof: n.saturating_sub(4),
    })
}

fn initial_guess(x: &[f64], y: &[f64], sigma_bounds: (f64, f64)) -> Params {
    let n = x.len();
    let mid = 0.5 * (x[0] + x[n - 1]);
    let span = x[n - 1] - x[0];
    let outer: Vec<f64> = x
        .iter()
        .zip(y)
        .filter(|(&xi, _)| (xi - mid).abs() > 0.35 * span)
        .map(|(_, &yi)| yi)
        .collect();
    let mean_y = y.iter().sum::<f64>() / n as f64;
    let baseline = if outer.is_empty() {
        0.0
    } else {
        outer.iter().sum::<f64>() / outer.len() as f64
    }
    .max(0.05 * mean_y)
    .max(1e-3);

    // Five-bin running mean of the excess locates the peak.
    let smoothed: Vec<f64> = (0..n)
        .map(|i| {
            let lo = i.saturating_sub(2);
            let hi = (i + 3).min(n);
            y[lo..hi].iter().sum::<f64>() / (hi - lo) as f64 - baseline
        })
        .collect();
    let (imax, smax) = smoothed
        .iter()
        .enumerate()
        .fold(
            (0, f64::NEG_INFINITY),
            |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc },
        );
    let center = x[imax];
    let (mut w, mut m2) = (0.0, 0.0);
    for (&xi, &yi) in x.iter().zip(y) {
        let d = xi - center;
        if d.abs() <= 0.25 * span {
            let e = (yi - baseline).max(0.0);
            w += e;
            m2 += e * d * d;
        }
    }
    let bin = span / (n - 1) as f64;
    let sigma = if w > 0.0 { (m2 / w).sqrt() } else { 0.1 * span }.clamp(
        (2.0 * bin).max(sigma_bounds.0),
        (0.25 * span).min(sigma_bounds.1),
    );
    Params::new(baseline, smax.max(0.5), center, sigma)
}
