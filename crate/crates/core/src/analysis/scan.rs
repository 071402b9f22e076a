//! Power-law fit of observed pair rate against crystal detuning.
//!
//! Fits are weighted least squares of ln(rate) on ln(δθ) with
//! σ_ln = error / rate. The free fit returns `rate = A · δθ^p`; the fixed
//! fit pins `p = -1/2`, the pure geometric-acceptance prediction.

use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanPoint {
    pub detuning_mdeg: f64,
    /// Pairs per hour.
    pub rate: f64,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    /// Points used in the fit.
    pub points: Vec<ScanPoint>,
    /// Points dropped for a non-positive rate or error.
    pub excluded: Vec<ScanPoint>,
    /// `A` in pairs/hour at δθ = 1 mdeg.
    pub amplitude: f64,
    pub amplitude_error: f64,
    pub exponent: f64,
    pub exponent_error: f64,
    /// `None` with only two points (no degrees of freedom).
    pub chi2_per_dof: Option<f64>,
    /// Amplitude of the fixed `p = -1/2` fit.
    pub fixed_amplitude: f64,
    pub fixed_amplitude_error: f64,
    pub fixed_chi2_per_dof: f64,
    /// Probability of a chi-square at least as large under the fixed fit.
    pub fixed_p_value: f64,
}

impl ScanResult {
    /// True when the fixed-exponent model is rejected at significance `alpha`.
    pub fn fixed_exponent_rejected(&self, alpha: f64) -> bool {
        self.fixed_p_value < alpha
    }
}

pub const GEOMETRIC_EXPONENT: f64 = -0.5;

pub fn fit_misalignment_scan(points: &[ScanPoint]) -> Result<ScanResult> {
    let mut usable = Vec::new();
    let mut excluded = Vec::new();
    for &p in points {
        if !(p.detuning_mdeg > 0.0) {
            return Err(Error::InvalidInput(format!(
                "scan point at non-positive detuning {} mdeg",
                p.detuning_mdeg
            )));
        }
        if p.rate > 0.0 && p.error > 0.0 {
            usable.push(p);
        } else {
            log::warn!(
                "excluding scan point at {} mdeg with rate {} ± {}",
                p.detuning_mdeg,
                p.rate,
                p.error
            );
            excluded.push(p);
        }
    }
    if usable.len() < 2 {
        return Err(Error::Fit(format!(
            "need at least two points with positive rate, have {}",
            usable.len()
        )));
    }
    if usable
        .iter()
        .all(|p| p.detuning_mdeg == usable[0].detuning_mdeg)
    {
        return Err(Error::Fit("all scan points share one detuning".into()));
    }

    let data: Vec<(f64, f64, f64)> = usable
        .iter()
        .map(|p| {
            let sigma = p.error / p.rate;
            (p.detuning_mdeg.ln(), p.rate.ln(), 1.0 / (sigma * sigma))
        })
        .collect();
    let s: f64 = data.iter().map(|d| d.2).sum();
    let sx: f64 = data.iter().map(|d| d.2 * d.0).sum();
    let sy: f64 = data.iter().map(|d| d.2 * d.1).sum();
    let xbar = sx / s;
    let stt: f64 = data.iter().map(|d| d.2 * (d.0 - xbar).powi(2)).sum();
    let sty: f64 = data.iter().map(|d| d.2 * (d.0 - xbar) * d.1).sum();
    let slope = sty / stt;
    let intercept = (sy - sx * slope) / s;
    let slope_var = 1.0 / stt;
    let intercept_var = (1.0 + sx * sx / (s * stt)) / s;
    let chi2: f64 = data
        .iter()
        .map(|d| d.2 * (d.1 - intercept - slope * d.0).powi(2))
        .sum();
    let n = data.len();
    let chi2_per_dof = (n > 2).then(|| chi2 / (n - 2) as f64);

    let fixed_ln_a = data
        .iter()
        .map(|d| d.2 * (d.1 - GEOMETRIC_EXPONENT * d.0))
        .sum::<f64>()
        / s;
    let fixed_chi2: f64 = data
        .iter()
        .map(|d| d.2 * (d.1 - fixed_ln_a - GEOMETRIC_EXPONENT * d.0).powi(2))
        .sum();
    let fixed_dof = (n - 1) as f64;
    let fixed_p_value = ChiSquared::new(fixed_dof)
        .map(|c| 1.0 - c.cdf(fixed_chi2))
        .unwrap_or(f64::NAN);

    let amplitude = intercept.exp();
    let fixed_amplitude = fixed_ln_a.exp();
    Ok(ScanResult {
        points: usable,
        excluded,
        amplitude,
        amplitude_error: amplitude * intercept_var.sqrt(),
        exponent: slope,
        exponent_error: slope_var.sqrt(),
        chi2_per_dof,
        fixed_amplitude,
        fixed_amplitude_error: fixed_amplitude / s.sqrt(),
        fixed_chi2_per_dof: fixed_chi2 / fixed_dof,
        fixed_p_value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::component_rng;
    use rand_distr::{Distribution, Normal};

    fn exact(d: f64, a: f64) -> ScanPoint {
        ScanPoint {
            detuning_mdeg: d,
            rate: a / d.sqrt(),
            error: 0.1 * a / d.sqrt(),
        }
    }

    #[test]
    fn two_exact_points() {
        let r = fit_misalignment_scan(&[exact(10.0, 411.0), exact(40.0, 411.0)]).unwrap();
        assert!((r.exponent + 0.5).abs() < 1e-12);
        assert!((r.amplitude - 411.0).abs() < 1e-9);
        assert!(r.chi2_per_dof.is_none());
        assert!((r.fixed_amplitude - 411.0).abs() < 1e-9);
    }

    #[test]
    fn noisy_five_point_scan() {
        let normal = Normal::new(0.0, 1.0).unwrap();
        let mut rng = component_rng(31, 0);
        let pts: Vec<_> = [5.0, 10.0, 20.0, 30.0, 50.0]
            .iter()
            .map(|&d| {
                let truth = 411.0 / f64::sqrt(d);
                ScanPoint {
                    detuning_mdeg: d,
                    rate: truth * (1.0 + 0.1 * normal.sample(&mut rng)),
                    error: 0.1 * truth,
                }
            })
            .collect();
        let r = fit_misalignment_scan(&pts).unwrap();
        assert!((r.exponent + 0.5).abs() < 0.15, "{}", r.exponent);
    }

    #[test]
    fn constant_rates_reject_geometric_scaling() {
        let pts: Vec<_> = [5.0, 10.0, 20.0, 30.0, 50.0]
            .iter()
            .map(|&d| ScanPoint {
                detuning_mdeg: d,
                rate: 100.0,
                error: 5.0,
            })
            .collect();
        let r = fit_misalignment_scan(&pts).unwrap();
        assert!(r.exponent.abs() < 1e-12);
        assert!(r.fixed_exponent_rejected(1e-3));
    }

    #[test]
    fn non_positive_rates_excluded() {
        let mut pts = vec![exact(5.0, 300.0), exact(20.0, 300.0)];
        pts.push(ScanPoint {
            detuning_mdeg: 50.0,
            rate: -3.0,
            error: 2.0,
        });
        let r = fit_misalignment_scan(&pts).unwrap();
        assert_eq!(r.excluded.len(), 1);
        assert_eq!(r.points.len(), 2);
        assert!(fit_misalignment_scan(&pts[..1]).is_err());
        assert!(fit_misalignment_scan(&[pts[0], pts[2]]).is_err());
    }
}
