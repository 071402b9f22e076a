//! Emission angles of the signal and idler photons about the Laue direction.
//!
//! Wavevectors are normalised to the pump, so the signal and idler magnitudes
//! are the energy fractions `x` and `y = 1 - x`. Detuning the crystal by δθ
//! shortens `|k_p + G|` to `1 - δθ·sin 2θ_B`, and the pair must close that
//! vector: transversely `x sin R_x = y sin R_y`, longitudinally
//! `x cos R_x + y cos R_y = |k_p + G|`.

use crate::error::{Error, Result};

/// Largest accepted momentum-closure defect of an exact solution.
pub const EXACT_RESIDUAL_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmissionSolution {
    /// Signal energy fraction.
    pub x: f64,
    /// Idler energy fraction, `1 - x`.
    pub y: f64,
    /// Signal angle from the Laue direction, radians.
    pub r_x: f64,
    /// Idler angle from the Laue direction (opposite side), radians.
    pub r_y: f64,
    /// Largest of the transverse and longitudinal momentum-closure defects.
    pub residual: f64,
}

fn check_split(x: f64) -> Result<()> {
    if x > 0.0 && x < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!(
            "energy fraction must lie in (0, 1), got {x}"
        )))
    }
}

fn check_detuning(detuning: f64) -> Result<()> {
    if detuning > 0.0 {
        Ok(())
    } else {
        Err(Error::PhaseMatching(format!(
            "detuning must be positive for an emission cone to exist, got {detuning} rad"
        )))
    }
}

/// Small-angle emission angle `sqrt(2 δθ ((1-x)/x) sin 2θ_B)`.
pub fn emission_angle_approx(x: f64, detuning: f64, bragg_angle: f64) -> Result<f64> {
    check_split(x)?;
    check_detuning(detuning)?;
    let arg = 2.0 * detuning * ((1.0 - x) / x) * (2.0 * bragg_angle).sin();
    if arg < 0.0 {
        return Err(Error::PhaseMatching(format!(
            "sin 2θ_B is negative for θ_B = {bragg_angle} rad"
        )));
    }
    Ok(arg.sqrt())
}

/// Length of `k_p + G` relative to `|k_p|` after detuning.
fn closure_length(detuning: f64, bragg_angle: f64) -> f64 {
    1.0 - detuning * (2.0 * bragg_angle).sin()
}

/// Solves the full momentum-closure system without small-angle expansion.
///
/// The idler angle is eliminated through the transverse condition and the
/// longitudinal defect is bisected on `R_x`. The defect is strictly
/// decreasing on the bracket, so bisection runs until the bracket collapses
/// to adjacent floats.
pub fn emission_angles_exact(x: f64, detuning: f64, bragg_angle: f64) -> Result<EmissionSolution> {
    check_split(x)?;
    check_detuning(detuning)?;
    let y = 1.0 - x;
    let target = closure_length(detuning, bragg_angle);
    let ratio = x / y;

    let idler_angle = |r_x: f64| (ratio * r_x.sin()).clamp(-1.0, 1.0).asin();
    let defect = |r_x: f64| x * r_x.cos() + y * idler_angle(r_x).cos() - target;

    let mut lo = 0.0_f64;
    let mut hi = if ratio <= 1.0 {
        std::f64::consts::FRAC_PI_2
    } else {
        (1.0 / ratio).asin()
    };
    if !(defect(lo) > 0.0) || !(defect(hi) < 0.0) {
        return Err(Error::PhaseMatching(format!(
            "no real emission angle for x = {x}, detuning = {detuning} rad"
        )));
    }
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if defect(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let r_x = if defect(lo).abs() <= defect(hi).abs() {
        lo
    } else {
        hi
    };
    let r_y = idler_angle(r_x);
    let transverse = (x * r_x.sin() - y * r_y.sin()).abs();
    let longitudinal = defect(r_x).abs();
    let residual = transverse.max(longitudinal);
    if residual > EXACT_RESIDUAL_TOLERANCE {
        return Err(Error::PhaseMatching(format!(
            "solver did not converge (residual {residual:e})"
        )));
    }
    Ok(EmissionSolution {
        x,
        y,
        r_x,
        r_y,
        residual,
    })
}

/// Signal energy fraction emitted at angle `angle` from the Laue direction.
///
/// Closed-form inverse of the exact closure: eliminating the idler angle from
/// both conditions gives `x = (1 - L²) / (2 (1 - L cos R))` with
/// `L = |k_p + G|`.
pub fn split_for_angle(angle: f64, detuning: f64, bragg_angle: f64) -> Result<f64> {
    check_detuning(detuning)?;
    let l = closure_length(detuning, bragg_angle);
    let x = (1.0 - l * l) / (2.0 * (1.0 - l * angle.cos()));
    if !(x > 0.0 && x < 1.0) || l - x * angle.cos() < 0.0 {
        return Err(Error::PhaseMatching(format!(
            "no forward pair has a photon at {angle} rad"
        )));
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::{deg_to_rad, mdeg_to_rad, rad_to_deg};
    use proptest::prelude::*;

    fn theta_b() -> f64 {
        deg_to_rad(84.1) / 2.0
    }

    #[test]
    fn approx_degenerate_reference() {
        let r = emission_angle_approx(0.5, mdeg_to_rad(10.0), theta_b()).unwrap();
        assert!((rad_to_deg(r) - 1.07).abs() < 0.01);
    }

    #[test]
    fn approx_quarter_split() {
        let half = emission_angle_approx(0.5, mdeg_to_rad(10.0), theta_b()).unwrap();
        let quarter = emission_angle_approx(0.25, mdeg_to_rad(10.0), theta_b()).unwrap();
        assert!((quarter / half - 3f64.sqrt()).abs() < 1e-12);
        assert!((rad_to_deg(quarter) - 1.849).abs() < 1e-3);
    }

    #[test]
    fn approx_vanishes_toward_full_signal() {
        let r = emission_angle_approx(1.0 - 1e-12, mdeg_to_rad(10.0), theta_b()).unwrap();
        assert!(r < 1e-7);
    }

    #[test]
    fn non_positive_detuning_rejected() {
        for d in [0.0, -mdeg_to_rad(50.0)] {
            assert!(matches!(
                emission_angle_approx(0.5, d, theta_b()),
                Err(Error::PhaseMatching(_))
            ));
            assert!(matches!(
                emission_angles_exact(0.5, d, theta_b()),
                Err(Error::PhaseMatching(_))
            ));
        }
        assert!(emission_angle_approx(0.0, 1e-4, theta_b()).is_err());
        assert!(emission_angles_exact(1.0, 1e-4, theta_b()).is_err());
    }

    #[test]
    fn exact_is_symmetric_at_degeneracy() {
        let s = emission_angles_exact(0.5, mdeg_to_rad(10.0), theta_b()).unwrap();
        assert!((s.r_x - s.r_y).abs() < 1e-15);
        assert_eq!(s.x + s.y, 1.0);
    }

    #[test]
    fn exact_matches_approx_at_reference() {
        let d = mdeg_to_rad(10.0);
        let exact = emission_angles_exact(0.5, d, theta_b()).unwrap();
        let approx = emission_angle_approx(0.5, d, theta_b()).unwrap();
        assert!((approx - exact.r_x).abs() / exact.r_x < 0.005);
        assert!(exact.residual <= EXACT_RESIDUAL_TOLERANCE);
    }

    #[test]
    fn large_detuning_unreachable() {
        // |k_p + G| shrinks below what two forward photons can close.
        assert!(emission_angles_exact(0.5, 1.2, theta_b()).is_err());
    }

    #[test]
    fn inverse_split_recovers_exact_solution() {
        let d = mdeg_to_rad(20.0);
        for x in [0.23, 0.4, 0.5, 0.61, 0.77] {
            let s = emission_angles_exact(x, d, theta_b()).unwrap();
            let back = split_for_angle(s.r_x, d, theta_b()).unwrap();
            assert!((back - x).abs() < 1e-9, "x = {x}, back = {back}");
        }
    }

    proptest! {
        #[test]
        fn approx_separable_in_split(x in 0.05f64..0.95, d_mdeg in 0.5f64..100.0) {
            let d = mdeg_to_rad(d_mdeg);
            let r = emission_angle_approx(x, d, theta_b()).unwrap();
            let r_half = emission_angle_approx(0.5, d, theta_b()).unwrap();
            prop_assert!((r * (x / (1.0 - x)).sqrt() - r_half).abs() < 1e-12);
        }

        #[test]
        fn exact_residual_bounded(x in 0.05f64..0.95, d_mdeg in 0.5f64..100.0) {
            let s = emission_angles_exact(x, mdeg_to_rad(d_mdeg), theta_b()).unwrap();
            prop_assert!(s.residual <= EXACT_RESIDUAL_TOLERANCE);
            prop_assert!((x * s.r_x.sin() - (1.0 - x) * s.r_y.sin()).abs() <= 1e-12);
            prop_assert!(s.r_x >= 0.0 && s.r_y >= 0.0);
        }
    }
}
