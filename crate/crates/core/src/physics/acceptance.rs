//! Thin-ring acceptance: the fraction of a down-conversion ring that a flat
//! detector of linear extent `w = sqrt(area)` intercepts is `w / (2π r)`,
//! where `r = distance · tan R` is the ring radius at the detector.

use std::f64::consts::PI;

use super::DetectorGeometry;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Acceptance {
    /// Azimuthal fraction of the ring intercepted, in (0, 1].
    pub fraction: f64,
    /// Set when the ring is no larger than the detector, so the whole ring
    /// is taken as intercepted.
    pub under_resolved: bool,
}

pub fn ring_radius_mm(angle: f64, det: &DetectorGeometry) -> f64 {
    det.distance * angle.tan()
}

pub fn geometric_acceptance(angle: f64, det: &DetectorGeometry) -> Acceptance {
    let w = det.width();
    let r = ring_radius_mm(angle, det);
    if !(r > 0.5 * w) {
        return Acceptance {
            fraction: 1.0,
            under_resolved: true,
        };
    }
    Acceptance {
        fraction: (w / (2.0 * PI * r)).min(1.0),
        under_resolved: false,
    }
}

/// Half-width in azimuth (radians) of the arc a detector intercepts on a ring
/// of the given opening angle.
pub fn arc_half_width(angle: f64, det: &DetectorGeometry) -> f64 {
    PI * geometric_acceptance(angle, det).fraction
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::deg_to_rad;

    fn vortex(distance: f64) -> DetectorGeometry {
        DetectorGeometry {
            distance,
            active_area: 50.0,
            center_angle_offset: deg_to_rad(1.07),
            in_plane: true,
        }
    }

    #[test]
    fn close_detector_at_reference_angle() {
        let det = vortex(1351.0);
        assert!((ring_radius_mm(deg_to_rad(1.07), &det) - 25.235).abs() < 1e-2);
        let a = geometric_acceptance(deg_to_rad(1.07), &det);
        assert!(!a.under_resolved);
        assert!((a.fraction - 0.0446).abs() < 1e-4, "{}", a.fraction);
    }

    #[test]
    fn far_detector_at_reference_angle() {
        let a = geometric_acceptance(deg_to_rad(1.07), &vortex(1560.0));
        assert!((a.fraction - 0.0386).abs() < 1e-4, "{}", a.fraction);
    }

    #[test]
    fn doubling_angle_halves_acceptance() {
        let det = vortex(1351.0);
        let a1 = geometric_acceptance(deg_to_rad(0.5), &det).fraction;
        let a2 = geometric_acceptance(deg_to_rad(1.0), &det).fraction;
        assert!((a1 / a2 - 2.0).abs() < 1e-3);
    }

    #[test]
    fn acceptance_scales_as_inverse_sqrt_detuning() {
        use crate::physics::emission_angle_approx;
        use crate::units::mdeg_to_rad;
        let det = vortex(1351.0);
        let theta_b = deg_to_rad(42.05);
        let at = |mdeg: f64| {
            let r = emission_angle_approx(0.5, mdeg_to_rad(mdeg), theta_b).unwrap();
            geometric_acceptance(r, &det).fraction
        };
        // log-log slope between 5 and 50 mdeg
        let slope = (at(50.0) / at(5.0)).ln() / 10f64.ln();
        assert!((slope + 0.5).abs() < 1e-3, "{slope}");
    }

    #[test]
    fn small_ring_is_flagged() {
        let a = geometric_acceptance(deg_to_rad(0.1), &vortex(1351.0));
        assert!(a.under_resolved);
        assert_eq!(a.fraction, 1.0);
        assert!(geometric_acceptance(0.0, &vortex(1351.0)).under_resolved);
    }
}
