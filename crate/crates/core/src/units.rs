//! Unit conversions and physical constants.

use std::f64::consts::PI;

/// Planck constant times speed of light, in eV·Å.
pub const HC_EV_ANGSTROM: f64 = 12_398.419_843_320_026;

/// Ratio of a Gaussian's FWHM to its standard deviation.
pub const FWHM_PER_SIGMA: f64 = 2.354_820_045_030_949;

pub const SECONDS_PER_HOUR: f64 = 3600.0;

#[inline]
pub fn deg_to_rad(deg: f64) -> f64 {
    deg * PI / 180.0
}

#[inline]
pub fn rad_to_deg(rad: f64) -> f64 {
    rad * 180.0 / PI
}

#[inline]
pub fn mdeg_to_rad(mdeg: f64) -> f64 {
    deg_to_rad(mdeg * 1e-3)
}

#[inline]
pub fn rad_to_mdeg(rad: f64) -> f64 {
    rad_to_deg(rad) * 1e3
}

/// Photon wavelength in Å for an energy in eV.
#[inline]
pub fn wavelength_angstrom(energy_ev: f64) -> f64 {
    HC_EV_ANGSTROM / energy_ev
}

#[inline]
pub fn fwhm_to_sigma(fwhm: f64) -> f64 {
    fwhm / FWHM_PER_SIGMA
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angle_round_trip() {
        for v in [0.0, 1.0, -37.5, 84.1] {
            assert!((rad_to_deg(deg_to_rad(v)) - v).abs() < 1e-12);
            assert!((rad_to_mdeg(mdeg_to_rad(v)) - v).abs() < 1e-9);
        }
    }

    #[test]
    fn wavelength_at_22kev() {
        assert!((wavelength_angstrom(22_000.0) - 0.563_565).abs() < 1e-6);
    }
}
