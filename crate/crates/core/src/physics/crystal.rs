use crate::error::{Error, Result};
use crate::units::wavelength_angstrom;

/// Cubic lattice constant of diamond in Å.
pub const DIAMOND_LATTICE_CONSTANT: f64 = 3.5668;

#[derive(Debug, Clone, PartialEq)]
pub struct CrystalConfig {
    /// Cubic lattice constant in Å.
    pub lattice_constant: f64,
    /// Miller indices of the reflection.
    pub reflection: [i32; 3],
    /// Signed rotation away from the exact Bragg condition, radians.
    pub detuning: f64,
    /// Multiplier on the true pair-generation rate, in (0, 1]. Stands in for
    /// crystal quality effects such as mosaicity.
    pub effective_rate_scale: f64,
}

impl CrystalConfig {
    /// Diamond (660), as used at 22 keV.
    pub fn diamond_660(detuning: f64) -> Self {
        CrystalConfig {
            lattice_constant: DIAMOND_LATTICE_CONSTANT,
            reflection: [6, 6, 0],
            detuning,
            effective_rate_scale: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lattice_constant > 0.0 && self.lattice_constant.is_finite()) {
            return Err(Error::Config(format!(
                "lattice constant must be positive, got {}",
                self.lattice_constant
            )));
        }
        if self.reflection == [0, 0, 0] {
            return Err(Error::Config(
                "reflection (0,0,0) has no lattice planes".into(),
            ));
        }
        if !(self.effective_rate_scale > 0.0 && self.effective_rate_scale <= 1.0) {
            return Err(Error::Config(format!(
                "effective rate scale must lie in (0, 1], got {}",
                self.effective_rate_scale
            )));
        }
        if !self.detuning.is_finite() {
            return Err(Error::Config("detuning must be finite".into()));
        }
        Ok(())
    }

    /// Interplanar spacing d_hkl = a / sqrt(h² + k² + l²), in Å.
    pub fn d_spacing(&self) -> f64 {
        let [h, k, l] = self.reflection.map(f64::from);
        self.lattice_constant / (h * h + k * k + l * l).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BeamConfig {
    /// Pump photon energy, eV.
    pub pump_energy: f64,
    /// Monochromator bandwidth (FWHM), eV.
    pub bandwidth_fwhm: f64,
    /// Pump photons per second on the crystal.
    pub incident_rate: f64,
    /// Crystal rotation about the incoming beam relative to the polarization
    /// plane, radians.
    pub polarization_angle: f64,
}

impl Default for BeamConfig {
    fn default() -> Self {
        BeamConfig {
            pump_energy: 22_000.0,
            bandwidth_fwhm: 2.9,
            incident_rate: 0.98e13,
            polarization_angle: 0.0,
        }
    }
}

impl BeamConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.pump_energy > 0.0 && self.pump_energy.is_finite()) {
            return Err(Error::Config(format!(
                "pump energy must be positive, got {}",
                self.pump_energy
            )));
        }
        if !(self.incident_rate >= 0.0) {
            return Err(Error::Config("incident rate must be non-negative".into()));
        }
        if !(self.bandwidth_fwhm >= 0.0) {
            return Err(Error::Config("bandwidth must be non-negative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectorGeometry {
    /// Crystal to sensor distance, mm.
    pub distance: f64,
    /// Sensor active area, mm².
    pub active_area: f64,
    /// Angle of the detector centre from the Laue direction, radians.
    pub center_angle_offset: f64,
    pub in_plane: bool,
}

impl DetectorGeometry {
    pub fn validate(&self) -> Result<()> {
        if !(self.distance > 0.0) || !(self.active_area > 0.0) {
            return Err(Error::Config(format!(
                "detector distance and area must be positive (got {} mm, {} mm²)",
                self.distance, self.active_area
            )));
        }
        Ok(())
    }

    /// Linear extent of the sensor, taken as the side of a square of equal area.
    pub fn width(&self) -> f64 {
        self.active_area.sqrt()
    }
}

/// Bragg angle for the crystal reflection at the given photon energy (eV).
pub fn bragg_angle(pump_energy: f64, crystal: &CrystalConfig) -> Result<f64> {
    crystal.validate()?;
    if !(pump_energy > 0.0) {
        return Err(Error::InvalidInput(format!(
            "photon energy must be positive, got {pump_energy}"
        )));
    }
    let wavelength = wavelength_angstrom(pump_energy);
    let two_d = 2.0 * crystal.d_spacing();
    let sin_theta = wavelength / two_d;
    if sin_theta > 1.0 + 1e-12 {
        return Err(Error::ReflectionUnreachable { wavelength, two_d });
    }
    Ok(sin_theta.min(1.0).asin())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::{deg_to_rad, rad_to_deg, HC_EV_ANGSTROM};

    #[test]
    fn diamond_660_at_22kev() {
        let theta = bragg_angle(22_000.0, &CrystalConfig::diamond_660(0.0)).unwrap();
        // 84.19° with a = 3.5668 Å; the quoted experimental value is 84.1°.
        assert!((rad_to_deg(2.0 * theta) - 84.1).abs() < 0.1);
        assert!((rad_to_deg(theta) - 42.094).abs() < 1e-3);
    }

    #[test]
    fn backscatter_edge() {
        let crystal = CrystalConfig::diamond_660(0.0);
        let energy = HC_EV_ANGSTROM / (2.0 * crystal.d_spacing());
        let theta = bragg_angle(energy, &crystal).unwrap();
        assert!((theta - deg_to_rad(90.0)).abs() < 1e-6);
    }

    #[test]
    fn unreachable_reflection() {
        let err = bragg_angle(11_000.0, &CrystalConfig::diamond_660(0.0)).unwrap_err();
        match err {
            Error::ReflectionUnreachable { wavelength, two_d } => {
                assert!((wavelength - 1.1271).abs() < 1e-3);
                assert!((two_d - 0.8407).abs() < 1e-3);
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn rejects_bad_crystal() {
        let mut c = CrystalConfig::diamond_660(0.0);
        c.reflection = [0, 0, 0];
        assert!(c.validate().is_err());
        let mut c = CrystalConfig::diamond_660(0.0);
        c.lattice_constant = 0.0;
        assert!(c.validate().is_err());
        let mut c = CrystalConfig::diamond_660(0.0);
        c.effective_rate_scale = 1.5;
        assert!(c.validate().is_err());
    }

    #[test]
    fn bragg_angle_decreases_with_energy() {
        let crystal = CrystalConfig::diamond_660(0.0);
        let mut prev = f64::INFINITY;
        for e in (18_000..40_000).step_by(500) {
            let theta = bragg_angle(e as f64, &crystal).unwrap();
            assert!(theta < prev);
            prev = theta;
        }
    }
}
