//! Numbers with unit suffixes, as written in configuration files.

use std::f64::consts::PI;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    /// eV
    Energy,
    /// radians
    Angle,
    /// mm
    Length,
    /// Å
    LatticeLength,
    /// mm²
    Area,
    /// seconds
    Time,
    /// per second
    Rate,
}

impl Dimension {
    fn scale(self, unit: &str) -> Option<f64> {
        let s = match (self, unit) {
            (Dimension::Energy, "eV") => 1.0,
            (Dimension::Energy, "keV") => 1e3,
            (Dimension::Energy, "MeV") => 1e6,
            (Dimension::Angle, "rad") => 1.0,
            (Dimension::Angle, "mrad") => 1e-3,
            (Dimension::Angle, "urad" | "µrad") => 1e-6,
            (Dimension::Angle, "deg" | "°") => PI / 180.0,
            (Dimension::Angle, "mdeg") => PI / 180e3,
            (Dimension::Length, "um" | "µm") => 1e-3,
            (Dimension::Length, "mm") => 1.0,
            (Dimension::Length, "cm") => 10.0,
            (Dimension::Length, "m") => 1e3,
            (Dimension::LatticeLength, "A" | "Å" | "angstrom") => 1.0,
            (Dimension::LatticeLength, "nm") => 10.0,
            (Dimension::Area, "mm2" | "mm^2" | "mm²") => 1.0,
            (Dimension::Area, "cm2" | "cm^2" | "cm²") => 100.0,
            (Dimension::Time, "ns") => 1e-9,
            (Dimension::Time, "us" | "µs") => 1e-6,
            (Dimension::Time, "ms") => 1e-3,
            (Dimension::Time, "s") => 1.0,
            (Dimension::Time, "min") => 60.0,
            (Dimension::Time, "h") => 3600.0,
            (Dimension::Rate, "/s" | "Hz") => 1.0,
            (Dimension::Rate, "kHz") => 1e3,
            (Dimension::Rate, "/min") => 1.0 / 60.0,
            (Dimension::Rate, "/h") => 1.0 / 3600.0,
            _ => return None,
        };
        Some(s)
    }

    fn units(self) -> &'static str {
        match self {
            Dimension::Energy => "eV, keV, MeV",
            Dimension::Angle => "rad, mrad, urad, deg, mdeg",
            Dimension::Length => "um, mm, cm, m",
            Dimension::LatticeLength => "A, nm",
            Dimension::Area => "mm2, cm2",
            Dimension::Time => "ns, us, ms, s, min, h",
            Dimension::Rate => "/s, /min, /h, Hz, kHz",
        }
    }
}

/// Parses `"<number> <unit>"` (space optional) into the base unit of `dim`.
pub fn parse_quantity(text: &str, dim: Dimension) -> Result<f64> {
    let text = text.trim();
    let split = (1..=text.len())
        .rev()
        .filter(|&i| text.is_char_boundary(i))
        .find(|&i| text[..i].trim_end().parse::<f64>().is_ok())
        .ok_or_else(|| Error::Config(format!("expected a number in {text:?}")))?;
    let value: f64 = text[..split].trim_end().parse().expect("checked above");
    let unit = text[split..].trim();
    if unit.is_empty() {
        return Err(Error::Config(format!(
            "{text:?} needs a unit ({})",
            dim.units()
        )));
    }
    let scale = dim.scale(unit).ok_or_else(|| {
        Error::Config(format!(
            "unknown unit {unit:?} in {text:?}; expected {}",
            dim.units()
        ))
    })?;
    if !value.is_finite() {
        return Err(Error::Config(format!("{text:?} is not finite")));
    }
    Ok(value * scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::mdeg_to_rad;

    #[test]
    fn parses_with_and_without_space() {
        assert_eq!(
            parse_quantity("22 keV", Dimension::Energy).unwrap(),
            22_000.0
        );
        assert_eq!(
            parse_quantity("22keV", Dimension::Energy).unwrap(),
            22_000.0
        );
        assert_eq!(parse_quantity("1e3eV", Dimension::Energy).unwrap(), 1_000.0);
        assert_eq!(
            parse_quantity("0.98e13 /s", Dimension::Rate).unwrap(),
            0.98e13
        );
        assert_eq!(parse_quantity("18900 /h", Dimension::Rate).unwrap(), 5.25);
        assert_eq!(
            parse_quantity("-50 mdeg", Dimension::Angle).unwrap(),
            mdeg_to_rad(-50.0)
        );
        assert_eq!(parse_quantity("0.5 h", Dimension::Time).unwrap(), 1_800.0);
        assert_eq!(
            parse_quantity("3.5668 A", Dimension::LatticeLength).unwrap(),
            3.5668
        );
    }

    #[test]
    fn unit_required_and_checked() {
        assert!(parse_quantity("22", Dimension::Energy).is_err());
        assert!(parse_quantity("22 mm", Dimension::Energy).is_err());
        assert!(parse_quantity("keV", Dimension::Energy).is_err());
    }
}
