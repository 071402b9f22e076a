use crate::error::{Error, Result};

/// Gaussian emission line.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralLine {
    /// Centre energy, eV.
    pub center: f64,
    /// Intrinsic width (FWHM), eV. Detector resolution is added separately.
    pub fwhm: f64,
    /// Photons per second reaching the detector.
    pub rate: f64,
}

impl SpectralLine {
    pub fn new(center: f64, fwhm: f64, rate: f64) -> Self {
        SpectralLine { center, fwhm, rate }
    }

    fn validate(&self, what: &str) -> Result<()> {
        if !(self.rate >= 0.0 && self.rate.is_finite()) {
            return Err(Error::Config(format!("{what} rate must be non-negative")));
        }
        if !(self.fwhm >= 0.0) || !(self.center > 0.0) {
            return Err(Error::Config(format!(
                "{what} needs a positive centre and non-negative width"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SourceCategory {
    Pair,
    Fluorescence,
    Compton,
    Elastic,
}

impl SourceCategory {
    pub fn name(self) -> &'static str {
        match self {
            SourceCategory::Pair => "pair",
            SourceCategory::Fluorescence => "fluorescence",
            SourceCategory::Compton => "compton",
            SourceCategory::Elastic => "elastic",
        }
    }
}

/// Uncorrelated background reaching one detector.
///
/// Compton and elastic rates are given before polarization suppression; the
/// simulator scales them by the suppression factor of the configured
/// geometry. Fluorescence lines (including any broad continuum entered as a
/// wide line) are isotropic and are not scaled.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DetectorSources {
    pub fluorescence: Vec<SpectralLine>,
    pub compton: Option<SpectralLine>,
    /// Thermal diffuse scattering at the pump energy. Its `center` is ignored
    /// and replaced by the pump energy.
    pub elastic: Option<SpectralLine>,
}

impl DetectorSources {
    /// Order-of-magnitude background for a silicon drift detector near the
    /// diffracted beam: Fe and Cu Kα from beamline components, a faint broad
    /// continuum, and the Compton and elastic peaks.
    pub fn typical() -> Self {
        DetectorSources {
            fluorescence: vec![
                SpectralLine::new(6_404.0, 0.0, 150.0),
                SpectralLine::new(8_048.0, 0.0, 250.0),
                SpectralLine::new(12_000.0, 9_000.0, 10.0),
            ],
            compton: Some(SpectralLine::new(21_180.0, 600.0, 20_000.0)),
            elastic: Some(SpectralLine::new(22_000.0, 0.0, 30_000.0)),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for line in &self.fluorescence {
            line.validate("fluorescence line")?;
        }
        if let Some(c) = &self.compton {
            c.validate("compton peak")?;
        }
        if let Some(e) = &self.elastic {
            if !(e.rate >= 0.0) || !(e.fwhm >= 0.0) {
                return Err(Error::Config(
                    "elastic line rate and width must be non-negative".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn is_silent(&self) -> bool {
        self.fluorescence.iter().all(|l| l.rate == 0.0)
            && self.compton.as_ref().is_none_or(|l| l.rate == 0.0)
            && self.elastic.as_ref().is_none_or(|l| l.rate == 0.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SourceModel {
    /// Pairs per second generated into the full emission cone.
    pub true_pair_rate: f64,
    /// Range of signal energy fractions drawn for pairs that miss both
    /// detectors' arcs.
    pub split_window: (f64, f64),
    pub detectors: [DetectorSources; 2],
}

impl Default for SourceModel {
    fn default() -> Self {
        SourceModel {
            true_pair_rate: 18_900.0 / 3600.0,
            split_window: (5_000.0 / 22_000.0, 17_000.0 / 22_000.0),
            detectors: [DetectorSources::typical(), DetectorSources::typical()],
        }
    }
}

impl SourceModel {
    pub fn quiet(true_pair_rate: f64) -> Self {
        SourceModel {
            true_pair_rate,
            detectors: [DetectorSources::default(), DetectorSources::default()],
            ..SourceModel::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.true_pair_rate >= 0.0 && self.true_pair_rate.is_finite()) {
            return Err(Error::Config("pair rate must be non-negative".into()));
        }
        let (lo, hi) = self.split_window;
        if !(0.0 < lo && lo <= hi && hi < 1.0) {
            return Err(Error::Config(format!(
                "split window ({lo}, {hi}) must lie inside (0, 1)"
            )));
        }
        for d in &self.detectors {
            d.validate()?;
        }
        Ok(())
    }
}
