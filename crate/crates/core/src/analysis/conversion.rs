use crate::error::{Error, Result};
use crate::units::SECONDS_PER_HOUR;

/// Rates implied by an observed pair rate once detector coverage and
/// detection-chain losses are undone. All rates are pairs per hour.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConversionEstimate {
    /// Pairs per hour into the whole ring at the detectors.
    pub observable_rate: f64,
    /// Pairs per hour generated in the crystal.
    pub total_rate: f64,
    /// Generated pairs per incident pump photon.
    pub efficiency: f64,
    /// Incident photons per observed pair.
    pub photons_per_observed_pair: f64,
}

impl ConversionEstimate {
    /// Uncertainties of `(observable_rate, total_rate, efficiency)` for an
    /// uncertainty `net_rate_error` on the observed rate `net_rate`. All three
    /// are proportional to the observed rate.
    pub fn errors_for(&self, net_rate: f64, net_rate_error: f64) -> (f64, f64, f64) {
        let rel = (net_rate_error / net_rate).abs();
        (
            self.observable_rate * rel,
            self.total_rate * rel,
            self.efficiency * rel,
        )
    }
}

/// `net_rate` in pairs/hour, `incident_rate` in photons/second.
pub fn conversion_efficiency(
    net_rate: f64,
    acceptance: f64,
    chain_efficiency: f64,
    incident_rate: f64,
) -> Result<ConversionEstimate> {
    if !(acceptance > 0.0 && acceptance <= 1.0) {
        return Err(Error::InvalidInput(format!(
            "acceptance {acceptance} outside (0, 1]"
        )));
    }
    if !(chain_efficiency > 0.0 && chain_efficiency <= 1.0) {
        return Err(Error::InvalidInput(format!(
            "chain efficiency {chain_efficiency} outside (0, 1]"
        )));
    }
    if !(incident_rate > 0.0) {
        return Err(Error::InvalidInput("incident rate must be positive".into()));
    }
    let incident_per_hour = incident_rate * SECONDS_PER_HOUR;
    let observable_rate = net_rate / acceptance;
    let total_rate = observable_rate / chain_efficiency;
    Ok(ConversionEstimate {
        observable_rate,
        total_rate,
        efficiency: total_rate / incident_per_hour,
        photons_per_observed_pair: incident_per_hour / net_rate,
    })
}
