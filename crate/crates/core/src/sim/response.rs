use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::{EventRecord, TrueEvent};
use crate::error::{Error, Result};
use crate::units::fwhm_to_sigma;

#[derive(Debug, Clone, PartialEq)]
pub struct DetectorResponse {
    /// Energy resolution (FWHM), eV.
    pub energy_resolution_fwhm: f64,
    /// Standard deviation of the per-detector timing jitter, ns.
    pub time_jitter_sigma: f64,
    /// Timestamp quantum, ns.
    pub clock_tick: u64,
    /// Recordable energy range (closed), eV.
    pub energy_range: (f64, f64),
    /// Non-paralyzable dead time, ns. `None` disables it.
    pub dead_time: Option<f64>,
}

impl Default for DetectorResponse {
    fn default() -> Self {
        DetectorResponse {
            energy_resolution_fwhm: 150.0,
            time_jitter_sigma: 150.0,
            clock_tick: 20,
            energy_range: (1_000.0, 40_000.0),
            dead_time: None,
        }
    }
}

impl DetectorResponse {
    pub fn validate(&self) -> Result<()> {
        if !(self.energy_resolution_fwhm >= 0.0) || !(self.time_jitter_sigma >= 0.0) {
            return Err(Error::Config(
                "resolution and jitter must be non-negative".into(),
            ));
        }
        if self.clock_tick == 0 {
            return Err(Error::Config("clock tick must be positive".into()));
        }
        let (lo, hi) = self.energy_range;
        if !(lo > 0.0 && lo < hi) {
            return Err(Error::Config(format!("invalid energy range ({lo}, {hi})")));
        }
        if let Some(d) = self.dead_time {
            if !(d >= 0.0) {
                return Err(Error::Config("dead time must be non-negative".into()));
            }
        }
        Ok(())
    }
}

/// Smears, quantises and range-checks one photon. Returns `None` when the
/// photon is not recorded.
pub fn apply_detector_response<R: Rng + ?Sized>(
    event: &TrueEvent,
    response: &DetectorResponse,
    rng: &mut R,
) -> Option<EventRecord> {
    let energy = event.energy + gaussian(rng, fwhm_to_sigma(response.energy_resolution_fwhm));
    let time = event.time + gaussian(rng, response.time_jitter_sigma);
    let (lo, hi) = response.energy_range;
    if !(energy >= lo && energy <= hi) || time < 0.0 {
        return None;
    }
    let energy = energy.round();
    if energy < 1.0 || energy > f64::from(u32::MAX) {
        return None;
    }
    let tick = response.clock_tick;
    let timestamp = (time as u64 / tick) * tick;
    Some(EventRecord {
        detector: event.detector,
        timestamp,
        energy: energy as u32,
    })
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R, sigma: f64) -> f64 {
    if sigma > 0.0 {
        Normal::new(0.0, sigma).map_or(0.0, |n| n.sample(rng))
    } else {
        0.0
    }
}

/// Non-paralyzable dead time on a time-ordered single-detector stream: an
/// event is lost if it arrives within `dead_time` ns of the last kept event.
/// Returns the kept flags.
pub fn apply_dead_time(timestamps: &[u64], dead_time: f64) -> Vec<bool> {
    let mut keep = vec![false; timestamps.len()];
    let mut busy_until: Option<f64> = None;
    for (i, &t) in timestamps.iter().enumerate() {
        let t = t as f64;
        if busy_until.is_none_or(|b| t >= b) {
            keep[i] = true;
            busy_until = Some(t + dead_time);
        }
    }
    keep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{component_rng, DetectorId, SourceCategory};

    fn event(time: f64, energy: f64) -> TrueEvent {
        TrueEvent {
            detector: DetectorId::One,
            time,
            energy,
            category: SourceCategory::Fluorescence,
        }
    }

    #[test]
    fn ideal_response_only_quantises() {
        let resp = DetectorResponse {
            energy_resolution_fwhm: 0.0,
            time_jitter_sigma: 0.0,
            ..DetectorResponse::default()
        };
        let mut rng = component_rng(1, 0);
        let rec = apply_detector_response(&event(1_234.5, 11_000.0), &resp, &mut rng).unwrap();
        assert_eq!(rec.timestamp, 1_220);
        assert_eq!(rec.energy, 11_000);
        assert_eq!(rec.detector, DetectorId::One);
    }

    #[test]
    fn out_of_range_dropped() {
        let resp = DetectorResponse {
            energy_resolution_fwhm: 0.0,
            energy_range: (5_000.0, 17_000.0),
            ..DetectorResponse::default()
        };
        let mut rng = component_rng(1, 0);
        assert!(apply_detector_response(&event(1e6, 4_000.0), &resp, &mut rng).is_none());
        assert!(apply_detector_response(&event(1e6, 5_000.0), &resp, &mut rng).is_some());
    }

    #[test]
    fn pair_time_difference_width() {
        // 150 ns per detector gives 212 ns on the difference.
        let resp = DetectorResponse::default();
        let mut rng = component_rng(7, 3);
        let n = 10_000;
        let diffs: Vec<f64> = (0..n)
            .filter_map(|i| {
                let t = 1e6 + i as f64 * 1e4;
                let a = apply_detector_response(&event(t, 11_000.0), &resp, &mut rng)?;
                let mut e2 = event(t, 11_000.0);
                e2.detector = DetectorId::Two;
                let b = apply_detector_response(&e2, &resp, &mut rng)?;
                Some(b.timestamp as f64 - a.timestamp as f64)
            })
            .collect();
        let mean = diffs.iter().sum::<f64>() / diffs.len() as f64;
        let var = diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (diffs.len() - 1) as f64;
        assert!((var.sqrt() - 212.0).abs() < 5.0, "sigma = {}", var.sqrt());
    }

    #[test]
    fn dead_time_is_non_paralyzable() {
        let keep = apply_dead_time(&[0, 100, 900, 1000, 1500, 2100], 1000.0);
        assert_eq!(keep, vec![true, false, false, true, false, true]);
    }
}
