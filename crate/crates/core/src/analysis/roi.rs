//! Background-subtracted pair rate in the central region of the map.
//!
//! Accidental coincidences are flat in t2 - t1, so their level inside the
//! region of interest is estimated from the same energy band at larger |dt|
//! (both sides), scaled by the ratio of time widths.

use super::CorrelationMap;
use crate::error::{Error, Result};
use crate::units::SECONDS_PER_HOUR;

#[derive(Debug, Clone, PartialEq)]
pub struct RoiSpec {
    /// Centre of the E1 band, eV.
    pub energy_center: f64,
    /// Closed half-width of the E1 band, eV.
    pub energy_halfwidth: f64,
    /// Time-profile standard deviation used to size the regions, ns.
    pub sigma_t: f64,
    /// ROI is |dt| ≤ `roi_sigmas` · σ_t.
    pub roi_sigmas: f64,
    /// Sidebands are `sideband_sigmas` · σ_t ≤ |dt| ≤ horizon.
    pub sideband_sigmas: f64,
}

impl Default for RoiSpec {
    fn default() -> Self {
        RoiSpec {
            energy_center: 11_000.0,
            energy_halfwidth: 2_500.0,
            sigma_t: 212.0,
            roi_sigmas: 3.0,
            sideband_sigmas: 5.0,
        }
    }
}

impl RoiSpec {
    pub fn energy_band(&self) -> (f64, f64) {
        (
            self.energy_center - self.energy_halfwidth,
            self.energy_center + self.energy_halfwidth,
        )
    }

    pub fn roi_halfwidth(&self) -> f64 {
        self.roi_sigmas * self.sigma_t
    }

    pub fn sideband_inner(&self) -> f64 {
        self.sideband_sigmas * self.sigma_t
    }

    fn time_bins(&self, map: &CorrelationMap) -> Result<(Vec<usize>, Vec<usize>)> {
        if !(self.sigma_t > 0.0) || !(self.energy_halfwidth > 0.0) || !(self.roi_sigmas > 0.0) {
            return Err(Error::Config("ROI widths must be positive".into()));
        }
        let roi_hw = self.roi_halfwidth();
        let inner = self.sideband_inner();
        if inner <= roi_hw {
            return Err(Error::RoiOverlap(format!(
                "sidebands start at {inner} ns, inside the ROI half-width {roi_hw} ns"
            )));
        }
        let roi = map.dt_bins_where(|c| c.abs() <= roi_hw);
        let side = map.dt_bins_where(|c| c.abs() >= inner);
        if roi.is_empty() {
            return Err(Error::Config("ROI contains no time bins".into()));
        }
        if side.is_empty() {
            return Err(Error::RoiOverlap(format!(
                "no sideband bins between {inner} ns and the pairing horizon"
            )));
        }
        if roi.iter().any(|j| side.contains(j)) {
            return Err(Error::RoiOverlap("ROI and sideband share time bins".into()));
        }
        Ok((roi, side))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoiResult {
    pub roi_counts: u64,
    pub sideband_counts: u64,
    /// ROI time width over total sideband time width.
    pub area_ratio: f64,
    /// Expected accidental counts inside the ROI.
    pub sideband_estimate: f64,
    /// Background-subtracted pairs per hour, normalised to unit beam current.
    pub net_rate: f64,
    pub net_rate_error: f64,
    /// Effective exposure, hours × mean relative current.
    pub exposure_hours: f64,
}

impl RoiResult {
    pub fn net_counts(&self) -> f64 {
        self.roi_counts as f64 - self.sideband_estimate
    }
}

pub fn roi_rate(map: &CorrelationMap, spec: &RoiSpec) -> Result<RoiResult> {
    let (roi_bins, side_bins) = spec.time_bins(map)?;
    let (lo, hi) = spec.energy_band();
    let energy_bins = map.energy_bins_in(lo, hi);
    if energy_bins.is_empty() {
        return Err(Error::Config(format!(
            "energy band [{lo}, {hi}] eV covers no bins"
        )));
    }
    let sum_over = |time_bins: &[usize]| -> u64 {
        energy_bins
            .iter()
            .flat_map(|&i| time_bins.iter().map(move |&j| (i, j)))
            .map(|(i, j)| map.hist.get(i, j))
            .sum()
    };
    let roi_counts = sum_over(&roi_bins);
    let sideband_counts = sum_over(&side_bins);
    let area_ratio = roi_bins.len() as f64 / side_bins.len() as f64;
    let sideband_estimate = sideband_counts as f64 * area_ratio;
    let exposure_hours = map.duration_s / SECONDS_PER_HOUR * map.mean_current;
    let net = roi_counts as f64 - sideband_estimate;
    let variance = roi_counts as f64 + sideband_counts as f64 * area_ratio * area_ratio;
    Ok(RoiResult {
        roi_counts,
        sideband_counts,
        area_ratio,
        sideband_estimate,
        net_rate: net / exposure_hours,
        net_rate_error: variance.sqrt() / exposure_hours,
        exposure_hours,
    })
}

/// Mean E1 (eV) of the background-subtracted ROI counts, or `None` when the
/// ROI holds no net excess.
pub fn roi_energy_centroid(map: &CorrelationMap, spec: &RoiSpec) -> Result<Option<f64>> {
    let (roi_bins, side_bins) = spec.time_bins(map)?;
    let (lo, hi) = spec.energy_band();
    let energy_bins = map.energy_bins_in(lo, hi);
    let ratio = roi_bins.len() as f64 / side_bins.len() as f64;
    let roi = map.energy_marginal(&roi_bins);
    let side = map.energy_marginal(&side_bins);
    let (mut w, mut m) = (0.0, 0.0);
    for i in energy_bins {
        let excess = roi[i] as f64 - side[i] as f64 * ratio;
        w += excess;
        m += excess * map.energy_axis().center(i);
    }
    Ok((w > 0.0).then(|| m / w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::CoincidenceCriteria;

    fn flat_map(level: u64) -> CorrelationMap {
        let mut map = CorrelationMap::empty(&CoincidenceCriteria::default(), 1_800.0, 1.0).unwrap();
        for i in 0..map.energy_axis().bins() {
            for j in 0..map.dt_axis().bins() {
                map.hist.set(i, j, level);
            }
        }
        map
    }

    #[test]
    fn flat_accidentals_give_zero_net() {
        let r = roi_rate(&flat_map(3), &RoiSpec::default()).unwrap();
        assert!(r.net_rate.abs() < 1e-9);
        assert!(r.net_rate_error > 0.0);
        assert_eq!(r.exposure_hours, 0.5);
    }

    #[test]
    fn linear_in_counts() {
        let mut a = flat_map(2);
        let mut b = flat_map(4);
        let j0 = a.dt_axis().index(0.0).unwrap();
        let i0 = a.energy_axis().index(11_000.0).unwrap();
        a.hist.set(i0, j0, 50);
        b.hist.set(i0, j0, 100);
        let ra = roi_rate(&a, &RoiSpec::default()).unwrap();
        let rb = roi_rate(&b, &RoiSpec::default()).unwrap();
        assert!((rb.net_rate - 2.0 * ra.net_rate).abs() < 1e-9);
        assert!((rb.net_rate_error / ra.net_rate_error - 2f64.sqrt()).abs() < 1e-12);
        assert!((ra.net_counts() - 48.0).abs() < 1e-9);
    }

    #[test]
    fn overlap_rejected() {
        let spec = RoiSpec {
            roi_sigmas: 5.0,
            sideband_sigmas: 4.0,
            ..RoiSpec::default()
        };
        assert!(matches!(
            roi_rate(&flat_map(1), &spec),
            Err(Error::RoiOverlap(_))
        ));
        let spec = RoiSpec {
            sigma_t: 500.0,
            ..RoiSpec::default()
        };
        assert!(matches!(
            roi_rate(&flat_map(1), &spec),
            Err(Error::RoiOverlap(_))
        ));
    }

    #[test]
    fn empty_map_has_zero_error() {
        let r = roi_rate(&flat_map(0), &RoiSpec::default()).unwrap();
        assert_eq!(r.net_rate, 0.0);
        assert_eq!(r.net_rate_error, 0.0);
    }

    #[test]
    fn centroid_of_excess() {
        let mut map = flat_map(1);
        let j0 = map.dt_axis().index(0.0).unwrap();
        for (e, n) in [(10_550.0, 10), (11_450.0, 10)] {
            let i = map.energy_axis().index(e).unwrap();
            map.hist.set(i, j0, n);
        }
        let c = roi_energy_centroid(&map, &RoiSpec::default())
            .unwrap()
            .unwrap();
        assert!((c - 11_000.0).abs() < 1e-6);
        assert!(roi_energy_centroid(&flat_map(1), &RoiSpec::default())
            .unwrap()
            .is_none());
    }
}
