//! The full chain from two detector streams to a background-subtracted rate.

use super::{
    build_correlation_map, find_coincidence_pairs, fit_time_profile_in_band, roi_energy_centroid,
    roi_rate, select_candidates, CoincidenceCriteria, CorrelationMap, RoiResult, RoiSpec,
    TimeProfileFit,
};
use crate::error::Result;
use crate::sim::EventRecord;

#[derive(Debug, Clone)]
pub struct AnalysisSettings {
    pub criteria: CoincidenceCriteria,
    pub roi: RoiSpec,
    /// Size the ROI from the fitted σ_t instead of `roi.sigma_t`.
    pub fit_sigma_t: bool,
}

#[derive(Debug, Clone)]
pub struct Analysis {
    pub candidates: [usize; 2],
    pub pairs: usize,
    pub map: CorrelationMap,
    /// Time profile fit within the ROI energy band, or why it failed.
    pub time_fit: std::result::Result<TimeProfileFit, String>,
    /// ROI actually used, with σ_t possibly taken from the fit.
    pub roi_spec: RoiSpec,
    pub roi: RoiResult,
    /// Net-count-weighted mean E1 in the ROI, eV.
    pub energy_centroid: Option<f64>,
}

impl Analysis {
    /// Centre of the coincidence peak in t2 - t1, ns, when the fit converged.
    pub fn dt_center(&self) -> Option<f64> {
        self.time_fit.as_ref().ok().map(|f| f.center)
    }
}

pub fn analyze_streams(
    streams: &[Vec<EventRecord>; 2],
    duration_s: f64,
    mean_current: f64,
    settings: &AnalysisSettings,
) -> Result<Analysis> {
    let criteria = &settings.criteria;
    criteria.validate()?;
    let first = select_candidates(&streams[0], criteria)?;
    let second = select_candidates(&streams[1], criteria)?;
    let pairs = find_coincidence_pairs(&first, &second, criteria);
    let map = build_correlation_map(&pairs, criteria, duration_s, mean_current)?;
    let (lo, hi) = settings.roi.energy_band();
    let time_fit = fit_time_profile_in_band(&map, lo, hi).map_err(|e| e.to_string());
    let mut roi_spec = settings.roi.clone();
    if settings.fit_sigma_t {
        if let Ok(fit) = &time_fit {
            if fit.sigma > 0.0 && fit.sigma.is_finite() {
                roi_spec.sigma_t = fit.sigma;
            }
        }
    }
    let roi = roi_rate(&map, &roi_spec)?;
    let energy_centroid = roi_energy_centroid(&map, &roi_spec)?;
    Ok(Analysis {
        candidates: [first.len(), second.len()],
        pairs: pairs.len(),
        map,
        time_fit,
        roi_spec,
        roi,
        energy_centroid,
    })
}
