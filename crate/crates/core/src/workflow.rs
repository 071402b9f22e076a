//! Simulate-then-analyse compositions shared by the command line and tests.

use rayon::prelude::*;

use crate::analysis::{
    analyze_streams, fit_misalignment_scan, Analysis, AnalysisSettings, ScanPoint, ScanResult,
};
use crate::error::Result;
use crate::io::XpdcConfig;
use crate::sim::{simulate_run, RunOutput};
use crate::units::mdeg_to_rad;

impl XpdcConfig {
    pub fn analysis_settings(&self) -> AnalysisSettings {
        AnalysisSettings {
            criteria: self.criteria.clone(),
            roi: self.roi.clone(),
            fit_sigma_t: self.fit_sigma_t,
        }
    }
}

pub fn simulate_and_analyze(cfg: &XpdcConfig) -> Result<(RunOutput, Analysis)> {
    let out = simulate_run(&cfg.run)?;
    let analysis = analyze_streams(
        &out.streams,
        out.manifest.duration_s,
        out.manifest.mean_current,
        &cfg.analysis_settings(),
    )?;
    Ok((out, analysis))
}

/// Net ROI rate at one detuning, pooling the counts of one run per seed.
pub fn scan_point(cfg: &XpdcConfig, detuning_mdeg: f64, seeds: &[u64]) -> Result<ScanPoint> {
    let base = cfg.with_detuning(mdeg_to_rad(detuning_mdeg))?;
    let runs = seeds
        .par_iter()
        .map(|&seed| {
            let mut c = base.clone();
            c.run.seed = seed;
            simulate_and_analyze(&c).map(|(_, a)| a.roi)
        })
        .collect::<Result<Vec<_>>>()?;
    let (mut net, mut var, mut exposure) = (0.0, 0.0, 0.0);
    for r in &runs {
        net += r.net_counts();
        var += r.roi_counts as f64 + r.sideband_counts as f64 * r.area_ratio * r.area_ratio;
        exposure += r.exposure_hours;
    }
    Ok(ScanPoint {
        detuning_mdeg,
        rate: net / exposure,
        error: var.sqrt() / exposure,
    })
}

/// All scan points, plus the power-law fit (which may fail, e.g. for fewer
/// than two usable points).
pub fn run_scan(
    cfg: &XpdcConfig,
    detunings_mdeg: &[f64],
    seeds: &[u64],
) -> Result<(Vec<ScanPoint>, Result<ScanResult>)> {
    let points = detunings_mdeg
        .iter()
        .map(|&d| scan_point(cfg, d, seeds))
        .collect::<Result<Vec<_>>>()?;
    let fit = fit_misalignment_scan(&points);
    Ok((points, fit))
}
