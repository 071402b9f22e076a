use rand::Rng;
use rand_distr::{Distribution, Normal, Poisson};

use super::{BeamCurrentProfile, DetectorId, DetectorSources, SourceCategory, TrueEvent};
use crate::units::fwhm_to_sigma;

/// Draws a Poisson count with the given mean (0 for a non-positive mean).
pub(crate) fn poisson_count<R: Rng + ?Sized>(rng: &mut R, mean: f64) -> u64 {
    if !(mean > 0.0) {
        return 0;
    }
    Poisson::new(mean).map_or(0, |p| p.sample(rng) as u64)
}

/// Arrival times (ns) of a Poisson process with base rate `rate` (per second)
/// modulated by the piecewise-constant current `segments`.
pub(crate) fn arrival_times<R: Rng + ?Sized>(
    rng: &mut R,
    rate: f64,
    segments: &[(f64, f64, f64)],
) -> Vec<f64> {
    let mut times = Vec::new();
    for &(start, end, current) in segments {
        let n = poisson_count(rng, rate * current * (end - start));
        times.reserve(n as usize);
        for _ in 0..n {
            times.push(rng.random_range(start..end) * 1e9);
        }
    }
    times
}

/// One Gaussian line as a Poisson stream of true events on `detector`.
pub(crate) fn sample_line<R: Rng + ?Sized>(
    rng: &mut R,
    detector: DetectorId,
    category: SourceCategory,
    center: f64,
    fwhm: f64,
    rate: f64,
    segments: &[(f64, f64, f64)],
) -> Vec<TrueEvent> {
    let times = arrival_times(rng, rate, segments);
    let spread = Normal::new(center, fwhm_to_sigma(fwhm)).ok();
    times
        .into_iter()
        .filter_map(|time| {
            let energy = spread.as_ref().map_or(center, |n| n.sample(rng));
            (energy > 0.0).then_some(TrueEvent {
                detector,
                time,
                energy,
                category,
            })
        })
        .collect()
}

/// The uncorrelated background components of `sources`, in component order.
///
/// `scatter_scale` multiplies the Compton and elastic rates (polarization
/// suppression); the elastic line sits at `pump_energy`.
pub(crate) fn background_components(
    sources: &DetectorSources,
    scatter_scale: f64,
    pump_energy: f64,
) -> Vec<(SourceCategory, f64, f64, f64)> {
    let mut out: Vec<_> = sources
        .fluorescence
        .iter()
        .map(|l| (SourceCategory::Fluorescence, l.center, l.fwhm, l.rate))
        .collect();
    if let Some(c) = &sources.compton {
        out.push((
            SourceCategory::Compton,
            c.center,
            c.fwhm,
            c.rate * scatter_scale,
        ));
    }
    if let Some(e) = &sources.elastic {
        out.push((
            SourceCategory::Elastic,
            pump_energy,
            e.fwhm,
            e.rate * scatter_scale,
        ));
    }
    out
}

/// Background photons reaching one detector over `duration` seconds, before
/// detector response and unsorted. Each component is an independent
/// homogeneous Poisson process thinned by the beam current.
pub fn sample_background<R: Rng + ?Sized>(
    rng: &mut R,
    sources: &DetectorSources,
    detector: DetectorId,
    duration: f64,
    profile: &BeamCurrentProfile,
    scatter_scale: f64,
    pump_energy: f64,
) -> Vec<TrueEvent> {
    let segments = profile.normalized_segments(duration);
    background_components(sources, scatter_scale, pump_energy)
        .into_iter()
        .flat_map(|(category, center, fwhm, rate)| {
            sample_line(rng, detector, category, center, fwhm, rate, &segments)
        })
        .collect()
}
