//! Pair emission onto two detectors placed on opposite sides of the Laue
//! direction.
//!
//! The pair is emitted back to back in azimuth: the photon on detector 1's
//! side at azimuth φ, its partner at φ + π. Each detector intercepts an arc of
//! the ring of half-width π·a, where a is its thin-ring acceptance. A photon
//! that falls in its detector's arc lands at a radial position uniform across
//! the sensor face, and that polar angle fixes the energy split through the
//! exact phase-matching closure. Pairs that miss both arcs draw their split
//! uniformly from the configured window.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::{DetectorId, Experiment, SourceCategory, TrueEvent};
use crate::error::{Error, Result};
use crate::physics::{
    arc_half_width, bragg_angle, emission_angles_exact, split_for_angle, DetectorGeometry,
    EfficiencyModel,
};
use crate::units::fwhm_to_sigma;

/// Outcome of one generated pair, before detector response.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpdcDraw {
    /// Signal energy fraction (the photon on detector 1's side).
    pub split: f64,
    /// Pump energy of this pair, eV.
    pub pump_energy: f64,
    /// Photon arriving at detector 1, if any.
    pub signal: Option<TrueEvent>,
    /// Photon arriving at detector 2, if any.
    pub idler: Option<TrueEvent>,
}

#[derive(Debug, Clone)]
pub struct PairSampler {
    detuning: f64,
    bragg_angle: f64,
    pump_energy: f64,
    bandwidth_sigma: f64,
    split_window: (f64, f64),
    arcs: [f64; 2],
    detectors: [DetectorGeometry; 2],
    efficiency: EfficiencyModel,
}

impl PairSampler {
    pub fn new(experiment: &Experiment) -> Result<Self> {
        let detuning = experiment.crystal.detuning;
        if !(detuning > 0.0) {
            return Err(Error::PhaseMatching(format!(
                "no down-conversion at detuning {detuning} rad"
            )));
        }
        let bragg_angle = bragg_angle(experiment.beam.pump_energy, &experiment.crystal)?;
        let detectors = experiment.detectors.clone();
        let arcs = [
            arc_half_width(detectors[0].center_angle_offset, &detectors[0]),
            arc_half_width(detectors[1].center_angle_offset, &detectors[1]),
        ];
        Ok(PairSampler {
            detuning,
            bragg_angle,
            pump_energy: experiment.beam.pump_energy,
            bandwidth_sigma: fwhm_to_sigma(experiment.beam.bandwidth_fwhm),
            split_window: experiment.source.split_window,
            arcs,
            detectors,
            efficiency: experiment.efficiency.clone(),
        })
    }

    /// Azimuthal half-widths (radians) of the two detectors' arcs.
    pub fn arcs(&self) -> [f64; 2] {
        self.arcs
    }

    /// Split implied by a photon hitting `det` at a uniformly drawn radial
    /// position across the sensor face, redrawn where no split reaches that
    /// angle. Returns the fraction carried by that photon.
    fn split_on_face<R: Rng + ?Sized>(&self, rng: &mut R, det: &DetectorGeometry) -> Option<f64> {
        let w = det.width();
        (0..64).find_map(|_| {
            let rho = rng.random_range(-0.5 * w..0.5 * w);
            let radius = det.distance * det.center_angle_offset.tan() + rho;
            let angle = (radius / det.distance).atan().abs();
            split_for_angle(angle, self.detuning, self.bragg_angle).ok()
        })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, time: f64) -> SpdcDraw {
        let pump_energy = if self.bandwidth_sigma > 0.0 {
            Normal::new(self.pump_energy, self.bandwidth_sigma)
                .map_or(self.pump_energy, |n| n.sample(rng))
        } else {
            self.pump_energy
        };
        // Azimuth of the signal about detector 1's direction, in (-π, π].
        let phi = rng.random_range(-PI..PI);
        let in_arc = [phi.abs() <= self.arcs[0], phi.abs() <= self.arcs[1]];

        let face_split = if in_arc[0] {
            self.split_on_face(rng, &self.detectors[0])
        } else if in_arc[1] {
            self.split_on_face(rng, &self.detectors[1]).map(|y| 1.0 - y)
        } else {
            None
        };
        let split = match face_split {
            Some(x) => x,
            None => {
                let (lo, hi) = self.split_window;
                if hi > lo {
                    rng.random_range(lo..hi)
                } else {
                    lo
                }
            }
        };
        // A split that the phase-matching closure cannot realise puts neither
        // photon on a detector.
        let reachable = face_split.is_some()
            && emission_angles_exact(split, self.detuning, self.bragg_angle).is_ok();

        let signal_energy = split * pump_energy;
        let idler_energy = pump_energy - signal_energy;
        let mut land = |hit: bool, detector: DetectorId, energy: f64| {
            let survives = rng.random::<f64>() < self.efficiency.photon(energy);
            (hit && reachable && survives).then_some(TrueEvent {
                detector,
                time,
                energy,
                category: SourceCategory::Pair,
            })
        };
        let signal = land(in_arc[0], DetectorId::One, signal_energy);
        let idler = land(in_arc[1], DetectorId::Two, idler_energy);
        SpdcDraw {
            split,
            pump_energy,
            signal,
            idler,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::physics::{emission_angle_approx, geometric_acceptance};
    use crate::sim::component_rng;

    fn experiment(efficiency: EfficiencyModel) -> Experiment {
        let mut e = Experiment::reference();
        e.efficiency = efficiency;
        e
    }

    #[test]
    fn pair_energies_sum_to_pump() {
        let sampler = PairSampler::new(&experiment(EfficiencyModel::Ideal)).unwrap();
        let mut rng = component_rng(3, 0);
        for i in 0..20_000 {
            let d = sampler.sample(&mut rng, i as f64);
            let s = d.split * d.pump_energy;
            assert!((s + (d.pump_energy - s) - d.pump_energy).abs() < 1e-9);
            if let (Some(a), Some(b)) = (d.signal, d.idler) {
                assert!((a.energy + b.energy - d.pump_energy).abs() < 1e-9);
                assert_eq!(a.time, b.time);
            }
        }
    }

    #[test]
    fn full_acceptance_ideal_chain_always_detects_both() {
        let mut e = experiment(EfficiencyModel::Ideal);
        for det in &mut e.detectors {
            // Ring smaller than the sensor.
            det.active_area = 10_000.0;
        }
        let sampler = PairSampler::new(&e).unwrap();
        assert_eq!(sampler.arcs(), [PI, PI]);
        let mut rng = component_rng(5, 0);
        for i in 0..5_000 {
            let d = sampler.sample(&mut rng, i as f64);
            assert!(d.signal.is_some() && d.idler.is_some());
        }
    }

    #[test]
    fn detected_splits_cluster_at_degeneracy() {
        let sampler = PairSampler::new(&experiment(EfficiencyModel::Ideal)).unwrap();
        let mut rng = component_rng(11, 0);
        let mut splits = Vec::new();
        for i in 0..200_000 {
            let d = sampler.sample(&mut rng, i as f64);
            if d.signal.is_some() {
                splits.push(d.split);
            }
        }
        let mean = splits.iter().sum::<f64>() / splits.len() as f64;
        assert!((mean - 0.5).abs() < 0.01, "{mean}");
        // The 7.07 mm face spans about ±0.07 in split at 10 mdeg.
        assert!(splits.iter().all(|x| (x - 0.5).abs() < 0.08));
    }

    #[test]
    fn negative_detuning_has_no_sampler() {
        let mut e = experiment(EfficiencyModel::Ideal);
        e.crystal.detuning = -1e-3;
        assert!(matches!(PairSampler::new(&e), Err(Error::PhaseMatching(_))));
    }

    /// Rejection sampler for the coincidence fraction: scatter the partner
    /// azimuth uniformly on the ring and keep draws where the pair axis
    /// passes through both sensors' angular footprints.
    fn rejection_coincidence_fraction(e: &Experiment, n: usize, seed: u64) -> f64 {
        let theta_b = bragg_angle(e.beam.pump_energy, &e.crystal).unwrap();
        let r = emission_angle_approx(0.5, e.crystal.detuning, theta_b).unwrap();
        let mut rng = component_rng(seed, 99);
        let halves: Vec<f64> = e
            .detectors
            .iter()
            .map(|d| {
                let ring = d.distance * r.tan();
                0.5 * d.width() / ring
            })
            .collect();
        let mut hits = 0usize;
        for _ in 0..n {
            let a: f64 = rng.random_range(0.0..2.0 * PI);
            let (y, x) = a.sin_cos();
            // Position of the detector-1-side photon on a unit ring; the
            // partner sits at the antipode.
            let on1 = x > 0.0 && (y / x).atan().abs() <= halves[0];
            let on2 = x > 0.0 && (y / x).atan().abs() <= halves[1];
            if on1 && on2 {
                hits += 1;
            }
        }
        hits as f64 / n as f64
    }

    #[test]
    fn coincidence_fraction_matches_rejection_sampler() {
        let e = experiment(EfficiencyModel::Ideal);
        let sampler = PairSampler::new(&e).unwrap();
        let mut rng = component_rng(21, 0);
        let n = 100_000;
        let both = (0..n)
            .filter(|&i| {
                let d = sampler.sample(&mut rng, i as f64);
                d.signal.is_some() && d.idler.is_some()
            })
            .count() as f64
            / n as f64;
        let reference = rejection_coincidence_fraction(&e, n, 21);
        let sigma = (reference * (1.0 - reference) / n as f64).sqrt();
        assert!(
            (both - reference).abs() < 4.0 * 2f64.sqrt() * sigma,
            "{both} vs {reference}"
        );
        // and both agree with the smaller thin-ring acceptance
        let a2 = geometric_acceptance(e.detectors[1].center_angle_offset, &e.detectors[1]).fraction;
        assert!((both - a2).abs() < 5.0 * sigma, "{both} vs {a2}");
    }
}
