use std::collections::BTreeMap;

use rayon::prelude::*;

use super::background::{arrival_times, background_components, sample_line};
use super::{
    apply_dead_time, apply_detector_response, component_rng, BeamCurrentProfile, DetectorId,
    DetectorResponse, EventRecord, PairSampler, SourceCategory, SourceModel,
};
use crate::error::{Error, Result};
use crate::physics::{
    bragg_angle, emission_angle_approx, polarization_suppression, BeamConfig, CrystalConfig,
    DetectorGeometry, EfficiencyModel,
};
use crate::units::mdeg_to_rad;

/// Everything about the physical setup of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct Experiment {
    pub crystal: CrystalConfig,
    pub beam: BeamConfig,
    pub detectors: [DetectorGeometry; 2],
    pub source: SourceModel,
    pub response: DetectorResponse,
    pub efficiency: EfficiencyModel,
}

impl Experiment {
    /// Diamond (660) at 22 keV, detuned by 10 mdeg, with the two 50 mm²
    /// detectors at 1351 mm and 1560 mm aimed at the degenerate ring.
    pub fn reference() -> Self {
        let detector = |distance| DetectorGeometry {
            distance,
            active_area: 50.0,
            center_angle_offset: 0.0,
            in_plane: true,
        };
        let mut e = Experiment {
            crystal: CrystalConfig::diamond_660(mdeg_to_rad(10.0)),
            beam: BeamConfig::default(),
            detectors: [detector(1351.0), detector(1560.0)],
            source: SourceModel::default(),
            response: DetectorResponse::default(),
            efficiency: EfficiencyModel::default(),
        };
        e.aim_detectors(e.crystal.detuning)
            .expect("default geometry is phase-matchable");
        e
    }

    /// Places both detectors on the degenerate-split ring predicted by the
    /// small-angle formula for `detuning`, which need not equal the crystal's
    /// actual detuning.
    pub fn aim_detectors(&mut self, detuning: f64) -> Result<()> {
        let theta_b = bragg_angle(self.beam.pump_energy, &self.crystal)?;
        let offset = emission_angle_approx(0.5, detuning, theta_b)?;
        for det in &mut self.detectors {
            det.center_angle_offset = offset;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.crystal.validate()?;
        self.beam.validate()?;
        for d in &self.detectors {
            d.validate()?;
        }
        self.source.validate()?;
        self.response.validate()?;
        self.efficiency.validate()?;
        bragg_angle(self.beam.pump_energy, &self.crystal)?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Run length, seconds.
    pub duration: f64,
    pub seed: u64,
    pub experiment: Experiment,
    pub beam_current: BeamCurrentProfile,
}

impl RunConfig {
    pub fn new(experiment: Experiment, duration: f64, seed: u64) -> Self {
        RunConfig {
            duration,
            seed,
            experiment,
            beam_current: BeamCurrentProfile::constant(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.duration > 0.0 && self.duration.is_finite()) {
            return Err(Error::Config(format!(
                "run duration must be positive, got {} s",
                self.duration
            )));
        }
        self.experiment.validate()
    }
}

/// Ground truth of a simulated run.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Manifest {
    pub seed: u64,
    pub config_hash: u64,
    pub duration_s: f64,
    /// Mean relative beam current over the run (1 after normalisation).
    pub mean_current: f64,
    pub pairs_generated: u64,
    /// Pairs whose detector-1 photon arrived at detector 1.
    pub pairs_signal_arrived: u64,
    /// Pairs whose detector-2 photon arrived at detector 2.
    pub pairs_idler_arrived: u64,
    pub pairs_both_arrived: u64,
    /// Pairs with both members in the output streams.
    pub pairs_recorded: u64,
    /// True photons reaching each detector, keyed by `<category>_<detector>`.
    pub arrivals: BTreeMap<String, u64>,
    pub recorded: [u64; 2],
    pub dropped_by_response: [u64; 2],
    pub dropped_by_dead_time: [u64; 2],
}

impl Manifest {
    /// Recorded pairs per hour.
    pub fn recorded_pair_rate(&self) -> f64 {
        self.pairs_recorded as f64 / (self.duration_s / 3600.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    /// Time-ordered records of detector 1 and detector 2.
    pub streams: [Vec<EventRecord>; 2],
    pub manifest: Manifest,
}

impl RunOutput {
    pub fn stream(&self, detector: DetectorId) -> &[EventRecord] {
        &self.streams[detector.index()]
    }
}

#[derive(Debug, Clone, Copy)]
struct Tagged {
    record: EventRecord,
    pair: Option<u64>,
}

enum Job {
    Pairs {
        rate: f64,
    },
    Line {
        detector: DetectorId,
        category: SourceCategory,
        center: f64,
        fwhm: f64,
        rate: f64,
    },
}

#[derive(Default)]
struct JobResult {
    events: Vec<Tagged>,
    arrivals: Vec<(SourceCategory, DetectorId, u64)>,
    dropped: [u64; 2],
    pairs_generated: u64,
    signal_arrived: u64,
    idler_arrived: u64,
    both_arrived: u64,
}

/// Generates both detector streams for a run.
///
/// Job `k` (pairs first, then each background line of detector 1, then of
/// detector 2) draws from ChaCha stream `k` of the run seed, so the output is
/// bit-identical for a given configuration regardless of thread count.
pub fn simulate_run(config: &RunConfig) -> Result<RunOutput> {
    config.validate()?;
    let exp = &config.experiment;
    let segments = config.beam_current.normalized_segments(config.duration);
    let theta_b = bragg_angle(exp.beam.pump_energy, &exp.crystal)?;
    let scatter = polarization_suppression(theta_b, exp.beam.polarization_angle);

    let pair_rate = exp.source.true_pair_rate * exp.crystal.effective_rate_scale;
    let sampler = if exp.crystal.detuning > 0.0 && pair_rate > 0.0 {
        Some(PairSampler::new(exp)?)
    } else {
        None
    };

    let mut jobs = vec![Job::Pairs {
        rate: if sampler.is_some() { pair_rate } else { 0.0 },
    }];
    for detector in DetectorId::ALL {
        let sources = &exp.source.detectors[detector.index()];
        for (category, center, fwhm, rate) in
            background_components(sources, scatter, exp.beam.pump_energy)
        {
            jobs.push(Job::Line {
                detector,
                category,
                center,
                fwhm,
                rate,
            });
        }
    }

    let results: Vec<JobResult> = jobs
        .par_iter()
        .enumerate()
        .map(|(stream, job)| {
            let mut rng = component_rng(config.seed, stream as u64);
            let mut out = JobResult::default();
            match job {
                Job::Pairs { rate } => {
                    let Some(sampler) = &sampler else {
                        return out;
                    };
                    let times = arrival_times(&mut rng, *rate, &segments);
                    out.pairs_generated = times.len() as u64;
                    let mut arrived = [0u64; 2];
                    for (id, &time) in times.iter().enumerate() {
                        let draw = sampler.sample(&mut rng, time);
                        out.signal_arrived += u64::from(draw.signal.is_some());
                        out.idler_arrived += u64::from(draw.idler.is_some());
                        out.both_arrived +=
                            u64::from(draw.signal.is_some() && draw.idler.is_some());
                        for photon in [draw.signal, draw.idler].into_iter().flatten() {
                            let d = photon.detector.index();
                            arrived[d] += 1;
                            match apply_detector_response(&photon, &exp.response, &mut rng) {
                                Some(record) => out.events.push(Tagged {
                                    record,
                                    pair: Some(id as u64),
                                }),
                                None => out.dropped[d] += 1,
                            }
                        }
                    }
                    for detector in DetectorId::ALL {
                        out.arrivals.push((
                            SourceCategory::Pair,
                            detector,
                            arrived[detector.index()],
                        ));
                    }
                }
                Job::Line {
                    detector,
                    category,
                    center,
                    fwhm,
                    rate,
                } => {
                    let photons = sample_line(
                        &mut rng, *detector, *category, *center, *fwhm, *rate, &segments,
                    );
                    out.arrivals
                        .push((*category, *detector, photons.len() as u64));
                    for photon in &photons {
                        match apply_detector_response(photon, &exp.response, &mut rng) {
                            Some(record) => out.events.push(Tagged { record, pair: None }),
                            None => out.dropped[detector.index()] += 1,
                        }
                    }
                }
            }
            out
        })
        .collect();

    let mut manifest = Manifest {
        seed: config.seed,
        config_hash: crate::io::config_hash(config),
        duration_s: config.duration,
        mean_current: 1.0,
        ..Manifest::default()
    };
    let mut per_detector: [Vec<Tagged>; 2] = [Vec::new(), Vec::new()];
    for r in results {
        manifest.pairs_generated += r.pairs_generated;
        manifest.pairs_signal_arrived += r.signal_arrived;
        manifest.pairs_idler_arrived += r.idler_arrived;
        manifest.pairs_both_arrived += r.both_arrived;
        for (category, detector, n) in r.arrivals {
            *manifest
                .arrivals
                .entry(format!("{}_{}", category.name(), detector))
                .or_default() += n;
        }
        for d in 0..2 {
            manifest.dropped_by_response[d] += r.dropped[d];
        }
        for ev in r.events {
            per_detector[ev.record.detector.index()].push(ev);
        }
    }

    let mut pair_seen = vec![0u8; manifest.pairs_generated as usize];
    let mut streams: [Vec<EventRecord>; 2] = [Vec::new(), Vec::new()];
    for (d, events) in per_detector.iter_mut().enumerate() {
        events.sort_by_key(|e| e.record.timestamp);
        let keep = match exp.response.dead_time {
            Some(dead) if dead > 0.0 => {
                let ts: Vec<u64> = events.iter().map(|e| e.record.timestamp).collect();
                apply_dead_time(&ts, dead)
            }
            _ => vec![true; events.len()],
        };
        for (ev, kept) in events.iter().zip(keep) {
            if !kept {
                manifest.dropped_by_dead_time[d] += 1;
                continue;
            }
            if let Some(id) = ev.pair {
                pair_seen[id as usize] += 1;
            }
            streams[d].push(ev.record);
        }
        manifest.recorded[d] = streams[d].len() as u64;
    }
    manifest.pairs_recorded = pair_seen.iter().filter(|&&n| n == 2).count() as u64;

    Ok(RunOutput { streams, manifest })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quiet(duration: f64, seed: u64) -> RunConfig {
        let mut e = Experiment::reference();
        e.source = SourceModel::quiet(0.0);
        RunConfig::new(e, duration, seed)
    }

    #[test]
    fn silent_run_is_empty() {
        let out = simulate_run(&quiet(0.001, 1)).unwrap();
        assert!(out.streams[0].is_empty() && out.streams[1].is_empty());
        assert_eq!(out.manifest.pairs_generated, 0);
    }

    #[test]
    fn invalid_config_rejected_before_sampling() {
        let mut c = quiet(1.0, 1);
        c.duration = 0.0;
        assert!(matches!(simulate_run(&c), Err(Error::Config(_))));
        let mut c = quiet(1.0, 1);
        c.experiment.detectors[1].active_area = -1.0;
        assert!(simulate_run(&c).unwrap_err().is_config());
    }

    #[test]
    fn streams_sorted_and_in_range() {
        let mut c = RunConfig::new(Experiment::reference(), 2.0, 17);
        c.experiment.source.true_pair_rate = 500.0;
        let out = simulate_run(&c).unwrap();
        let (lo, hi) = c.experiment.response.energy_range;
        for s in &out.streams {
            assert!(!s.is_empty());
            assert!(s.windows(2).all(|w| w[0].timestamp <= w[1].timestamp));
            assert!(s.iter().all(|e| e.timestamp % 20 == 0));
            assert!(s.iter().all(|e| (lo..=hi).contains(&e.energy_ev())));
        }
        assert!(out.manifest.pairs_recorded > 0);
        assert!(out.manifest.pairs_recorded <= out.manifest.pairs_both_arrived);
    }

    #[test]
    fn deterministic_for_seed() {
        let mut c = RunConfig::new(Experiment::reference(), 1.0, 99);
        c.experiment.source.true_pair_rate = 200.0;
        let a = simulate_run(&c).unwrap();
        let b = simulate_run(&c).unwrap();
        assert_eq!(a, b);
        c.seed = 100;
        let d = simulate_run(&c).unwrap();
        assert_ne!(a.streams, d.streams);
    }

    #[test]
    fn negative_detuning_generates_no_pairs() {
        let mut c = RunConfig::new(Experiment::reference(), 1.0, 3);
        c.experiment.crystal.detuning = mdeg_to_rad(-50.0);
        c.experiment.source.true_pair_rate = 1_000.0;
        let out = simulate_run(&c).unwrap();
        assert_eq!(out.manifest.pairs_generated, 0);
        assert!(out.manifest.recorded[0] > 0);
    }

    #[test]
    fn dead_time_removes_events() {
        let mut c = RunConfig::new(Experiment::reference(), 1.0, 5);
        let live = simulate_run(&c).unwrap();
        c.experiment.response.dead_time = Some(2_000.0);
        let dead = simulate_run(&c).unwrap();
        assert!(dead.manifest.dropped_by_dead_time[0] > 0);
        assert_eq!(
            dead.manifest.recorded[0] + dead.manifest.dropped_by_dead_time[0],
            live.manifest.recorded[0]
        );
    }
}
