use crate::error::{Error, Result};

/// Piecewise-constant relative beam current over a run.
///
/// Segment `i` starts at `starts[i]` seconds and lasts until the next start
/// (or the end of the run). Values are normalised so the time-weighted mean
/// over the run is 1.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamCurrentProfile {
    segments: Vec<(f64, f64)>,
}

impl Default for BeamCurrentProfile {
    fn default() -> Self {
        BeamCurrentProfile::constant()
    }
}

impl BeamCurrentProfile {
    pub fn constant() -> Self {
        BeamCurrentProfile {
            segments: vec![(0.0, 1.0)],
        }
    }

    /// Builds a profile from `(start_s, relative_current)` knots. The first
    /// knot must start at 0.
    pub fn new(segments: Vec<(f64, f64)>) -> Result<Self> {
        if segments.is_empty() || segments[0].0 != 0.0 {
            return Err(Error::Config(
                "beam current profile must start at t = 0".into(),
            ));
        }
        if segments.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::Config(
                "beam current knots must be strictly increasing".into(),
            ));
        }
        if segments.iter().any(|&(_, c)| !(c > 0.0 && c.is_finite())) {
            return Err(Error::Config("beam current values must be positive".into()));
        }
        Ok(BeamCurrentProfile { segments })
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.segments
    }

    /// Segments clipped to `[0, duration)` as `(start, end, current)`,
    /// rescaled so the mean current over the run is exactly 1.
    pub fn normalized_segments(&self, duration: f64) -> Vec<(f64, f64, f64)> {
        let mut out = Vec::with_capacity(self.segments.len());
        for (i, &(start, current)) in self.segments.iter().enumerate() {
            if start >= duration {
                break;
            }
            let end = self
                .segments
                .get(i + 1)
                .map_or(duration, |&(next, _)| next.min(duration));
            out.push((start, end, current));
        }
        let integral: f64 = out.iter().map(|&(s, e, c)| (e - s) * c).sum();
        let mean = integral / duration;
        for seg in &mut out {
            seg.2 /= mean;
        }
        out
    }

    /// Mean relative current before normalisation.
    pub fn raw_mean(&self, duration: f64) -> f64 {
        let mut integral = 0.0;
        for (i, &(start, current)) in self.segments.iter().enumerate() {
            if start >= duration {
                break;
            }
            let end = self
                .segments
                .get(i + 1)
                .map_or(duration, |&(next, _)| next.min(duration));
            integral += (end - start) * current;
        }
        integral / duration
    }
}
