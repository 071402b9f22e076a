use super::{Axis, CoincidenceCriteria, CoincidencePair, Histogram2d};
use crate::error::{Error, Result};

/// Pair counts over (energy on detector 1, t2 - t1).
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMap {
    /// x: E1 in eV, y: t2 - t1 in ns.
    pub hist: Histogram2d,
    /// Live time of the run, s.
    pub duration_s: f64,
    /// Mean relative beam current over the run.
    pub mean_current: f64,
}

impl CorrelationMap {
    pub fn empty(
        criteria: &CoincidenceCriteria,
        duration_s: f64,
        mean_current: f64,
    ) -> Result<Self> {
        criteria.validate()?;
        if !(duration_s > 0.0) || !(mean_current > 0.0) {
            return Err(Error::InvalidInput(
                "duration and mean current must be positive".into(),
            ));
        }
        let (lo, hi) = criteria.single_window;
        let energy = Axis::with_width(lo, hi, criteria.e_bin)?;
        // Time differences are whole clock ticks, so bins are centred on
        // multiples of the bin width rather than having edges there.
        let (h, w) = (criteria.max_abs_dt as f64, criteria.dt_bin as f64);
        let dt = Axis::with_width(-h - 0.5 * w, h + 0.5 * w, w)?;
        Ok(CorrelationMap {
            hist: Histogram2d::new(energy, dt),
            duration_s,
            mean_current,
        })
    }

    pub fn energy_axis(&self) -> &Axis {
        &self.hist.x
    }

    pub fn dt_axis(&self) -> &Axis {
        &self.hist.y
    }

    pub fn fill(&mut self, pair: &CoincidencePair) -> bool {
        self.hist.fill(pair.first.energy_ev(), pair.dt as f64)
    }

    pub fn total(&self) -> u64 {
        self.hist.total()
    }

    /// Energy bins whose centre lies in the closed band `[lo, hi]` eV.
    pub fn energy_bins_in(&self, lo: f64, hi: f64) -> Vec<usize> {
        let axis = self.energy_axis();
        (0..axis.bins())
            .filter(|&i| {
                let c = axis.center(i);
                c >= lo && c <= hi
            })
            .collect()
    }

    /// Time bins whose centre satisfies `pred`.
    pub fn dt_bins_where(&self, pred: impl Fn(f64) -> bool) -> Vec<usize> {
        let axis = self.dt_axis();
        (0..axis.bins()).filter(|&j| pred(axis.center(j))).collect()
    }

    /// Counts per time bin, summed over energy bins in `band` (all if `None`).
    pub fn dt_marginal(&self, band: Option<(f64, f64)>) -> Vec<u64> {
        match band {
            Some((lo, hi)) => self.hist.project_y(self.energy_bins_in(lo, hi).into_iter()),
            None => self.hist.project_y(0..self.energy_axis().bins()),
        }
    }

    /// Counts per energy bin, summed over the given time bins.
    pub fn energy_marginal(&self, dt_bins: &[usize]) -> Vec<u64> {
        self.hist.project_x(dt_bins.iter().copied())
    }

    /// Adds a map built from another shard of the same pair list.
    pub fn merge(&mut self, other: &CorrelationMap) -> Result<()> {
        if self.duration_s != other.duration_s || self.mean_current != other.mean_current {
            return Err(Error::InvalidInput("maps from different runs".into()));
        }
        self.hist.merge(&other.hist)
    }
}

/// Histograms `pairs` by (E1, t2 - t1).
pub fn build_correlation_map(
    pairs: &[CoincidencePair],
    criteria: &CoincidenceCriteria,
    duration_s: f64,
    mean_current: f64,
) -> Result<CorrelationMap> {
    let mut map = CorrelationMap::empty(criteria, duration_s, mean_current)?;
    for p in pairs {
        map.fill(p);
    }
    Ok(map)
}
