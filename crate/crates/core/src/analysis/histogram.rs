use crate::error::{Error, Result};

/// Uniformly binned axis over `[lo, hi]`. Bins are half-open `[a, b)` except
/// the last, which also includes `hi`.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    lo: f64,
    hi: f64,
    bins: usize,
}

impl Axis {
    pub fn new(lo: f64, hi: f64, bins: usize) -> Result<Self> {
        if !(lo < hi) || bins == 0 || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidInput(format!(
                "invalid axis [{lo}, {hi}] with {bins} bins"
            )));
        }
        Ok(Axis { lo, hi, bins })
    }

    /// Axis with bins of `width`; the span must be a whole number of bins.
    pub fn with_width(lo: f64, hi: f64, width: f64) -> Result<Self> {
        let n = (hi - lo) / width;
        let bins = n.round();
        if !(width > 0.0) || (n - bins).abs() > 1e-9 * n.max(1.0) || bins < 1.0 {
            return Err(Error::InvalidInput(format!(
                "[{lo}, {hi}] is not a whole number of {width}-wide bins"
            )));
        }
        Axis::new(lo, hi, bins as usize)
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn width(&self) -> f64 {
        (self.hi - self.lo) / self.bins as f64
    }

    pub fn edge(&self, i: usize) -> f64 {
        if i == self.bins {
            self.hi
        } else {
            self.lo + i as f64 * self.width()
        }
    }

    pub fn edges(&self) -> Vec<f64> {
        (0..=self.bins).map(|i| self.edge(i)).collect()
    }

    pub fn center(&self, i: usize) -> f64 {
        0.5 * (self.edge(i) + self.edge(i + 1))
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.bins).map(|i| self.center(i)).collect()
    }

    pub fn index(&self, value: f64) -> Option<usize> {
        if !(value >= self.lo && value <= self.hi) {
            return None;
        }
        if value == self.hi {
            return Some(self.bins - 1);
        }
        let mut i = (((value - self.lo) / self.width()).floor() as usize).min(self.bins - 1);
        // Guard against rounding in the division at bin edges.
        if value < self.edge(i) {
            i -= 1;
        } else if i + 1 < self.bins && value >= self.edge(i + 1) {
            i += 1;
        }
        Some(i)
    }
}

/// Dense 2D count histogram, row-major in the first axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram2d {
    pub x: Axis,
    pub y: Axis,
    counts: Vec<u64>,
    /// Entries that fell outside either axis.
    pub overflow: u64,
}

impl Histogram2d {
    pub fn new(x: Axis, y: Axis) -> Self {
        let counts = vec![0; x.bins() * y.bins()];
        Histogram2d {
            x,
            y,
            counts,
            overflow: 0,
        }
    }

    pub fn fill(&mut self, x: f64, y: f64) -> bool {
        match (self.x.index(x), self.y.index(y)) {
            (Some(i), Some(j)) => {
                self.counts[i * self.y.bins() + j] += 1;
                true
            }
            _ => {
                self.overflow += 1;
                false
            }
        }
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.counts[i * self.y.bins() + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: u64) {
        let ny = self.y.bins();
        self.counts[i * ny + j] = value;
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Adds another histogram with identical axes.
    pub fn merge(&mut self, other: &Histogram2d) -> Result<()> {
        if self.x != other.x || self.y != other.y {
            return Err(Error::InvalidInput(
                "cannot merge histograms with different axes".into(),
            ));
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.overflow += other.overflow;
        Ok(())
    }

    /// Sum over x bins in `x_bins`, as a function of the y bin.
    pub fn project_y(&self, x_bins: impl Iterator<Item = usize>) -> Vec<u64> {
        let ny = self.y.bins();
        let mut out = vec![0; ny];
        for i in x_bins {
            for (j, o) in out.iter_mut().enumerate() {
                *o += self.counts[i * ny + j];
            }
        }
        out
    }

    /// Sum over y bins in `y_bins`, as a function of the x bin.
    pub fn project_x(&self, y_bins: impl Iterator<Item = usize> + Clone) -> Vec<u64> {
        (0..self.x.bins())
            .map(|i| y_bins.clone().map(|j| self.get(i, j)).sum())
            .collect()
    }
}
