use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct CoincidenceCriteria {
    /// Closed energy window (eV) applied to every photon before pairing.
    pub single_window: (f64, f64),
    /// Required sum energy, eV (the pump energy).
    pub sum_center: f64,
    /// Closed half-width of the sum window, eV.
    pub sum_halfwidth: f64,
    /// Pairing horizon |t2 - t1|, ns.
    pub max_abs_dt: i64,
    /// Correlation map time bin, ns.
    pub dt_bin: i64,
    /// Correlation map energy bin, eV.
    pub e_bin: f64,
    /// Keep only one pair per event (nearest in time first) instead of all
    /// qualifying pairs.
    pub exclusive: bool,
}

impl Default for CoincidenceCriteria {
    fn default() -> Self {
        CoincidenceCriteria {
            single_window: (5_000.0, 17_000.0),
            sum_center: 22_000.0,
            sum_halfwidth: 500.0,
            max_abs_dt: 2_000,
            dt_bin: 20,
            e_bin: 100.0,
            exclusive: false,
        }
    }
}

impl CoincidenceCriteria {
    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.single_window;
        if !(lo < hi) {
            return Err(Error::Config(format!(
                "empty single-photon window ({lo}, {hi})"
            )));
        }
        if !(self.sum_halfwidth > 0.0) {
            return Err(Error::Config(
                "sum window half-width must be positive".into(),
            ));
        }
        if self.dt_bin <= 0 || !(self.e_bin > 0.0) {
            return Err(Error::Config("bin widths must be positive".into()));
        }
        if self.max_abs_dt % self.dt_bin != 0 {
            return Err(Error::Config(format!(
                "pairing horizon {} ns is not a whole number of {} ns time bins",
                self.max_abs_dt, self.dt_bin
            )));
        }
        if self.max_abs_dt < 5 * self.dt_bin {
            return Err(Error::Config(format!(
                "pairing horizon {} ns must be at least five time bins ({} ns)",
                self.max_abs_dt,
                5 * self.dt_bin
            )));
        }
        Ok(())
    }

    pub fn in_single_window(&self, energy: f64) -> bool {
        energy >= self.single_window.0 && energy <= self.single_window.1
    }

    pub fn in_sum_window(&self, sum: f64) -> bool {
        (sum - self.sum_center).abs() <= self.sum_halfwidth
    }
}
