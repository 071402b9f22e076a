//! Survival probability of photons between the crystal and a recorded event
//! (air absorption, window and detector quantum efficiency).
//!
//! Only the combined pair survival at the degenerate split is known
//! experimentally, so the default model is a single constant. A tabulated
//! per-photon efficiency can be supplied instead, e.g. from the helium path,
//! the 20 µm kapton windows and the residual air path of a given setup.

use crate::error::{Error, Result};

/// Combined pair survival at the degenerate split (an ~82% loss).
pub const DEFAULT_PAIR_EFFICIENCY: f64 = 0.18;

#[derive(Debug, Clone, PartialEq)]
pub enum EfficiencyModel {
    Ideal,
    /// Energy-independent pair survival; each photon survives with the square
    /// root of this.
    Constant {
        pair: f64,
    },
    /// Per-photon survival at tabulated energies (eV), linearly interpolated
    /// and held constant beyond the ends.
    Table {
        points: Vec<(f64, f64)>,
    },
}

impl Default for EfficiencyModel {
    fn default() -> Self {
        EfficiencyModel::Constant {
            pair: DEFAULT_PAIR_EFFICIENCY,
        }
    }
}

impl EfficiencyModel {
    pub fn validate(&self) -> Result<()> {
        match self {
            EfficiencyModel::Ideal => Ok(()),
            EfficiencyModel::Constant { pair } => {
                if (0.0..=1.0).contains(pair) {
                    Ok(())
                } else {
                    Err(Error::Config(format!(
                        "pair efficiency {pair} outside [0, 1]"
                    )))
                }
            }
            EfficiencyModel::Table { points } => {
                if points.is_empty() {
                    return Err(Error::Config("efficiency table is empty".into()));
                }
                if points.iter().any(|&(_, e)| !(0.0..=1.0).contains(&e)) {
                    return Err(Error::Config(
                        "efficiency table value outside [0, 1]".into(),
                    ));
                }
                if points.windows(2).any(|w| w[1].0 <= w[0].0) {
                    return Err(Error::Config(
                        "efficiency table energies must be strictly increasing".into(),
                    ));
                }
                // Attenuation only falls with energy across the analysis band.
                let mut prev = f64::NEG_INFINITY;
                for e in (5_000..=17_000).step_by(100) {
                    let v = self.photon(e as f64);
                    if v < prev - 1e-12 {
                        return Err(Error::Config(format!(
                            "efficiency table decreases with energy near {e} eV"
                        )));
                    }
                    prev = v;
                }
                Ok(())
            }
        }
    }

    /// Survival probability of a single photon of the given energy (eV).
    pub fn photon(&self, energy: f64) -> f64 {
        match self {
            EfficiencyModel::Ideal => 1.0,
            EfficiencyModel::Constant { pair } => pair.sqrt(),
            EfficiencyModel::Table { points } => interpolate(points, energy),
        }
    }
}

fn interpolate(points: &[(f64, f64)], energy: f64) -> f64 {
    let first = points[0];
    let last = points[points.len() - 1];
    if energy <= first.0 {
        return first.1;
    }
    if energy >= last.0 {
        return last.1;
    }
    let i = points.partition_point(|&(e, _)| e <= energy);
    let (e0, v0) = points[i - 1];
    let (e1, v1) = points[i];
    v0 + (v1 - v0) * (energy - e0) / (e1 - e0)
}

/// Probability that both members of a pair survive to be recorded.
pub fn detection_chain_efficiency(
    signal_energy: f64,
    idler_energy: f64,
    model: &EfficiencyModel,
) -> f64 {
    match model {
        EfficiencyModel::Constant { pair } => *pair,
        _ => model.photon(signal_energy) * model.photon(idler_energy),
    }
}
