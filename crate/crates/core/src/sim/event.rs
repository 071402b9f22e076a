use std::fmt;

use super::SourceCategory;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DetectorId {
    One = 1,
    Two = 2,
}

impl DetectorId {
    pub const ALL: [DetectorId; 2] = [DetectorId::One, DetectorId::Two];

    pub fn index(self) -> usize {
        self as usize - 1
    }

    pub fn from_index(index: usize) -> Option<Self> {
        match index {
            0 => Some(DetectorId::One),
            1 => Some(DetectorId::Two),
            _ => None,
        }
    }

    pub fn other(self) -> Self {
        match self {
            DetectorId::One => DetectorId::Two,
            DetectorId::Two => DetectorId::One,
        }
    }
}

impl fmt::Display for DetectorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", *self as u8)
    }
}

/// One recorded photon.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EventRecord {
    pub detector: DetectorId,
    /// Nanoseconds since run start, a multiple of the clock tick.
    pub timestamp: u64,
    /// Recorded energy, eV.
    pub energy: u32,
}

impl EventRecord {
    pub fn energy_ev(&self) -> f64 {
        f64::from(self.energy)
    }
}

/// A photon arriving at a detector, before detector response.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrueEvent {
    pub detector: DetectorId,
    /// Arrival time, ns.
    pub time: f64,
    /// Photon energy, eV.
    pub energy: f64,
    pub category: SourceCategory,
}
