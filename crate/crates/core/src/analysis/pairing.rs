use super::CoincidenceCriteria;
use crate::sim::EventRecord;

/// A cross-detector pair; `dt = t2 - t1` in ns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CoincidencePair {
    pub first: EventRecord,
    pub second: EventRecord,
    pub dt: i64,
}

impl CoincidencePair {
    pub fn energy_sum(&self) -> f64 {
        self.first.energy_ev() + self.second.energy_ev()
    }
}

/// All pairs (one photon from each stream) within the pairing horizon whose
/// energies sum into the sum window.
///
/// Both streams must be time-ordered. A sliding window over `second` makes
/// this a single merge pass: O(n + m + k) for k candidates in the horizon.
/// An event may appear in several pairs unless `criteria.exclusive` is set.
pub fn find_coincidence_pairs(
    first: &[EventRecord],
    second: &[EventRecord],
    criteria: &CoincidenceCriteria,
) -> Vec<CoincidencePair> {
    let horizon = criteria.max_abs_dt;
    let mut pairs = Vec::new();
    let mut start = 0usize;
    for a in first {
        let t1 = a.timestamp as i64;
        while start < second.len() && (second[start].timestamp as i64) < t1 - horizon {
            start += 1;
        }
        for b in &second[start..] {
            let dt = b.timestamp as i64 - t1;
            if dt > horizon {
                break;
            }
            if criteria.in_sum_window(a.energy_ev() + b.energy_ev()) {
                pairs.push(CoincidencePair {
                    first: *a,
                    second: *b,
                    dt,
                });
            }
        }
    }
    if criteria.exclusive {
        exclusive_pairs(pairs)
    } else {
        pairs
    }
}

/// Greedy one-to-one matching: pairs are taken in order of increasing |dt|
/// (ties by time) and dropped if either event is already used.
pub fn exclusive_pairs(mut pairs: Vec<CoincidencePair>) -> Vec<CoincidencePair> {
    use std::collections::HashSet;
    pairs.sort_by_key(|p| {
        (
            p.dt.abs(),
            p.first.timestamp,
            p.second.timestamp,
            p.first.energy,
            p.second.energy,
        )
    });
    let mut used_first = HashSet::new();
    let mut used_second = HashSet::new();
    let mut out: Vec<_> = pairs
        .into_iter()
        .filter(|p| {
            let a = (p.first.timestamp, p.first.energy);
            let b = (p.second.timestamp, p.second.energy);
            if used_first.contains(&a) || used_second.contains(&b) {
                return false;
            }
            used_first.insert(a);
            used_second.insert(b);
            true
        })
        .collect();
    out.sort_by_key(|p| (p.first.timestamp, p.second.timestamp));
    out
}
