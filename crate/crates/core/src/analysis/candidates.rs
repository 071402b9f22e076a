use super::CoincidenceCriteria;
use crate::error::{Error, Result};
use crate::sim::EventRecord;

/// Keeps the photons inside the single-photon energy window, preserving
/// order. Fails if the stream is not time-ordered.
pub fn select_candidates(
    stream: &[EventRecord],
    criteria: &CoincidenceCriteria,
) -> Result<Vec<EventRecord>> {
    if let Some(i) = stream
        .windows(2)
        .position(|w| w[1].timestamp < w[0].timestamp)
    {
        return Err(Error::UnorderedStream { index: i + 1 });
    }
    Ok(stream
        .iter()
        .filter(|e| criteria.in_single_window(e.energy_ev()))
        .copied()
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{component_rng, DetectorId};
    use rand::Rng;

    fn ev(t: u64, e: u32) -> EventRecord {
        EventRecord {
            detector: DetectorId::One,
            timestamp: t,
            energy: e,
        }
    }

    #[test]
    fn window_edges() {
        let c = CoincidenceCriteria::default();
        let out = select_candidates(
            &[ev(0, 4_900), ev(1, 5_000), ev(2, 17_000), ev(3, 17_001)],
            &c,
        )
        .unwrap();
        assert_eq!(out, vec![ev(1, 5_000), ev(2, 17_000)]);
    }

    #[test]
    fn unordered_input_rejected() {
        let c = CoincidenceCriteria::default();
        let err = select_candidates(&[ev(10, 6_000), ev(5, 6_000)], &c).unwrap_err();
        assert!(matches!(err, Error::UnorderedStream { index: 1 }));
    }

    #[test]
    fn matches_naive_scan() {
        let c = CoincidenceCriteria::default();
        let mut rng = component_rng(4, 4);
        let mut t = 0;
        let stream: Vec<_> = (0..10_000)
            .map(|_| {
                t += rng.random_range(0..500);
                ev(t, rng.random_range(1_000..30_000))
            })
            .collect();
        let mut naive = Vec::new();
        for e in &stream {
            if e.energy >= 5_000 && e.energy <= 17_000 {
                naive.push(*e);
            }
        }
        assert_eq!(select_candidates(&stream, &c).unwrap(), naive);
    }
}
