//! Monte Carlo generation of two-detector list-mode event streams.
//!
//! Every source component draws from its own ChaCha stream derived from the
//! master seed, so components can be generated in any order (or in parallel)
//! and the merged output depends only on `(config, seed)`.

mod background;
mod event;
mod profile;
mod response;
mod run;
mod source;
mod spdc;

pub use background::sample_background;
pub use event::{DetectorId, EventRecord, TrueEvent};
pub use profile::BeamCurrentProfile;
pub use response::{apply_dead_time, apply_detector_response, DetectorResponse};
pub use run::{simulate_run, Experiment, Manifest, RunConfig, RunOutput};
pub use source::{DetectorSources, SourceCategory, SourceModel, SpectralLine};
pub use spdc::{PairSampler, SpdcDraw};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Independent generator for component `stream` of a run seeded with `seed`.
pub fn component_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
