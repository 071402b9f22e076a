//! File formats and configuration.

mod atomic;
pub mod config;
pub mod csv;
mod hash;
pub mod listmode;
pub mod manifest;
mod units;

pub use atomic::write_atomic;
pub use config::{canonical_text, config_hash, ConfigFile, XpdcConfig};
pub use hash::fnv1a64;
pub use listmode::{ListModeFile, ListModeHeader};
pub use units::{parse_quantity, Dimension};
