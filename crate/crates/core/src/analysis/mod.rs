//! Coincidence analysis of two-detector list-mode streams.

mod candidates;
mod conversion;
mod criteria;
mod histogram;
mod map;
mod pairing;
mod pipeline;
mod roi;
mod scan;
mod timefit;

pub use candidates::select_candidates;
pub use conversion::{conversion_efficiency, ConversionEstimate};
pub use criteria::CoincidenceCriteria;
pub use histogram::{Axis, Histogram2d};
pub use map::{build_correlation_map, CorrelationMap};
pub use pairing::{exclusive_pairs, find_coincidence_pairs, CoincidencePair};
pub use pipeline::{analyze_streams, Analysis, AnalysisSettings};
pub use roi::{roi_energy_centroid, roi_rate, RoiResult, RoiSpec};
pub use scan::{fit_misalignment_scan, ScanPoint, ScanResult};
pub use timefit::{fit_time_profile, fit_time_profile_in_band, fit_time_series, TimeProfileFit};
