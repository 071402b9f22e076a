//! Closed-form and numerically solved geometry of the down-conversion process.
//!
//! Everything here is a pure function of immutable inputs.

mod acceptance;
mod crystal;
mod efficiency;
mod emission;
mod polarization;

pub use acceptance::{arc_half_width, geometric_acceptance, ring_radius_mm, Acceptance};
pub use crystal::{
    bragg_angle, BeamConfig, CrystalConfig, DetectorGeometry, DIAMOND_LATTICE_CONSTANT,
};
pub use efficiency::{detection_chain_efficiency, EfficiencyModel, DEFAULT_PAIR_EFFICIENCY};
pub use emission::{
    emission_angle_approx, emission_angles_exact, split_for_angle, EmissionSolution,
    EXACT_RESIDUAL_TOLERANCE,
};
pub use polarization::polarization_suppression;
