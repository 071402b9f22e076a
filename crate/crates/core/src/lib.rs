//! Desk-scale simulation and coincidence analysis of X-ray spontaneous
//! parametric down-conversion (SPDC).
//!
//! The crate is split along the data flow:
//!
//! - [`physics`] - Bragg geometry, emission angles, polarization suppression,
//!   detector acceptance and the detection-chain efficiency model.
//! - [`sim`] - Monte Carlo generation of two-detector list-mode event streams.
//! - [`analysis`] - candidate filtering, energy-sum constrained pairing, the
//!   (E1, t2 - t1) correlation map, time-profile fit, ROI rates, misalignment
//!   scan fit and conversion efficiency.
//! - [`io`] - the binary list-mode format, the experiment configuration file,
//!   run manifests and CSV output.
//! - [`workflow`] - simulate-then-analyse runs and detuning scans.
//!
//! Angles are radians and energies are eV everywhere inside the crate. Degree
//! and millidegree values are converted on ingest (see [`units`]).

// `!(x > 0.0)` is used deliberately so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod io;
pub mod physics;
pub mod sim;
pub mod units;
pub mod workflow;

pub use error::{Error, Result};
