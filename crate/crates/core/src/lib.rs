//! Single-shot dispersive readout of a fluxonium qubit: a physical model of the
//! qubit and its two-port readout cavity, a stochastic simulator for level
//! dynamics and integrated heterodyne records, and the statistical pipeline used
//! to turn those records into fidelities, error budgets and calibrations.
//!
//! Module map:
//!
//! - [`model`]: fluxonium spectrum and cavity input-output response.
//! - [`dynamics`]: thermal populations, rate models, Markov jump trajectories,
//!   back-action and reset.
//! - [`shots`]: readout/noise configuration, shot synthesis, SNR forward model,
//!   CKP maps and the columnar batch format.
//! - [`analysis`]: mixture fits, thresholds, fidelities, error decomposition,
//!   sweeps, efficiency and CKP fitting.

// Negated comparisons are how NaN inputs get rejected during validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod dynamics;
mod error;
mod level;
pub mod model;
pub mod rng;
pub mod shots;
pub mod units;

pub use error::{Error, Result};
pub use level::LevelLabel;
