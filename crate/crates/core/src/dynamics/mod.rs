//! Stochastic qubit-level dynamics: thermal occupancy, photon-dependent rate
//! models, Markov jump trajectories, the back-action experiment and the
//! sideband reset.

mod backaction;
mod jump;
mod master;
mod rates;
mod reset;
mod schedule;
mod thermal;

pub use backaction::{backaction_experiment, level_signal, BackactionCurve};
pub use jump::{evolve, evolve_ensemble, occupations_at, LevelTrajectory};
pub use master::propagate_populations;
pub use rates::{MistTerm, RateModel, ThermalAnchor};
pub use reset::{reset_simulate, reset_trace, ResetConfig};
pub use schedule::{ConstantPhotons, DriveSegment, FnSchedule, PhotonSchedule, PulseTrain};
pub use thermal::{effective_temperature, sideband_frequency, thermal_population};
