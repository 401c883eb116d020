//! Static physics: the fluxonium spectrum and the readout cavity's
//! input-output response.

mod cavity;
mod fluxonium;

pub use cavity::{
    phase_separation, reflection, ring_up, steady_amplitude, steady_photon_number, CavityParams,
    PointerTrajectory,
};
pub use fluxonium::{diagonalize, spectrum_at, EnergySpectrum, FluxoniumParams};
