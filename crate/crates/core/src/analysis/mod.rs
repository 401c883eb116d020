//! Statistical pipeline over shot batches.

mod ckp_fit;
mod efficiency;
mod fidelity;
mod lsq;
mod mixture;
mod sweep;
mod threshold;

pub use ckp_fit::{fit_ckp, fit_ridge, ridge_points, CkpFit, RidgeFit};
pub use efficiency::{efficiency, efficiency_fit, linear_fit, moment_snr, noise_temperature, EfficiencyFit};
pub use fidelity::{
    analyze_single_shot, analyze_single_shot_with, assignment_fidelity, epsilon_snr, error_decomposition,
    fidelity_from_conditionals, fit_snr, qnd_fidelity, qnd_from_conditionals, wilson_interval, Assignment,
    Confusion, ErrorBudget, FidelityReport, Qnd,
};
pub use lsq::{fit_exponential_decay, fit_lorentzian, levenberg_marquardt, lorentzian, LsqFit};
pub use mixture::{
    fit_mixture, fit_mixture_iq, fit_mixture_with, MixtureFit, MixtureInit, MixtureOptions, SigmaMode, MIN_SHOTS,
};
pub use sweep::{blob_mean_trajectory, histogram_csv, time_to_threshold, BlobMeans, TimeToThreshold};
pub use threshold::{optimal_threshold, Threshold};
