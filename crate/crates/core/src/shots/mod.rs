//! Synthesis of integrated single-shot heterodyne records and the forward SNR
//! model that links them to photon numbers and amplifier noise.

mod ckp;
mod config;
mod io;
mod snr;
mod synth;

pub use ckp::{ckp_map, stark_shifted_frequency, CkpGrid, CkpMap};
pub use config::{Demodulation, NoiseConfig, ReadoutConfig};
pub use io::{encode_batch, read_batch, sidecar_path, write_batch, BatchSidecar};
pub use snr::{analytic_f_factor, expected_snr};
pub use synth::{prepare, synthesize_batch, synthesize_records, ShotBatch, ShotSynthesizer};
