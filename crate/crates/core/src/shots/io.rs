//! Columnar batch files: `prepared,label-int,I,Q` rows plus a JSON sidecar
//! holding the readout, noise and seed. Floats are written in shortest
//! round-trip form so a read returns the identical batch.

use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::{NoiseConfig, ReadoutConfig};
use super::synth::ShotBatch;
use crate::{Error, LevelLabel, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BatchSidecar {
    pub n_shots: usize,
    pub config: ReadoutConfig,
    pub noise: NoiseConfig,
    pub seed: u64,
}

#[derive(Debug, Serialize, Deserialize)]
struct Row {
    prepared: LevelLabel,
    #[serde(rename = "label-int")]
    label_int: u8,
    #[serde(rename = "I")]
    i: f64,
    #[serde(rename = "Q")]
    q: f64,
}

/// Path of the sidecar belonging to `csv_path` (`shots.csv` -> `shots.json`).
pub fn sidecar_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("json")
}

/// CSV and sidecar bytes for `batch`.
pub fn encode_batch(batch: &ShotBatch) -> Result<(Vec<u8>, Vec<u8>)> {
    batch.check()?;
    let mut w = csv::Writer::from_writer(Vec::new());
    for k in 0..batch.len() {
        w.serialize(Row {
            prepared: batch.prepared[k],
            label_int: batch.prepared[k].0,
            i: batch.i_vals[k],
            q: batch.q_vals[k],
        })?;
    }
    let csv_bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    let sidecar = BatchSidecar {
        n_shots: batch.len(),
        config: batch.config.clone(),
        noise: batch.noise,
        seed: batch.seed,
    };
    let mut json = serde_json::to_vec_pretty(&sidecar)?;
    json.push(b'\n');
    Ok((csv_bytes, json))
}

pub fn write_batch(batch: &ShotBatch, csv_path: &Path) -> Result<()> {
    let (csv_bytes, json) = encode_batch(batch)?;
    std::fs::write(csv_path, csv_bytes)?;
    std::fs::write(sidecar_path(csv_path), json)?;
    Ok(())
}

pub fn read_batch(csv_path: &Path) -> Result<ShotBatch> {
    let sidecar: BatchSidecar =
        serde_json::from_reader(BufReader::new(File::open(sidecar_path(csv_path))?))?;
    let mut r = csv::Reader::from_path(csv_path)?;
    let mut batch = ShotBatch {
        i_vals: Vec::with_capacity(sidecar.n_shots),
        q_vals: Vec::with_capacity(sidecar.n_shots),
        prepared: Vec::with_capacity(sidecar.n_shots),
        config: sidecar.config,
        noise: sidecar.noise,
        seed: sidecar.seed,
    };
    for row in r.deserialize() {
        let row: Row = row?;
        if row.label_int != row.prepared.0 {
            return Err(Error::Format(format!(
                "label {} does not match label-int {}",
                row.prepared, row.label_int
            )));
        }
        batch.prepared.push(row.prepared);
        batch.i_vals.push(row.i);
        batch.q_vals.push(row.q);
    }
    if batch.len() != sidecar.n_shots {
        return Err(Error::Format(format!(
            "sidecar declares {} shots, file has {}",
            sidecar.n_shots,
            batch.len()
        )));
    }
    Ok(batch)
}
