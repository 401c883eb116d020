//! Result directories and their manifests.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

pub const MANIFEST: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub config_hash: String,
    pub seed: u64,
    pub artifact_version: String,
    pub experiment: String,
    pub files: Vec<ManifestEntry>,
    pub wall_clock_seconds: f64,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Write `files` into `dir` (created if needed) followed by the manifest.
pub fn write_run(
    dir: &Path,
    files: &[(String, Vec<u8>)],
    config_hash: &str,
    seed: u64,
    experiment: &str,
    wall_clock_seconds: f64,
) -> Result<RunManifest, CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut entries = Vec::with_capacity(files.len());
    for (name, bytes) in files {
        let path = dir.join(name);
        std::fs::write(&path, bytes).map_err(|e| CliError::io(&path, e))?;
        entries.push(ManifestEntry {
            path: name.clone(),
            sha256: sha256_hex(bytes),
            bytes: bytes.len() as u64,
        });
    }
    let manifest = RunManifest {
        config_hash: config_hash.to_string(),
        seed,
        artifact_version: env!("CARGO_PKG_VERSION").to_string(),
        experiment: experiment.to_string(),
        files: entries,
        wall_clock_seconds,
    };
    let path = dir.join(MANIFEST);
    let mut text = serde_json::to_vec_pretty(&manifest).expect("manifest serializes");
    text.push(b'\n');
    std::fs::write(&path, text).map_err(|e| CliError::io(&path, e))?;
    Ok(manifest)
}

/// `<output_dir>/<experiment>/<hash>`.
pub fn run_dir(output_dir: &Path, experiment: &str, short_hash: &str) -> PathBuf {
    output_dir.join(experiment).join(short_hash)
}

/// Recompute every checksum listed in the manifest at `dir`.
pub fn verify_run(dir: &Path) -> Result<RunManifest, CliError> {
    let path = dir.join(MANIFEST);
    let text = std::fs::read(&path).map_err(|e| CliError::io(&path, e))?;
    let manifest: RunManifest = serde_json::from_slice(&text)
        .map_err(|e| CliError::Integrity(format!("{}: unreadable manifest: {e}", path.display())))?;
    for entry in &manifest.files {
        let file = dir.join(&entry.path);
        let bytes = std::fs::read(&file)
            .map_err(|e| CliError::Integrity(format!("{}: listed in manifest but unreadable: {e}", file.display())))?;
        if sha256_hex(&bytes) != entry.sha256 {
            return Err(CliError::Integrity(format!("{}: checksum mismatch", file.display())));
        }
    }
    Ok(manifest)
}
