//! Consolidation of result directories into one summary.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use walkdir::WalkDir;

use crate::error::CliError;
use crate::experiments::RunSummary;
use crate::output::{verify_run, MANIFEST};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunEntry {
    pub experiment: String,
    pub directories: Vec<String>,
    /// More than one directory holds a run with this hash.
    pub duplicate: bool,
    pub metrics: BTreeMap<String, f64>,
    pub details: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub quantity: String,
    pub reference: String,
    pub simulated: f64,
    pub config_hash: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub manifests: usize,
    pub runs: BTreeMap<String, RunEntry>,
    pub comparisons: Vec<Comparison>,
}

pub fn build_summary(dir: &Path) -> Result<Summary, CliError> {
    let mut manifest_dirs: Vec<_> = WalkDir::new(dir)
        .sort_by_file_name()
        .into_iter()
        .filter_map(|e| e.ok())
        .filter(|e| e.file_type().is_file() && e.file_name() == MANIFEST)
        .filter_map(|e| e.path().parent().map(Path::to_path_buf))
        .collect();
    manifest_dirs.sort();
    if manifest_dirs.is_empty() {
        return Err(CliError::Integrity(format!("found 0 manifests under {}", dir.display())));
    }
    let mut runs: BTreeMap<String, RunEntry> = BTreeMap::new();
    for run_dir in &manifest_dirs {
        let manifest = verify_run(run_dir)?;
        let result_path = run_dir.join("result.json");
        let text = std::fs::read(&result_path).map_err(|e| CliError::io(&result_path, e))?;
        let result: RunSummary = serde_json::from_slice(&text)
            .map_err(|e| CliError::Integrity(format!("{}: {e}", result_path.display())))?;
        let rel = run_dir.strip_prefix(dir).unwrap_or(run_dir).display().to_string();
        runs.entry(manifest.config_hash.clone())
            .and_modify(|entry| {
                entry.directories.push(rel.clone());
                entry.duplicate = true;
            })
            .or_insert(RunEntry {
                experiment: result.experiment,
                directories: vec![rel],
                duplicate: false,
                metrics: result.metrics,
                details: result.details,
            });
    }
    let comparisons = compare(&runs);
    Ok(Summary {
        manifests: manifest_dirs.len(),
        runs,
        comparisons,
    })
}

fn compare(runs: &BTreeMap<String, RunEntry>) -> Vec<Comparison> {
    let mut out = Vec::new();
    for (hash, run) in runs {
        let amp = run.details.get("amplifier").and_then(|v| v.as_str()).unwrap_or("");
        let mut push = |quantity: &str, reference: &str, key: &str| {
            if let Some(&v) = run.metrics.get(key) {
                out.push(Comparison {
                    quantity: quantity.to_string(),
                    reference: reference.to_string(),
                    simulated: v,
                    config_hash: hash.clone(),
                });
            }
        };
        match (run.experiment.as_str(), amp) {
            ("single_shot", "jpa_off") => push("assignment fidelity, amplifier off", "0.962", "F"),
            ("single_shot", "jpa_on") => push("assignment fidelity, amplifier on", "0.978", "F"),
            ("qnd", _) => push("QND repeatability fidelity", "0.996", "F_Q"),
            ("efficiency", "jpa_off") => push("effective noise temperature (K), amplifier off", "12.9", "t_n_eff_k"),
            ("efficiency", "jpa_on") => {
                push("effective noise temperature (K), amplifier on", "0.6", "t_n_eff_k");
                push("measurement efficiency, amplifier on", "0.574", "eta");
            }
            ("ckp", _) => push("photon number at calibration drive", "27 +/- 1", "n_bar_peak"),
            ("reset", _) => {
                push("equilibrium excited population", "0.35", "p_e_initial");
                push("residual excited population after reset", "0.03", "p_e_residual");
            }
            _ => {}
        }
    }
    out
}

pub fn render_markdown(summary: &Summary) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# Run summary\n");
    let _ = writeln!(s, "{} manifest(s), {} distinct configuration(s).\n", summary.manifests, summary.runs.len());
    let _ = writeln!(s, "| config | experiment | directories | duplicate |");
    let _ = writeln!(s, "|---|---|---|---|");
    for (hash, run) in &summary.runs {
        let _ = writeln!(s, "| `{}` | {} | {} | {} |", &hash[..16.min(hash.len())], run.experiment, run.directories.join("<br>"), if run.duplicate { "yes" } else { "no" });
    }
    if !summary.comparisons.is_empty() {
        let _ = writeln!(s, "\n| quantity | reference | simulated |");
        let _ = writeln!(s, "|---|---|---|");
        for c in &summary.comparisons {
            let _ = writeln!(s, "| {} | {} | {:.4} |", c.quantity, c.reference, c.simulated);
        }
    }
    for (hash, run) in &summary.runs {
        let _ = writeln!(s, "\n## {} `{}`\n", run.experiment, &hash[..16.min(hash.len())]);
        for (k, v) in &run.metrics {
            let _ = writeln!(s, "- {k}: {v}");
        }
    }
    s
}

/// Verify, merge and write `summary.json` and `summary.md` into `dir`.
pub fn report(dir: &Path) -> Result<Summary, CliError> {
    let summary = build_summary(dir)?;
    let json_path = dir.join("summary.json");
    let mut bytes = serde_json::to_vec_pretty(&summary).expect("serializable");
    bytes.push(b'\n');
    std::fs::write(&json_path, bytes).map_err(|e| CliError::io(&json_path, e))?;
    let md_path = dir.join("summary.md");
    std::fs::write(&md_path, render_markdown(&summary)).map_err(|e| CliError::io(&md_path, e))?;
    Ok(summary)
}
