use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn bundled(name: &str) -> Value {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name);
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn write_config(dir: &Path, name: &str, mut cfg: Value, n_shots: usize) -> PathBuf {
    cfg["n_shots"] = json!(n_shots);
    cfg["output_dir"] = json!(dir.join("out"));
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string_pretty(&cfg).unwrap()).unwrap();
    path
}

fn fluxshot(args: &[&str], threads: Option<usize>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_fluxshot"));
    cmd.args(args);
    if let Some(n) = threads {
        cmd.env("FLUXSHOT_THREADS", n.to_string());
    }
    cmd.output().unwrap()
}

fn stdout_path(out: &Output) -> PathBuf {
    PathBuf::from(String::from_utf8(out.stdout.clone()).unwrap().trim())
}

/// Every file of a result directory except the manifest, which records wall time.
fn contents(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap())
        .filter(|e| e.file_name() != "manifest.json")
        .map(|e| (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap()))
        .collect()
}

#[test]
fn negative_kappa_exits_2_without_output() {
    let tmp = TempDir::new().unwrap();
    let mut cfg = bundled("paper_table1.json");
    cfg["device"]["cavity"]["kappa_s"] = json!(-1.0);
    let path = write_config(tmp.path(), "bad.json", cfg, 1000);
    let out = fluxshot(&["run", path.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("kappa_s"));
    assert!(!tmp.path().join("out").exists());
}

#[test]
fn unknown_key_exits_2() {
    let tmp = TempDir::new().unwrap();
    let mut cfg = bundled("paper_table1.json");
    cfg["readout"]["integration_tme"] = json!(1e-6);
    let path = write_config(tmp.path(), "typo.json", cfg, 1000);
    assert_eq!(fluxshot(&["validate", path.to_str().unwrap()], None).status.code(), Some(2));
    assert_eq!(fluxshot(&["run", path.to_str().unwrap()], None).status.code(), Some(2));
}

#[test]
fn every_bundled_config_validates() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let out = fluxshot(&["validate", path.to_str().unwrap()], None);
        assert!(out.status.success(), "{}: {}", path.display(), String::from_utf8_lossy(&out.stderr));
        seen += 1;
    }
    assert!(seen >= 9);
}

#[test]
fn single_point_sweep_matches_run() {
    let tmp = TempDir::new().unwrap();
    let path = write_config(tmp.path(), "on.json", bundled("single_shot_jpa_on.json"), 2000);
    let p = path.to_str().unwrap();
    let run = fluxshot(&["run", p], None);
    assert!(run.status.success());
    let result: Value = serde_json::from_slice(&std::fs::read(stdout_path(&run).join("result.json")).unwrap()).unwrap();

    let sweep = fluxshot(&["sweep", p, "--axis", "drive_amp", "--grid", "1.0"], None);
    assert!(sweep.status.success(), "{}", String::from_utf8_lossy(&sweep.stderr));
    let csv = std::fs::read_to_string(stdout_path(&sweep).join("sweep.csv")).unwrap();
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    for key in ["F", "eps_snr", "eps_prep_mix", "snr", "threshold"] {
        let col = header.iter().position(|h| *h == key).unwrap();
        let from_sweep: f64 = row[col].parse().unwrap();
        let from_run = result["metrics"][key].as_f64().unwrap();
        assert_eq!(from_sweep.to_bits(), from_run.to_bits(), "{key}");
    }
}

#[test]
fn sweep_rejects_bad_grids() {
    let tmp = TempDir::new().unwrap();
    let path = write_config(tmp.path(), "on.json", bundled("single_shot_jpa_on.json"), 1000);
    let p = path.to_str().unwrap();
    for grid in ["", "1.0,0.5", "0.5,0.5", "abc"] {
        let out = fluxshot(&["sweep", p, "--axis", "tau_int", "--grid", grid], None);
        assert_eq!(out.status.code(), Some(2), "grid `{grid}`");
    }
    let out = fluxshot(&["sweep", p, "--axis", "flux", "--grid", "1"], None);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn report_on_empty_directory_is_an_integrity_error() {
    let tmp = TempDir::new().unwrap();
    let out = fluxshot(&["report", tmp.path().to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("0 manifests"));
}

#[test]
fn report_flags_duplicates_and_detects_tampering() {
    let tmp = TempDir::new().unwrap();
    let path = write_config(tmp.path(), "reset.json", bundled("reset.json"), 1000);
    let run = fluxshot(&["run", path.to_str().unwrap()], None);
    assert!(run.status.success());
    let first = stdout_path(&run);
    let copy = tmp.path().join("out/copy");
    std::fs::create_dir_all(&copy).unwrap();
    for entry in std::fs::read_dir(&first).unwrap() {
        let entry = entry.unwrap();
        std::fs::copy(entry.path(), copy.join(entry.file_name())).unwrap();
    }
    let root = tmp.path().join("out");
    let out = fluxshot(&["report", root.to_str().unwrap()], None);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary: Value = serde_json::from_slice(&std::fs::read(root.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["manifests"], json!(2));
    let runs = summary["runs"].as_object().unwrap();
    assert_eq!(runs.len(), 1);
    assert_eq!(runs.values().next().unwrap()["duplicate"], json!(true));
    assert!(root.join("summary.md").exists());

    std::fs::write(copy.join("reset_trace.csv"), "tampered\n").unwrap();
    let out = fluxshot(&["report", root.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("reset_trace.csv"));
}

#[test]
fn outputs_are_identical_across_worker_counts() {
    let tmp = TempDir::new().unwrap();
    let mut cfg = bundled("qnd.json");
    cfg["readout"]["prep_error"] = json!(0.05);
    let mut reference = None;
    for threads in [1, 4, 8] {
        let mut c = cfg.clone();
        c["output_dir"] = json!(tmp.path().join(format!("t{threads}")));
        let path = tmp.path().join(format!("t{threads}.json"));
        c["n_shots"] = json!(3000);
        std::fs::write(&path, serde_json::to_string(&c).unwrap()).unwrap();
        let out = fluxshot(&["run", path.to_str().unwrap()], Some(threads));
        assert!(out.status.success());
        let files = contents(&stdout_path(&out));
        match &reference {
            None => reference = Some(files),
            Some(r) => assert!(r == &files, "outputs differ at {threads} workers"),
        }
    }
}

#[test]
fn invalid_thread_count_is_rejected() {
    let tmp = TempDir::new().unwrap();
    let path = write_config(tmp.path(), "a.json", bundled("reset.json"), 1000);
    let out = Command::new(env!("CARGO_BIN_EXE_fluxshot"))
        .args(["validate", path.to_str().unwrap()])
        .env("FLUXSHOT_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
