use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};
use spike_cli::output::{sha256_hex, RunManifest};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_spike-engine"));
    c.env_remove("SPIKE_ENGINE_OUT");
    c
}

fn text(bytes: &[u8]) -> String {
    String::from_utf8_lossy(bytes).into_owned()
}

fn write_config(dir: &Path, name: &str, v: &Value) -> std::path::PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, serde_json::to_vec_pretty(v).unwrap()).unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

const NAMES: [&str; 6] =
    ["bdm_task", "column_l4", "drosophila_pi", "mouse_spontaneous", "neuron_probe", "unsupervised_digits"];

#[test]
fn list_prints_the_six_experiments_sorted() {
    let out = run(&["list"]);
    assert!(out.status.success());
    let names: Vec<String> =
        text(&out.stdout).lines().map(|l| l.split_whitespace().next().unwrap().to_string()).collect();
    assert_eq!(names, NAMES);
    for line in text(&out.stdout).lines() {
        assert!(line.split_whitespace().count() > 1, "missing description: {line}");
    }
}

#[test]
fn unknown_experiment_lists_valid_names() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["run", "flappy", "--seed", "1", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = text(&out.stderr);
    for name in NAMES {
        assert!(err.contains(name), "{err}");
    }
    assert!(std::fs::read_dir(dir.path()).unwrap().next().is_none());
}

#[test]
fn zero_steps_fails_before_simulating() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("out");
    let out = run(&["run", "mouse_spontaneous", "--seed", "1", "--steps", "0", "--out", target.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(text(&out.stderr).contains("steps"));
    assert!(!target.exists());
}

#[test]
fn seed_is_required() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["run", "neuron_probe", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(text(&out.stderr).contains("seed: required"));
}

#[test]
fn validate_accepts_a_valid_file() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_config(dir.path(), "ok.json", &json!({"experiment": "column_l4", "seed": 4, "steps": 50}));
    let out = run(&["validate", p.to_str().unwrap()]);
    assert!(out.status.success(), "{}", text(&out.stderr));
    assert!(text(&out.stdout).starts_with("ok"));
}

#[test]
fn validate_names_the_scale_bound() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = json!({"experiment": "mouse_spontaneous", "seed": 1, "params": {"circuit": {"scale": 0}}});
    let p = write_config(dir.path(), "scale.json", &cfg);
    let out = run(&["validate", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(text(&out.stderr).contains("scale ∈ (0,1]"), "{}", text(&out.stderr));
}

#[test]
fn validate_names_unknown_keys() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = json!({"experiment": "drosophila_pi", "seed": 1, "sead": 2, "params": {"circuit": {"kc_sise": 10}}});
    let p = write_config(dir.path(), "typo.json", &cfg);
    let out = run(&["validate", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = text(&out.stderr);
    assert!(err.contains("sead"), "{err}");
    assert!(err.contains("kc_sise"), "{err}");
}

#[test]
fn validate_reports_an_unreadable_file() {
    let out = run(&["validate", "/nonexistent/config.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(text(&out.stderr).contains("/nonexistent/config.json"));
}

#[test]
fn zero_workers_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["run", "neuron_probe", "--seed", "1", "--workers", "0", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn manifest_checksums_match_the_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["run", "column_l4", "--seed", "2", "--steps", "120", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", text(&out.stderr));
    let manifest: RunManifest =
        serde_json::from_slice(&std::fs::read(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest.experiment, "column_l4");
    assert_eq!(manifest.seed, 2);
    let names: Vec<&str> = manifest.files.iter().map(|f| f.path.as_str()).collect();
    assert_eq!(names, ["config.json", "metrics.json", "raster.csv", "curve.csv"]);
    for f in &manifest.files {
        let bytes = std::fs::read(dir.path().join(&f.path)).unwrap();
        assert_eq!(sha256_hex(&bytes), f.sha256, "{}", f.path);
        assert_eq!(bytes.len() as u64, f.bytes);
    }
    assert_eq!(manifest.config_sha256, manifest.files[0].sha256);
    let raster = text(&std::fs::read(dir.path().join("raster.csv")).unwrap());
    assert!(raster.starts_with("step,population,neuron\n"));
    assert!(!raster.contains('\r'));
}

#[test]
fn written_config_validates_and_reproduces_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first");
    let out = run(&["run", "neuron_probe", "--seed", "5", "--steps", "200", "--out", first.to_str().unwrap()]);
    assert!(out.status.success());
    let config = first.join("config.json");
    assert!(run(&["validate", config.to_str().unwrap()]).status.success());
    let second = dir.path().join("second");
    let out = run(&["run", "neuron_probe", "--config", config.to_str().unwrap(), "--out", second.to_str().unwrap()]);
    assert!(out.status.success(), "{}", text(&out.stderr));
    for f in ["metrics.json", "curve.csv", "raster.csv", "config.json"] {
        assert_eq!(std::fs::read(first.join(f)).unwrap(), std::fs::read(second.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn drosophila_twice_gives_identical_metrics() {
    let dir = tempfile::tempdir().unwrap();
    let mut metrics = Vec::new();
    for tag in ["a", "b"] {
        let target = dir.path().join(tag);
        let out = run(&["run", "drosophila_pi", "--seed", "7", "--out", target.to_str().unwrap()]);
        assert!(out.status.success());
        metrics.push(std::fs::read(target.join("metrics.json")).unwrap());
    }
    assert_eq!(metrics[0], metrics[1]);
}

#[test]
fn gnuplot_flag_splits_curves_into_two_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "run",
        "mouse_spontaneous",
        "--seed",
        "1",
        "--steps",
        "50",
        "--emit-gnuplot-friendly",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", text(&out.stderr));
    assert!(!dir.path().join("curve.csv").exists());
    for kind in ["e", "i_bc", "i_mc", "tc", "ti", "trn"] {
        let body = text(&std::fs::read(dir.path().join(format!("curve_{kind}.csv"))).unwrap());
        let mut lines = body.lines();
        assert_eq!(lines.next(), Some(format!("step,{kind}").as_str()));
        assert!(lines.all(|l| l.split(',').count() == 2));
    }
}

#[test]
fn env_var_sets_the_default_output_root() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["run", "neuron_probe", "--seed", "1", "--steps", "20"])
        .env("SPIKE_ENGINE_OUT", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(dir.path().join("neuron_probe").join("manifest.json").exists());
}

#[test]
fn unwritable_output_dir_fails_with_status_one() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, b"x").unwrap();
    let target = blocker.join("sub");
    let out = run(&["run", "neuron_probe", "--seed", "1", "--steps", "20", "--out", target.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(text(&out.stderr).contains("cannot write"));
}

#[test]
fn steps_are_refused_for_episode_experiments() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["run", "bdm_task", "--seed", "1", "--steps", "10", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(text(&out.stderr).contains("use episodes"));
}
