//! End-to-end tests of the binary: file formats, reproducibility, exit codes.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn qtraj() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qtraj"))
}

struct TempDir(PathBuf);

impl TempDir {
    fn new(tag: &str) -> Self {
        let path = std::env::temp_dir().join(format!(
            "qtraj-test-{tag}-{}-{:?}",
            std::process::id(),
            std::thread::current().id()
        ));
        std::fs::create_dir_all(&path).unwrap();
        Self(path)
    }

    fn path(&self, rel: &str) -> PathBuf {
        self.0.join(rel)
    }
}

impl Drop for TempDir {
    fn drop(&mut self) {
        std::fs::remove_dir_all(&self.0).ok();
    }
}

fn run_ok(cmd: &mut Command) -> Output {
    let out = cmd.output().unwrap();
    assert!(
        out.status.success(),
        "command failed: {:?}\nstderr: {}",
        cmd,
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn data_lines(path: &Path) -> Vec<String> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(str::to_owned)
        .collect()
}

fn write_config(dir: &TempDir, name: &str, contents: &str) -> PathBuf {
    let path = dir.path(name);
    std::fs::write(&path, contents).unwrap();
    path
}

const SUBSTEP_FREE: &str = r#"{
  "measurement": { "tau": "600ns", "eta_m": 0.4, "dt": "200ns", "t2star": "20us" },
  "n_steps": 25,
  "substeps_per_dt": 1,
  "initial_state": [1.0, 0.0, 0.0]
}"#;

#[test]
fn generate_then_reconstruct_is_bitwise_at_one_substep() {
    let dir = TempDir::new("roundtrip");
    let config = write_config(&dir, "run.json", SUBSTEP_FREE);

    run_ok(qtraj()
        .args(["generate", "--n", "4", "--seed", "11"])
        .arg("--config")
        .arg(&config)
        .arg("--out-dir")
        .arg(dir.path("gen")));
    run_ok(qtraj()
        .arg("reconstruct")
        .arg("--config")
        .arg(&config)
        .arg("--records")
        .arg(dir.path("gen/records.csv"))
        .arg("--out-dir")
        .arg(dir.path("rec")));

    let truth = data_lines(&dir.path("gen/truth.csv"));
    let rebuilt = data_lines(&dir.path("rec/trajectories.csv"));
    assert_eq!(truth, rebuilt, "reconstruction drifted from the generator truth");
}

#[test]
fn identical_invocations_produce_identical_bytes() {
    let dir = TempDir::new("determinism");
    for tag in ["a", "b"] {
        run_ok(qtraj()
            .args(["generate", "--preset", "diffusive", "--n", "3", "--seed", "5"])
            .arg("--out-dir")
            .arg(dir.path(tag)));
    }
    for name in ["records.csv", "truth.csv", "meta.json"] {
        let a = std::fs::read(dir.path(&format!("a/{name}"))).unwrap();
        let b = std::fs::read(dir.path(&format!("b/{name}"))).unwrap();
        assert_eq!(a, b, "{name} differs between identical runs");
    }
}

#[test]
fn outputs_embed_hash_and_seed() {
    let dir = TempDir::new("meta");
    run_ok(qtraj()
        .args(["generate", "--preset", "conditional", "--n", "1", "--seed", "42"])
        .arg("--out-dir")
        .arg(dir.path("out")));
    let head = std::fs::read_to_string(dir.path("out/records.csv")).unwrap();
    let first = head.lines().next().unwrap();
    assert!(first.starts_with("# qtraj generate config_hash="), "header: {first}");
    assert!(first.ends_with("seed=42"), "header: {first}");

    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path("out/meta.json")).unwrap())
            .unwrap();
    assert_eq!(meta["seed"], 42);
    assert_eq!(meta["command"], "generate");
    let hash = meta["config_hash"].as_str().unwrap();
    assert_eq!(hash.len(), 16);
    assert!(first.contains(hash), "hash mismatch between csv and meta");
    assert!(meta["config"]["settings"]["config"]["tau"].is_number());
}

#[test]
fn ensemble_outputs_are_consistent() {
    let dir = TempDir::new("ensemble");
    run_ok(qtraj()
        .args(["ensemble", "--preset", "driven", "--n", "400", "--seed", "2"])
        .args(["--bins", "21", "--window", "0.1,0.55,0.4"])
        .arg("--out-dir")
        .arg(dir.path("out")));

    // means: one row per step, mean_x starts at 1
    let means = data_lines(&dir.path("out/means.csv"));
    assert_eq!(means.len(), 1 + 101); // header + 101 grid points
    let first: Vec<&str> = means[1].split(',').collect();
    assert_eq!(first[2], "1");

    // histograms: per-column normalization peaks at exactly 1
    for name in ["hist_x.csv", "hist_z.csv", "hist_x_selected.csv", "hist_z_selected.csv"] {
        let rows = data_lines(&dir.path(&format!("out/{name}")));
        assert_eq!(rows.len(), 1 + 101 * 21, "{name} row count");
        let mut max_by_step = vec![0.0f64; 101];
        for row in &rows[1..] {
            let cols: Vec<f64> = row.split(',').map(|v| v.parse().unwrap()).collect();
            let (step, weight) = (cols[0] as usize, cols[4]);
            max_by_step[step] = max_by_step[step].max(weight);
        }
        for (k, &m) in max_by_step.iter().enumerate() {
            assert_eq!(m, 1.0, "{name} column {k} not normalized");
        }
    }
}

#[test]
fn tomo_reports_estimate_and_prediction() {
    let dir = TempDir::new("tomo");
    run_ok(qtraj()
        .args(["tomo", "--preset", "conditional", "--n", "3000", "--seed", "3"])
        .args(["--mode", "scalar", "--r-center", "1.0", "--eps", "0.2"])
        .arg("--out-dir")
        .arg(dir.path("out")));
    let tomo: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path("out/tomography.json")).unwrap())
            .unwrap();
    assert_eq!(tomo["mode"], "scalar");
    let estimate = &tomo["estimate"];
    assert!(estimate["selected"].as_u64().unwrap() > 0);
    for axis in estimate["axes"].as_array().unwrap() {
        assert!(axis["mean"].as_f64().unwrap().abs() <= 1.0);
        assert!(axis["n"].as_u64().unwrap() >= 2);
    }
    let prediction = &tomo["prediction"];
    assert!(prediction["z"].as_f64().unwrap() > 0.0);
}

#[test]
fn smooth_emits_probability_tables() {
    let dir = TempDir::new("smooth");
    run_ok(qtraj()
        .args(["smooth", "--preset", "undriven", "--seed", "4", "--hidden-at", "0.5"])
        .arg("--out-dir")
        .arg(dir.path("out")));
    let rows = data_lines(&dir.path("out/smoothed.csv"));
    assert_eq!(rows.len(), 1 + 101);
    for row in &rows[1..] {
        let cols: Vec<f64> = row.split(',').map(|v| v.parse().unwrap()).collect();
        for p in &cols[5..7] {
            assert!((0.0..=1.0).contains(p), "probability out of range: {row}");
        }
    }
    let hidden: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path("out/hidden.json")).unwrap())
            .unwrap();
    assert_eq!(hidden["hidden_step"], 50);
    let plus = hidden["past"]["plus"].as_f64().unwrap();
    let minus = hidden["past"]["minus"].as_f64().unwrap();
    assert!((plus + minus - 1.0).abs() < 1e-12);
}

#[test]
fn cascade_emits_state_and_concurrence() {
    let dir = TempDir::new("cascade");
    run_ok(qtraj()
        .args(["cascade", "--preset", "cascade", "--n", "2", "--seed", "9"])
        .arg("--out-dir")
        .arg(dir.path("out")));
    let rows = data_lines(&dir.path("out/cascade.csv"));
    assert_eq!(rows.len(), 1 + 2 * 17); // header + 2 trajectories x (16 steps + initial)
    for row in &rows[1..] {
        let cols: Vec<f64> = row.split(',').map(|v| v.parse().unwrap()).collect();
        let trace: f64 = cols[3..7].iter().sum();
        assert!((trace - 1.0).abs() < 1e-9, "populations drifted: {row}");
        let c = cols[13];
        assert!((0.0..=1.0).contains(&c));
    }
}

#[test]
fn exit_codes_distinguish_failure_classes() {
    let dir = TempDir::new("exitcodes");

    // config error: bare number for a dimensionful field
    let bad = write_config(
        &dir,
        "bad.json",
        r#"{ "measurement": { "tau": 600, "eta_m": 0.4, "dt": "400ns" } }"#,
    );
    let out = qtraj()
        .arg("generate")
        .arg("--config")
        .arg(&bad)
        .arg("--out-dir")
        .arg(dir.path("x"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err: serde_json::Value =
        serde_json::from_slice(&out.stderr).expect("stderr should be machine readable");
    assert_eq!(err["error"]["kind"], "config");

    // config error: the jump preset cannot be reconstructed at dt resolution
    let out = qtraj()
        .args(["ensemble", "--preset", "jump", "--n", "5", "--seed", "1"])
        .arg("--out-dir")
        .arg(dir.path("x"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    // io error: records file does not exist
    let cfg = write_config(&dir, "ok.json", SUBSTEP_FREE);
    let out = qtraj()
        .arg("reconstruct")
        .arg("--config")
        .arg(&cfg)
        .arg("--records")
        .arg(dir.path("missing.csv"))
        .arg("--out-dir")
        .arg(dir.path("x"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "io");

    // statistics error: an empty post-selection window
    let out = qtraj()
        .args(["ensemble", "--preset", "undriven", "--n", "50", "--seed", "1"])
        .args(["--window", "0.99,0.99,1e-9"])
        .arg("--out-dir")
        .arg(dir.path("x"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "statistics");
}

#[test]
fn worker_count_does_not_change_the_bytes() {
    let dir = TempDir::new("threads");
    for (tag, threads) in [("one", "1"), ("four", "4")] {
        run_ok(qtraj()
            .args(["ensemble", "--preset", "undriven", "--n", "300", "--seed", "6"])
            .args(["--threads", threads])
            .arg("--out-dir")
            .arg(dir.path(tag)));
    }
    for name in ["means.csv", "hist_x.csv", "hist_z.csv", "meta.json"] {
        let a = std::fs::read(dir.path(&format!("one/{name}"))).unwrap();
        let b = std::fs::read(dir.path(&format!("four/{name}"))).unwrap();
        assert_eq!(a, b, "{name} depends on the worker count");
    }
}

#[test]
fn axis_override_switches_the_record_law() {
    let dir = TempDir::new("axis");
    run_ok(qtraj()
        .args(["generate", "--preset", "undriven", "--n", "1", "--seed", "8"])
        .args(["--axis", "phi", "--steps", "200"])
        .arg("--out-dir")
        .arg(dir.path("out")));
    // a phi record is zero-centered; z stays put in the truth
    let rows = data_lines(&dir.path("out/records.csv"));
    let mean: f64 = rows[1..]
        .iter()
        .map(|r| r.split(',').next_back().unwrap().parse::<f64>().unwrap())
        .sum::<f64>()
        / 200.0;
    assert!(mean.abs() < 3.0, "phi record badly off-center: {mean}");
    let truth = data_lines(&dir.path("out/truth.csv"));
    for row in &truth[1..] {
        let z: f64 = row.split(',').next_back().unwrap().parse().unwrap();
        assert_eq!(z, 0.0, "phi measurement must preserve z from the equator");
    }
}
