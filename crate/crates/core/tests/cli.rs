//! End-to-end runs of the `qdsynth` binary.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_qdsynth");

fn qdsynth(args: &[&str]) -> Output {
    Command::new(BIN).args(args).env("QDSYNTH_THREADS", "1").output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

/// `H = sigma_z (+ h_c sigma_y)`, `L = sigma_z + |0><1|`, initialized block = `|0>`.
fn upper_triangular(h_c: f64) -> String {
    format!(
        r#"{{"dim": 2,
  "hamiltonian": [[[1,0],[0,{m}]],[[0,{h}],[-1,0]]],
  "channels": [{{"gamma": 1, "L": [[[1,0],[1,0]],[[0,0],[-1,0]]]}}],
  "decomposition": {{"n": 1, "f": 1, "r": 1}}}}"#,
        m = -h_c,
        h = h_c
    )
}

const DECAY: &str = r#"{"dim": 2,
  "hamiltonian": [[[1,0],[0,0]],[[0,0],[-1,0]]],
  "channels": [{"gamma": 1, "L": [[[0,0],[0,0]],[[1,0],[0,0]]]}]}"#;

const FEEDBACK: &str = r#"{"dim": 2,
  "hamiltonian": [[[0.3,0],[0,0]],[[0,0],[-0.3,0]]],
  "design": {"M": [[[0,0],[0.5,0]],[[0.5,0],[0,0]]], "F": [[[0,0],[0,0.5]],[[0,-0.5],[0,0]]]},
  "decomposition": {"n": 1, "f": 1, "r": 1}}"#;

#[test]
fn analyze_compensated_upper_triangular_noise() {
    let dir = tempfile::tempdir().unwrap();
    let good = write(dir.path(), "good.json", &upper_triangular(0.5));
    let out = qdsynth(&["analyze", &good, "--properties", "invariant,attractive"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));

    let bad = write(dir.path(), "bad.json", &upper_triangular(0.0));
    let out = qdsynth(&["analyze", &bad, "--properties", "invariant", "--json"]);
    assert_eq!(out.status.code(), Some(1));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    let witnesses = report["reports"][0]["witnesses"].as_array().unwrap();
    let cross = witnesses.iter().find(|w| w["condition"] == "invariance_cross_term").unwrap();
    assert!((cross["residual"].as_f64().unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn malformed_input_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let broken = write(dir.path(), "broken.json", "{\"dim\": 2, \"hamiltonian\": [[[1,0]]");
    let out = qdsynth(&["analyze", &broken]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line"));
    let wrong = write(dir.path(), "wrong.json", &upper_triangular(0.5).replace("\"dim\": 2", "\"dim\": 3"));
    assert_eq!(qdsynth(&["analyze", &wrong]).status.code(), Some(2));
    assert_eq!(qdsynth(&["simulate", &wrong]).status.code(), Some(2));
}

#[test]
fn simulate_decay_csv() {
    let dir = tempfile::tempdir().unwrap();
    let model = write(dir.path(), "decay.json", DECAY);
    let csv = dir.path().join("decay.csv");
    let out = qdsynth(&["simulate", &model, "--rho0", "basis:0", "--t-final", "2", "--dt", "1e-3", "--output", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "time,b0,b1,b2,b3");
    let mut rows = 0;
    for line in lines {
        let v: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        // rho_00 = (b0 + b3) / sqrt 2 in the normalized Hermitian basis
        let p_e = (v[1] + v[4]) / std::f64::consts::SQRT_2;
        assert!((p_e - (-v[0]).exp()).abs() < 1e-6);
        rows += 1;
    }
    assert_eq!(rows, 2001);
    let summary: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(summary["trace_drift"].as_f64().unwrap() < 1e-12);
}

#[test]
fn stochastic_runs_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let model = write(dir.path(), "fb.json", FEEDBACK);
    let run = |sub: &str| {
        let out_dir = dir.path().join(sub);
        let out = qdsynth(&["simulate", &model, "--sme", "--seed", "7", "--trajectories", "3", "--t-final", "0.5", "--output", out_dir.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        out_dir
    };
    let (a, b) = (run("a"), run("b"));
    for name in ["trajectory_0.csv", "trajectory_2.csv", "mean.csv"] {
        let x = std::fs::read(a.join(name)).unwrap();
        assert_eq!(x, std::fs::read(b.join(name)).unwrap());
    }
    let header = std::fs::read_to_string(a.join("trajectory_1.csv")).unwrap();
    assert!(header.starts_with("time,b0,b1,b2,b3,dY\n"));
}

#[test]
fn ensemble_mean_file_tracks_master_equation() {
    let dir = tempfile::tempdir().unwrap();
    let model = write(dir.path(), "fb.json", FEEDBACK);
    let out_dir = dir.path().join("ens");
    let out = qdsynth(&[
        "simulate", &model, "--sme", "--scheme", "kraus", "--rho0", "basis:1", "--seed", "3", "--trajectories", "300", "--t-final", "2",
        "--record-every", "100", "--output", out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = dir.path().join("det.csv");
    let det = qdsynth(&["simulate", &model, "--rho0", "basis:1", "--t-final", "2", "--record-every", "100", "--output", csv.to_str().unwrap()]);
    assert_eq!(det.status.code(), Some(0));
    let parse = |p: &Path| -> Vec<Vec<f64>> {
        std::fs::read_to_string(p).unwrap().lines().skip(1).map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect()
    };
    let (mean, exact) = (parse(&out_dir.join("mean.csv")), parse(&csv));
    assert_eq!(mean.len(), exact.len());
    for (a, b) in mean.iter().zip(&exact) {
        for k in 1..5 {
            assert!((a[k] - b[k]).abs() < 0.1, "{a:?} vs {b:?}");
        }
    }
    let summary: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(summary["lyapunov"]["last"].as_f64().unwrap() < summary["lyapunov"]["initial"].as_f64().unwrap());
}

#[test]
fn synthesize_qubit_and_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("design.json");
    let out = qdsynth(&["synthesize", "qubit", "--measurement", "0.5*sx", "--hamiltonian", "0.4*sz", "--output", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["certified"], true);
    let f = &v["design"]["design"]["F"];
    assert_eq!(f[0][1][1].as_f64().unwrap(), 0.5);
    assert_eq!(f[1][0][1].as_f64().unwrap(), -0.5);

    // the written design is itself a valid model: invariant and attractive
    let check = qdsynth(&["analyze", path.to_str().unwrap(), "--properties", "invariant,attractive"]);
    assert_eq!(check.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    let doc = qdsynth::document::ModelDocument::parse(&text).unwrap();
    assert_eq!(doc.to_json(), text);
}

#[test]
fn synthesize_rejections_and_dfs() {
    let out = qdsynth(&["synthesize", "qubit", "--measurement", "sz"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not stabilizable"));
    assert_eq!(qdsynth(&["synthesize", "ladder", "--couplings", "1,0"]).status.code(), Some(2));

    let m = r#"[[[0.3,0.1],[1.2,-0.4],[0,0.2],[0.5,0]],[[-0.7,0],[0.1,0.9],[0.3,0.3],[0,-1]],[[0.2,0.2],[0,0],[-1.1,0],[0.4,0.6]],[[0,1],[0.8,0],[0.1,-0.2],[0.6,0.6]]]"#;
    let out = qdsynth(&["synthesize", "dfs", "--measurement", m]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["dfs_dimension"].as_u64().unwrap() >= 2);
}
