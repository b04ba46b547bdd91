use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn photomech(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_photomech"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn data_rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(String::from).collect())
        .collect()
}

const GOOD_CAVITY: [&str; 6] = [
    "--set",
    "laser_power=0.015",
    "--set",
    "decay_input_norm=0.1",
    "--set",
    "detuning_norm=1",
];

#[test]
fn figure_output_is_byte_stable_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let mut texts = Vec::new();
    for threads in ["1", "4"] {
        let path = dir.path().join(format!("fig4_{threads}.csv"));
        let out = Command::new(env!("CARGO_BIN_EXE_photomech"))
            .env("PHOTOMECH_THREADS", threads)
            .args(["figure", "fig4", "--out", path.to_str().unwrap()])
            .output()
            .unwrap();
        assert!(out.status.success());
        texts.push(std::fs::read_to_string(&path).unwrap());
        let meta: Value =
            serde_json::from_str(&std::fs::read_to_string(format!("{}.meta.json", path.display())).unwrap()).unwrap();
        assert_eq!(meta["program"], "photomech");
    }
    assert_eq!(texts[0], texts[1]);
    let first = texts[0].lines().next().unwrap();
    assert_eq!(first, "# schema: laser_power,decay_mirror_ratio,n_eff,n_eff_weak,stable");
    assert!(texts[0].contains("# G = gamma_c at laser_power"));
    assert_eq!(data_rows(&texts[0]).len(), 120);
}

#[test]
fn single_point_sweep_matches_cool() {
    let mut args = vec!["cool"];
    args.extend(GOOD_CAVITY);
    let report: Value = serde_json::from_str(&stdout(&photomech(&args))).unwrap();
    let mut args = vec!["sweep", "--x", "laser_power=0.015", "--observable", "n_eff,n_eff_weak"];
    args.extend(GOOD_CAVITY);
    let rows = data_rows(&stdout(&photomech(&args)));
    assert_eq!(rows.len(), 1);
    let n: f64 = rows[0][1].parse().unwrap();
    let weak: f64 = rows[0][2].parse().unwrap();
    assert_eq!(n, report["n_eff"].as_f64().unwrap());
    assert_eq!(weak, report["n_eff_weak"].as_f64().unwrap());
    assert_eq!(rows[0][3], "1");
}

#[test]
fn unstable_points_stay_in_the_table() {
    let csv = stdout(&photomech(&["figure", "fig5b"]));
    let rows = data_rows(&csv);
    assert_eq!(rows.len(), 360);
    let unstable: Vec<&Vec<String>> = rows.iter().filter(|r| r[4] == "0").collect();
    assert!(!unstable.is_empty());
    for r in &unstable {
        assert_eq!(r[1], "0", "only the bare radiation-pressure system loses stability here");
        assert_eq!(r[2], "");
    }
}

#[test]
fn exit_codes() {
    assert_eq!(photomech(&["sweep", "--x", "power=1:2:3"]).status.code(), Some(2));
    assert_eq!(photomech(&["figure", "fig9"]).status.code(), Some(2));
    assert_eq!(photomech(&["cool", "--set", "laser_power=-1"]).status.code(), Some(2));
    assert_eq!(photomech(&["cool", "--config", "/nonexistent/params.json"]).status.code(), Some(2));
    let unstable = photomech(&[
        "cool",
        "--set",
        "laser_power=0.02",
        "--set",
        "detuning_norm=0.85",
        "--set",
        "decay_input_norm=0.5",
        "--set",
        "decay_mirror_ratio=0",
    ]);
    assert_eq!(unstable.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&unstable.stderr).contains("unstable"));
}

#[test]
fn config_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let mut sys = photomech_core::SystemParams::baseline_fig2();
    sys.set("laser_power", 0.002).unwrap();
    let path = dir.path().join("params.json");
    std::fs::write(&path, sys.to_json()).unwrap();
    let from_file: Value = serde_json::from_str(&stdout(&photomech(&["entangle", "--config", path.to_str().unwrap()]))).unwrap();
    let from_set: Value = serde_json::from_str(&stdout(&photomech(&["entangle", "--set", "laser_power=0.002"]))).unwrap();
    assert_eq!(from_file, from_set);
}

#[test]
fn covariance_and_steady_reports() {
    let v: Value = serde_json::from_str(&stdout(&photomech(&["covariance"]))).unwrap();
    assert_eq!(v["physical"], true);
    let m = v["v"].as_array().unwrap();
    for i in 0..4 {
        for j in 0..4 {
            assert_eq!(m[i][j], m[j][i]);
        }
    }
    let csv = stdout(&photomech(&["covariance", "--method", "quadrature", "--format", "csv"]));
    assert_eq!(data_rows(&csv).len(), 4);
    // Bare detuning 5ω_m at 50 mW in a good cavity: three branches, only the
    // far-detuned one stable.
    let bistable = [
        "--set",
        "decay_input_norm=0.1",
        "--set",
        "laser_power=0.05",
        "--set",
        "detuning_raw=3.14159265e8",
    ];
    let mut args = vec!["steady"];
    args.extend(bistable);
    let rows = data_rows(&stdout(&photomech(&args)));
    let verdicts: Vec<&str> = rows.iter().map(|r| r[6].as_str()).collect();
    assert_eq!(verdicts, ["0", "0", "1"]);
    let mut args = vec!["cool", "--branch", "2"];
    args.extend(bistable);
    assert!(photomech(&args).status.success());
    args[2] = "1";
    assert_eq!(photomech(&args).status.code(), Some(3));
    args[2] = "5";
    assert_eq!(photomech(&args).status.code(), Some(2));
}

#[test]
fn oracle_check_is_seeded() {
    let dir = tempfile::tempdir().unwrap();
    let run = |seed: &str, name: &str| {
        let path = dir.path().join(name);
        let args = [
            "oracle-check",
            "--set",
            "mech_quality=20",
            "--trajectories",
            "2",
            "--windows",
            "30",
            "--seed",
            seed,
            "--out",
            path.to_str().unwrap(),
        ];
        let out = photomech(&args);
        assert!(out.status.code() == Some(0) || out.status.code() == Some(3));
        std::fs::read_to_string(&path).unwrap()
    };
    let a = run("7", "a.json");
    assert_eq!(a, run("7", "b.json"));
    assert_ne!(a, run("8", "c.json"));
    let v: Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["config"]["seed"], 7);
    assert!(Path::new(&format!("{}.meta.json", dir.path().join("a.json").display())).exists());
}

#[test]
fn chi_for_silicon() {
    let v: Value = serde_json::from_str(&stdout(&photomech(&["chi"]))).unwrap();
    let chi = v["chi"].as_f64().unwrap();
    assert!((1e-6..1e-4).contains(&chi));
}
