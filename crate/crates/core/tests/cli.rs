mod common;

use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, Output};

use riesz_core::io::{read_point_set, write_point_set};
use riesz_core::pointsets::fibonacci_sphere;
use riesz_core::{Manifold, PointSet, Provenance};
use serde_json::Value;

fn riesz(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_riesz"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid json")
}

fn write_set(dir: &Path, name: &str, m: Manifold, rows: Vec<Vec<f64>>) -> String {
    let x = PointSet::from_coords(m, rows, Provenance::new("handmade")).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, write_point_set(&x)).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn generate_then_energy() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("fib.txt");
    let f = file.to_str().unwrap();
    let out = riesz(&["generate", "--manifold", "sphere", "--dim", "2", "--gen", "fibonacci", "--n", "100", "--out", f]);
    assert!(out.status.success());
    let report = json(&riesz(&["energy", "--file", f, "--s", "1"]));
    let ec = report["energy_continuous"].as_f64().unwrap();
    assert!((ec - common::sine_integral(PI) / 2.0).abs() < 1e-9, "{ec}");
    assert_eq!(report["n"], 100);
    assert_eq!(report["provenance"]["generator"], "fibonacci");
    assert_eq!(report["command"]["version"], riesz_core::VERSION);
}

#[test]
fn separation_of_antipodal_pair() {
    let dir = tempfile::tempdir().unwrap();
    let f = write_set(dir.path(), "pair.txt", Manifold::sphere(2).unwrap(), vec![vec![0.0, 0.0, 1.0], vec![0.0, 0.0, -1.0]]);
    let report = json(&riesz(&["separation", "--file", &f]));
    assert_eq!(report["min_distance"].as_f64().unwrap(), PI);
    assert_eq!(report["pair"], serde_json::json!([0, 1]));
}

#[test]
fn discrepancy_of_equally_spaced_circle() {
    let dir = tempfile::tempdir().unwrap();
    let rows = (0..10)
        .map(|k| {
            let t = 2.0 * PI * k as f64 / 10.0;
            vec![t.cos(), t.sin()]
        })
        .collect();
    let f = write_set(dir.path(), "circle.txt", Manifold::sphere(1).unwrap(), rows);
    let report = json(&riesz(&["discrepancy", "--file", &f, "--extra-centers", "0"]));
    assert!((report["value"].as_f64().unwrap() - 0.1).abs() < 1e-9);
    assert_eq!(report["lower_bound"], true);
    // default center set is 4·N extras
    let report = json(&riesz(&["discrepancy", "--file", &f, "--seed", "3"]));
    assert_eq!(report["center_set"]["extra_centers"], 40);
}

#[test]
fn file_round_trip_is_lossless() {
    let dir = tempfile::tempdir().unwrap();
    for (manifold, dim, gen) in [("sphere", "2", "fibonacci"), ("sphere", "3", "uniform"), ("torus", "3", "fps"), ("torus", "2", "kronecker")] {
        let path = dir.path().join(format!("{manifold}{dim}{gen}.txt"));
        let p = path.to_str().unwrap();
        let out = riesz(&["generate", "--manifold", manifold, "--dim", dim, "--gen", gen, "--n", "64", "--seed", "11", "--out", p]);
        assert!(out.status.success());
        let text = std::fs::read_to_string(&path).unwrap();
        let loaded = read_point_set(&text).unwrap();
        assert!(loaded.warnings.is_empty());
        assert_eq!(write_point_set(&loaded.points), text);
    }
    let path = dir.path().join("fib.txt");
    riesz(&["generate", "--manifold", "sphere", "--dim", "2", "--gen", "fibonacci", "--n", "300", "--out", path.to_str().unwrap()]);
    let loaded = read_point_set(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(loaded.points.points(), fibonacci_sphere(300).unwrap().points());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(riesz(&["bogus"]).status.code(), Some(1));
    assert_eq!(riesz(&["energy", "--file", "/nonexistent/file", "--s", "1"]).status.code(), Some(1));
    assert_eq!(riesz(&["--help"]).status.code(), Some(0));

    let dup = write_set(dir.path(), "dup.txt", Manifold::torus(2).unwrap(), vec![vec![0.1, 0.2], vec![0.5, 0.5], vec![0.1, 0.2]]);
    let out = riesz(&["energy", "--file", &dup, "--s", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("points 0 and 2 coincide"));
    // duplicates are a valid input for separation
    let report = json(&riesz(&["separation", "--file", &dup]));
    assert_eq!(report["duplicates"], true);

    let ok = write_set(dir.path(), "ok.txt", Manifold::torus(2).unwrap(), vec![vec![0.1, 0.2], vec![0.5, 0.5]]);
    assert_eq!(riesz(&["energy", "--file", &ok, "--s", "2"]).status.code(), Some(2));
    assert_eq!(riesz(&["energy", "--file", &ok, "--s", "0"]).status.code(), Some(2));

    let bad = Command::new(env!("CARGO_BIN_EXE_riesz"))
        .args(["separation", "--file", &ok])
        .env("RIESZ_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn rate_writes_csv_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("rate.cfg");
    std::fs::write(&cfg, "manifold = torus\ndim = 1\ns = 0.5\ngenerator = kronecker\nn_schedule = 32, 64, 128\nextra_centers = 8\nseed = 5\n").unwrap();
    let csv = dir.path().join("out.csv");
    let js = dir.path().join("out.json");
    let out = riesz(&["rate", "--config", cfg.to_str().unwrap(), "--csv", csv.to_str().unwrap(), "--json", js.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let csv = std::fs::read_to_string(csv).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "N,energy_discrete,energy_continuous,gap,disc_estimate,separation,gamma_hat");
    assert_eq!(lines.count(), 3);
    let report: Value = serde_json::from_str(&std::fs::read_to_string(js).unwrap()).unwrap();
    assert_eq!(report["config"]["seed"], 5);
    assert!((report["theorem_exponent"].as_f64().unwrap() - 0.2).abs() < 1e-15);
    assert!(report["caveat"].as_str().unwrap().contains("lower bound"));

    std::fs::write(&cfg, "manifold = torus\ndim = 2\ns = 1\ngenerator = fibonacci\n").unwrap();
    assert_eq!(riesz(&["rate", "--config", cfg.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn verify_lemmas_reports_every_check() {
    let report = json(&riesz(&["verify-lemmas", "--manifold", "sphere", "--dim", "2", "--s", "1", "--cases", "10"]));
    let reports = report["reports"].as_array().unwrap();
    assert_eq!(reports.len(), 6);
    assert!(reports.iter().all(|r| r["pass"] == true), "{report:#}");
}
