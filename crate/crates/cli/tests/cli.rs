use std::path::Path;
use std::process::{Command, Output};

use genent::{genuine_entanglement, ghz, MeasureReport};
use serde_json::Value;

fn genent(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_genent"))
        .args(args)
        .env_remove("GENENT_SEED")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout)))
}

fn data(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).display().to_string()
}

#[test]
fn measure_ghz_and_w() {
    let out = genent(&["measure", "--builtin", "ghz:4"]);
    assert_eq!(code(&out), 0);
    assert!((json(&out)["E"].as_f64().unwrap() - 1.0).abs() < 1e-12);

    let out = genent(&["measure", "--builtin", "w:6"]);
    assert_eq!(code(&out), 0);
    assert!(json(&out)["E"].as_f64().unwrap().abs() < 1e-10);
}

#[test]
fn measure_file_reports_factors() {
    let out = genent(&["measure", "--file", &data("bell_pair_pair.json")]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert!(v["E"].as_f64().unwrap().abs() < 1e-10);
    assert_eq!(v["factorization"], serde_json::json!([[1, 2], [3, 4]]));
}

#[test]
fn measure_output_round_trips() {
    let out = genent(&["measure", "--builtin", "ghz:4"]);
    let parsed: MeasureReport = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(parsed, genuine_entanglement(&ghz(4).unwrap()).unwrap());
    let again: MeasureReport = serde_json::from_str(&serde_json::to_string(&parsed).unwrap()).unwrap();
    assert_eq!(parsed, again);
}

#[test]
fn measure_gabcd_builtin() {
    let out = genent(&["measure", "--builtin", "gabcd:1,0.5+0.2i,0.3-0.1i,0.7"]);
    assert_eq!(code(&out), 0);
    assert!(json(&out)["E"].as_f64().unwrap() >= -1e-10);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let broken = dir.path().join("broken.json");
    std::fs::write(&broken, "{\"n\": 2, \"amplitudes\": [[1, 0]").unwrap();
    let short = dir.path().join("short.json");
    std::fs::write(&short, "{\"n\": 2, \"amplitudes\": [[1, 0]]}").unwrap();
    let odd = dir.path().join("odd.json");
    std::fs::write(&odd, serde_json::to_string(&ghz(3).unwrap().to_file()).unwrap()).unwrap();
    let out_dir = dir.path().display().to_string();

    let cases: Vec<(Vec<&str>, i32)> = vec![
        (vec!["measure", "--builtin", "ghz:4"], 0),
        (vec!["measure", "--file", broken.to_str().unwrap()], 2),
        (vec!["measure", "--file", short.to_str().unwrap()], 2),
        (vec!["measure", "--file", "/nonexistent/state.json"], 2),
        (vec!["measure", "--builtin", "cat:4"], 2),
        (vec!["measure"], 2),
        (vec!["measure", "--builtin", "ghz:4", "--file", "x.json"], 2),
        (vec!["measure", "--builtin", "ghz:5"], 3),
        (vec!["measure", "--file", odd.to_str().unwrap()], 3),
        (vec!["random-scan", "--n", "5", "--count", "10"], 3),
        (vec!["random-scan", "--n", "4", "--count", "0"], 3),
        (vec!["verify"], 2),
        (vec!["verify", "entropy"], 2),
        (vec!["verify", "counting", "--n", "7"], 3),
        (vec!["counting", "--n", "6"], 0),
        (vec!["counting", "--n", "5"], 3),
        (vec!["ising-sweep", "--n", "5", "--h", "1:2:1", "--out", &out_dir], 3),
        (vec!["ising-sweep", "--n", "14", "--h", "1:2:1", "--out", &out_dir], 3),
        (vec!["ising-sweep", "--n", "4", "--h", "0:2:1", "--out", &out_dir], 3),
        (vec!["ising-sweep", "--n", "4", "--h", "2:1:0.5", "--out", &out_dir], 3),
        (vec!["ising-sweep", "--n", "4", "--h", "1:2", "--out", &out_dir], 2),
        (vec!["ising-sweep", "--n", "4", "--h", "a:2:1", "--out", &out_dir], 2),
        (vec!["frobnicate"], 2),
    ];
    for (args, want) in cases {
        let out = genent(&args);
        assert_eq!(code(&out), want, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        if want != 0 {
            assert!(!out.stderr.is_empty(), "{args:?} printed no message");
        }
    }
}

#[test]
fn random_scan_is_reproducible() {
    let a = genent(&["random-scan", "--n", "6", "--count", "1000", "--seed", "42"]);
    let b = genent(&["random-scan", "--n", "6", "--count", "1000", "--seed", "42", "--jobs", "2"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);

    let env = Command::new(env!("CARGO_BIN_EXE_genent"))
        .args(["random-scan", "--n", "6", "--count", "1000"])
        .env("GENENT_SEED", "42")
        .output()
        .unwrap();
    assert_eq!(a.stdout, env.stdout);
}

#[test]
fn random_scan_finds_no_negatives() {
    let out = genent(&["random-scan", "--n", "4", "--count", "10000", "--seed", "1"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["negatives_below_tolerance"], 0);
    assert_eq!(v["n_states"], 10000);
    assert!(v["min_E"].as_f64().unwrap() <= v["max_E"].as_f64().unwrap());
}

#[test]
fn verify_suites() {
    let out = genent(&["verify", "counting", "--n", "8"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["passed"], true);

    let out = genent(&["verify", "covariance", "--samples", "1000", "--seed", "7"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["suites"][0]["checked"], 1000);
    assert!(v["suites"][0]["worst_residual"].as_f64().unwrap() < 1e-9);

    let out = genent(&["verify", "diagram", "--samples", "500"]);
    assert_eq!(code(&out), 0);

    let out = genent(&["verify", "monotonicity", "normal-form", "--samples", "100"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["suites"].as_array().unwrap().len(), 2);
}

#[test]
fn ising_sweep_writes_files() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().display().to_string();
    let out = genent(&["ising-sweep", "--n", "4", "--h", "10:20:5", "--out", &out_dir]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let mut reader = csv::Reader::from_path(dir.path().join("ising_N4.csv")).unwrap();
    assert_eq!(reader.headers().unwrap(), vec!["h", "ground_energy", "gap", "E", "degenerate_flag"]);
    let mut rows = 0;
    for rec in reader.records() {
        let rec = rec.unwrap();
        assert!(rec[3].parse::<f64>().unwrap() < 0.02);
        rows += 1;
    }
    assert_eq!(rows, 3);

    let out = genent(&["ising-sweep", "--n", "4,6,8,10", "--h", "0.2:2.0:0.45", "--out", &out_dir]);
    assert_eq!(code(&out), 0);
    for n in [4, 6, 8, 10] {
        assert!(dir.path().join(format!("ising_N{n}.csv")).exists());
        let dat = std::fs::read_to_string(dir.path().join(format!("ising_N{n}.dat"))).unwrap();
        assert_eq!(dat.lines().filter(|l| !l.starts_with('#')).count(), 5);
    }
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 8);
}
