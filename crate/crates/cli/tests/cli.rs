use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use towerlab_core::algebra::HomogeneousPolynomial;
use towerlab_core::towers::{fibonacci_tower, planar_power_tower, ExponentRule};

fn towerlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_towerlab")).args(args).env_remove("TOWERLAB_THREADS").output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let out = towerlab(&all);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["schema_version"], 1);
    v
}

fn column(v: &Value, name: &str) -> Vec<Value> {
    v["rows"].as_array().unwrap().iter().map(|r| r[name].clone()).collect()
}

#[test]
fn fibonacci_count_table() {
    // brute-force oracle values for levels 0..2 at p = 3, 7
    let v = json(&["count", "--tower", "fibonacci", "--levels", "0..2", "--primes", "3,7"]);
    let counts: Vec<u64> = column(&v, "count").iter().map(|c| c.as_u64().unwrap()).collect();
    assert_eq!(counts, vec![4, 8, 4, 8, 0, 8]);
    let levels: Vec<u64> = column(&v, "level").iter().map(|c| c.as_u64().unwrap()).collect();
    assert_eq!(levels, vec![0, 0, 1, 1, 2, 2]);
}

#[test]
fn fermat_conic_count() {
    let v = json(&["count", "--tower", "fermat:2", "--levels", "0", "--primes", "7"]);
    assert_eq!(column(&v, "count"), vec![Value::from(8)]);
}

#[test]
fn composite_prime_is_a_usage_error() {
    let out = towerlab(&["count", "--tower", "fibonacci", "--levels", "0", "--primes", "4"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("4 is not prime"));
}

#[test]
fn bounds_tables() {
    let v = json(&["bounds", "--tower", "fibonacci", "--levels", "0..2", "--primes", "3,5,7"]);
    assert_eq!(column(&v, "structural"), vec![Value::from(1), Value::from(2), Value::from(4)]);
    assert_eq!(column(&v, "genus"), vec![Value::from(0), Value::from(1), Value::from(5)]);
    assert_eq!(v["summary"]["monotone_divergence"], true);

    let v = json(&["bounds", "--tower", "fermat:2", "--levels", "0..3"]);
    assert_eq!(column(&v, "structural"), [1, 3, 7, 15].map(Value::from).to_vec());
    assert!(column(&v, "counts").iter().all(|c| c == ""));
}

#[test]
fn image_chain_rows() {
    let v = json(&["chain", "--tower", "fibonacci", "--primes", "7,11", "--depth", "3"]);
    let sizes: Vec<u64> = column(&v, "size").iter().map(|c| c.as_u64().unwrap()).collect();
    assert_eq!(sizes, vec![8, 4, 2, 0, 12, 6, 4, 4]);
    assert_eq!(v["summary"]["stabilized_at_p7"], 3);
    assert_eq!(v["summary"]["stabilized_at_p11"], Value::Null);
}

#[test]
fn dynamics_commands() {
    let v = json(&["dynamics", "periodic", "--map", "x^2", "--max-period", "6"]);
    let mut pts: Vec<String> = column(&v, "point").iter().map(|p| p.as_str().unwrap().to_string()).collect();
    pts.sort();
    assert_eq!(pts, vec!["0", "1", "∞"]);

    let v = json(&["dynamics", "height", "--map", "x^2", "--point", "2"]);
    let h = v["rows"][0]["height"].as_f64().unwrap();
    assert!((h - std::f64::consts::LN_2).abs() < 1e-11);

    let v = json(&["dynamics", "preimages", "--maps", "x^2,x^3", "--point", "1", "--depth", "2"]);
    assert_eq!(v["summary"]["certified"], true);
    assert_eq!(v["summary"]["path"], "1 <- 1 <- 1");

    let v = json(&["dynamics", "classify", "--map", "x^2-1", "--point", "1"]);
    assert_eq!(v["rows"][0]["kind"], "preperiodic");
    assert_eq!(v["rows"][0]["period"], 2);

    let v = json(&["dynamics", "preimages", "--map", "x^2", "--point", "4/9", "--depth", "1"]);
    let pts: Vec<Value> = column(&v, "point");
    assert_eq!(pts, ["4/9", "-2/3", "2/3"].map(Value::from).to_vec());
}

#[test]
fn spectra_commands() {
    let v = json(&["spectra", "cycle", "--n", "4"]);
    let eig: Vec<f64> = column(&v, "eigenvalue").iter().map(|e| e.as_f64().unwrap()).collect();
    for (a, b) in eig.iter().zip([0.0, 2.0, 2.0, 4.0]) {
        assert!((a - b).abs() < 1e-9);
    }

    let v = json(&["spectra", "trend", "--family", "cycle", "--sizes", "4,8,...,1024"]);
    assert_eq!(v["summary"]["verdict"], "decreasing");
    assert_eq!(v["rows"].as_array().unwrap().len(), 9);

    let v = json(&["spectra", "dsc", "--group", "zmod:16"]);
    assert_eq!(v["rows"][0]["holds"], true);
    assert_eq!(v["rows"][0]["diameter"], 8);

    let v = json(&["spectra", "cayley-sl2", "--m", "5"]);
    assert_eq!(v["summary"]["vertices"], 120);
    assert_eq!(v["summary"]["warning"], Value::Null);

    let v = json(&["spectra", "schreier", "--perms", "1 2 0; 1 0 2"]);
    assert_eq!(v["summary"]["degree"], 4);
    assert_eq!(v["summary"]["origin"], "coset");
}

#[test]
fn exit_codes() {
    assert_eq!(code(&towerlab(&["spectra", "cycle", "--n", "5000"])), 3);
    assert_eq!(code(&towerlab(&["count", "--tower", "fibonacci", "--levels", "3", "--primes", "13", "--cap-enum", "100"])), 3);
    assert_eq!(code(&towerlab(&["spectra", "dsc", "--group", "zmod:8:2"])), 2);
    assert_eq!(code(&towerlab(&["spectra", "schreier", "--perms", "1 0 2 3"])), 0);
    assert_eq!(code(&towerlab(&["count", "--levels", "0", "--primes", "3"])), 1);
    assert_eq!(code(&towerlab(&["count", "--bogus"])), 1);
    assert_eq!(code(&towerlab(&["count", "--tower", "fibonacci", "--levels", "2..1", "--primes", "3"])), 1);
    assert_eq!(code(&towerlab(&["--help"])), 0);
}

#[test]
fn bad_reduction_exits_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tower.toml");
    let base = HomogeneousPolynomial::parse("3*X0^2 + 3*X1^2 - 3*X2^2", Some(3)).unwrap();
    std::fs::write(&path, planar_power_tower(base, ExponentRule::Constant(2)).unwrap().to_toml()).unwrap();
    let p = path.to_str().unwrap();
    assert_eq!(code(&towerlab(&["count", "--tower", p, "--primes", "3"])), 2);
    assert_eq!(code(&towerlab(&["count", "--tower", p, "--primes", "5"])), 0);
}

#[test]
fn tower_files_match_named_towers() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fib.toml");
    std::fs::write(&path, fibonacci_tower().to_toml()).unwrap();
    let args = ["--levels", "0..2", "--primes", "5,11"];
    let named = json(&[&["count", "--tower", "fibonacci"][..], &args].concat());
    let filed = json(&[&["count", "--tower", path.to_str().unwrap()][..], &args].concat());
    assert_eq!(named["rows"], filed["rows"]);
}

fn run_with_threads(threads: &str, args: &[&str]) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_towerlab")).args(args).env("TOWERLAB_THREADS", threads).output().unwrap();
    assert!(out.status.success());
    out.stdout
}

#[test]
fn output_is_deterministic() {
    for format in ["json", "csv"] {
        let args = ["bounds", "--tower", "fibonacci", "--levels", "0..3", "--primes", "3,5,7,11,13", "--format", format];
        let one = run_with_threads("1", &args);
        assert_eq!(one, run_with_threads("4", &args));
        assert_eq!(one, run_with_threads("4", &args));
    }
    let bad = Command::new(env!("CARGO_BIN_EXE_towerlab"))
        .args(["spectra", "cycle", "--n", "4"])
        .env("TOWERLAB_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(code(&bad), 1);
}

#[test]
fn config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "tower = \"fibonacci\"\nlevels = \"0..1\"\nprimes = [3, 7]\nformat = \"csv\"\n").unwrap();
    let c = cfg.to_str().unwrap();
    let out = towerlab(&["count", "--config", c]);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "level,prime,count\n0,3,4\n0,7,8\n1,3,4\n1,7,8\n");
    let out = towerlab(&["count", "--config", c, "--primes", "5", "--levels", "0"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "level,prime,count\n0,5,6\n");

    std::fs::write(&cfg, "colour = \"blue\"\n").unwrap();
    assert_eq!(code(&towerlab(&["count", "--config", c])), 1);
}

#[test]
fn out_flag_writes_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cycle.csv");
    let out = towerlab(&["spectra", "cycle", "--n", "3", "--format", "csv", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(Path::new(&path)).unwrap();
    assert!(text.starts_with("index,eigenvalue,closed_form\n0,"));
    assert_eq!(text.lines().count(), 4);
}
