use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn hecke(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hecke"))
        .args(args)
        .arg("--out")
        .arg(dir)
        .env_remove("HECKE_SEED")
        .env_remove("HECKE_MODE")
        .output()
        .expect("binary runs")
}

fn report(dir: &Path, name: &str) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join(format!("{name}.json"))).unwrap()).unwrap()
}

fn error_object(out: &Output) -> Value {
    serde_json::from_slice(&out.stderr).expect("stderr carries a JSON error")
}

const P2_SEED: &str = r#"{"p": 2, "lam_p": "1/1·2^-1/2", "lam_p2": "0"}"#;

#[test]
fn gamma_lists_nine_entries_for_distinct_weights() {
    let dir = TempDir::new().unwrap();
    let out = hecke(dir.path(), &["gamma", "--k1", "20", "--k2", "10"]);
    assert!(out.status.success());
    let r = report(dir.path(), "gamma");
    assert_eq!(r["result"]["entries"], 9);
    assert_eq!(r["command"]["name"], "gamma");
    assert_eq!(r["config"]["mode"], "exact");
    assert!(r["input_hash"].as_str().unwrap().starts_with("sha256:"));
}

#[test]
fn gamma_rejects_small_weights() {
    let dir = TempDir::new().unwrap();
    let out = hecke(dir.path(), &["gamma", "--k1", "3", "--k2", "3"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_object(&out)["error"]["kind"], "domain");
}

#[test]
fn recur_replays_the_p2_boundary_seed() {
    let dir = TempDir::new().unwrap();
    let seed = dir.path().join("s.json");
    fs::write(&seed, P2_SEED).unwrap();
    let out = hecke(dir.path(), &["recur", "--seed-file", seed.to_str().unwrap(), "--n", "10"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let values = &report(dir.path(), "recur")["result"][0]["values"];
    assert_eq!(values[4], "0/1");
    assert_eq!(values[6], "0/1");
    assert_eq!(values[8], "-1/1");
    assert_eq!(values[10], "-1/2");
}

#[test]
fn ingest_then_recur() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("in.csv");
    fs::write(&csv, "p,n,mu,k\n2,1,0,10\n2,2,0,10\n3,1,0,10\n").unwrap();
    let out = hecke(dir.path(), &["ingest", csv.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(dir.path(), "ingest");
    assert_eq!(r["result"]["records"], 3);
    assert_eq!(r["result"]["primes"], serde_json::json!([2]));

    let system = dir.path().join("system.json");
    let out = hecke(dir.path(), &["recur", "--seed-file", system.to_str().unwrap(), "--n", "6"]);
    assert!(out.status.success());
    let values = &report(dir.path(), "recur")["result"][0]["values"];
    assert_eq!(values[4], "-1/1");
    assert_eq!(values[6], "-1/2");
}

#[test]
fn ingest_duplicate_row_names_the_line() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("dup.csv");
    fs::write(&csv, "p,n,mu,k\n2,1,0,10\n2,1,0,10\n").unwrap();
    let out = hecke(dir.path(), &["ingest", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = error_object(&out);
    assert_eq!(err["error"]["kind"], "parse");
    assert!(err["error"]["message"].as_str().unwrap().contains("line 3"));
}

#[test]
fn ingest_recurrence_mismatch_is_an_anomaly() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("bad.csv");
    // zero seed at p = 2 predicts λ(2⁴) = −1, i.e. μ = −2^{18}
    fs::write(&csv, "p,n,mu,k\n2,1,0,10\n2,2,0,10\n2,4,5,10\n").unwrap();
    let out = hecke(dir.path(), &["ingest", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(error_object(&out)["error"]["kind"], "anomaly");
    assert_eq!(report(dir.path(), "ingest")["result"]["mismatches"][0]["n"], 4);
}

#[test]
fn unknown_subcommand_is_an_input_error() {
    let dir = TempDir::new().unwrap();
    let out = hecke(dir.path(), &["bogus"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_object(&out)["error"]["kind"], "usage");
}

#[test]
fn malformed_config_is_an_input_error() {
    let dir = TempDir::new().unwrap();
    for args in [&["--mode", "fuzzy", "gamma", "--k1", "4", "--k2", "4"][..], &["--measure", "gaussian", "sums"]] {
        let out = hecke(dir.path(), args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn malformed_seed_file() {
    let dir = TempDir::new().unwrap();
    let seed = dir.path().join("s.json");
    fs::write(&seed, r#"{"p": 4, "lam_p": "0", "lam_p2": "0"}"#).unwrap();
    let out = hecke(dir.path(), &["recur", "--seed-file", seed.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    fs::write(&seed, "not json").unwrap();
    let out = hecke(dir.path(), &["recur", "--seed-file", seed.to_str().unwrap()]);
    assert_eq!(error_object(&out)["error"]["kind"], "seed-file");
}

#[test]
fn nonvanish_is_reproducible() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    for dir in [&a, &b] {
        let out = hecke(dir.path(), &["nonvanish", "--trials", "3000", "--seed", "7"]);
        assert!(out.status.success());
    }
    let (ra, rb) = (report(a.path(), "nonvanish"), report(b.path(), "nonvanish"));
    assert_eq!(ra["result"], rb["result"]);
    assert!(ra["result"]["max_index"].as_u64().unwrap() <= 14);
    assert_eq!(ra["result"]["trials"], 3000);
    assert!(!a.path().join("nonvanish-replay.json").exists());
}

#[test]
fn nonvanish_replay_file() {
    let dir = TempDir::new().unwrap();
    let replay = dir.path().join("replay.json");
    fs::write(
        &replay,
        r#"[{"f": {"p": 2, "lam_p": "0", "lam_p2": "0"}, "g": {"p": 2, "lam_p": "1/1·2^-1/2", "lam_p2": "0"}}]"#,
    )
    .unwrap();
    let out = hecke(dir.path(), &["nonvanish", "--replay", replay.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(dir.path(), "nonvanish");
    assert_eq!(r["result"]["trials"], 1);
    assert_eq!(r["result"]["max_index"], 8);
}

#[test]
fn env_overrides_and_flags_win() {
    let dir = TempDir::new().unwrap();
    let run = |extra: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_hecke"))
            .args(["gamma", "--k1", "8", "--k2", "6", "--out"])
            .arg(dir.path())
            .args(extra)
            .env("HECKE_SEED", "42")
            .env("HECKE_MODE", "float")
            .output()
            .unwrap()
    };
    assert!(run(&[]).status.success());
    let r = report(dir.path(), "gamma");
    assert_eq!(r["config"]["seed"], 42);
    assert_eq!(r["config"]["mode"], "float");
    assert!(run(&["--seed", "3"]).status.success());
    assert_eq!(report(dir.path(), "gamma")["config"]["seed"], 3);
}

#[test]
fn hadamard_exact_and_float() {
    let dir = TempDir::new().unwrap();
    let seeds = dir.path().join("s.json");
    fs::write(
        &seeds,
        r#"[{"p": 2, "lam_p": "0", "lam_p2": "0"}, {"p": 3, "lam_p": "1/1·3^-1/2", "lam_p2": "-1/3"}]"#,
    )
    .unwrap();
    let s = seeds.to_str().unwrap();
    let out = hecke(dir.path(), &["hadamard", "--f", s, "--g", s]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = report(dir.path(), "hadamard")["result"].clone();
    assert_eq!(rows.as_array().unwrap().len(), 2);
    for row in rows.as_array().unwrap() {
        assert_eq!(row["identity_residual"], 0.0);
        assert!(row["gp_degree"].as_u64().unwrap() <= 15);
        assert_eq!(row["factor"]["gp"][0], "1/1");
    }
    let out = hecke(dir.path(), &["--mode", "float", "hadamard", "--f", s, "--g", s, "--p", "2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let row = &report(dir.path(), "hadamard")["result"][0];
    assert!(row["identity_residual"].as_f64().unwrap() < 1e-9);
}

#[test]
fn scan_and_gf() {
    let dir = TempDir::new().unwrap();
    let seed = dir.path().join("s.json");
    fs::write(&seed, P2_SEED).unwrap();
    let s = seed.to_str().unwrap();
    let out = hecke(dir.path(), &["scan", "--seed-file", s, "--window", "30"]);
    assert!(out.status.success());
    let row = &report(dir.path(), "scan")["result"][0];
    assert_eq!(row["consistent"], true);
    assert_eq!(row["pattern"]["zero_exponents"][0], 2);

    let out = hecke(dir.path(), &["gf", "--seed-file", s, "--terms", "4"]);
    assert!(out.status.success());
    let row = &report(dir.path(), "gf")["result"][0];
    assert_eq!(row["gf"]["num"], serde_json::json!(["1/1", "0/1", "-1/2"]));
    assert_eq!(row["series"][1], "1/1·2^-1/2");
}

#[test]
fn lseries_sampled_identity_holds() {
    let dir = TempDir::new().unwrap();
    let out = hecke(dir.path(), &["--cutoff", "300", "lseries", "--sigma", "1.5"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(dir.path(), "lseries");
    assert!(r["result"]["identity"]["max_scaled_residual"].as_f64().unwrap() < 1e-9);
    assert_eq!(r["result"]["g_bounds"][0]["sigma"], 1.5);
}

#[test]
fn lseries_exact_from_files() {
    let dir = TempDir::new().unwrap();
    let seeds = dir.path().join("s.json");
    let body: Vec<String> = [2, 3, 5, 7]
        .iter()
        .map(|p| format!(r#"{{"p": {p}, "lam_p": "0", "lam_p2": "0"}}"#))
        .collect();
    fs::write(&seeds, format!("[{}]", body.join(","))).unwrap();
    let s = seeds.to_str().unwrap();
    let out = hecke(dir.path(), &["--cutoff", "10", "lseries", "--f", s, "--g", s]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(report(dir.path(), "lseries")["result"]["identity"]["exact"], true);
    let out = hecke(dir.path(), &["--cutoff", "20", "lseries", "--f", s, "--g", s]);
    assert_eq!(out.status.code(), Some(2));
    assert!(error_object(&out)["error"]["message"].as_str().unwrap().contains("11"));
}

#[test]
fn sums_writes_a_curve() {
    let dir = TempDir::new().unwrap();
    let out = hecke(
        dir.path(),
        &["--cutoff", "5000", "--measure", "weighted:sato-tate", "sums", "--same", "--points", "6"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("sums.csv")).unwrap();
    assert!(csv.starts_with("x,sum,sum_over_x\n10,"));
    assert_eq!(csv.lines().count(), 7);
    let r = report(dir.path(), "sums");
    assert_eq!(r["config"]["measure"], "weighted:sato-tate");
    assert!(r["result"]["report"]["linear_coeff"].is_number());
}

#[test]
fn signs_report() {
    let dir = TempDir::new().unwrap();
    let out = hecke(dir.path(), &["--cutoff", "20000", "signs"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r = &report(dir.path(), "signs")["result"];
    let frac = r["positive_fraction"].as_f64().unwrap();
    assert!((0.4..0.6).contains(&frac));
    assert_eq!(r["census"]["x"], 20000);
    assert!(r["hypothesis"]["threshold"].is_number());
}
