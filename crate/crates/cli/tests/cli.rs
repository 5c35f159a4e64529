use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_bonnesen"));
    c.env_remove("BONNESEN_CONFIG");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn schema() -> jsonschema::Validator {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("schema/bonnesen-report-1.schema.json");
    jsonschema::validator_for(&read_json(&path)).unwrap()
}

fn assert_valid(doc: &Value) {
    let v = schema();
    let errors: Vec<String> = v.iter_errors(doc).map(|e| format!("{} at {}", e, e.instance_path())).collect();
    assert!(errors.is_empty(), "{errors:#?}");
}

/// Runs a command writing JSON to a temp file; returns exit code and report.
fn report(dir: &TempDir, name: &str, args: &[&str]) -> (i32, Value) {
    let out = dir.path().join(name);
    let mut all: Vec<&str> = args.to_vec();
    let out_str = out.to_str().unwrap();
    all.extend(["--out", out_str]);
    let o = run(&all);
    (code(&o), read_json(&out))
}

#[test]
fn verify_small_run_passes_and_validates() {
    let dir = TempDir::new().unwrap();
    let (c, doc) = report(&dir, "v.json", &["verify", "--samples", "300", "--n", "3..5"]);
    assert_eq!(c, 0);
    assert_eq!(doc["status"], "pass");
    assert_eq!(doc["schema_version"], "bonnesen-report/1");
    assert_eq!(doc["provenance"]["seed"], 7);
    assert_eq!(doc["summary"]["violations"], 0);
    assert_valid(&doc);
    let mut broken = doc.clone();
    broken["status"] = Value::from("maybe");
    assert!(!schema().is_valid(&broken));
    // Tangential: 49 records per polygon; cyclic: 4.
    assert_eq!(doc["summary"]["records"], 300 * 3 * (49 + 4));
}

#[test]
fn planted_fault_fails_verify_but_still_writes_the_report() {
    let dir = TempDir::new().unwrap();
    let (c, doc) = report(&dir, "v.json", &["verify", "--samples", "50", "--n", "3", "--plant-fault"]);
    assert_eq!(c, 1);
    assert_eq!(doc["status"], "fail");
    let planted: Vec<&Value> = doc["entries"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|e| e["entry_id"] == "PLANTED_FLIP")
        .collect();
    assert_eq!(planted.len(), 2);
    assert!(planted.iter().all(|e| e["violations"] == 50));
    assert_valid(&doc);
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        vec!["verify", "--n", ""],
        vec!["verify", "--n", "2"],
        vec!["certify", "--samples", "0"],
        vec!["search", "--budget", "0"],
        vec!["verify", "--alpha", "0"],
        vec!["verify", "--precision", "high", "--digits", "10"],
        vec!["verify", "--bogus"],
        vec!["verify", "--config", "/nonexistent/config.json"],
        vec!["report", "/nonexistent/report.json"],
    ] {
        assert_eq!(code(&run(&args)), 2, "{args:?}");
    }
}

#[test]
fn verify_is_deterministic_across_thread_counts() {
    let dir = TempDir::new().unwrap();
    let hash = |threads: &str, name: &str| {
        let out = dir.path().join(name);
        let o = bin()
            .env("RAYON_NUM_THREADS", threads)
            .args(["verify", "--samples", "700", "--n", "3,6", "--out", out.to_str().unwrap()])
            .output()
            .unwrap();
        assert_eq!(code(&o), 0);
        let doc = read_json(&out);
        let mut stripped = doc.clone();
        stripped["provenance"]["timestamp"] = Value::Null;
        (doc["determinism_hash"].as_str().unwrap().to_string(), stripped)
    };
    let (a, da) = hash("1", "a.json");
    let (b, db) = hash("3", "b.json");
    assert_eq!(a, b);
    assert_eq!(da, db);
    let other = report(&dir, "c.json", &["verify", "--samples", "700", "--n", "3,6", "--seed", "8"]).1;
    assert_ne!(other["determinism_hash"].as_str().unwrap(), a);
}

#[test]
fn certify_defaults_match_expected_classes() {
    let dir = TempDir::new().unwrap();
    let (c, doc) = report(&dir, "c.json", &["certify", "--samples", "1000"]);
    assert_eq!(c, 0);
    let verdicts = doc["verdicts"].as_array().unwrap();
    // Per n: 3 alphas x (2 + 2 x 2) functions plus the probe.
    assert_eq!(verdicts.len(), 6 * (3 * 6 + 1));
    for v in verdicts {
        if v["family"] == "linear" {
            assert_eq!(v["classification"], "Indeterminate");
            assert!(v["expected"].is_null());
        } else {
            assert_eq!(v["classification"], v["expected"], "{v}");
        }
    }
    assert_valid(&doc);
}

#[test]
fn search_passes_and_cross_checks_the_grid() {
    let dir = TempDir::new().unwrap();
    let (c, doc) = report(
        &dir,
        "s.json",
        &["search", "--n", "3,4", "--alpha", "1,2", "--k", "2", "--grid", "120", "--budget", "2000", "--starts", "8"],
    );
    assert_eq!(c, 0, "{:?}", doc["notes"]);
    let searches = doc["searches"].as_array().unwrap();
    assert!(searches.iter().all(|s| s["grid"]["agrees"] == true && s["anomaly"].is_null()));
    assert_valid(&doc);
}

#[test]
fn search_flags_the_planted_fault() {
    let dir = TempDir::new().unwrap();
    let (c, doc) = report(&dir, "s.json", &["search", "--n", "3", "--kinds", "cyclic", "--plant-fault", "--budget", "5000"]);
    assert_eq!(c, 1);
    let planted = doc["searches"]
        .as_array()
        .unwrap()
        .iter()
        .find(|s| s["entry_id"] == "PLANTED_FLIP")
        .unwrap()
        .clone();
    assert!(planted["falsify"]["counterexample"].is_object());
    assert_valid(&doc);
}

#[test]
fn catalog_listings() {
    let count = |args: &[&str]| {
        let o = run(args);
        assert_eq!(code(&o), 0);
        let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
        assert_valid(&doc);
        doc["catalog"].as_array().unwrap().len()
    };
    assert_eq!(count(&["catalog", "--format", "json"]), 20);
    assert_eq!(count(&["catalog", "--format", "json", "--kinds", "cyclic"]), 4);
    assert_eq!(count(&["catalog", "--format", "json", "--kinds", "tangential"]), 17);
    let text = String::from_utf8(run(&["catalog"]).stdout).unwrap();
    assert!(text.contains("ZHANG97") && text.contains("T52"));
    let csv = String::from_utf8(run(&["catalog", "--format", "csv", "--kinds", "cyclic"]).stdout).unwrap();
    let ids: Vec<&str> = csv.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(ids, ["BASIC", "T52", "T53", "ZHANG97"]);
}

#[test]
fn csv_columns_are_fixed() {
    let o = run(&["verify", "--samples", "20", "--n", "3", "--kinds", "cyclic", "--format", "csv"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "entry_id,n,R,alpha,k,lhs,rhs,slack,equality,kind");
    assert_eq!(lines.count(), 4);
}

#[test]
fn config_file_and_environment() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"n": [4], "samples": 30, "seed": 99, "kinds": ["cyclic"]}"#).unwrap();
    let out = dir.path().join("r.json");
    // The file supplies everything but the seed, which the flag overrides.
    let o = bin()
        .env("BONNESEN_CONFIG", &cfg)
        .args(["verify", "--seed", "5", "--out", out.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    let doc = read_json(&out);
    assert_eq!(doc["config"]["n"], serde_json::json!([4]));
    assert_eq!(doc["config"]["samples"], 30);
    assert_eq!(doc["config"]["seed"], 5);
    assert_eq!(doc["summary"]["records"], 30 * 4);

    std::fs::write(&cfg, r#"{"sead": 1}"#).unwrap();
    assert_eq!(code(&run(&["verify", "--config", cfg.to_str().unwrap()])), 2);
}

#[test]
fn report_command_checks_the_hash() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("v.json");
    let (c, _) = report(&dir, "v.json", &["verify", "--samples", "40", "--n", "3"]);
    assert_eq!(c, 0);
    let o = run(&["report", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8(o.stdout).unwrap().contains("determinism hash"));
    let csv = run(&["report", path.to_str().unwrap(), "--format", "csv"]);
    assert!(String::from_utf8(csv.stdout).unwrap().starts_with("entry_id,n,R,alpha,k"));

    let mut doc = read_json(&path);
    doc["entries"][0]["min_slack"] = serde_json::json!(-1.0);
    std::fs::write(&path, serde_json::to_string(&doc).unwrap()).unwrap();
    assert_eq!(code(&run(&["report", path.to_str().unwrap()])), 1);

    std::fs::write(&path, r#"{"schema_version": "other/9"}"#).unwrap();
    assert_eq!(code(&run(&["report", path.to_str().unwrap()])), 2);
}

#[test]
fn high_precision_verify_runs() {
    let dir = TempDir::new().unwrap();
    let (c, doc) = report(&dir, "h.json", &["verify", "--samples", "5", "--n", "3", "--precision", "high"]);
    assert_eq!(c, 0);
    assert_eq!(doc["provenance"]["precision"], "high:40");
    assert_valid(&doc);
}
