use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn tfsets(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tfsets"))
        .args(args)
        .env_remove("TFSETS_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn schemas() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schemas")
}

fn load(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// Parses stdout and checks it against the envelope and the command's result
/// schema.
fn report(out: &Output) -> Value {
    let v: Value = serde_json::from_slice(&out.stdout).expect("json on stdout");
    let envelope = jsonschema::validator_for(&load(&schemas().join("report.schema.json"))).unwrap();
    let errors: Vec<String> = envelope.iter_errors(&v).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "envelope: {errors:?}");
    let name = v["command"].as_str().unwrap().replace(' ', "-");
    let result = jsonschema::validator_for(&load(&schemas().join(format!("results/{name}.schema.json")))).unwrap();
    let errors: Vec<String> = result.iter_errors(&v["result"]).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{name}: {errors:?}");
    v
}

#[test]
fn evens_witness_is_found() {
    let out = tfsets(&["tf", "witness", "--set", "evens", "--depth", "4", "--window", "100000"]);
    assert_eq!(code(&out), 0);
    let v = report(&out);
    assert_eq!(v["status"], "ok");
    assert_eq!(v["result"]["verification"]["valid"], true);
    assert_eq!(v["result"]["witness"]["a"].as_array().unwrap().len(), 4);
}

#[test]
fn powers_have_no_shallow_witness() {
    let out = tfsets(&["tf", "witness", "--set", "powers2", "--depth", "3", "--window", "1048576"]);
    assert_eq!(code(&out), 2);
    let v = report(&out);
    assert_eq!(v["status"], "none");
    assert!(v["result"]["witness"].is_null());
}

#[test]
fn powers_indicator_is_consistent_with_wc() {
    let out = tfsets(&["op", "wc-diagnostic", "--psi", "indicator:powers2", "--eps", "0.5"]);
    assert_eq!(code(&out), 0);
    let v = report(&out);
    assert_eq!(v["result"]["entries"][0]["verdict"], "CONSISTENT-WITH-WC");
}

#[test]
fn every_command_matches_its_schema() {
    let cases: &[(&[&str], i32)] = &[
        (&["set", "info", "--set", "powers2", "--count", "5"], 0),
        (&["set", "materialize", "--set", "evens", "--window", "10"], 0),
        (&["tf", "verify", "--set", "evens", "--a", "0,2", "--b", "2,4"], 0),
        (&["tf", "verify", "--set", "odds", "--a", "0,2", "--b", "2,4"], 2),
        (&["tf", "profile", "--set", "primes", "--nmax", "4", "--window", "100"], 0),
        (&["tf", "exact", "--set", "ap:3:5"], 0),
        (&["tf", "exact", "--set", r#"{"kind":"finite","elements":[1,2]}"#], 0),
        (
            &["tf", "ramsey-split", "--set-a", "evens", "--set-b", "odds", "--a", "0,1,2,3,4,5,6,7", "--b", "10,11,12,13,14,15,16,17", "--target", "2"],
            0,
        ),
        (&["density", "profile", "--set", "evens"], 0),
        (&["density", "witness", "--set", "evens", "--eps", "1/3", "--window", "2000", "--depth", "2"], 0),
        (&["density", "schedule", "--eps", "1/3"], 0),
        (&["build", "clumpy", "--count", "6"], 0),
        (&["build", "slow-tset", "--count", "6"], 0),
        (&["build", "catalog", "--name", "triangular"], 0),
        (&["build", "appendix", "--tau", "0.9", "--rounds", "2", "--budget", "200"], 0),
        (&["build", "appendix", "--rounds", "2", "--budget", "100"], 1),
        (&["op", "column", "--psi", "harmonic", "--j", "2", "--window", "4"], 0),
        (&["op", "norm", "--set", "powers2", "--j", "3"], 0),
        (&["op", "norm", "--set", "evens", "--j", "3"], 0),
        (&["op", "pi-lower", "--psi", "indicator:evens", "--family", "1:1,2:-1;3:1"], 0),
        (&["op", "pi-lower", "--psi", "indicator:evens", "--budget", "50"], 2),
        (&["op", "kernel-check", "--rows", "3", "--window", "8"], 0),
    ];
    for (args, expected) in cases {
        let out = tfsets(args);
        assert_eq!(code(&out), *expected, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        report(&out);
    }
}

#[test]
fn reports_are_byte_reproducible() {
    for args in [
        &["op", "pi-lower", "--psi", "harmonic", "--budget", "100", "--seed", "7"][..],
        &["build", "appendix", "--tau", "0.9", "--budget", "100", "--seed", "3"],
        &["density", "witness", "--set", "evens", "--eps", "1/3", "--window", "2000", "--depth", "2"],
    ] {
        let (x, y) = (tfsets(args), tfsets(args));
        assert_eq!(x.stdout, y.stdout, "{args:?}");
        assert!(!x.stdout.is_empty());
    }
}

#[test]
fn seed_is_recorded() {
    let v: Value = serde_json::from_slice(&tfsets(&["set", "info", "--set", "evens", "--seed", "42"]).stdout).unwrap();
    assert_eq!(v["seed"], 42);
    assert_eq!(v["config"]["resolved"]["set"]["kind"], "eventually-periodic");
}

#[test]
fn csv_columns() {
    let cases: &[(&[&str], &str)] = &[
        (&["set", "materialize", "--set", "evens", "--window", "7"], "element\n0\n2\n4\n6\n"),
        (&["density", "profile", "--set", "evens", "--window", "64", "--d", "1,2"], "d,maxcount,ratio\n1,1,1\n2,1,1/2\n"),
        (&["op", "column", "--psi", "indicator:evens", "--j", "2", "--window", "3"], "k,value\n0,1\n1,0\n2,1/2\n"),
    ];
    for (args, expected) in cases {
        let mut full = args.to_vec();
        full.extend(["--format", "csv"]);
        let out = tfsets(&full);
        assert_eq!(code(&out), 0);
        assert_eq!(String::from_utf8(out.stdout).unwrap(), *expected);
    }
    for (args, header) in [
        (&["tf", "profile", "--set", "evens", "--nmax", "2"][..], "n,count,truncated"),
        (&["density", "schedule", "--eps", "1/2"], "d,a,n"),
        (&["op", "wc-diagnostic", "--psi", "harmonic", "--eps", "1/3"], "eps,verdict,exact,level_set"),
        (&["op", "kernel-check", "--rows", "2"], "j,head_max,tail_max,decays"),
    ] {
        let mut full = args.to_vec();
        full.extend(["--format", "csv"]);
        let out = tfsets(&full);
        assert_eq!(code(&out), 0, "{args:?}");
        assert_eq!(String::from_utf8(out.stdout).unwrap().lines().next(), Some(header));
    }
}

#[test]
fn csv_without_table_is_an_error() {
    let out = tfsets(&["set", "info", "--set", "evens", "--format", "csv"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}

#[test]
fn bad_input_exits_one() {
    for args in [
        &["tf", "witness", "--set", "no-such-set"][..],
        &["density", "schedule", "--eps", "3/2"],
        &["tf", "exact", "--set", "primes"],
        &["op", "column", "--psi", "constant:x", "--j", "1"],
    ] {
        let out = tfsets(args);
        assert_eq!(code(&out), 1, "{args:?}");
        assert!(out.stdout.is_empty());
    }
}

#[test]
fn text_format_names_status_and_seed() {
    let out = tfsets(&["tf", "witness", "--set", "powers2", "--depth", "3", "--window", "4096", "--format", "text"]);
    assert_eq!(code(&out), 2);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("tfsets "));
    assert!(text.lines().next().unwrap().ends_with("tf witness: None (seed 0)"));
}

#[test]
fn out_dir_gets_a_copy() {
    let dir = std::env::temp_dir().join(format!("tfsets-cli-test-{}", std::process::id()));
    let out = Command::new(env!("CARGO_BIN_EXE_tfsets"))
        .args(["density", "schedule", "--eps", "1/2", "--out-dir"])
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    let written = std::fs::read(dir.join("density-schedule.json")).unwrap();
    assert_eq!(written, out.stdout);
    std::fs::remove_dir_all(&dir).unwrap();
}
