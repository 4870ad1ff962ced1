//! End-to-end checks of the command-line interface via the built binary.

use std::path::Path;
use std::process::{Command, Output};

fn baryolson(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_baryolson"))
        .args(args)
        .current_dir(dir)
        .env_remove("BARYOLSON_CACHE")
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

#[test]
fn compute_examples() {
    let dir = tempfile::tempdir().unwrap();
    let out = baryolson(&["compute", "--group", "7", "--k", "4"], dir.path());
    assert!(out.status.success());
    assert!(stdout(&out).contains("BO(4, Z/7) = 5"));

    let out = baryolson(&["compute", "--group", "2,2", "--k", "3"], dir.path());
    assert!(stdout(&out).contains("= 5"));

    let out = baryolson(&["compute", "--group", "11", "--k", "2"], dir.path());
    assert!(stdout(&out).contains("= 12"));
}

#[test]
fn compute_uses_and_fills_the_cache() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache.csv");
    let cache_arg = cache.to_str().unwrap();

    let args = ["compute", "--group", "13", "--k", "6", "--cache", cache_arg];
    let cold = baryolson(&args, dir.path());
    assert!(cold.status.success());
    assert!(stdout(&cold).contains("= 8"));
    assert!(stdout(&cold).contains("[exhaustive]"));

    let text = std::fs::read_to_string(&cache).unwrap();
    assert!(text.starts_with("# format: baryolson-cache-v1\n"));
    assert!(text.contains("13;6;8;"));

    let warm = baryolson(&args, dir.path());
    assert!(stdout(&warm).contains("= 8"));
    assert!(stdout(&warm).contains("[cached]"));
}

#[test]
fn compute_json_format() {
    let dir = tempfile::tempdir().unwrap();
    let out = baryolson(
        &["compute", "--p", "7", "--k", "3", "--format", "json"],
        dir.path(),
    );
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["value"], 4);
    assert_eq!(doc["witness"], serde_json::json!(["0", "1", "3"]));
    assert_eq!(doc["method"], "exhaustive");
}

#[test]
fn compute_budget_exhaustion_is_exit_code_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = baryolson(
        &["compute", "--p", "13", "--k", "4", "--node-budget", "5"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("inconclusive"), "stderr: {err}");
}

#[test]
fn construct_examples() {
    let dir = tempfile::tempdir().unwrap();
    let out = baryolson(
        &["construct", "--method", "lb", "--n", "11", "--k", "4"],
        dir.path(),
    );
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["elements"], serde_json::json!(["0", "1", "2", "3"]));
    assert_eq!(doc["verified"], true);

    let out = baryolson(&["construct", "--method", "th8", "--p", "11"], dir.path());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["elements"].as_array().unwrap().len(), 6);

    let out = baryolson(
        &[
            "construct", "--method", "behrend", "--n", "1000", "--k", "3", "--m", "2",
        ],
        dir.path(),
    );
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["params"]["d"], 9);
    assert_eq!(doc["params"]["r"], 25);
    assert_eq!(doc["elements"].as_array().unwrap().len(), 4);

    // precondition violations name the violated condition
    let out = baryolson(
        &["construct", "--method", "lb", "--n", "12", "--k", "4"],
        dir.path(),
    );
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("gcd"));

    let out = baryolson(&["construct", "--method", "th8", "--p", "7"], dir.path());
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("odd"));
}

#[test]
fn bounds_examples() {
    let dir = tempfile::tempdir().unwrap();
    let out = baryolson(
        &["bounds", "--p", "11", "--k", "5", "--format", "json"],
        dir.path(),
    );
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["exact"]["value"], 7);
    assert_eq!(doc["exact"]["tag"], "th8");

    let out = baryolson(&["bounds", "--p", "13", "--k", "5"], dir.path());
    let text = stdout(&out);
    assert!(text.contains("lower    6"));
    assert!(text.contains("upper    7"));
    assert!(text.contains("exact    -"));
}

#[test]
fn verify_suites_pass_and_unknown_suite_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out = baryolson(
        &["verify", "--suite", "corner", "--max-order", "8"],
        dir.path(),
    );
    assert!(out.status.success());
    assert!(stdout(&out).contains("0 failures"));

    let out = baryolson(
        &["verify", "--suite", "chi", "--max-prime", "7"],
        dir.path(),
    );
    assert!(out.status.success());

    let out = baryolson(
        &["verify", "--suite", "th8", "--max-prime", "23"],
        dir.path(),
    );
    assert!(out.status.success());
    assert!(stdout(&out).contains("BO(11, Z/23): exhaustive 12, formula 12"));

    let out = baryolson(&["verify", "--suite", "nonsense"], dir.path());
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown suite"));
}

#[test]
fn table_is_deterministic_and_matches_known_rows() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache.csv");
    let cache_arg = cache.to_str().unwrap();

    let args = [
        "table", "--max-prime", "13", "--cache", cache_arg, "--format", "csv",
    ];
    let cold = baryolson(&args, dir.path());
    assert!(cold.status.success());
    let cold_text = stdout(&cold);
    assert!(cold_text.contains("7;3;4;"));
    assert!(cold_text.contains("7;4;5;"));
    assert!(cold_text.contains("11;5;7;"));
    assert!(cold_text.contains("13;6;8;"));

    let warm = baryolson(&args, dir.path());
    assert_eq!(cold_text, stdout(&warm), "warm run must equal cold run");
}
