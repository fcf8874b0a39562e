use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use jsonschema::JSONSchema;
use serde_json::Value;

fn pancake(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pancake"))
        .args(args)
        .env_remove("PANCAKE_THREADS")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn schema() -> JSONSchema {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schema/run-report.schema.json");
    let raw: Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    JSONSchema::compile(&raw).expect("schema compiles")
}

/// Runs with `--json`, checks the report against the schema and returns it.
fn report(args: &[&str]) -> (i32, Value) {
    let mut full = args.to_vec();
    full.push("--json");
    let out = pancake(&full);
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    let v: Value =
        serde_json::from_str(&text).unwrap_or_else(|e| panic!("{args:?}: not JSON ({e}): {text}"));
    let schema = schema();
    if let Err(errors) = schema.validate(&v) {
        let msgs: Vec<String> = errors
            .map(|e| format!("{} at {}", e, e.instance_path))
            .collect();
        panic!("{args:?}: schema violations {msgs:?}");
    }
    assert_eq!(v["exit_code"].as_i64().unwrap() as i32, code(&out));
    (code(&out), v)
}

#[test]
fn bounds_json() {
    let (c, v) = report(&["bounds", "20"]);
    assert_eq!(c, 0);
    assert_eq!(v["results"]["best"], 10);
    assert_eq!(v["results"]["best_equation"], "7");
    let rows = v["results"]["rows"].as_array().unwrap();
    let value = |eq: &str| rows.iter().find(|r| r["equation"] == eq).unwrap()["value"].clone();
    assert_eq!(value("6"), 12);
    assert_eq!(value("3"), 14);
    assert!(v["timing"]["total"].as_f64().unwrap() >= 0.0);
}

#[test]
fn color_verify_equitable() {
    let (c, v) = report(&["color", "6", "--method", "equitable-nm1", "--verify"]);
    assert_eq!(c, 0);
    let r = &v["results"]["verify"];
    assert_eq!(r["proper"], true);
    assert_eq!(
        r["class_sizes"],
        serde_json::json!([144, 144, 144, 144, 144])
    );
    assert!(v["results"].get("written").is_none());
}

#[test]
fn constant_coloring_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad-coloring.txt");
    let mut body = String::from("pancake-coloring n=5 k=1\n");
    for r in 0..120 {
        body.push_str(&format!("{r} 1\n"));
    }
    fs::write(&path, body).unwrap();
    let (c, v) = report(&["verify", "5", path.to_str().unwrap()]);
    assert_eq!(c, 1);
    assert_eq!(v["results"]["verify"]["proper"], false);
    assert_eq!(v["results"]["verify"]["violations"], 240);
    // table mode agrees
    assert_eq!(code(&pancake(&["verify", "5", path.to_str().unwrap()])), 1);
}

#[test]
fn color_then_verify_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let cases: &[(&str, &[&str])] = &[
        ("5", &["--method", "parity4"]),
        ("6", &["--method", "parity4"]),
        ("7", &["--method", "parity4"]),
        ("4", &["--method", "equitable-nm1"]),
        ("7", &["--method", "equitable-nm1"]),
        ("5", &["--method", "first-element"]),
        ("7", &["--method", "compose", "--blocks", "4,3"]),
        ("8", &["--method", "compose", "--blocks", "1,2,5"]),
    ];
    for (i, (n, args)) in cases.iter().enumerate() {
        let file = dir.path().join(format!("c{i}.txt"));
        let mut color = vec!["color", n];
        color.extend_from_slice(args);
        color.extend_from_slice(&["--out", file.to_str().unwrap()]);
        let (c, v) = report(&color);
        assert_eq!(c, 0, "{color:?}");
        assert_eq!(v["results"]["written"], file.to_str().unwrap());
        let (c, v) = report(&["verify", n, file.to_str().unwrap()]);
        assert_eq!(c, 0, "{color:?}");
        assert_eq!(v["results"]["verify"]["proper"], true);
    }
}

#[test]
fn compose_with_supplied_base() {
    let dir = tempfile::tempdir().unwrap();
    let base = dir.path().join("p8.txt");
    let out = pancake(&[
        "color",
        "8",
        "--method",
        "first-element",
        "--out",
        base.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let (c, v) = report(&[
        "verify",
        "9",
        "--builtin",
        "compose",
        "--blocks",
        "8,1",
        "--base",
        base.to_str().unwrap(),
    ]);
    assert_eq!(c, 0);
    assert_eq!(v["results"]["coloring"]["k"], 9);
    assert_eq!(v["results"]["verify"]["proper"], true);
}

#[test]
fn table_mode_streams_coloring_to_stdout() {
    let out = pancake(&["color", "4", "--method", "equitable-nm1"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "pancake-coloring n=4 k=3");
    assert_eq!(lines.len(), 25);
    assert!(String::from_utf8(out.stderr)
        .unwrap()
        .contains("pancake color"));
}

#[test]
fn perfect_flag() {
    let (_, v) = report(&["verify", "5", "--builtin", "first-element", "--perfect"]);
    assert_eq!(v["results"]["verify"]["perfect"], true);
    let (c, v) = report(&["verify", "6", "--builtin", "equitable-nm1", "--perfect"]);
    assert_eq!(c, 0);
    assert_eq!(v["results"]["verify"]["perfect"], false);
    assert!(v["results"]["verify"]["perfect_witness"].is_object());
}

#[test]
fn usage_errors_exit_64() {
    for args in [
        vec!["bogus"],
        vec!["color", "6"],
        vec!["color", "8", "--method", "parity4"],
        vec!["color", "7", "--method", "compose"],
        vec!["color", "7", "--method", "compose", "--blocks", "4,4"],
        vec!["color", "9", "--method", "compose", "--blocks", "9"],
        vec!["verify", "5"],
        vec!["verify", "5", "/nonexistent/coloring.txt"],
        vec!["domsets", "4", "-i", "2", "-j", "2"],
        vec!["exact-chi", "8"],
        vec!["search", "6", "-k", "0"],
        vec!["bounds", "1"],
        vec!["--threads", "0", "bounds", "5"],
    ] {
        let out = pancake(&args);
        assert_eq!(
            code(&out),
            64,
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(!out.stderr.is_empty());
    }
    assert_eq!(code(&pancake(&["--help"])), 0);
    assert_eq!(code(&pancake(&["--version"])), 0);
}

#[test]
fn verify_rejects_mismatched_n() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("c.txt");
    let out = pancake(&[
        "color",
        "5",
        "--method",
        "parity4",
        "--out",
        file.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(code(&pancake(&["verify", "6", file.to_str().unwrap()])), 64);
}

#[test]
fn domsets_members_and_certificates() {
    let out = pancake(&["domsets", "4", "-i", "2", "-j", "3"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().collect::<Vec<_>>(), vec!["[2143]", "[2413]"]);

    let (c, v) = report(&["domsets", "5"]);
    assert_eq!(c, 0);
    let sets = v["results"]["sets"].as_array().unwrap();
    assert_eq!(sets.len(), 5);
    assert!(sets
        .iter()
        .all(|s| s["independent"] == true && s["unique_domination"] == true));

    let (c, v) = report(&["domsets", "6", "--partition"]);
    assert_eq!(c, 0);
    assert_eq!(v["results"]["partition"]["parts"], 30);
    assert_eq!(v["results"]["partition"]["part_size"], 24);
}

#[test]
fn quotient_output() {
    let out = pancake(&["quotient", "4"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("p edge 12 18"));
    assert_eq!(text.lines().filter(|l| l.starts_with("e ")).count(), 18);
    assert!(text.lines().any(|l| l == "c (1,4) -> 1"));
    let (c, v) = report(&["quotient", "6"]);
    assert_eq!(c, 0);
    assert_eq!(v["results"]["vertices"], 30);
    assert_eq!(v["results"]["edges"], 75);
    assert_eq!(v["results"]["proper"], true);
}

#[test]
fn exact_chi_small() {
    let (c, v) = report(&["exact-chi", "4"]);
    assert_eq!(c, 0);
    assert_eq!(v["results"]["chi"], 3);
    let (c, v) = report(&["exact-chi", "5", "--max-nodes", "1"]);
    assert_eq!(c, 2);
    assert!(v["results"]["chi"].is_null());
}

#[test]
fn search_writes_verified_witness() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("s.txt");
    let (c, v) = report(&[
        "search",
        "5",
        "-k",
        "3",
        "--seed",
        "7",
        "--out",
        file.to_str().unwrap(),
    ]);
    assert_eq!(c, 0);
    assert_eq!(v["results"]["outcome"]["status"], "colored");
    assert_eq!(v["results"]["verify"]["proper"], true);
    assert_eq!(code(&pancake(&["verify", "5", file.to_str().unwrap()])), 0);

    let (c, v) = report(&[
        "search",
        "4",
        "-k",
        "2",
        "--timeout",
        "0.3",
        "--workers",
        "1",
    ]);
    assert_eq!(c, 2);
    assert_eq!(v["results"]["outcome"]["status"], "timeout");

    let (c, v) = report(&["search", "4", "-k", "2", "--mode", "complete"]);
    assert_eq!(c, 0);
    assert_eq!(v["results"]["outcome"]["status"], "unsat");

    let (c, v) = report(&["search", "8", "-k", "4", "--mode", "invariant"]);
    assert_eq!(c, 0);
    assert_eq!(v["results"]["mode"], "invariant");
    assert_eq!(v["results"]["verify"]["proper"], true);
    assert_eq!(
        code(&pancake(&["search", "6", "-k", "4", "--mode", "invariant"])),
        64
    );
}

#[test]
fn export_dimacs() {
    let out = pancake(&["export-dimacs", "3"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("p edge 6 6\n"));
    assert_eq!(code(&pancake(&["export-dimacs", "3", "--json"])), 64);
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("p4.col");
    let (c, v) = report(&["export-dimacs", "4", "--out", file.to_str().unwrap()]);
    assert_eq!(c, 0);
    assert_eq!(v["results"]["edges"], 36);
    assert_eq!(fs::read_to_string(file).unwrap().lines().count(), 37);
}

#[test]
fn thread_selection() {
    let out = Command::new(env!("CARGO_BIN_EXE_pancake"))
        .args(["bounds", "9", "--json"])
        .env("PANCAKE_THREADS", "3")
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["inputs"]["threads"], 3);
    let (_, v) = report(&["--threads", "2", "bounds", "9"]);
    assert_eq!(v["inputs"]["threads"], 2);
}
