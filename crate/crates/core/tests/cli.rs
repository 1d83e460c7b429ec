use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use serde_json::Value;
use tempfile::TempDir;

const FIVE: &str = "(1:1,2:1,(3:1,4:1,5:1):2);";

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_treelike"))
        .args(args)
        .output()
        .unwrap()
}

fn run_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_treelike"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn family_json(n: usize, k: usize, entries: &[(Vec<usize>, &str)]) -> String {
    let entries: Vec<Value> = entries
        .iter()
        .map(|(i, d)| serde_json::json!({ "I": i, "D": d }))
        .collect();
    serde_json::json!({ "n": n, "k": k, "entries": entries }).to_string()
}

/// 3-weights of `FIVE` with optional overrides.
fn f5(overrides: &[(&[usize], &str)]) -> String {
    let mut entries = Vec::new();
    for a in 1..=5 {
        for b in a + 1..=5 {
            for c in b + 1..=5 {
                let i = vec![a, b, c];
                let d = overrides
                    .iter()
                    .find(|(s, _)| *s == i.as_slice())
                    .map(|(_, d)| *d)
                    .unwrap_or(if i == [3, 4, 5] { "3" } else { "5" });
                entries.push((i, d));
            }
        }
    }
    family_json(5, 3, &entries)
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn kweights_writes_families() {
    let dir = TempDir::new().unwrap();
    let tree = write(&dir, "t5.nwk", FIVE);
    let out_path = dir.path().join("f5.json");
    let out = run(&[
        "kweights",
        "--tree",
        &tree,
        "--k",
        "3",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc: Value = serde_json::from_str(&fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(doc, serde_json::from_str::<Value>(&f5(&[])).unwrap());

    let star = write(&dir, "star.nwk", "(1:1,2:1,3:1,4:1,5:1);");
    let doc = json(&run(&["kweights", "--tree", &star, "--k", "3"]));
    assert!(doc["entries"].as_array().unwrap().iter().all(|e| e["D"] == "3"));

    let out = run(&["kweights", "--tree", &tree, "--k", "5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
    assert_eq!(
        run(&["kweights", "--tree", &write(&dir, "bad.nwk", "(1:1,2:1"), "--k", "2"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn check_verdicts() {
    let dir = TempDir::new().unwrap();
    let out = run(&["check", "--family", &write(&dir, "f5.json", &f5(&[]))]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["tree"], FIVE);
    assert_eq!(v["ip_l_treelike"], true);
    assert_eq!(v["tau"]["1"], "3");
    assert!(v["witness"].is_null());

    let bad = write(&dir, "bad.json", &f5(&[(&[1, 2, 3], "6")]));
    let out = run(&["check", "--family", &bad, "--diagnostics"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["witness"]["indices"], serde_json::json!([1, 3, 4, 5]));
    assert_eq!(v["diagnostics"]["condition_i"]["status"], "fail");
    assert!(v["tree"].is_null());

    let mut missing: Value = serde_json::from_str(&f5(&[])).unwrap();
    missing["entries"].as_array_mut().unwrap().pop();
    let out = run(&["check", "--family", &write(&dir, "missing.json", &missing.to_string())]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing"));
}

#[test]
fn check_reads_stdin_and_writes_files() {
    let dir = TempDir::new().unwrap();
    let out_path = dir.path().join("verdict.json");
    let out = run_stdin(
        &["check", "--family", "-", "--out", out_path.to_str().unwrap()],
        &f5(&[]),
    );
    assert_eq!(out.status.code(), Some(0));
    let first = fs::read(&out_path).unwrap();
    run_stdin(
        &["check", "--family", "-", "--out", out_path.to_str().unwrap()],
        &f5(&[]),
    );
    assert_eq!(fs::read(&out_path).unwrap(), first);
}

#[test]
fn reconstruct_outputs() {
    let dir = TempDir::new().unwrap();
    let out = run(&["reconstruct", "--family", &write(&dir, "f5.json", &f5(&[]))]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), FIVE);

    let out_path = dir.path().join("tree.nwk");
    let shifted = write(&dir, "g.json", &f5(&[(&[3, 4, 5], "4")]));
    let out = run(&["reconstruct", "--family", &shifted, "--out", out_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        fs::read_to_string(&out_path).unwrap().trim(),
        "(1:4/3,2:4/3,(3:4/3,4:4/3,5:4/3):1);"
    );

    let out = run(&[
        "reconstruct",
        "--family",
        &write(&dir, "bad.json", &f5(&[(&[1, 2, 3], "6")])),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("stage 2"));
}

#[test]
fn roundtrip_runs() {
    assert_eq!(
        run(&["roundtrip", "--n", "5", "--k", "3", "--trials", "100", "--seed", "1"])
            .status
            .code(),
        Some(0)
    );
    assert_eq!(
        run(&["roundtrip", "--n", "7", "--k", "4", "--trials", "50", "--seed", "2"])
            .status
            .code(),
        Some(0)
    );
    assert_eq!(
        run(&["roundtrip", "--n", "5", "--k", "5", "--trials", "10", "--seed", "1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["roundtrip", "--n", "10", "--k", "4", "--trials", "1", "--seed", "1"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn oracle_lists_realizations() {
    let dir = TempDir::new().unwrap();
    let out = run(&["oracle", "--family", &write(&dir, "f5.json", &f5(&[]))]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let found = v["realizations"].as_array().unwrap();
    assert_eq!(found.len(), 1);
    assert_eq!(found[0]["tree"], FIVE);
    assert_eq!(found[0]["pseudostar"], true);

    let t4 = family_json(
        4,
        3,
        &[
            (vec![1, 2, 3], "11"),
            (vec![1, 2, 4], "12"),
            (vec![1, 3, 4], "13"),
            (vec![2, 3, 4], "14"),
        ],
    );
    let v = json(&run(&["oracle", "--family", &write(&dir, "t4.json", &t4)]));
    let found = v["realizations"].as_array().unwrap();
    assert_eq!(found.len(), 4);
    let star: Vec<_> = found.iter().filter(|r| r["unique"] == true).collect();
    assert_eq!(star.len(), 1);
    assert_eq!(star[0]["tree"], "(1:8/3,2:11/3,3:14/3,4:17/3);");
    assert!(found
        .iter()
        .filter(|r| r["unique"] == false)
        .all(|r| r["pseudostar"] == false));

    let big: Vec<(Vec<usize>, &str)> = (1..=9)
        .flat_map(|a| (a + 1..=9).map(move |b| (vec![a, b], "2")))
        .collect();
    assert_eq!(
        run(&["oracle", "--family", &write(&dir, "big.json", &family_json(9, 2, &big))])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn check_and_oracle_exit_codes_agree() {
    let dir = TempDir::new().unwrap();
    for (name, text) in [
        ("a", f5(&[])),
        ("b", f5(&[(&[1, 2, 3], "6")])),
        ("c", f5(&[(&[1, 2, 4], "7")])),
        ("d", f5(&[(&[2, 4, 5], "-1/2")])),
    ] {
        let path = write(&dir, &format!("{name}.json"), &text);
        let check = run(&["check", "--family", &path]).status.code();
        let oracle = run(&["oracle", "--family", &path]).status.code();
        assert_eq!(check, oracle, "family {name}");
    }
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["check"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        run(&["check", "--family", Path::new("/nonexistent/f.json").to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}
