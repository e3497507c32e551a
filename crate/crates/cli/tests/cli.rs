use serde_json::Value;
use std::path::PathBuf;
use std::process::{Command, Output};

fn input(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../inputs").join(name)
}

fn kanrw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kanrw")).args(args).env_remove("KANRW_LIMIT").output().unwrap()
}

fn run(args: &[&str]) -> (i32, String) {
    let out = kanrw(args);
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let (code, out) = run(&all);
    assert_eq!(code, 0, "{args:?}");
    serde_json::from_str(&out).unwrap()
}

fn path(name: &str) -> String {
    input(name).to_string_lossy().into_owned()
}

#[test]
fn kan_complete_lists_nine_rules() {
    let (code, out) = run(&["kan", "complete", &path("kan_example.json")]);
    assert_eq!(code, 0);
    assert!(out.starts_with("9 rules:\n"));
    assert!(out.contains("  x3|b4 -> x1|id\n"));
    assert!(out.contains("  b1b2b3 -> b4\n"));
}

#[test]
fn enumeration_overflow_is_success() {
    let v = json(&["kan", "enumerate", &path("kan_example.json")]);
    assert_eq!(v["overflow"], true);
    assert_eq!(v["limit"], 1000);
    assert_eq!(v["rules"].as_array().unwrap().len(), 9);
    let out = Command::new(env!("CARGO_BIN_EXE_kanrw"))
        .args(["kan", "enumerate", &path("kan_example.json")])
        .env("KANRW_LIMIT", "20")
        .output()
        .unwrap();
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("enumeration limit of 20 exceeded"));
}

#[test]
fn special_cases() {
    let v = json(&["coset", &path("coset_b.json")]);
    assert_eq!(v["elements"]["*"], serde_json::json!(["H|id", "H|c"]));
    let v = json(&["orbit", &path("orbit_s3.json")]);
    assert_eq!(v["rules"], serde_json::json!(["w|id -> v|id", "x|id -> v|id", "z|id -> y|id"]));
    let v = json(&["conjugacy", &path("conjugacy_q8.json")]);
    assert_eq!(v["elements"]["*"].as_array().unwrap().len(), 5);
    let v = json(&["colimit", &path("coequaliser.json")]);
    assert_eq!(v["rules"].as_array().unwrap().len(), 4);
    // a special case under the wrong command is a validation error
    assert_eq!(run(&["orbit", &path("coset_b.json")]).0, 3);
}

#[test]
fn regex_for_an_object() {
    let v = json(&["kan", "regex", &path("kan_example.json"), "--object", "B3"]);
    assert_eq!(v["object"], "B3");
    assert!(v["regex"].as_str().unwrap().contains("b2"));
    assert_eq!(run(&["kan", "regex", &path("kan_example.json"), "--object", "Q"]).0, 3);
}

#[test]
fn kb_complete_groupoid_and_group() {
    let v = json(&["kb", "complete", &path("s3_groupoid.json")]);
    assert_eq!(v["rules"].as_array().unwrap().len(), 36);
    let v = json(&["kb", "complete", &path("s3.json")]);
    assert_eq!(v["complete"], true);
}

#[test]
fn machines() {
    let v = json(&["moore", &path("moore_example.json")]);
    assert_eq!(v["states"].as_array().unwrap().len(), 16);
    assert_eq!(v["transitions"].as_array().unwrap().len(), 26);
    let v = json(&["cayley", &path("d8.json"), "--word", "aba^3b"]);
    assert_eq!(v["elements"].as_array().unwrap().len(), 8);
    assert_eq!(v["normal_form"], "a^2");
    assert_eq!(run(&["cayley", &path("d8.json"), "--word", "axb"]).0, 2);
}

#[test]
fn algebras() {
    let v = json(&["ncgb", &path("hecke.json")]);
    assert_eq!(v["dimension"]["dimension"], 6);
    // the stated relations are not a Gröbner basis; completion collapses the algebra
    let v = json(&["ncgb", &path("infinite_algebra.json")]);
    assert_eq!(v["basis"][0], "b*a - a*b");
    assert_eq!(v["dimension"]["dimension"], 8);
    let (code, out) = run(&["ncreduce", &path("hecke.json"), "--poly", "e1*e1*e1"]);
    assert_eq!(code, 0);
    assert!(out.contains("e1*e2*e1*e2*e1 -> 7/9 e1*e2*e1 + 2/9 e1\n"));
    assert!(out.contains("e1*e1*e1 -> e1\n"));
    assert_eq!(run(&["ncreduce", &path("hecke.json"), "--poly", "e3"]).0, 2);
}

#[test]
fn idrel_records() {
    let v = json(&["idrel", &path("s3.json")]);
    assert_eq!(v["idents"].as_array().unwrap().len(), 18);
    assert_eq!(v["isIdsRecord"], true);
    for key in ["free", "rels", "elF", "K"] {
        assert!(v.get(key).is_some());
    }
    let v = json(&["idrel", &path("q8.json")]);
    assert_eq!(v["idents"].as_array().unwrap().len(), 32);
}

#[test]
fn exit_statuses() {
    let dir = std::env::temp_dir().join(format!("kanrw-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    assert_eq!(run(&["kan", "complete", &bad.to_string_lossy()]).0, 2);
    assert_eq!(run(&["kan", "complete", "/nonexistent/input.json"]).0, 2);
    let mut raw: Value = serde_json::from_str(&std::fs::read_to_string(input("kan_example.json")).unwrap()).unwrap();
    raw["F_arrows"][0] = serde_json::json!(["b4"]);
    let invalid = dir.join("invalid.json");
    std::fs::write(&invalid, raw.to_string()).unwrap();
    assert_eq!(run(&["kan", "complete", &invalid.to_string_lossy()]).0, 3);
    let (code, out) = run(&["kan", "complete", &path("kan_example.json"), "--max-rules", "3"]);
    assert_eq!(code, 4);
    assert!(out.starts_with("partial system"));
    assert_ne!(kanrw(&["kan", "complete", &path("kan_example.json"), "--limit", "0"]).status.code(), Some(0));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn output_is_deterministic() {
    for args in [
        vec!["kan", "complete", "kan_example.json"],
        vec!["idrel", "q8.json"],
        vec!["moore", "moore_example.json"],
        vec!["ncgb", "hecke.json"],
    ] {
        let mut args: Vec<String> = args.iter().map(|s| s.to_string()).collect();
        let last = args.len() - 1;
        args[last] = path(&args[last]);
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let a = kanrw(&args).stdout;
        assert_eq!(a, kanrw(&args).stdout);
        let mut j = args.clone();
        j.extend(["--format", "json"]);
        let text = String::from_utf8(kanrw(&j).stdout).unwrap();
        let v: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(serde_json::to_string_pretty(&v).unwrap() + "\n", text);
    }
}
