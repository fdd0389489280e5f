use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::Arc;

use dectopos::builtins::builtin;
use dectopos::fincat::{catalog, CATALOG_NAMES};
use dectopos::format::{parse_category, parse_presheaf, serialize_presheaf};
use dectopos::Error;
use serde_json::Value;

fn data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

fn run(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_dectopos"))
        .args(args)
        .env_remove("DECTOPOS_JOBS")
        .output()
        .unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

fn run_json(args: &[&str]) -> (i32, Value) {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let (code, out) = run(&all);
    (code, serde_json::from_str(&out).unwrap_or(Value::Null))
}

fn words(line: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut quoted = false;
    for ch in line.chars() {
        match ch {
            '\'' => quoted = !quoted,
            ' ' if !quoted => {
                if !cur.is_empty() {
                    out.push(std::mem::take(&mut cur));
                }
            }
            c => cur.push(c),
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

#[test]
fn shipped_category_files_match_the_catalog() {
    for name in CATALOG_NAMES {
        let src = fs::read_to_string(data_dir().join(format!("{name}.cat"))).unwrap();
        let parsed = parse_category(&src).unwrap();
        assert_eq!(parsed.to_raw(), catalog(name).unwrap().to_raw(), "{name}");
    }
    let src = fs::read_to_string(data_dir().join("refgraph.cat")).unwrap();
    assert_eq!(parse_category(&src).unwrap().num_morphisms(), 7);
}

#[test]
fn shipped_p2_is_the_builtin() {
    let b = Arc::new(catalog("refgraph").unwrap());
    let src = fs::read_to_string(data_dir().join("p2.psh")).unwrap();
    let p2 = builtin(&b, "P2").unwrap();
    assert_eq!(parse_presheaf(&b, &src).unwrap(), p2);
    assert_eq!(serialize_presheaf(&p2), src);
}

#[test]
fn emitted_files_are_byte_identical_to_shipped_ones() {
    let dir = std::env::temp_dir().join(format!("dectopos-emit-{}", std::process::id()));
    let (code, _) = run(&["catalog", "--emit", dir.to_str().unwrap()]);
    assert_eq!(code, 0);
    let mut names: Vec<String> = fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert!(names.len() > CATALOG_NAMES.len());
    for name in names {
        let fresh = fs::read(dir.join(&name)).unwrap();
        let shipped = fs::read(data_dir().join(&name)).unwrap_or_default();
        assert_eq!(fresh, shipped, "{name}");
    }
    fs::remove_dir_all(dir).unwrap();
}

#[test]
fn unknown_morphism_is_a_parse_error_with_position() {
    let b = Arc::new(catalog("refgraph").unwrap());
    let src = "presheaf over refgraph\nset V : 0\nset E : l0\naction r : l0 -> 0\n";
    match parse_presheaf(&b, src) {
        Err(Error::Parse { line, col, .. }) => assert_eq!((line, col), (4, 8)),
        other => panic!("{other:?}"),
    }
    let path = std::env::temp_dir().join(format!("dectopos-bad-{}.psh", std::process::id()));
    fs::write(&path, src).unwrap();
    let (code, _) = run(&["pi", "--object", path.to_str().unwrap()]);
    fs::remove_file(&path).unwrap();
    assert_eq!(code, 2);
}

#[test]
fn object_files_select_their_base() {
    let p2 = data_dir().join("p2.psh");
    let (code, report) = run_json(&["pi", "--object", p2.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(report["base"], "refgraph");
    assert_eq!(report["value"]["points"], 1);
    let a1 = data_dir().join("a1.psh");
    let (code, report) = run_json(&["check-dqo", "--object", a1.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert_eq!(report["base"], "graph");
}

#[test]
fn category_files_work_as_bases() {
    let cat = data_dir().join("graph.cat");
    let (code, out) = run(&["check-ns", "--base", cat.to_str().unwrap(), "--bound", "2"]);
    assert_eq!(code, 1);
    assert!(out.contains("y(E) has no global element"), "{out}");
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["verify", "lemma", "--base", "refgraph", "--bound", "2"]).0, 0);
    let (code, out) = run(&["check-ns", "--base", "graph"]);
    assert_eq!(code, 1);
    assert!(out.contains("witness 1: y(E)"), "{out}");
    let (code, out) = run(&["subc", "--base", "two-discrete", "--object", "builtin:1"]);
    assert_eq!(code, 0);
    assert!(out.contains("4 complemented subobjects"));
    assert_eq!(run(&["no-such-command"]).0, 2);
    assert_eq!(run(&["pi"]).0, 2, "missing --object");
    assert_eq!(run(&["check-ns", "--bound", "0"]).0, 2);
    assert_eq!(run(&["check-ns", "--base", "nowhere"]).0, 2);
    assert_eq!(run(&["search-counterexample", "nonsense"]).0, 2);
    assert_eq!(run(&["--size-cap", "2", "check-dqo", "--object", "builtin:P2"]).0, 2);
    assert_eq!(run(&["precohesion", "--base", "graph", "--bound", "2"]).0, 1);
}

#[test]
fn failure_witnesses_recheck() {
    let failing: [&[&str]; 5] = [
        &["search-counterexample", "dqo", "--base", "graph", "--bound", "2"],
        &["search-counterexample", "dso", "--base", "two-discrete", "--bound", "2"],
        &["check-dqo", "--base", "graph", "--bound", "2"],
        &["check-dso", "--base", "two-discrete", "--object", "builtin:pair(1,0)"],
        &["check-ns", "--base", "graph", "--bound", "2"],
    ];
    for args in failing {
        let (code, report) = run_json(args);
        assert_eq!(code, 1, "{args:?}");
        let witnesses = report["witnesses"].as_array().unwrap();
        assert!(!witnesses.is_empty(), "{args:?}");
        for w in witnesses {
            let line = w["recheck"].as_str().unwrap();
            let ws = words(line);
            assert_eq!(ws[0], "dectopos");
            let rest: Vec<&str> = ws[1..].iter().map(String::as_str).collect();
            let (again, rerun) = run_json(&rest);
            assert_eq!(again, 1, "{line}");
            assert_eq!(rerun["verdict"], "fails", "{line}");
        }
    }
}

#[test]
fn corpus_objects_are_addressable() {
    let (code, report) = run_json(&["search-counterexample", "dqo", "--base", "graph", "--bound", "2"]);
    assert_eq!(code, 1);
    let i = report["witnesses"][0]["corpus_index"].as_u64().unwrap();
    let spec = format!("corpus:2:{i}");
    let (code, pi) = run_json(&["pi", "--base", "graph", "--object", &spec]);
    assert_eq!(code, 0);
    assert_eq!(pi["value"]["sizes"], serde_json::json!([1, 1]));
    assert_eq!(run(&["pi", "--base", "graph", "--object", "corpus:2:9999"]).0, 2);
}

#[test]
fn pneumo_and_valid() {
    for map in ["terminal", "pi-unit", "separated", "identity"] {
        let (code, _) = run(&["pneumo", "--base", "refgraph", "--object", "builtin:P2", "--map", map]);
        assert_eq!(code, 0, "{map}");
    }
    let (code, report) = run_json(&["pneumo", "--base", "refgraph", "--object", "builtin:D2"]);
    assert_eq!(code, 1);
    assert!(report["witnesses"][0]["description"].as_str().unwrap().contains("countermodel"));
    let (code, _) = run(&["valid", "--object", "builtin:P2", "all x : X . x = x"]);
    assert_eq!(code, 0);
    let (code, report) = run_json(&["valid", "--object", "builtin:D2", "all x : X . all y : X . x = y"]);
    assert_eq!(code, 1);
    assert!(report["witnesses"][0]["description"].as_str().unwrap().contains("countermodel"));
}

#[test]
fn verify_dispatches_every_target() {
    for t in ["A", "B", "C", "D", "lemma", "props"] {
        let (code, report) = run_json(&["verify", t, "--base", "refgraph", "--bound", "2"]);
        assert_eq!(code, 0, "{t}");
        assert_eq!(report["verdict"], "holds-at-bound", "{t}");
        assert!(!report["checks"].as_array().unwrap().is_empty(), "{t}");
    }
    let (code, report) = run_json(&["dec-topos", "--base", "refgraph", "--bound", "2"]);
    assert_eq!(code, 0);
    assert_eq!(report["verdict"], "holds-at-bound");
    let (code, report) = run_json(&["check-ns", "--base", "point"]);
    assert_eq!(code, 0);
    assert_eq!(report["timings"], Value::Null);
}
