use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;
use szabo_lab::parse_connection_file;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn run(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_szabo-lab")).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap())
}

fn run_json(args: &[&str]) -> (i32, Value) {
    let mut all = args.to_vec();
    all.push("--json");
    let (code, text) = run(&all);
    assert!(text.ends_with('\n'));
    (code, serde_json::from_str(&text).unwrap())
}

fn write_temp(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("szabo-lab-tests-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn quadratic_example_is_cyclic_parallel_but_not_szabo() {
    let f = fixture("family2_quadratic.conn");
    let (code, v) = run_json(&["check-szabo", f.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(v["cyclic"]["cyclic_parallel"], true);
    assert_eq!(v["szabo"]["is_szabo"], false);
    assert_eq!(v["szabo"]["failing_coefficient"]["degree"], 1);
}

#[test]
fn flat_extension_is_the_pairing() {
    let f = fixture("flat.conn");
    let (code, v) = run_json(&["extend", f.to_str().unwrap()]);
    assert_eq!(code, 0);
    let metric = v["extension"]["metric"].as_array().unwrap();
    let pairs: Vec<(u64, u64, &str)> = metric
        .iter()
        .map(|e| (e["i"].as_u64().unwrap(), e["j"].as_u64().unwrap(), e["expr"].as_str().unwrap()))
        .collect();
    assert_eq!(pairs, vec![(1, 4, "1"), (2, 5, "1"), (3, 6, "1")]);
    assert_eq!(v["extension"]["is_szabo"], true);
}

#[test]
fn linear_extension_metric_components() {
    let f = fixture("family1_linear.conn");
    let (code, v) = run_json(&["extend", f.to_str().unwrap()]);
    assert_eq!(code, 0);
    let find = |i: u64, j: u64| {
        v["extension"]["metric"]
            .as_array()
            .unwrap()
            .iter()
            .find(|e| e["i"] == i && e["j"] == j)
            .map(|e| e["expr"].as_str().unwrap().to_string())
    };
    assert_eq!(find(1, 1).as_deref(), Some("-2*x1*x4"));
    assert_eq!(find(1, 2).as_deref(), Some("-4*x3*x4"));
    assert_eq!(find(1, 3).as_deref(), Some("4*x2*x4"));
    assert_eq!(find(2, 2), None);
    assert_eq!(v["extension"]["char_poly"], "lambda^6");
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["ok"] == true));
}

#[test]
fn reports_are_byte_identical_and_sorted() {
    let f = fixture("family1_linear.conn");
    let a = run(&["full", f.to_str().unwrap(), "--json"]);
    let b = run(&["full", f.to_str().unwrap(), "--json"]);
    assert_eq!(a, b);
    assert_eq!(a.0, 0);
    let keys: Vec<&str> = a
        .1
        .lines()
        .filter(|l| l.starts_with("  \"") && !l.starts_with("   "))
        .map(|l| l.trim().split('"').nth(1).unwrap())
        .collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
}

#[test]
fn opaque_functions_are_accepted() {
    let f = fixture("separated_shape.conn");
    let (code, v) = run_json(&["check-cyclic", f.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(v["cyclic"]["cyclic_parallel"], true);
}

#[test]
fn text_output_by_default() {
    let f = fixture("family1_linear.conn");
    let (code, text) = run(&["check-cyclic", f.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(text.contains("cyclic parallel Ricci: yes"), "{text}");
}

#[test]
fn parse_errors_exit_with_two() {
    let p = write_temp("bad.conn", "dim 3\nG[1,1,1] = x1 + y\n");
    let (code, v) = run_json(&["check-cyclic", p.to_str().unwrap()]);
    assert_eq!(code, 2);
    let msg = v["error"].as_str().unwrap();
    assert!(msg.contains("line 2, column 17"), "{msg}");
}

#[test]
fn torsion_is_an_error() {
    let p = write_temp("torsion.conn", "dim 2\ntorsion_free false\nG[1,2,1] = x1\n");
    let (code, v) = run_json(&["check-szabo", p.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert_eq!(v["torsion_free"], false);
}

#[test]
fn extension_dimension_is_capped() {
    let p = write_temp("big.conn", "dim 5\n");
    let (code, v) = run_json(&["extend", p.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(v["error"].as_str().unwrap().contains("base dimension 4"));
    let (code, _) = run_json(&["check-szabo", p.to_str().unwrap()]);
    assert_eq!(code, 0);
}

#[test]
fn out_flag_writes_the_report() {
    let f = fixture("flat.conn");
    let out = std::env::temp_dir().join(format!("szabo-lab-out-{}.json", std::process::id()));
    let (code, stdout) = run(&["check-szabo", f.to_str().unwrap(), "--json", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["szabo"]["is_szabo"], true);
    let _ = std::fs::remove_file(out);
}

#[test]
fn missing_file_is_an_error() {
    let (code, _) = run(&["check-szabo"]);
    assert_eq!(code, 2);
}

#[test]
fn verify_paper_passes() {
    let (code, v) = run_json(&["verify-paper", "--samples", "20", "--seed", "7"]);
    assert_eq!(code, 0, "{v}");
    assert!(v["checks"].as_array().unwrap().len() > 100);
}

#[test]
fn fixtures_round_trip_through_printing() {
    for name in ["family1_linear.conn", "family2_quadratic.conn", "flat.conn", "separated_shape.conn"] {
        let text = std::fs::read_to_string(fixture(name)).unwrap();
        let spec = parse_connection_file(&text).unwrap();
        assert_eq!(parse_connection_file(&spec.to_text()).unwrap(), spec, "{name}");
    }
}
