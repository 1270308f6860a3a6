use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn tauflat(args: &[&str]) -> Output {
    let args: Vec<String> = args
        .iter()
        .map(|a| if a.contains('.') && !a.starts_with('-') { data(a).display().to_string() } else { a.to_string() })
        .collect();
    Command::new(env!("CARGO_BIN_EXE_tauflat")).args(&args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn analyze_d4_passes() {
    let o = tauflat(&["analyze", "d4.alg", "total4.cong"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("strongly abelian: pass (bound 4)"));
}

#[test]
fn analyze_s2_fails_abelian() {
    let o = tauflat(&["analyze", "s2.alg", "total2.cong"]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.contains("abelian: FAIL"));
    assert!(out.contains("abelian=FAIL\n"));
}

#[test]
fn radical_of_w8_is_total() {
    let o = tauflat(&["radical", "w8.alg", "--arity-bound", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("candidate={0,1,2,3,4,5,6,7}\n"));
}

#[test]
fn boxmaps_of_d4() {
    let o = tauflat(&["boxmaps", "d4.alg", "total4.cong"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("k=2\n"));
    assert!(out.contains("violation=none\n"));
}

#[test]
fn flat_dump_feeds_check_unary() {
    let dir = std::env::temp_dir().join(format!("tauflat-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let dump = dir.join("d4.flat");
    let report = dir.join("report.txt");
    let o = tauflat(&[
        "flat",
        "d4.alg",
        "total4.cong",
        "--out",
        dump.to_str().unwrap(),
        "--report",
        report.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("sizes=2,2\n"));
    assert_eq!(std::fs::read_to_string(&report).unwrap(), stdout(&o));
    let o = tauflat(&["check-unary", dump.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("unary=yes\n"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn interpret_exit_codes() {
    let o = tauflat(&["interpret", "w8_shifted.alg", "total8.cong", "path.graph"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("isomorphic=true\n"));

    let o = tauflat(&["interpret", "d4.alg", "total4.cong", "edge.graph"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not applicable"));

    let o = tauflat(&["interpret", "w8_shifted.alg", "total8.cong", "isolated.graph"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("parse error"));
}

#[test]
fn interpret_w8_reports_mismatch() {
    let o = tauflat(&["interpret", "w8.alg", "total8.cong", "edge.graph"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("constants_not_propto=false\n"));
}

#[test]
fn resource_caps_exit_three() {
    let o = tauflat(&["boxmaps", "w8.alg", "total8.cong", "--max-tables", "10"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn missing_file_is_input_error() {
    let o = tauflat(&["radical", "no-such.alg"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn reports_are_deterministic() {
    let a = tauflat(&["boxmaps", "w8.alg", "total8.cong"]);
    let b = tauflat(&["boxmaps", "w8.alg", "total8.cong"]);
    assert_eq!(a.stdout, b.stdout);
}
