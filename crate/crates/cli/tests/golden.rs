//! Runs the binary and compares stdout with tests/golden/<case>.out.
//! `SMOOTHABLE_BLESS=1 cargo test -p smoothable-cli` rewrites the files.

use std::path::PathBuf;
use std::process::Command;

fn dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests")
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_smoothable"))
        .args(args)
        .current_dir(dir())
        .env("SMOOTHABLE_THREADS", "2")
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn golden(case: &str, args: &[&str]) {
    let (code, stdout, stderr) = run(args);
    assert_eq!(code, 0, "{case}: {stderr}");
    let path = dir().join("golden").join(format!("{case}.out"));
    if std::env::var_os("SMOOTHABLE_BLESS").is_some() {
        std::fs::write(&path, &stdout).unwrap();
        return;
    }
    let want = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing {}", path.display()));
    assert_eq!(stdout, want, "{case} differs from {}", path.display());
}

#[test]
fn catalog_matrices() {
    for (case, tag) in [
        ("catalog_c5_1", "C:5,1"),
        ("catalog_c7_3", "C:7,3"),
        ("catalog_c9_3_011", "C:9,3,I=011"),
        ("catalog_y6", "Y:6"),
        ("catalog_y10", "Y:10"),
        ("catalog_z15", "Z:15"),
        ("catalog_x4", "X4"),
        ("catalog_x5", "X5"),
    ] {
        golden(case, &["catalog", tag]);
    }
    golden("catalog_x4_json", &["catalog", "X4", "--json"]);
    golden("catalog_n9", &["catalog", "-n", "9"]);
}

#[test]
fn diagrams() {
    golden("diagram_x4", &["diagram", "--tag", "X4"]);
    golden("diagram_x4_json", &["diagram", "--tag", "X4", "--format", "json"]);
    golden("diagram_c7_3_dot", &["diagram", "--tag", "C:7,3", "--format", "dot"]);
    golden("diagram_x4_tikz", &["diagram", "--tag", "X4", "--format", "tikz"]);
    golden("diagram_z15_svg", &["diagram", "--tag", "Z:15", "--format", "svg"]);
}

#[test]
fn classification() {
    golden("classify_y6_conjugated", &["classify", "--file", "data/y6_conjugated.txt"]);
    golden("classify_generic", &["classify", "--file", "data/generic5.json"]);
    golden("classify_c9_json", &["classify", "--tag", "C:9,3,I=011", "--json"]);
    golden("rank_x4", &["rank", "--tag", "X4"]);
    golden("rank_x5", &["rank", "--tag", "X5"]);
    golden("holonomic_c5_1", &["holonomic", "--tag", "C:5,1"]);
    golden("holonomic_generic", &["holonomic", "--file", "data/generic5.json"]);
}

#[test]
fn feigin_odesskii() {
    golden("fo_limit_5_2", &["fo", "limit", "-n", "5", "-k", "2"]);
    golden("fo_verify_5_2", &["fo", "verify", "-n", "5", "-k", "2"]);
    golden("fo_verify_7_3_json", &["fo", "verify", "-n", "7", "-k", "3", "--json"]);
    golden("fo_codim2_7_3", &["fo", "codim2", "-n", "7", "-k", "3"]);
    golden("fo_sweep_5_2", &["fo", "sweep", "-n", "5", "-k", "2", "--imtau", "4:7"]);
}

#[test]
fn deformations() {
    golden("deform_rho_x4_preset", &["deform", "rho", "--preset", "x4", "--edge", "0", "1"]);
    golden("deform_rho_x5_preset", &["deform", "rho", "--preset", "x5", "--edge", "4", "0"]);
    golden("deform_rho_c5_1", &["deform", "rho", "--tag", "C:5,1", "--edge", "1", "2"]);
    golden("deform_rho_file", &["deform", "rho", "--matrix", "data/y6_conjugated.txt", "--edge", "0", "4"]);
    golden("deform_check_x4", &["deform", "check", "x4"]);
    golden("deform_check_c41", &["deform", "check", "c41"]);
    golden("deform_check_x5", &["deform", "check", "x5"]);
    golden("deform_integrate_c41", &["deform", "integrate", "c41", "--xmax", "0.01", "--step", "1e-3"]);
}

#[test]
fn integrate_writes_csv_file() {
    let path = std::env::temp_dir().join(format!("smoothable-c41-{}.csv", std::process::id()));
    let p = path.to_str().unwrap();
    let (code, stdout, _) = run(&["deform", "integrate", "c41", "--csv", p]);
    assert_eq!(code, 0);
    assert!(stdout.starts_with("max_residual="));
    assert!(stdout.ends_with("samples=1001\n"));
    let csv = std::fs::read_to_string(&path).unwrap();
    assert_eq!(csv.lines().count(), 1002);
    assert_eq!(csv.lines().next(), Some("x,xi,eta,residual,pfaffian"));
    std::fs::remove_file(path).unwrap();
}

#[test]
fn exit_codes() {
    let (code, _, err) = run(&["frobnicate"]);
    assert_eq!(code, 2);
    assert!(err.contains("Usage"));
    assert_eq!(run(&["catalog", "X4", "--bogus"]).0, 2);
    assert_eq!(run(&["catalog", "C:4,2"]).0, 2);
    assert_eq!(run(&["fo", "limit", "-n", "4", "-k", "2"]).0, 2);
    assert_eq!(run(&["fo", "codim2", "-n", "5", "-k", "4"]).0, 2);
    assert_eq!(run(&["diagram", "--tag", "X4", "--format", "csv"]).0, 2);
    assert_eq!(run(&["rank", "--file", "data/missing.txt"]).0, 2);
    assert_eq!(run(&["deform", "rho", "--tag", "X4", "--edge", "0", "2"]).0, 2);
    assert_eq!(run(&["deform", "integrate", "x5"]).0, 2);
    assert_eq!(run(&["deform", "check", "x6"]).0, 2);
    assert_eq!(run(&["--help"]).0, 0);
}

#[test]
fn thread_variable_is_validated() {
    let out = Command::new(env!("CARGO_BIN_EXE_smoothable"))
        .args(["rank", "--tag", "X4"])
        .env("SMOOTHABLE_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn output_is_deterministic() {
    let args = ["fo", "sweep", "-n", "3", "-k", "1", "--imtau", "4:6"];
    let a = run(&args).1;
    let b = Command::new(env!("CARGO_BIN_EXE_smoothable")).args(args).env("SMOOTHABLE_THREADS", "1").output().unwrap();
    assert_eq!(a, String::from_utf8(b.stdout).unwrap());
}
