use contextua::cli::run_with;
use contextua::ksverify::{catalog_by_name, ObservableKsSet};

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("contextua").chain(args.iter().copied());
    let code = run_with(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

const PRE: &str = "+XII,+IXI,+IIX";
const POST: &str = "+YII,+IYI,+IIY";

#[test]
fn weak_value_csv() {
    let (code, out, _) = run(&["--format", "csv", "weak-values", "--set", "square3", "--pre", PRE, "--post", POST]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 25);
    assert_eq!(lines[0], "basis,w1,w2,w3,w4");
    assert_eq!(lines[1], "1,-0.5,0.5,0.5,0.5");
    assert_eq!(lines[7], "7,-0.5,0.5,1,0");
    assert_eq!(lines[10], "10,0.5,0.5,0,0");
    assert_eq!(lines[24], "24,0,0,1,0");
}

#[test]
fn output_is_byte_stable() {
    let args = ["--format", "json", "pigeonhole", "--set", "square3", "--pre", PRE, "--post", POST];
    assert_eq!(run(&args), run(&args));
}

#[test]
fn verify_exit_codes() {
    let (code, out, _) = run(&["verify", "--set", "square3"]);
    assert_eq!(code, 0);
    assert!(out.contains("KS_by_parity"));
    let (code, out, _) = run(&["verify", "--set", "wheel4"]);
    assert_eq!(code, 2);
    assert!(out.contains("parity fails: 4 negative IDs"));
    let (code, out, _) = run(&["verify", "--set", "square3", "--projectors", "--mode", "exhaustive"]);
    assert_eq!(code, 0);
    assert!(out.contains("KS_by_exhaustion"));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&["frobnicate"]).0, 1);
    assert_eq!(run(&["verify", "--set", "no_such_set"]).0, 1);
    assert_eq!(run(&["weak-values", "--set", "square3", "--pre", "+ZII,+IZI,+IIZ", "--post", "-ZII,+IZI,+IIZ"]).0, 1);
    assert_eq!(run(&["--help"]).0, 0);
}

#[test]
fn assign_without_conflicts() {
    let (code, _, _) = run(&["assign", "--set", "square3", "--pre", PRE, "--post", PRE]);
    assert_eq!(code, 0);
    let (code, _, _) = run(&["assign", "--set", "square3", "--pre", PRE, "--post", POST]);
    assert_eq!(code, 2);
}

#[test]
fn pigeonhole_json() {
    let (code, out, _) = run(&["--format", "json", "pigeonhole", "--set", "square3", "--pre", PRE, "--post", POST]);
    assert_eq!(code, 2);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["pigeonhole"], true);
    assert_eq!(v["max_conflict_projector"], 0);
}

#[test]
fn catalog_round_trip() {
    let (code, out, _) = run(&["--format", "json", "catalog", "square3"]);
    assert_eq!(code, 0);
    let parsed: ObservableKsSet = serde_json::from_str(&out).unwrap();
    assert_eq!(parsed, catalog_by_name("square3").unwrap());
    let path = std::env::temp_dir().join(format!("contextua-square3-{}.json", std::process::id()));
    std::fs::write(&path, &out).unwrap();
    let from_file = run(&["verify", "--set", path.to_str().unwrap()]);
    std::fs::remove_file(&path).ok();
    assert_eq!(from_file.0, 0);
    assert!(from_file.1.contains("KS_by_parity"));
}

#[test]
fn completed_generators_are_noted() {
    let (code, _, err) = run(&["weak-values", "--set", "square3", "--pre", "+XIX,+XXI,+IXX", "--post", POST]);
    assert_eq!(code, 0);
    assert!(!err.is_empty());
}

#[test]
fn even_wheel_orbit() {
    let (code, out, _) = run(&["orbit", "--structure", "wheel4", "--dense"]);
    assert!(code == 0 || code == 2, "exit {code}");
    assert!(out.contains("-0.5"));
}

#[test]
fn nonks_reports_conflict() {
    let (code, out, _) = run(&["--format", "json", "nonks", "--n", "4", "--index", "1"]);
    assert_eq!(code, 2);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["conflict"], true);
}

#[test]
fn oracle_sequence() {
    let (code, out, _) = run(&["oracle", "sequential", "--pre", PRE, "--post", POST, "--steps", "ZZI;ZIZ"]);
    assert_eq!(code, 0);
    assert!(out.contains("0.25"));
}

#[test]
fn mean_king_exit_codes() {
    let (code, _, _) = run(&["mean-king", "--set", "square3", "--pre", PRE, "--post", POST]);
    assert_eq!(code, 2);
    let (code, out, _) = run(&["mean-king", "--set", "yu_oh", "--search", "random", "--budget", "100"]);
    assert_eq!(code, 2);
    assert!(out.contains("4.333"));
}
