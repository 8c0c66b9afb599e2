use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_renyi-sc"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn renyi-sc")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

/// Fresh scratch directory per test.
fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("renyi-sc-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn instance(name: &str) -> String {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../instances").join(name);
    p.to_str().unwrap().to_string()
}

const MAX_MIXED_QUBIT: &str = r#"{"systems":[{"label":"A","dim":2}],"matrix":[[[0.5,0],[0,0]],[[0,0],[0.5,0]]]}"#;

#[test]
fn entropy_of_maximally_mixed_qubit() {
    let dir = scratch("entropy");
    let f = dir.join("pi.json");
    fs::write(&f, MAX_MIXED_QUBIT).unwrap();
    let o = run(&["entropy", "--input", f.to_str().unwrap(), "--alpha", "2"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "1.0");
}

#[test]
fn input_errors_exit_2() {
    let dir = scratch("errors");
    let bad = dir.join("bad.json");
    fs::write(&bad, r#"{"systems":[{"label":"A","dim":2}],"matrix":[[[1,0]]]}"#).unwrap();
    let o = run(&["entropy", "--input", bad.to_str().unwrap(), "--alpha", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bad.json"));

    let missing = dir.join("nope.json");
    let o = run(&["entropy", "--input", missing.to_str().unwrap(), "--alpha", "2"]);
    assert_eq!(o.status.code(), Some(2));

    let o = run(&["entropy", "--bogus"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_suite_passes_and_is_reproducible() {
    let args = ["verify", "--suite", "subadditivity", "--trials", "50", "--seed", "7", "--dims", "2,3"];
    let a = run(&args);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    let b = run(&args);
    let strip = |s: String| s.lines().filter(|l| !l.contains("runtime")).collect::<Vec<_>>().join("\n");
    assert_eq!(strip(stdout(&a)), strip(stdout(&b)));
}

#[test]
fn unknown_suite_is_a_usage_error() {
    let o = run(&["verify", "--suite", "no-such-suite"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn falsify_writes_both_witness_kinds() {
    let dir = scratch("falsify");
    let out = dir.join("ce");
    let o = run(&["falsify", "--trials", "2000", "--seed", "1", "--out-dir", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let names: Vec<String> =
        fs::read_dir(&out).unwrap().map(|e| e.unwrap().file_name().to_string_lossy().into_owned()).collect();
    assert!(names.iter().any(|n| n.starts_with("counterexample-left-")));
    assert!(names.iter().any(|n| n.starts_with("counterexample-right-")));
    assert!(names.iter().any(|n| n == "report.json"));
}

#[test]
fn simulate_checks_bounds() {
    for name in ["extraction.json", "compression.json", "merging.json"] {
        let o = run(&["simulate", "--instance", &instance(name), "--check-bounds", "0.51:0.99:5"]);
        assert!(o.status.success(), "{name}: {}", String::from_utf8_lossy(&o.stderr));
        let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
        assert_eq!(v["violations"].as_array().unwrap().len(), 0);
    }
}

#[test]
fn exponent_curve_csv_has_one_row_per_bound_and_order() {
    let o = run(&["exponent-curve", "--instance", &instance("extraction.json"), "--grid", "0.6:0.9:4"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("bound_id,alpha"));
    assert_eq!(lines.count(), 2 * 4);
}

#[test]
fn limits_shrink_with_eps() {
    let o = run(&["limits", "--instance", &instance("compression.json")]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    for e in v["entries"].as_array().unwrap() {
        assert!(e["ratio"].as_f64().unwrap() > 1.5, "{e}");
    }
}
