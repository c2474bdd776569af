use std::io::Write;
use std::process::{Command, Output};

use tempfile::NamedTempFile;

fn tailsheaf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tailsheaf")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn cohomology_csv_of_s1() {
    let o = tailsheaf(&["cohomology", "--fixture", "s1", "--csv", "--tmin", "-5", "--tmax", "-3"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let body: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(body, ["t,h0,h1,h2,h3", "-5,0,0,1,0", "-4,0,0,1,0", "-3,0,0,0,0"]);
}

#[test]
fn classify_json_reports_the_counterexample() {
    let o = tailsheaf(&["classify", "--fixture", "counterexample_3x9", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["command"], "classify");
    assert_eq!(v["result"]["is_tail"], false);
}

#[test]
fn exit_codes() {
    assert_eq!(tailsheaf(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(tailsheaf(&["classify", "--fixture", "s1", "--csv"]).status.code(), Some(2));
    assert_eq!(tailsheaf(&["classify", "--fixture", "nope"]).status.code(), Some(3));
    assert_eq!(tailsheaf(&["peel", "--fixture", "counterexample_3x9"]).status.code(), Some(4));

    let mut bad = NamedTempFile::new().unwrap();
    writeln!(bad, "ring n=3 field=QQ\nsource 0\ntarget 1 1 1\nrow x0, x1, x2^2").unwrap();
    let o = tailsheaf(&["validate", "--input", bad.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(!o.stderr.is_empty());
}

#[test]
fn file_input_matches_the_fixture() {
    let construct = tailsheaf(&["construct", "--fixture", "curvilinear_3_2"]);
    assert_eq!(construct.status.code(), Some(0));
    let mut f = NamedTempFile::new().unwrap();
    f.write_all(&construct.stdout).unwrap();
    let a = tailsheaf(&["classify", "--input", f.path().to_str().unwrap(), "--json"]);
    let b = tailsheaf(&["classify", "--fixture", "curvilinear_3_2", "--json"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn output_is_deterministic_across_threads_and_runs() {
    let args = ["decompose", "--fixture", "example_b_points", "--json"];
    let first = tailsheaf(&args);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(stdout(&first), stdout(&tailsheaf(&args)));
    let mut threaded = args.to_vec();
    threaded.extend(["--threads", "4"]);
    assert_eq!(stdout(&first), stdout(&tailsheaf(&threaded)));

    let scrambled = ["construct", "--fixture", "s1_2", "--scramble", "--seed", "7"];
    assert_eq!(stdout(&tailsheaf(&scrambled)), stdout(&tailsheaf(&scrambled)));
}
