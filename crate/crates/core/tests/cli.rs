use std::path::PathBuf;
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_seriesdyn"));
    c.env_remove("SERIESDYN_LOG");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn seriesdyn")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

struct Models {
    dir: TempDir,
}

impl Models {
    fn new() -> Self {
        Models { dir: TempDir::new().unwrap() }
    }

    fn write(&self, name: &str, text: &str) -> String {
        let p: PathBuf = self.dir.path().join(name);
        std::fs::write(&p, text).unwrap();
        p.to_str().unwrap().to_owned()
    }
}

const TWO_SPECIES: &str = r#"{"model": {"kind": "two_species", "b1": 0.1, "b2": 0.08, "a11": -0.0014,
    "a12": -0.0012, "a21": -0.0009, "a22": -0.001}, "x0": [4, 10], "grid": {"end": 20, "count": 21}}"#;

#[test]
fn table1_values() {
    let o = run(&["table1"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let values: Vec<&str> = text.lines().skip(1).map(|l| l.split_whitespace().nth(1).unwrap()).collect();
    assert_eq!(values, ["-3.14", "-1.66", "-0.798", "-0.193", "0.273", "0.651", "0.968", "1.24", "1.48", "1.69"]);
}

#[test]
fn fixed_points_catalog() {
    let m = Models::new();
    let path = m.write("ts.json", TWO_SPECIES);
    let o = run(&["fixed-points", &path]);
    assert!(o.status.success());
    let text = stdout(&o);
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split_whitespace().collect()).collect();
    assert_eq!(rows.len(), 4);
    let class = |x: &str, y: &str| rows.iter().find(|r| r[0] == x && r[1] == y).map(|r| r[4]);
    assert_eq!(class("0", "0"), Some("unstable-node"));
    assert_eq!(class("0", "80"), Some("saddle"));
    assert_eq!(class("12.5", "68.75"), Some("stable-node"));
    assert_eq!(class("71.4286", "0"), Some("saddle"));
}

#[test]
fn radius_values() {
    let m = Models::new();
    let cases = [
        (r#"{"model": {"kind": "logistic", "b": 1, "a": -3}, "x0": [1], "order": 30}"#, "0.4054651"),
        (r#"{"model": {"kind": "logistic", "b": 1, "a": -3}, "x0": [0.1], "order": 30}"#, "3.253847"),
        (r#"{"model": {"kind": "spiral", "a": -0.5}, "x0": [2, 2], "order": 30}"#, "0.125"),
    ];
    for (i, (json, modulus)) in cases.iter().enumerate() {
        let path = m.write(&format!("r{i}.json"), json);
        let o = run(&["radius", &path]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        assert!(stdout(&o).contains(modulus), "{}", stdout(&o));
    }
}

#[test]
fn preset_and_term_list_agree_bitwise() {
    let m = Models::new();
    let preset = m.write(
        "p.json",
        r#"{"model": {"kind": "logistic", "b": 1, "a": -3}, "x0": [1], "order": 4, "grid": {"end": 1, "count": 11}}"#,
    );
    let terms = m.write(
        "t.json",
        r#"{"model": {"kind": "polynomial", "components": [[
            {"coef": 1, "exponents": [1]}, {"coef": -3, "exponents": [2]}]]},
            "x0": [1], "order": 4, "grid": {"end": 1, "count": 11}}"#,
    );
    let a = run(&["solve", &preset]);
    let b = run(&["solve", &terms]);
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn csv_is_deterministic_and_rectangular() {
    let m = Models::new();
    let path = m.write("ts.json", TWO_SPECIES);
    let a = run(&["solve", &path]);
    let b = run(&["solve", &path]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert!(text.ends_with("\r\n"));
    let rows: Vec<&str> = text.split("\r\n").filter(|l| !l.is_empty() && !l.starts_with('#')).collect();
    assert_eq!(rows[0], "t,x_num,y_num,x_series,y_series");
    assert_eq!(rows.len(), 22);
    assert!(rows.iter().all(|r| r.split(',').count() == 5));

    let p = run(&["phase2d", "--t-end", "50", "--samples", "11"]);
    assert!(p.status.success());
    let text = stdout(&p);
    let data: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(data.len(), 12);
    let width = data[0].split(',').count();
    assert!(data.iter().all(|r| r.split(',').count() == width));
    assert_eq!(text.lines().filter(|l| l.starts_with("# fixed_point,")).count(), 4);
}

#[test]
fn output_flag_writes_file() {
    let m = Models::new();
    let out = m.dir.path().join("spiral.csv");
    let o = run(&["spiral", "--t-end", "1", "--samples", "3", "--output", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(out).unwrap();
    assert!(text.starts_with("t,x_num,y_num,x_exact,y_exact,x_series,y_series\r\n0,2,2,2,2,2,2\r\n"));
}

#[test]
fn exit_codes() {
    let m = Models::new();
    let missing_x0 = m.write("a.json", r#"{"model": {"kind": "logistic", "b": 1, "a": -3}}"#);
    let malformed = m.write("b.json", r#"{"model": {"kind": "logistic", "b": 1,"#);
    let unknown = m.write("c.json", r#"{"model": {"kind": "cubic"}, "x0": [1]}"#);
    for path in [missing_x0.as_str(), malformed.as_str(), unknown.as_str(), "/nonexistent/model.json"] {
        let o = run(&["solve", path]);
        assert_eq!(o.status.code(), Some(2), "{path}");
        assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
    }

    let blowup = m.write("d.json", r#"{"model": {"kind": "spiral", "a": 0.5}, "x0": [2, 2], "grid": {"end": 1, "count": 3}}"#);
    assert_eq!(run(&["solve", &blowup]).status.code(), Some(3));
    assert_eq!(run(&["spiral", "--order", "0"]).status.code(), Some(2));
    assert_eq!(run(&["phase2d", "--rel-tol", "-1"]).status.code(), Some(2));
}
