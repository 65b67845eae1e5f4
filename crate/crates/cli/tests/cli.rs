use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use fpwalk::approx::corrected_tail;
use tempfile::TempDir;

const LAZY: &str = r#"{"offsets":[-1,0,1],"probs":[0.25,0.5,0.25]}"#;
const SMALL_GRID: &str = r#"{"n":[16,32,64],"x":[0,1],"u_max":4,"be_small_n":8,"rate_n_min":16}"#;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fpwalk")).args(args).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Data rows of a CSV with `#` comments and one header line.
fn rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let body = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (header, body)
}

#[test]
fn exact_lazy_two_steps() {
    let tmp = TempDir::new().unwrap();
    let dist = write(tmp.path(), "lazy.json", LAZY);
    let o = run(&["exact", "--dist", dist.to_str().unwrap(), "--x", "1", "--n", "2"]);
    assert!(o.status.success());
    let (header, body) = rows(&stdout(&o));
    assert_eq!(header, ["k", "p_tau_eq_k", "m1_k", "m2_k", "survival"]);
    assert_eq!(body.len(), 3);
    assert_eq!(body[2][4], "0.625");

    let o = run(&["exact", "--dist", dist.to_str().unwrap(), "--n", "0"]);
    assert!(o.status.success());
    assert_eq!(rows(&stdout(&o)).1.len(), 1);
}

#[test]
fn errors_exit_with_two() {
    let tmp = TempDir::new().unwrap();
    let missing = tmp.path().join("nope.json");
    let o = run(&["exact", "--dist", missing.to_str().unwrap(), "--n", "3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("cannot read"));

    let bad = write(tmp.path(), "bad.json", r#"{"offsets":[-1,2],"probs":[0.5,0.5]}"#);
    let o = run(&["exact", "--dist", bad.to_str().unwrap(), "--n", "3"]);
    assert_eq!(o.status.code(), Some(2));

    let grid = write(tmp.path(), "grid.json", r#"{"n":[16],"bogus":1}"#);
    let o = run(&["verify", "--grid", grid.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));

    assert_eq!(run(&["exact"]).status.code(), Some(2));
}

#[test]
fn approx_matches_library() {
    let tmp = TempDir::new().unwrap();
    let dist = write(tmp.path(), "lazy.json", LAZY);
    let o = run(&["approx", "--dist", dist.to_str().unwrap(), "--x", "2", "--n", "100", "--y", "0,3,9"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("# overshoot_mean=0\n"));
    let (header, body) = rows(&text);
    assert_eq!(
        header,
        ["y", "reflection", "correction", "total", "rayleigh", "thm1_env", "ales_env", "improved_env"]
    );
    for (row, y) in body.iter().zip([0.0, 3.0, 9.0]) {
        let lib = corrected_tail(2.0, y, 100.0, 0.5f64.sqrt(), 0.0).unwrap();
        assert!((row[1].parse::<f64>().unwrap() - lib.reflection).abs() < 1e-15);
        assert!((row[3].parse::<f64>().unwrap() - lib.total).abs() < 1e-15);
    }

    let o = run(&["approx", "--dist", dist.to_str().unwrap(), "--x", "0", "--n", "50"]);
    let (_, body) = rows(&stdout(&o));
    assert_eq!(body.len(), 4);
    assert!(body.iter().all(|r| r[1] == "0"));
}

#[test]
fn mc_is_reproducible() {
    let tmp = TempDir::new().unwrap();
    let dist = write(tmp.path(), "lazy.json", LAZY);
    let base = [
        "mc", "--dist", dist.to_str().unwrap(), "--x", "1", "--y", "2", "--n", "30", "--seed", "17",
        "--batches", "6", "--paths-per-batch", "200", "--horizon", "500",
    ];
    let a = run(&base);
    assert!(a.status.success());
    let text = stdout(&a);
    assert!(text.contains("seed=17"));
    let mut w = base.to_vec();
    w.extend(["--workers", "3"]);
    assert_eq!(stdout(&run(&w)), text);
    assert_eq!(stdout(&run(&base)), text);

    let gauss = write(tmp.path(), "gauss.json", r#"{"family":"gaussian","scale":1.5}"#);
    let o = run(&[
        "mc", "--dist", gauss.to_str().unwrap(), "--x", "0.5", "--n", "20", "--batches", "4",
        "--paths-per-batch", "100", "--horizon", "200",
    ]);
    assert!(o.status.success());
    let (_, body) = rows(&stdout(&o));
    assert_eq!(body[0][0], "tail");
    assert_eq!(body[0][7], "");
}

#[test]
fn verify_writes_deterministic_reports() {
    let tmp = TempDir::new().unwrap();
    let grid = write(tmp.path(), "grid.json", SMALL_GRID);
    let dist = write(tmp.path(), "lazy.json", LAZY);
    let mut outputs = Vec::new();
    for sub in ["a", "b"] {
        let out = tmp.path().join(sub);
        let o = run(&[
            "verify", "--grid", grid.to_str().unwrap(), "--dist", dist.to_str().unwrap(),
            "--out", out.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        let summary = fs::read_to_string(out.join("summary.json")).unwrap();
        let bounds = fs::read_to_string(out.join("lazy_bounds.csv")).unwrap();
        assert!(out.join("lazy_rates.csv").exists());
        outputs.push((summary, bounds));
    }
    assert_eq!(outputs[0], outputs[1]);
    let v: serde_json::Value = serde_json::from_str(&outputs[0].0).unwrap();
    assert_eq!(v["all_explicit_hold"], true);
}

#[test]
fn scan_emits_both_tables() {
    let tmp = TempDir::new().unwrap();
    let grid = write(tmp.path(), "grid.json", SMALL_GRID);
    let dist = write(tmp.path(), "skewed.json", r#"{"offsets":[-1,0,2],"probs":[0.3333333333333333,0.5,0.16666666666666669]}"#);
    let out = tmp.path().join("scan");
    let o = run(&[
        "scan", "--dist", dist.to_str().unwrap(), "--x", "0,1,5", "--grid", grid.to_str().unwrap(),
        "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (_, body) = rows(&fs::read_to_string(out.join("overshoot_scan.csv")).unwrap());
    assert_eq!(body.len(), 3);
    let (header, _) = rows(&fs::read_to_string(out.join("rates.csv")).unwrap());
    assert_eq!(header[0], "n");
}
