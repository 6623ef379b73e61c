use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn stuperm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stuperm"))
        .args(args)
        .output()
        .expect("spawn stuperm")
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

const SMALL: &str = "a,b,c\n1,2.0,9\n2,1.5,8\n3,3.5,\n4,4.0,6\n5,3.9,5\n6,6.1,4\n";

#[test]
fn single_method_emits_one_json_object() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "d.csv", SMALL);
    let out = stuperm(&[
        "test",
        &f,
        "--x",
        "a",
        "--y",
        "b",
        "--method",
        "stu-permute",
        "--b",
        "500",
        "--seed",
        "3",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["method"], "stu-permute");
    assert_eq!(v["n"], 6);
    assert_eq!(v["B"], 500);
    assert_eq!(v["seed"], 3);
    assert_eq!(v["alternative"], "greater");
    assert!(v["estimate"].as_f64().unwrap() > 0.8);
}

#[test]
fn missing_cells_are_dropped_or_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "d.csv", SMALL);
    let out = stuperm(&["test", &f, "--x", "a", "--y", "c", "--method", "t"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["n"], 5);
    assert_eq!(v["estimate"], -1.0);
    assert_eq!(v["degenerate"], true);

    let out = stuperm(&["test", &f, "--x", "a", "--y", "c", "--missing", "error"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("row 3"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "d.csv", SMALL);
    let bad = write(dir.path(), "bad.csv", "x,y\n1,2\n2,oops\n3,4\n");
    let tiny = write(dir.path(), "tiny.csv", "x,y\n1,2\n,4\n");
    let cases: [(&[&str], i32); 8] = [
        (&["test", &f, "--x", "a", "--y", "zzz"], 2),
        (&["test", &f, "--x", "a", "--y", "a"], 2),
        (&["test", &f, "--x", "a", "--y", "b", "--alpha", "1.5"], 2),
        (&["test", &f, "--x", "a", "--y", "b", "--method", "bogus"], 2),
        (&["test", &bad, "--x", "x", "--y", "y"], 3),
        (&["test", &tiny, "--x", "x", "--y", "y"], 3),
        (&["test", "/nonexistent/file.csv", "--x", "x", "--y", "y"], 3),
        (&["simulate", "--scenario", "nope", "--n", "10", "--reps", "2"], 2),
    ];
    for (args, code) in cases {
        assert_eq!(stuperm(args).status.code(), Some(code), "{args:?}");
    }
}

#[test]
fn columns_by_position() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "d.csv", SMALL);
    let by_name = stuperm(&["test", &f, "--x", "a", "--y", "b", "--method", "t"]);
    let by_pos = stuperm(&["test", &f, "--x", "1", "--y", "2", "--method", "t"]);
    assert!(by_pos.status.success());
    assert_eq!(by_name.stdout, by_pos.stdout);
}

#[test]
fn negate_y_flips_the_estimate_and_swaps_tails() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "d.csv", SMALL);
    let run = |extra: &[&str]| -> Vec<Value> {
        let mut args = vec![
            "test",
            f.as_str(),
            "--x",
            "a",
            "--y",
            "b",
            "--b",
            "2000",
            "--seed",
            "11",
        ];
        args.extend_from_slice(extra);
        serde_json::from_slice(&stuperm(&args).stdout).unwrap()
    };
    let plain = run(&["--alt", "greater"]);
    let flipped = run(&["--alt", "less", "--negate-y"]);
    assert_eq!(plain.len(), 6);
    for (a, b) in plain.iter().zip(&flipped) {
        assert_eq!(a["estimate"].as_f64().unwrap(), -b["estimate"].as_f64().unwrap());
        let (pa, pb) = (a["p_value"].as_f64().unwrap(), b["p_value"].as_f64().unwrap());
        assert!((pa - pb).abs() < 1e-12, "{}: {pa} vs {pb}", a["method"]);
    }
}

#[test]
fn log_of_nonpositive_values_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "d.csv", "x,y\n1,0\n2,3\n3,5\n");
    assert_eq!(
        stuperm(&["test", &f, "--x", "x", "--y", "y", "--log-y"]).status.code(),
        Some(3)
    );
    assert!(
        stuperm(&["test", &f, "--x", "x", "--y", "y", "--log-x", "--method", "t"])
            .status
            .success()
    );
}

#[test]
fn csv_format_for_tests() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "d.csv", SMALL);
    let out = stuperm(&["test", &f, "--x", "a", "--y", "b", "--format", "csv", "--b", "100"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "method,estimate,statistic,p_value,n,alternative,B,seed,alpha,reject"
    );
    assert_eq!(lines.len(), 7);
}

#[test]
fn simulate_is_byte_identical_across_runs() {
    let args = [
        "simulate",
        "--preset",
        "desk",
        "--scenario",
        "mvn",
        "--n",
        "20",
        "--method",
        "stu-permute",
        "--seed",
        "7",
        "--reps",
        "300",
    ];
    let a = stuperm(&args);
    let b = stuperm(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert_eq!(
        text.lines().next().unwrap(),
        "scenario,n,method,alpha,reps,B,rejection_rate,mc_se,seed"
    );
    assert!(text
        .lines()
        .nth(1)
        .unwrap()
        .starts_with("mvn,20,stu-permute,0.05,300,500,"));

    let mut w = args.to_vec();
    w.extend(["--workers", "3"]);
    assert_eq!(stuperm(&w).stdout, text.as_bytes());
}

#[test]
fn report_from_simulation_csv() {
    let dir = tempfile::tempdir().unwrap();
    let grid = dir.path().join("grid.csv");
    let out = stuperm(&[
        "simulate",
        "--scenario",
        "mvn",
        "--scenario",
        "circular",
        "--n",
        "10",
        "--n",
        "20",
        "--method",
        "t",
        "--method",
        "stu-permute",
        "--reps",
        "50",
        "--b",
        "50",
        "--out",
        grid.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let panels: Value = serde_json::from_slice(&stuperm(&["report", grid.to_str().unwrap()]).stdout).unwrap();
    assert_eq!(panels.as_array().unwrap().len(), 2);

    let wide = stuperm(&["report", grid.to_str().unwrap(), "--format", "csv"]);
    assert!(wide.status.success());
    assert_eq!(String::from_utf8(wide.stdout).unwrap().lines().count(), 5);

    let junk = write(dir.path(), "junk.csv", "a,b\n1,2\n");
    assert_eq!(stuperm(&["report", &junk]).status.code(), Some(3));
}
