use std::fs;
use std::process::{Command, Output};

fn dbandit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dbandit"))
        .args(args)
        .output()
        .unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

#[test]
fn list_scenarios() {
    let out = dbandit(&["list-scenarios"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    for name in [
        "fixed",
        "pareto",
        "packet_loss",
        "geometric",
        "uniform",
        "queue",
    ] {
        assert!(text.lines().any(|l| l.starts_with(name)), "{name}");
    }
}

#[test]
fn run_writes_csv_and_metadata() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let res = dbandit(&[
        "run",
        "--scenario",
        "pareto",
        "--policies",
        "ts,se",
        "--reps",
        "2",
        "--horizon",
        "300",
        "--out",
        out,
    ]);
    assert_eq!(code(&res), 0, "{}", String::from_utf8_lossy(&res.stderr));
    let csv = fs::read_to_string(dir.path().join("pareto.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 2 * 300);
    assert!(csv
        .lines()
        .skip(1)
        .all(|l| l.starts_with("pareto,ts,") || l.starts_with("pareto,se,")));
    assert!(dir.path().join("pareto.meta.json").is_file());
}

#[test]
fn bounds_writes_table() {
    let dir = tempfile::tempdir().unwrap();
    let res = dbandit(&[
        "bounds",
        "--scenario",
        "fixed",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&res), 0, "{}", String::from_utf8_lossy(&res.stderr));
    let text = fs::read_to_string(dir.path().join("fixed_bounds.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("scenario,bound,value,q_star"));
    assert!(lines.next().unwrap().starts_with("fixed,ts_multi_arm,"));
}

#[test]
fn config_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    for args in [
        vec!["run", "--scenario", "nope", "--out", out],
        vec![
            "run",
            "--scenario",
            "fixed",
            "--policies",
            "epsilon",
            "--out",
            out,
        ],
        vec!["run", "--scenario", "fixed", "--reps", "0", "--out", out],
        vec!["run", "--scenario", "fixed"],
        vec!["bounds", "--scenario", "queue", "--out", out],
        vec!["frobnicate"],
    ] {
        let res = dbandit(&args);
        assert_eq!(code(&res), 1, "{args:?}");
        assert!(!res.stderr.is_empty());
    }
}

#[test]
fn io_failures_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let res = dbandit(&[
        "run",
        "--scenario",
        "geometric",
        "--reps",
        "1",
        "--horizon",
        "10",
        "--out",
        blocker.to_str().unwrap(),
    ]);
    assert_eq!(code(&res), 2);
    assert!(String::from_utf8_lossy(&res.stderr).contains("file"));
}
