//! End-to-end tests of the `doa` binary: exit codes per failure class,
//! deterministic outputs, and the documented file formats.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn doa() -> Command {
    Command::new(env!("CARGO_BIN_EXE_doa"))
}

fn run(args: &[&str]) -> Output {
    doa().args(args).output().expect("binary runs")
}

fn stdout_of(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr_of(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

fn write_certificate(dir: &Path, depth: usize) -> PathBuf {
    let path = dir.join("two_machine.doa.json");
    let output = run(&[
        "initial-roa",
        "--system",
        "two_machine",
        "--depth",
        &depth.to_string(),
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "{}", stderr_of(&output));
    path
}

#[test]
fn initial_roa_prints_levels_and_writes_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_certificate(dir.path(), 80);

    let text = std::fs::read_to_string(&path).unwrap();
    let json: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(json["format_version"], "1");
    assert_eq!(json["system"], "two_machine");
    assert_eq!(json["depth"], 80);
    assert_eq!(json["theta"]["kind"], "weighted_inf_norm");
    let c = json["report"]["c"].as_f64().unwrap();
    assert!((c - 2.877172153683009).abs() < 1e-6);
}

#[test]
fn check_reports_the_published_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_certificate(dir.path(), 80);

    let output = run(&[
        "check",
        path.to_str().unwrap(),
        "--points",
        "1,-0.2;-0.2,0.5;-1,0",
        "--depth-scan",
        "100",
    ]);
    assert!(output.status.success(), "{}", stderr_of(&output));
    let lines: Vec<serde_json::Value> = stdout_of(&output)
        .lines()
        .map(|line| serde_json::from_str(line).unwrap())
        .collect();
    assert_eq!(lines.len(), 3);
    assert_eq!(lines[0]["member"], true);
    assert_eq!(lines[1]["member"], true);
    assert_eq!(lines[2]["member"], false);
    assert!(lines[0]["depth"].as_u64().is_some());
    assert!(lines[2]["depth"].is_null());
}

#[test]
fn check_accepts_a_points_file_and_names_bad_rows() {
    let dir = tempfile::tempdir().unwrap();
    let cert = write_certificate(dir.path(), 10);

    let points = dir.path().join("points.csv");
    std::fs::write(&points, "0.1,0.1\n0.0,0.0\n").unwrap();
    let output = run(&[
        "check",
        cert.to_str().unwrap(),
        "--points",
        points.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "{}", stderr_of(&output));
    assert_eq!(stdout_of(&output).lines().count(), 2);

    std::fs::write(&points, "0.1,0.1\nnot,numbers\n").unwrap();
    let output = run(&[
        "check",
        cert.to_str().unwrap(),
        "--points",
        points.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(1));
    assert!(
        stderr_of(&output).contains("row 2"),
        "{}",
        stderr_of(&output)
    );
}

#[test]
fn section_is_deterministic_and_counts_members() {
    let dir = tempfile::tempdir().unwrap();
    let cert = write_certificate(dir.path(), 30);

    let out_a = dir.path().join("a.csv");
    let out_b = dir.path().join("b.csv");
    for (out, threads) in [(&out_a, "1"), (&out_b, "4")] {
        let output = doa()
            .env("DOA_THREADS", threads)
            .args([
                "section",
                cert.to_str().unwrap(),
                "--axes",
                "0",
                "1",
                "--range",
                "-1",
                "1",
                "-0.5",
                "0.5",
                "--res",
                "41",
                "41",
                "--out",
                out.to_str().unwrap(),
            ])
            .output()
            .unwrap();
        assert!(output.status.success(), "{}", stderr_of(&output));
        assert!(stdout_of(&output).contains("members: "));
    }
    // identical bytes regardless of the parallelism cap
    assert_eq!(
        std::fs::read(&out_a).unwrap(),
        std::fs::read(&out_b).unwrap()
    );

    let text = std::fs::read_to_string(&out_a).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("i,j,x_i,x_j,value,member"));
    assert_eq!(text.lines().count(), 1 + 41 * 41);
    let first = lines.next().unwrap();
    assert_eq!(first.split(',').count(), 6);
    assert!(first.starts_with("0,0,-1.0000000000000000e0,-5.0000000000000000e-1,"));
}

#[test]
fn simulate_writes_trajectory_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("traj.csv");
    let output = run(&[
        "simulate",
        "--system",
        "two_machine",
        "--x0",
        "1,-0.2",
        "--steps",
        "400",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "{}", stderr_of(&output));
    assert!(stdout_of(&output).contains("safe=true attracted=true first_violation=none"));

    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().next(), Some("step,x1,x2,theta"));
    assert_eq!(text.lines().count(), 402);

    let output = run(&[
        "simulate",
        "--system",
        "two_machine",
        "--x0",
        "-1,0",
        "--steps",
        "400",
    ]);
    assert!(output.status.success());
    assert!(stdout_of(&output).contains("safe=false"));
    assert!(stdout_of(&output).contains("attracted=true"));
}

#[test]
fn usage_errors_exit_with_code_one() {
    let output = run(&["initial-roa", "--system", "pendulum"]);
    assert_eq!(output.status.code(), Some(1));
    assert!(stderr_of(&output).contains("unknown system"));

    let output = run(&["frobnicate"]);
    assert_eq!(output.status.code(), Some(1));

    let output = run(&["check", "/nonexistent.json", "--points", "0,0"]);
    assert_eq!(output.status.code(), Some(1));

    let output = run(&["simulate", "--system", "two_machine", "--x0", "nan,0"]);
    assert_eq!(output.status.code(), Some(1));
    assert!(stderr_of(&output).contains("finite"));
}

#[test]
fn assumption_violations_exit_with_code_two() {
    // destabilizing gain: the closed loop has eigenvalues outside the unit
    // circle but no eigenvalue product equal to one
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("unstable.json");
    let output = run(&[
        "initial-roa",
        "--system",
        "cart_pole",
        "--gain",
        "5,20,0,0",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(2), "{}", stderr_of(&output));
    assert!(
        stderr_of(&output).contains("Schur"),
        "{}",
        stderr_of(&output)
    );

    // a box escaping the safe set is an assumption violation too
    let output = run(&["initial-roa", "--system", "two_machine", "--b", "1.5,0.5"]);
    assert_eq!(output.status.code(), Some(2));
    assert!(stderr_of(&output).contains("not contained in the safe set"));
}

#[test]
fn numerical_failures_exit_with_code_three() {
    // zero gain leaves open-loop eigenvalues whose product is exactly one
    let output = run(&["initial-roa", "--system", "cart_pole", "--gain", "0,0,0,0"]);
    assert_eq!(output.status.code(), Some(3), "{}", stderr_of(&output));
    assert!(
        stderr_of(&output).contains("no unique solution"),
        "{}",
        stderr_of(&output)
    );
}

#[test]
fn config_file_supplies_defaults_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.json");
    let out = dir.path().join("cert.json");
    std::fs::write(
        &config,
        format!(
            r#"{{"system":"two_machine","depth":25,"out":"{}"}}"#,
            out.display()
        ),
    )
    .unwrap();

    let output = run(&["initial-roa", "--config", config.to_str().unwrap()]);
    assert!(output.status.success(), "{}", stderr_of(&output));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(json["depth"], 25);

    // explicit flag wins over the config value
    let output = run(&[
        "initial-roa",
        "--config",
        config.to_str().unwrap(),
        "--depth",
        "7",
    ]);
    assert!(output.status.success(), "{}", stderr_of(&output));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(json["depth"], 7);
}

#[test]
fn cart_pole_certificate_round_trips_with_gain() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cp.doa.json");
    let output = run(&[
        "initial-roa",
        "--system",
        "cart_pole",
        "--depth",
        "60",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "{}", stderr_of(&output));

    let output = run(&[
        "check",
        path.to_str().unwrap(),
        "--points",
        "0.1,-0.02,0,0;-0.05,-0.05,0,0",
    ]);
    assert!(output.status.success(), "{}", stderr_of(&output));
    let lines: Vec<serde_json::Value> = stdout_of(&output)
        .lines()
        .map(|line| serde_json::from_str(line).unwrap())
        .collect();
    assert_eq!(lines[0]["member"], true);
    assert_eq!(lines[1]["member"], false);
}
