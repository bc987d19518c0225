use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polydefl"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

struct Solve {
    out: Output,
    report: String,
}

fn solve(dir: &TempDir, system: &str, point: &str, extra: &[&str]) -> Solve {
    let report = dir.path().join("report.json");
    let (sys, pt) = (data(system), data(point));
    let mut args = vec![
        "solve",
        "--system",
        sys.to_str().unwrap(),
        "--point",
        pt.to_str().unwrap(),
        "--out",
        report.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    let out = run(&args);
    let report = std::fs::read_to_string(&report).unwrap_or_default();
    Solve { out, report }
}

fn without_wall_time(json: &str) -> String {
    json.lines()
        .filter(|l| !l.contains("\"wall_time_seconds\""))
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn solve_square_deflates_once() {
    let dir = TempDir::new().unwrap();
    let s = solve(&dir, "x2.ps", "x2_start.json", &["--seed", "42"]);
    assert_eq!(code(&s.out), 0, "{}", stderr(&s.out));
    let r: Value = serde_json::from_str(&s.report).unwrap();
    assert_eq!(r["deflations"], 1);
    assert_eq!(r["corank"], "1 → 0");
    assert_eq!(r["corank_sequence"], serde_json::json!([1, 0]));
    assert_eq!(r["status"], "converged_regular");
    assert_eq!(r["seed"], 42);
    assert_eq!(r["system"], "x2");
    assert!(r["correct_digits_after"].is_null());
}

#[test]
fn solve_regular_root_needs_no_deflation() {
    let dir = TempDir::new().unwrap();
    let s = solve(&dir, "x2_minus_1.ps", "one.json", &[]);
    assert_eq!(code(&s.out), 0);
    let r: Value = serde_json::from_str(&s.report).unwrap();
    assert_eq!(r["deflations"], 0);
    assert_eq!(r["corank_sequence"], serde_json::json!([0]));
    assert_eq!(r["seed"], 0x5EED);
}

#[test]
fn malformed_system_names_the_position() {
    let dir = TempDir::new().unwrap();
    let s = solve(&dir, "malformed.ps", "one.json", &[]);
    assert_eq!(code(&s.out), 1);
    let msg = stderr(&s.out);
    assert!(msg.contains("line 4") && msg.contains("column 7"), "{msg}");
}

#[test]
fn cbms1_row_with_reference_and_emitted_system() {
    let dir = TempDir::new().unwrap();
    let g = dir.path().join("g.ps");
    let reference = data("zero3.json");
    let s = solve(
        &dir,
        "cbms1.ps",
        "cbms1_start.json",
        &[
            "--reference",
            reference.to_str().unwrap(),
            "--emit-deflated",
            g.to_str().unwrap(),
        ],
    );
    assert_eq!(code(&s.out), 0, "{}", stderr(&s.out));
    let r: Value = serde_json::from_str(&s.report).unwrap();
    assert_eq!(r["deflations"], 1);
    assert_eq!(r["corank"], "3 → 0");
    assert!(r["residual_after"].as_f64().unwrap() <= 1e-10);
    assert!(r["correct_digits_after"].as_f64().unwrap() >= 12.0);
    let text = std::fs::read_to_string(&g).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("7"));
    assert_eq!(lines.next().unwrap().split_whitespace().count(), 4);
}

#[test]
fn stage_cap_exits_two() {
    let dir = TempDir::new().unwrap();
    let s = solve(&dir, "cbms1.ps", "cbms1_start.json", &["--max-deflations", "0"]);
    assert_eq!(code(&s.out), 2);
    let r: Value = serde_json::from_str(&s.report).unwrap();
    assert_eq!(r["status"], "stage_cap_reached");
}

#[test]
fn reports_are_reproducible() {
    for (system, point) in [("cbms1.ps", "cbms1_start.json"), ("staircase.ps", "staircase_start.json")] {
        let runs: Vec<String> = (0..2)
            .map(|_| {
                let dir = TempDir::new().unwrap();
                let s = solve(&dir, system, point, &["--seed", "7"]);
                assert_eq!(code(&s.out), 0, "{system}: {}", stderr(&s.out));
                s.report
            })
            .collect();
        assert_eq!(without_wall_time(&runs[0]), without_wall_time(&runs[1]));
        assert_ne!(without_wall_time(&runs[0]), runs[0]);
    }
}

#[test]
fn points_file_gives_one_report_per_start() {
    let dir = TempDir::new().unwrap();
    let report = dir.path().join("all.json");
    let (sys, pts) = (data("x2.ps"), data("x2_starts.json"));
    let out = run(&[
        "solve",
        "--system",
        sys.to_str().unwrap(),
        "--points",
        pts.to_str().unwrap(),
        "--seed",
        "100",
        "--out",
        report.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let all: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    let all = all.as_array().unwrap();
    assert_eq!(all.len(), 3);
    for (i, r) in all.iter().enumerate() {
        assert_eq!(r["seed"], 100 + i as u64);
        assert_eq!(r["status"], "converged_regular");
    }
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(code(&run(&["bogus"])), 1);
    assert_eq!(code(&run(&["solve", "--system", "x.ps"])), 1);
    assert_eq!(code(&run(&["--help"])), 0);
    assert_eq!(code(&run(&["--version"])), 0);
    let dir = TempDir::new().unwrap();
    let missing = solve(&dir, "no_such_file.ps", "one.json", &[]);
    assert_eq!(code(&missing.out), 1);
    let wrong_len = solve(&dir, "x2.ps", "zero3.json", &[]);
    assert_eq!(code(&wrong_len.out), 1);
    assert!(stderr(&wrong_len.out).contains("3 coordinates"));
}

fn deflate(system: &str, point: &str) -> (Output, String) {
    let dir = TempDir::new().unwrap();
    let g = dir.path().join("g.ps");
    let (sys, pt) = (data(system), data(point));
    let out = run(&[
        "deflate",
        "--system",
        sys.to_str().unwrap(),
        "--point",
        pt.to_str().unwrap(),
        "--seed",
        "3",
        "--out",
        g.to_str().unwrap(),
    ]);
    (out, std::fs::read_to_string(&g).unwrap_or_default())
}

fn shape(text: &str) -> (usize, usize) {
    let mut lines = text.lines();
    let neqs = lines.next().unwrap().trim().parse().unwrap();
    let nvars = lines.next().unwrap().split_whitespace().count();
    (neqs, nvars)
}

#[test]
fn deflate_writes_the_extended_system() {
    let (out, text) = deflate("x2.ps", "x2_start.json");
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(shape(&text), (3, 2));
    assert!(text.contains("# B1") && text.contains("# h1"));
    let (out, text) = deflate("staircase.ps", "staircase_start.json");
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(shape(&text), (7, 3));
}

#[test]
fn deflate_rejects_a_regular_point() {
    let (out, text) = deflate("x2_minus_1.ps", "one.json");
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("Jacobian has full column rank"));
    assert!(text.is_empty());
}

fn multiplicity(system: &str, point: &str, extra: &[&str]) -> Output {
    let (sys, pt) = (data(system), data(point));
    let mut args = vec!["multiplicity", "--system", sys.to_str().unwrap(), "--point", pt.to_str().unwrap()];
    args.extend_from_slice(extra);
    run(&args)
}

#[test]
fn multiplicity_prints_the_integer() {
    for (system, point, m) in [
        ("x2.ps", "zero1.json", "2"),
        ("cbms1.ps", "zero3.json", "11"),
        ("x2_minus_1.ps", "one.json", "1"),
        ("x1_x2_fourth.ps", "zero2.json", "4"),
        ("staircase.ps", "zero2.json", "7"),
    ] {
        let out = multiplicity(system, point, &[]);
        assert_eq!(code(&out), 0, "{system}");
        assert_eq!(stdout(&out).trim(), m, "{system}");
    }
}

#[test]
fn multiplicity_order_limit_exits_three() {
    let out = multiplicity("cbms1.ps", "zero3.json", &["--max-order", "3"]);
    assert_eq!(code(&out), 3);
    assert!(stdout(&out).is_empty());
    let out = multiplicity("x2_minus_1.ps", "zero1.json", &[]);
    assert_eq!(code(&out), 1);
}

fn bench(system: &str, extra: &[&str]) -> Output {
    let sys = data(system);
    let mut args = vec!["bench", "--system", sys.to_str().unwrap(), "--trials", "50"];
    args.extend_from_slice(extra);
    run(&args)
}

fn field(text: &str, key: &str) -> String {
    text.lines()
        .find_map(|l| l.strip_prefix(key))
        .unwrap_or_else(|| panic!("no {key} in {text}"))
        .trim()
        .to_string()
}

#[test]
fn bench_checks_agreement_and_reports_the_ratio() {
    let out = bench("synthetic8.ps", &["--stages", "1"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    assert!(field(&text, "agreement").parse::<f64>().unwrap() <= 1e-10);
    let ratio: f64 = field(&text, "ratio").parse().unwrap();
    assert!(ratio.is_finite() && ratio > 0.0);
    assert_eq!(field(&text, "variables"), "8 -> 16");
    assert!(!text.contains("below benchmark size"));
    let exponent = field(&text, "ratio");
    assert_eq!(exponent.split('e').next().unwrap().len(), 18, "{exponent}");
}

#[test]
fn bench_flags_tiny_systems() {
    let out = bench("x2.ps", &[]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("below benchmark size"));
}

#[test]
fn bench_from_a_start_point_uses_the_solver_stages() {
    let pt = data("cbms1_start.json");
    let out = bench("cbms1.ps", &["--point", pt.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    assert_eq!(field(&text, "variables"), "3 -> 4");
    assert_eq!(field(&text, "equations"), "3 -> 7");
}

#[test]
fn bench_deepens_with_more_stages() {
    let out = bench("ring8.ps", &["--stages", "2"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(field(&stdout(&out), "variables"), "8 -> 32");
}
