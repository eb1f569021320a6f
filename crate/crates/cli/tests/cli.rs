use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use halfspace_ns::fixed_point;
use halfspace_ns::presets::{self, SINGLE_BLOCK_J};
use halfspace_ns::{Grid, SolverConfig};

const SMALL: &str = "n=3\npoints=16\nslabs=8\nperiod=25.132741228718345\nheight=4\n";

fn run(dir: &Path, args: &[&str], config: &str) -> Output {
    let cfg = dir.join("run.cfg");
    fs::write(&cfg, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_halfspace-ns"))
        .args(args)
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .output()
        .unwrap()
}

fn summary(dir: &Path) -> String {
    fs::read_to_string(dir.join("out/summary.txt")).unwrap()
}

fn value(summary: &str, key: &str) -> String {
    summary
        .lines()
        .find_map(|l| l.strip_prefix(&format!("{key}=")))
        .unwrap_or_else(|| panic!("no {key} in {summary}"))
        .to_string()
}

fn stderr_line(out: &Output) -> String {
    let s = String::from_utf8_lossy(&out.stderr).to_string();
    assert_eq!(s.lines().count(), 1, "{s}");
    s
}

#[test]
fn zero_data_solves_in_one_iteration() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["solve"], &format!("{SMALL}preset=zero\n"));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(value(&summary(dir.path()), "iterations"), "1");
    let g = Grid::new(2, 16, 8.0 * PI, 8, 4.0).unwrap();
    let u = halfspace_ns::io::load_field(&dir.path().join("out/solution.hsf"), &g).unwrap();
    assert!(u.is_zero());
}

#[test]
fn reports_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = format!("{SMALL}preset=gaussian-bump\namplitude=0.01\n");
    assert!(run(dir.path(), &["solve", "--seed", "3"], &cfg).status.success());
    let first = (fs::read(dir.path().join("out/iterations.csv")).unwrap(), summary(dir.path()));
    assert!(run(dir.path(), &["solve", "--seed", "3"], &cfg).status.success());
    assert_eq!(first.0, fs::read(dir.path().join("out/iterations.csv")).unwrap());
    assert_eq!(first.1, summary(dir.path()));
}

#[test]
fn json_lines_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["solve", "--format", "json-lines"], &format!("{SMALL}preset=single-mode\namplitude=0.01\n"));
    assert!(out.status.success());
    let text = fs::read_to_string(dir.path().join("out/iterations.jsonl")).unwrap();
    assert!(text.lines().all(|l| l.starts_with("{\"difference\":")));
}

#[test]
fn linear_residuals_pass() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["linear"], &format!("{SMALL}preset=gaussian-bump\namplitude=1\n"));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let s = summary(dir.path());
    assert_eq!(value(&s, "gate.divergence"), "pass");
    assert!(dir.path().join("out/linear.hsf").exists());
}

#[test]
fn kernels_check_battery() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["kernels-check"], SMALL);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let table = fs::read_to_string(dir.path().join("out/kernels.csv")).unwrap();
    assert_eq!(table.lines().filter(|l| l.starts_with("inverse-ft-")).count(), 250);
    assert_eq!(table.lines().filter(|l| l.starts_with("trace-")).count(), 30);
    let oracle: f64 = value(&summary(dir.path()), "oracle_max_error").parse().unwrap();
    assert!(oracle <= 1e-6);
}

#[test]
fn besov_single_block_matches_cosine_norm() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "n=3\npoints=32\nslabs=4\nheight=2\npreset=single-block\namplitude=1\n";
    let out = run(dir.path(), &["besov"], cfg);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let norm: f64 = value(&summary(dir.path()), "boundary_norm").parse().unwrap();
    // s = d/p − 1 = 0 for d = p = 2
    let expect = 2f64.powf(0.0 * SINGLE_BLOCK_J as f64) * presets::cosine_lp_norm(2, 16.0 * PI, 2.0);
    assert!((norm - expect).abs() <= 1e-12 * expect, "{norm} vs {expect}");
}

#[test]
fn asymptotics_ladder() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = format!("n=4\npoints=8\nslabs=8\nperiod={}\nheight=4\nq=inf\npreset=profile-perturbed\namplitude=0.01\n", 2.0 * PI);
    let out = run(dir.path(), &["asymptotics"], &cfg);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let ladder = fs::read_to_string(dir.path().join("out/ladder.csv")).unwrap();
    assert_eq!(ladder.lines().next(), Some("R,D"));
    assert_eq!(ladder.lines().count(), 9);
}

#[test]
fn verify_passes_on_small_grid() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["verify"], &format!("{SMALL}preset=gaussian-bump\namplitude=0.01\n"));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let s = summary(dir.path());
    assert_eq!(value(&s, "checks"), value(&s, "passed"));
}

#[test]
fn malformed_config_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["solve"], "n=3\nbogus\n");
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_line(&out).starts_with("halfspace-ns: error[config]: config line 2"));
}

#[test]
fn truncated_field_file_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a.tbf");
    fs::write(&path, b"TBF1\x01\x00").unwrap();
    let out = run(dir.path(), &["solve"], &format!("{SMALL}boundary={}\n", path.display()));
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_line(&out).starts_with("halfspace-ns: error[field-file]: malformed field file at byte 6"));
}

#[test]
fn usage_errors_exit_one() {
    let out = Command::new(env!("CARGO_BIN_EXE_halfspace-ns")).arg("frobnicate").output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_line(&out).starts_with("halfspace-ns: error[usage]"));
    let out = Command::new(env!("CARGO_BIN_EXE_halfspace-ns")).args(["solve", "--format", "xml"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_halfspace-ns"))
        .args(["kernels-check", "--out"])
        .arg(dir.path())
        .env("HALFSPACE_NS_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn smallness_gate_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let g = Grid::new(2, 16, 8.0 * PI, 8, 4.0).unwrap();
    let cal = fixed_point::calibrate(&SolverConfig::new(g, 2.0, 2.0, 2.0).unwrap(), 2, 1).unwrap();
    let cal_path = dir.path().join("cal.kv");
    fs::write(&cal_path, cal.to_kv()).unwrap();
    let cfg = format!("{SMALL}preset=gaussian-bump\nenforce_smallness=true\ncalibration={}\n", cal_path.display());
    let out = run(dir.path(), &["solve"], &format!("{cfg}amplitude=3\n"));
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr_line(&out).starts_with("halfspace-ns: error[gate:delta0]"));
    let out = run(dir.path(), &["solve"], &format!("{cfg}amplitude=0.5\n"));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(value(&summary(dir.path()), "gate.epsilon0"), "pass");
}
