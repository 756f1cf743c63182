use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(dir: &Path, config: &str, args: &[&str]) -> Output {
    let path = dir.join("run.cfg");
    fs::write(&path, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_stokeslp"))
        .args(args)
        .arg("--config")
        .arg(&path)
        .arg("--set")
        .arg(format!("outdir={}", dir.join("out").display()))
        .output()
        .unwrap()
}

fn csv(dir: &Path, check: &str) -> String {
    fs::read_to_string(dir.join("out").join(format!("{check}.csv"))).unwrap()
}

fn rows_with<'a>(body: &'a str, param: &str) -> Vec<Vec<&'a str>> {
    body.lines()
        .skip(1)
        .map(|l| l.split(',').collect::<Vec<_>>())
        .filter(|c| c[4].starts_with(param))
        .collect()
}

#[test]
fn verify_jumps_with_defaults_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), "N = 64\n", &["verify-jumps"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let body = csv(dir.path(), "jumps");
    assert_eq!(body.lines().next(), Some("check,n,N,case,param,residual,tolerance,pass"));
    assert!(body.lines().count() >= 5);
    assert!(body.lines().skip(1).all(|l| l.ends_with(",true")));
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("out/summary.json")).unwrap()).unwrap();
    assert_eq!(summary["pass"], true);
    assert_eq!(summary["failures"].as_array().unwrap().len(), 0);
}

#[test]
fn spectrum_detects_the_normal_kernel_of_s() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), "N = 32\nV0 = bump(1)\n", &["spectrum"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let body = csv(dir.path(), "spectrum");
    let dim = rows_with(&body, "dim_ker_S ");
    assert_eq!(dim[0][5].parse::<f64>().unwrap(), 1.0);
    let corr = rows_with(&body, "ker_S_nu_correlation");
    assert!(corr[0][5].parse::<f64>().unwrap() >= 0.999);
}

#[test]
fn missing_grid_size_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), "n = 2\nV = 1\n", &["verify-jumps"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert_eq!(err.trim_end().lines().count(), 1, "{err}");
    assert!(err.contains("`N`"));
}

#[test]
fn unknown_command_and_key_are_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(dir.path(), "N = 16\n", &["verify-everything"]).status.code(), Some(2));
    assert_eq!(run(dir.path(), "N = 16\ncolour = red\n", &["solve"]).status.code(), Some(2));
    assert_eq!(run(dir.path(), "N = 16\n", &["criterion-12"]).status.code(), Some(2));
}

#[test]
fn failing_tolerance_exits_one_and_lists_failures() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), "N = 32\ntol.jump = 1e-30\n", &["verify-jumps"]);
    assert_eq!(out.status.code(), Some(1));
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("out/summary.json")).unwrap()).unwrap();
    assert_eq!(summary["pass"], false);
    assert!(!summary["failures"].as_array().unwrap().is_empty());
}

#[test]
fn overrides_win_and_runs_are_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let cfg = "N = 64\nseed = 7\n";
    let args = ["verify-green", "--set", "N=32"];
    assert_eq!(run(a.path(), cfg, &args).status.code(), Some(0));
    assert_eq!(run(b.path(), cfg, &args).status.code(), Some(0));
    let (x, y) = (csv(a.path(), "green"), csv(b.path(), "green"));
    assert_eq!(x, y);
    assert!(x.lines().skip(1).all(|l| l.split(',').nth(2) == Some("32")));
}

#[test]
fn single_criterion_is_invocable() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), "N = 16\n", &["criterion-1"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(csv(dir.path(), "residue").lines().count() > 1);
}
