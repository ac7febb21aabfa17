use std::process::Command;

use expsampling::cli::{execute, parse_config, Parsed};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_expsampling"))
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = bin().args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn fejer_table_rounded() {
    let (code, out, _) = run(&[
        "table", "--kernel", "fejer:beta=1,t=0", "--fn", "h2", "--m", "20,50,100", "--z", "0.5,1,2,4,8", "--precision",
        "paper4dp",
    ]);
    assert_eq!(code, 0);
    let row = out.lines().find(|l| l.starts_with("1.00,")).unwrap();
    let cols: Vec<&str> = row.split(',').collect();
    assert_eq!(cols[1], "0.6931");
    // Reference 0.0049; computed 0.00502.
    let err: f64 = cols[5].parse().unwrap();
    assert!((err - 0.0049).abs() <= 1.5e-4, "{row}");
    assert_eq!(out.lines().count(), 6);
}

#[test]
fn fejer_bound_is_inapplicable() {
    let (code, out, err) = run(&["bound", "--kernel", "fejer:beta=1,t=0", "--fn", "h2", "--m", "50"]);
    assert_eq!(code, 4);
    assert!(out.is_empty());
    assert!(err.contains("diverges"));
}

#[test]
fn spline_moments() {
    let (code, out, _) = run(&["moments", "--kernel", "bspline:n=3", "--nu", "0,1"]);
    assert_eq!(code, 0);
    let vals: Vec<f64> = out.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(vals.len(), 2);
    assert!((vals[0] - 0.75).abs() < 1e-12);
    assert!((vals[1] - 0.25).abs() < 1e-12);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["table", "--kernel", "bspline:n=1"]).0, 2);
    let (code, _, err) = run(&[]);
    assert_eq!(code, 2);
    assert!(err.contains("sweep") && err.contains("kernels"));
    assert_eq!(run(&["table", "--kernel", "bspline:n=3", "--fn", "h2", "--domain", "3:1"]).0, 2);
    assert_eq!(run(&["table", "--kernel", "nope:x=1", "--fn", "h2"]).0, 2);
    assert_eq!(run(&["table", "--kernel", "bspline:n=3", "--fn", "h9"]).0, 2);
}

#[test]
fn help_describes_grammar() {
    let (code, out, _) = run(&["table", "--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("jackson:beta="));
    assert!(out.contains("h2 = ln(1+z)"));
}

#[test]
fn out_file_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t3.csv");
    let (code, out, _) = run(&[
        "table", "--kernel", "jackson:beta=1,n=3,t=0", "--fn", "h3", "--out", path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let body = std::fs::read_to_string(&path).unwrap();
    assert!(body.starts_with("z,exact,approx_m20,err_m20"));
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("t3.csv.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["config"]["kernel_id"], "jackson:beta=1,n=3,t=0");
    assert_eq!(manifest["library_version"], env!("CARGO_PKG_VERSION"));
    assert!(manifest["wall_clock_seconds"].as_f64().unwrap() >= 0.0);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"kernel": "bspline:n=3", "nu": [0, 1, 2], "format": "json"}"#).unwrap();
    let (code, out, _) = run(&["moments", "--config", cfg.to_str().unwrap(), "--nu", "1"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 1);
    assert!((v[0]["value"].as_f64().unwrap() - 0.25).abs() < 1e-12);
    std::fs::write(&cfg, r#"{"kernel": "bspline:n=3", "unknown": true}"#).unwrap();
    assert_eq!(run(&["moments", "--config", cfg.to_str().unwrap()]).0, 2);
}

#[test]
fn cli_matches_library() {
    let args: Vec<String> = ["sweep", "--kernel", "bspline:n=3", "--fn", "h2", "--m", "10,40", "--z-grid", "0.2:8:33"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    let cfg = match parse_config(&args, None).unwrap() {
        Parsed::Run(c) => c,
        Parsed::Info(_) => unreachable!(),
    };
    let lib = execute(&cfg).unwrap().body;
    let strs: Vec<&str> = args.iter().map(String::as_str).collect();
    let (code, out, _) = run(&strs);
    assert_eq!(code, 0);
    assert_eq!(out, lib);
    let k = expsampling::kernel::make_bspline(3).unwrap();
    let grid = expsampling::weighted::GridSpec::new(0.2, 8.0, 33).unwrap();
    let sweep = expsampling::harness::convergence_sweep_with(
        &k,
        &expsampling::functions::h2(),
        &[10.0, 40.0],
        (0.1, 10.0),
        grid,
        8,
    )
    .unwrap();
    let line: Vec<f64> = out.lines().nth(2).unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(line, vec![40.0, sweep[1].1]);
}

#[test]
fn remaining_subcommands_run() {
    let (code, out, _) = run(&["kernels"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 4);
    let (code, out, _) = run(&["voronovskaja", "--kernel", "bspline:n=3", "--fn", "h2", "--m", "25", "--z", "1"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("m,z,n,lhs"));
    let (code, out, _) = run(&[
        "table", "--kernel", "bspline:n=3", "--fn", "h1", "--m", "20", "--z-grid", "0.5:8:9", "--plot",
    ]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 10);
    let (code, out, _) = run(&["bound", "--kernel", "bspline:n=3", "--fn", "h2", "--m", "20", "--format", "json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!(v[0]["measured_sup_weighted_error"].as_f64().unwrap() < v[0]["thm3_bound"].as_f64().unwrap());
}
