use std::path::PathBuf;

use gfista_cli::args::{config_file_args, parse_cli, Command, ExperimentArgs};
use gfista_cli::experiment::{ExperimentConfig, ProblemKind, Variant};

fn run_args(args: &[&str]) -> ExperimentArgs {
    let mut full = vec!["gfista", "run"];
    full.extend_from_slice(args);
    match parse_cli(full).unwrap().command {
        Command::Run(a) => a,
        other => panic!("unexpected command {other:?}"),
    }
}

#[test]
fn defaults_match_the_documented_values() {
    let config: ExperimentConfig = run_args(&[]).into();
    assert_eq!(config.problem, ProblemKind::HuberRof);
    assert_eq!((config.rho, config.c_bt, config.t0), (0.9, 0.9, 1.0));
    assert_eq!(config.reference_iters, 5000);
    assert_eq!(config.variants, Variant::ALL.to_vec());
    assert!(config.verify && config.recompute_y && !config.monotone);
    assert_eq!(config.weights(), (0.1, 0.01));
}

#[test]
fn flags_mirror_config_fields() {
    let config: ExperimentConfig = run_args(&[
        "--problem", "poisson-tv", "--lambda", "0.2", "--eps", "0.15", "--rho", "0.8", "--c-bt", "0.7", "--t0", "0.5",
        "--l0", "60", "--iters", "200", "--variants", "full-bt,classic-bt", "--seed", "9", "--out", "dir",
        "--no-verify", "--monotone", "--recompute-y", "false",
    ])
    .into();
    assert_eq!(config.problem, ProblemKind::PoissonTv);
    assert_eq!(config.weights(), (0.2, 0.15));
    assert_eq!((config.rho, config.c_bt, config.t0, config.l0), (0.8, 0.7, 0.5, Some(60.0)));
    assert_eq!(config.iters, 200);
    assert_eq!(config.variants, vec![Variant::FullBt, Variant::ClassicBt]);
    assert_eq!(config.seed, 9);
    assert_eq!(config.out, PathBuf::from("dir"));
    assert!(!config.verify && config.monotone && !config.recompute_y);
}

#[test]
fn bad_values_are_rejected() {
    assert!(parse_cli(["gfista", "run", "--variants", "fista,newton"]).is_err());
    assert!(parse_cli(["gfista", "run", "--variants", ","]).is_err());
    assert!(parse_cli(["gfista", "run", "--problem", "deblur"]).is_err());
    assert!(parse_cli(["gfista", "run", "--iters", "-3"]).is_err());
    assert!(parse_cli(["gfista", "verify"]).is_err());
}

#[test]
fn config_file_lines_become_flags() {
    let args = config_file_args("c.cfg", "# comment\n\nlambda = 0.3\nc_bt=0.5\nmonotone=true\n").unwrap();
    let args: Vec<String> = args.into_iter().map(|a| a.into_string().unwrap()).collect();
    assert_eq!(args, ["--lambda=0.3", "--c-bt=0.5", "--monotone=true"]);
    assert!(config_file_args("c.cfg", "lambda 0.3").is_err());
    assert!(config_file_args("c.cfg", "config=other.cfg").is_err());
}

#[test]
fn command_line_overrides_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("exp.cfg");
    std::fs::write(&path, "problem=poisson-tv\niters=7\nvariants=fista\nmonotone=true\nrho=0.5\n").unwrap();
    let path = path.to_str().unwrap();
    let config: ExperimentConfig = run_args(&["--iters", "11", "--config", path, "--monotone=false", "--variants", "full-bt"]).into();
    assert_eq!(config.problem, ProblemKind::PoissonTv);
    assert_eq!(config.rho, 0.5);
    assert_eq!(config.iters, 11);
    assert!(!config.monotone);
    assert_eq!(config.variants, vec![Variant::FullBt]);

    std::fs::write(dir.path().join("bad.cfg"), "unknown-flag=1\n").unwrap();
    let bad = dir.path().join("bad.cfg");
    assert!(parse_cli(["gfista", "run", "--config", bad.to_str().unwrap()]).is_err());
    assert!(parse_cli(["gfista", "run", "--config", "/nonexistent/exp.cfg"]).is_err());
}
