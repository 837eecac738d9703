//! Command-line surface. Every `run`/`reference` flag may also be given in a
//! `key=value` file passed with `--config`; flags on the command line win.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::experiment::{parse_variants, ExperimentConfig, ProblemKind, Variant};

#[derive(Debug, Parser)]
#[command(name = "gfista", version, about = "Run and verify accelerated proximal-gradient experiments")]
#[command(args_override_self = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the selected variants and write one CSV per variant plus a summary.
    Run(ExperimentArgs),
    /// Check trace CSV files: every gap must stay below its certificate bound.
    Verify(VerifyArgs),
    /// Compute (or load from the cache) the reference solution only.
    Reference(ExperimentArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ExperimentArgs {
    /// key=value file providing defaults for any of the flags below.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "huber-rof")]
    pub problem: ProblemKind,
    /// Clean PGM image (P2 or P5); a synthetic phantom is used if absent.
    #[arg(long)]
    pub image: Option<PathBuf>,
    /// Side length of the synthetic phantom, or dimension of the toy problem.
    #[arg(long, default_value_t = 64)]
    pub size: usize,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Reference cache directory [default: <out>/cache].
    #[arg(long)]
    pub cache: Option<PathBuf>,
    /// Regularization weight (l1 weight for the toy problem).
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Huber parameter, strong-convexity weight, or ridge weight.
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long, default_value_t = 0.9)]
    pub rho: f64,
    #[arg(long, default_value_t = 0.9)]
    pub c_bt: f64,
    #[arg(long, default_value_t = 1.0)]
    pub t0: f64,
    /// Initial Lipschitz estimate for backtracking [default: L_f].
    #[arg(long)]
    pub l0: Option<f64>,
    #[arg(long, default_value_t = 50)]
    pub i_max: usize,
    #[arg(long, default_value_t = 100)]
    pub iters: usize,
    /// Comma-separated subset of fista, gfista-fixed, classic-bt, full-bt.
    #[arg(long, default_value = "fista,gfista-fixed,classic-bt,full-bt", value_parser = parse_variant_list)]
    pub variants: VariantList,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Gaussian noise variance (huber-rof).
    #[arg(long, default_value_t = 0.005)]
    pub variance: f64,
    /// Poisson intensity of a unit pixel (poisson-tv).
    #[arg(long, default_value_t = 45.0)]
    pub peak: f64,
    /// Inner iterations of the TV prox (poisson-tv).
    #[arg(long, default_value_t = 10)]
    pub inner_iters: usize,
    /// Carry the TV prox dual variable between calls.
    #[arg(long, num_args = 0..=1, default_missing_value = "true", default_value_t = false)]
    pub warm_start: bool,
    #[arg(long, default_value_t = 5000)]
    pub reference_iters: usize,
    /// Skip certificate and invariant checks.
    #[arg(long, num_args = 0..=1, default_missing_value = "true", default_value_t = false)]
    pub no_verify: bool,
    /// Reject steps that increase the objective.
    #[arg(long, num_args = 0..=1, default_missing_value = "true", default_value_t = false)]
    pub monotone: bool,
    /// Recompute the extrapolated point for every trial step.
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    pub recompute_y: bool,
}

/// A whole `--variants` value; a later occurrence replaces an earlier one.
#[derive(Debug, Clone, PartialEq)]
pub struct VariantList(pub Vec<Variant>);

fn parse_variant_list(s: &str) -> Result<VariantList, String> {
    parse_variants(s).map(VariantList)
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Trace CSV files written by `run`.
    #[arg(required = true)]
    pub csv: Vec<PathBuf>,
    /// Allowed excess of gap over bound, relative to 1 + |F*|.
    #[arg(long, default_value_t = 1e-10)]
    pub slack: f64,
}

impl From<ExperimentArgs> for ExperimentConfig {
    fn from(a: ExperimentArgs) -> Self {
        let VariantList(variants) = a.variants;
        ExperimentConfig {
            problem: a.problem,
            image: a.image,
            size: a.size,
            out: a.out,
            cache: a.cache,
            lambda: a.lambda,
            eps: a.eps,
            rho: a.rho,
            c_bt: a.c_bt,
            t0: a.t0,
            l0: a.l0,
            i_max: a.i_max,
            iters: a.iters,
            variants,
            seed: a.seed,
            variance: a.variance,
            peak: a.peak,
            inner_iters: a.inner_iters,
            warm_start: a.warm_start,
            reference_iters: a.reference_iters,
            monotone: a.monotone,
            recompute_y: a.recompute_y,
            verify: !a.no_verify,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigFileError {
    #[error("{path}:{line}: expected key=value, found {text:?}")]
    Syntax { path: String, line: usize, text: String },
    #[error("{path}:{line}: `config` cannot be set from a config file")]
    Nested { path: String, line: usize },
    #[error("cannot read config file {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Translate `key=value` lines into `--key=value` arguments. Blank lines
/// and lines starting with `#` are ignored; `_` in keys reads as `-`.
pub fn config_file_args(path: &str, text: &str) -> Result<Vec<OsString>, ConfigFileError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(ConfigFileError::Syntax {
                path: path.into(),
                line: i + 1,
                text: line.into(),
            });
        };
        let key = key.trim().replace('_', "-");
        if key.is_empty() {
            return Err(ConfigFileError::Syntax {
                path: path.into(),
                line: i + 1,
                text: line.into(),
            });
        }
        if key == "config" {
            return Err(ConfigFileError::Nested {
                path: path.into(),
                line: i + 1,
            });
        }
        out.push(format!("--{key}={}", value.trim()).into());
    }
    Ok(out)
}

/// Locate `--config PATH` or `--config=PATH` after the subcommand.
fn config_path(args: &[OsString]) -> Option<String> {
    let mut iter = args.iter().skip(2).map(|a| a.to_string_lossy());
    while let Some(arg) = iter.next() {
        if arg == "--" {
            break;
        }
        if arg == "--config" {
            return iter.next().map(|s| s.into_owned());
        }
        if let Some(path) = arg.strip_prefix("--config=") {
            return Some(path.to_owned());
        }
    }
    None
}

/// Insert the config file's arguments right after the subcommand, so that
/// anything given explicitly on the command line overrides them.
pub fn expand_config_file(args: Vec<OsString>) -> Result<Vec<OsString>, ConfigFileError> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let text = std::fs::read_to_string(&path).map_err(|source| ConfigFileError::Io {
        path: path.clone(),
        source,
    })?;
    let from_file = config_file_args(&path, &text)?;
    let mut out = Vec::with_capacity(args.len() + from_file.len());
    out.extend(args[..2].iter().cloned());
    out.extend(from_file);
    out.extend(args[2..].iter().cloned());
    Ok(out)
}

/// Parse process-style arguments, expanding any `--config` file first.
pub fn parse_cli<I, T>(args: I) -> Result<Cli, anyhow::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let expanded = expand_config_file(args)?;
    Ok(Cli::try_parse_from(expanded)?)
}
