use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A gradient, prox output, or objective value came back NaN or infinite.
    #[error("numerical failure in {step}{}", iteration_suffix(*.iteration))]
    NumericalFailure {
        step: &'static str,
        iteration: Option<usize>,
    },

    #[error("domain error: {0}")]
    Domain(String),

    /// A property that holds by construction did not. Always a bug.
    #[error("invariant `{name}` violated at iteration {iteration}: value {value:e}")]
    InvariantViolation {
        name: &'static str,
        iteration: usize,
        value: f64,
    },

    #[error("step size search exhausted {attempts} reductions at iteration {iteration} (last tau = {tau:e})")]
    StepSizeFailure {
        iteration: usize,
        attempts: usize,
        tau: f64,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("extrapolation undefined: t_prev = 1 with a correction candidate distinct from the current iterate")]
    DegenerateExtrapolation,

    #[error("shape mismatch: expected {expected}, got {actual}")]
    Shape { expected: String, actual: String },

    #[error("reference cache {path}: {reason}")]
    Cache { path: PathBuf, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn iteration_suffix(iteration: Option<usize>) -> String {
    match iteration {
        Some(k) => format!(" at iteration {k}"),
        None => String::new(),
    }
}
