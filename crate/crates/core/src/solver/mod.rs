//! Accelerated forward-backward iterations for strongly convex composite
//! problems, with fixed or adaptive (shrinking and growing) step sizes.

mod certificate;
mod monotone;
mod runner;
mod sequences;
mod steps;

pub use certificate::{
    rate_certificate_backtracking, rate_certificate_fixed, rate_factor_backtracking, rate_factor_fixed,
    worst_case_q, StepBoundRule,
};
pub use monotone::{monotone_extrapolate, monotone_select};
pub use runner::{gfista_backtracking, gfista_fixed, Gfista};
pub use sequences::{
    beta_factor, effective_step, inverse_condition, omega_factor, update_t, update_t_fixed, update_t_fixed_residual,
    update_t_residual, SEQUENCE_TOL,
};
pub use steps::{bregman_f, check_cb, check_cb2, forward_backward, verify_descent_inequality, CB_TOL};

use crate::error::{Error, Result};

/// How the step size evolves between iterations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepMode {
    /// Constant `tau <= 1/L_f`.
    Fixed,
    /// Armijo-style: the step only shrinks.
    ClassicBacktracking,
    /// The step shrinks on insufficient decrease and grows by `1/rho`
    /// when the local curvature is well below `1/tau`.
    FullBacktracking,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Initial step, `1 / L0`.
    pub tau0: f64,
    /// Shrink factor; growth divides by it.
    pub rho: f64,
    /// Curvature threshold below which the step may grow.
    pub c_bt: f64,
    pub t0: f64,
    /// Maximum rejected step proposals per iteration.
    pub i_max: usize,
    pub mode: StepMode,
    pub monotone: bool,
    pub max_iters: usize,
    /// Recompute `t_{k+1}`, `beta_k` and `y^k` for every step proposal so
    /// the accepted tuple is self-consistent. `false` reproduces the lagged
    /// weight of the textbook loop.
    pub recompute_y_on_retry: bool,
    pub step_bound_rule: StepBoundRule,
    /// Fail the run on the first violated sequence invariant.
    pub check_invariants: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tau0: 1.0,
            rho: 0.9,
            c_bt: 0.9,
            t0: 1.0,
            i_max: 50,
            mode: StepMode::FullBacktracking,
            monotone: false,
            max_iters: 100,
            recompute_y_on_retry: true,
            step_bound_rule: StepBoundRule::Reduction,
            check_invariants: true,
        }
    }
}

impl SolverConfig {
    pub fn fixed(tau: f64, max_iters: usize) -> Self {
        Self {
            tau0: tau,
            mode: StepMode::Fixed,
            max_iters,
            ..Self::default()
        }
    }

    /// Backtracking from an initial Lipschitz estimate `l0`.
    pub fn backtracking(mode: StepMode, l0: f64, max_iters: usize) -> Self {
        Self {
            tau0: 1.0 / l0,
            mode,
            max_iters,
            ..Self::default()
        }
    }

    pub fn with_t0(mut self, t0: f64) -> Self {
        self.t0 = t0;
        self
    }

    pub fn with_rho(mut self, rho: f64) -> Self {
        self.rho = rho;
        self
    }

    pub fn with_c_bt(mut self, c_bt: f64) -> Self {
        self.c_bt = c_bt;
        self
    }

    pub fn with_monotone(mut self, monotone: bool) -> Self {
        self.monotone = monotone;
        self
    }

    pub fn with_recompute_y(mut self, recompute: bool) -> Self {
        self.recompute_y_on_retry = recompute;
        self
    }

    pub fn l0(&self) -> f64 {
        1.0 / self.tau0
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if !(self.tau0 > 0.0 && self.tau0.is_finite()) {
            return bad(format!("tau0 must be positive and finite, got {}", self.tau0));
        }
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return bad(format!("rho must lie in (0,1), got {}", self.rho));
        }
        if !(self.c_bt > 0.0 && self.c_bt < 1.0) {
            return bad(format!("c_bt must lie in (0,1), got {}", self.c_bt));
        }
        if !(self.t0 >= 0.0 && self.t0.is_finite()) {
            return bad(format!("t0 must be nonnegative, got {}", self.t0));
        }
        if self.i_max == 0 || self.max_iters == 0 {
            return bad("i_max and max_iters must be positive".into());
        }
        Ok(())
    }
}

/// Approximate minimizer and its objective, used to measure gaps.
#[derive(Debug, Clone, PartialEq)]
pub struct Reference<P> {
    pub point: P,
    pub objective: f64,
}

/// Per-iteration diagnostics. Row `k` describes `x^k`; row 0 is the start.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub k: usize,
    pub objective: f64,
    pub gap: Option<f64>,
    pub relative_gap: Option<f64>,
    /// `1 / tau_k`
    pub lipschitz_estimate: f64,
    pub tau: f64,
    pub t_k: f64,
    pub omega_k: f64,
    /// Extrapolation weight used to form the point `x^k` was computed from.
    pub beta_k: f64,
    pub n_backtracks: usize,
    pub certificate_bound: Option<f64>,
    pub q_k: f64,
    /// Residual of the quadratic defining `t_k`.
    pub t_residual: f64,
}

#[derive(Debug, Clone)]
pub struct Trace<P> {
    pub records: Vec<TraceRecord>,
    pub solution: P,
    /// Whether the run satisfied the hypotheses of its rate bound, so that
    /// `certificate_bound` must dominate `gap`.
    pub certificate_applies: bool,
}

impl<P> Trace<P> {
    /// First iteration whose gap exceeds its bound by more than `slack`.
    pub fn certificate_violation(&self, slack: f64) -> Option<&TraceRecord> {
        if !self.certificate_applies {
            return None;
        }
        self.records.iter().find(|r| match (r.gap, r.certificate_bound) {
            (Some(gap), Some(bound)) => gap > bound + slack,
            _ => false,
        })
    }

    pub fn lipschitz_estimates(&self) -> impl Iterator<Item = f64> + '_ {
        self.records.iter().map(|r| r.lipschitz_estimate)
    }

    pub fn last(&self) -> &TraceRecord {
        self.records.last().expect("trace holds the initial record")
    }
}
