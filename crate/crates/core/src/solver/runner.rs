use super::certificate::{rate_certificate_backtracking, rate_certificate_fixed, StepBoundRule};
use super::monotone::extrapolate;
use super::sequences::{
    beta_factor, effective_step, inverse_condition, omega_factor, update_t, update_t_fixed, update_t_fixed_residual,
    update_t_residual, SEQUENCE_TOL,
};
use super::steps::{cb_holds, forward_backward, local_curvature};
use super::{Reference, SolverConfig, StepMode, Trace, TraceRecord};
use crate::error::{Error, Result};
use crate::problem::CompositeProblem;
use crate::space::Point;

const RESIDUAL_TOL: f64 = 1e-10;

/// Runs fixed-step GFISTA regardless of `config.mode`.
pub fn gfista_fixed<Pr: CompositeProblem>(problem: &Pr, config: &SolverConfig, x0: &Pr::Point) -> Result<Trace<Pr::Point>> {
    let config = SolverConfig {
        mode: StepMode::Fixed,
        ..config.clone()
    };
    Gfista::new(problem, config).run(x0)
}

pub fn gfista_backtracking<Pr: CompositeProblem>(
    problem: &Pr,
    config: &SolverConfig,
    x0: &Pr::Point,
) -> Result<Trace<Pr::Point>> {
    if config.mode == StepMode::Fixed {
        return Err(Error::Config("backtracking solver needs a backtracking mode".into()));
    }
    Gfista::new(problem, config.clone()).run(x0)
}

/// One configured solver run over a borrowed problem.
pub struct Gfista<'a, Pr: CompositeProblem> {
    problem: &'a Pr,
    config: SolverConfig,
    reference: Option<&'a Reference<Pr::Point>>,
}

struct State<P> {
    x: P,
    x_prev: P,
    /// Last forward-backward output; equals `x` unless the monotone
    /// safeguard rejected it.
    candidate: P,
    t: f64,
    tau: f64,
    tau_eff: f64,
    /// Local curvature measured on the last accepted step.
    curvature: Option<f64>,
    lagged_momentum: f64,
    lagged_correction: f64,
}

struct Trial<P> {
    tau: f64,
    tau_eff: f64,
    q: f64,
    t_next: f64,
    omega: f64,
    beta: f64,
    x_hat: P,
    bregman: f64,
    dist_sq: f64,
    residual: f64,
}

struct Certifier {
    gap0: f64,
    dist0_sq: f64,
    kind: CertKind,
}

enum CertKind {
    Fixed { q: f64, tau: f64, mu_g: f64 },
    Backtracking { q_w: f64, step_bound: f64, mu_f: f64 },
}

impl<'a, Pr: CompositeProblem> Gfista<'a, Pr> {
    pub fn new(problem: &'a Pr, config: SolverConfig) -> Self {
        Self {
            problem,
            config,
            reference: None,
        }
    }

    /// Measure gaps (and evaluate rate bounds) against `reference`.
    pub fn with_reference(mut self, reference: &'a Reference<Pr::Point>) -> Self {
        self.reference = Some(reference);
        self
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    pub fn run(&self, x0: &Pr::Point) -> Result<Trace<Pr::Point>> {
        let cfg = &self.config;
        cfg.validate()?;
        let p = self.problem;
        let (mu_f, mu_g, mu) = (p.mu_f(), p.mu_g(), p.mu());
        if !(mu_f >= 0.0 && mu_g >= 0.0) {
            return Err(Error::Config("convexity moduli must be nonnegative".into()));
        }
        let tau_eff0 = effective_step(cfg.tau0, mu_f)?;
        let q0 = inverse_condition(cfg.tau0, mu, mu_g);
        if q0.sqrt() * cfg.t0 > 1.0 + SEQUENCE_TOL {
            return Err(Error::Config(format!(
                "sqrt(q0) * t0 = {} exceeds 1; lower t0",
                q0.sqrt() * cfg.t0
            )));
        }
        if cfg.mode == StepMode::Fixed {
            let l = p.lipschitz_f().ok_or_else(|| {
                Error::Config("fixed-step solver needs a known Lipschitz constant; use a backtracking mode".into())
            })?;
            if cfg.tau0 * l > 1.0 + 1e-12 {
                return Err(Error::Config(format!(
                    "fixed step tau = {} exceeds 1/L_f = {}",
                    cfg.tau0,
                    1.0 / l
                )));
            }
        }

        let f0 = p.objective(x0);
        let certifier = self.certifier(x0, f0, q0);
        let mut records = Vec::with_capacity(cfg.max_iters + 1);
        records.push(TraceRecord {
            k: 0,
            objective: f0,
            gap: self.reference.map(|r| f0 - r.objective),
            relative_gap: self.reference.map(|_| 1.0),
            lipschitz_estimate: 1.0 / cfg.tau0,
            tau: cfg.tau0,
            t_k: cfg.t0,
            omega_k: 1.0,
            beta_k: 0.0,
            n_backtracks: 0,
            certificate_bound: None,
            q_k: q0,
            t_residual: 0.0,
        });

        let mut st = State {
            x: x0.clone(),
            x_prev: x0.clone(),
            candidate: x0.clone(),
            t: cfg.t0,
            tau: cfg.tau0,
            tau_eff: tau_eff0,
            curvature: None,
            lagged_momentum: 0.0,
            lagged_correction: 0.0,
        };

        for k in 0..cfg.max_iters {
            let (trial, n_backtracks) = match cfg.mode {
                StepMode::Fixed => (self.fixed_step(&st).map_err(|e| at_iteration(e, k + 1))?, 0),
                _ => self.backtracking_step(&st, k).map_err(|e| at_iteration(e, k + 1))?,
            };
            if cfg.check_invariants {
                self.check_invariants(&st, &trial, k + 1)?;
            }

            let x_next = if cfg.monotone && p.objective(&trial.x_hat) > p.objective(&st.x) {
                st.x.clone()
            } else {
                trial.x_hat.clone()
            };
            let objective = p.objective(&x_next);
            if !objective.is_finite() {
                return Err(Error::NumericalFailure {
                    step: "objective",
                    iteration: Some(k + 1),
                });
            }

            let gap = self.reference.map(|r| objective - r.objective);
            let relative_gap = self.reference.and_then(|r| {
                let denom = f0 - r.objective;
                (denom.is_finite() && denom > 0.0).then(|| (objective - r.objective) / denom)
            });
            let certificate_bound = certifier.as_ref().map(|c| c.bound(k + 1, cfg));
            records.push(TraceRecord {
                k: k + 1,
                objective,
                gap,
                relative_gap,
                lipschitz_estimate: 1.0 / trial.tau,
                tau: trial.tau,
                t_k: trial.t_next,
                omega_k: trial.omega,
                beta_k: trial.beta,
                n_backtracks,
                certificate_bound,
                q_k: trial.q,
                t_residual: trial.residual,
            });

            st.curvature = Some(local_curvature(trial.bregman, trial.dist_sq));
            st.lagged_momentum = trial.beta;
            st.lagged_correction = trial.omega * st.t / trial.t_next;
            st.x_prev = std::mem::replace(&mut st.x, x_next);
            st.candidate = trial.x_hat;
            st.t = trial.t_next;
            st.tau = trial.tau;
            st.tau_eff = trial.tau_eff;
        }

        Ok(Trace {
            records,
            solution: st.x,
            certificate_applies: certifier.is_some() && (cfg.mode == StepMode::Fixed || cfg.recompute_y_on_retry),
        })
    }

    fn certifier(&self, x0: &Pr::Point, f0: f64, q0: f64) -> Option<Certifier> {
        let reference = self.reference?;
        let cfg = &self.config;
        let p = self.problem;
        let kind = match cfg.mode {
            StepMode::Fixed => CertKind::Fixed {
                q: q0,
                tau: cfg.tau0,
                mu_g: p.mu_g(),
            },
            _ => {
                let l_f = p.lipschitz_f()?;
                // Largest possible 1/tau_k, hence smallest q_k.
                let l_w = StepBoundRule::Reduction.step_bound(l_f, cfg.rho, cfg.l0());
                CertKind::Backtracking {
                    q_w: p.mu() / (l_w + p.mu_g()),
                    step_bound: cfg.step_bound_rule.step_bound(l_f, cfg.rho, cfg.l0()),
                    mu_f: p.mu_f(),
                }
            }
        };
        Some(Certifier {
            gap0: f0 - reference.objective,
            dist0_sq: x0.dist_sq(&reference.point),
            kind,
        })
    }

    /// Builds `y^k` and `T y^k` for a step `tau`, with the extrapolation
    /// weights tied to that step (or the lagged ones when `recompute` is off).
    fn trial(&self, st: &State<Pr::Point>, tau: f64, t_next_rule: TRule) -> Result<Trial<Pr::Point>> {
        let p = self.problem;
        let tau_eff = effective_step(tau, p.mu_f())?;
        let q = inverse_condition(tau, p.mu(), p.mu_g());
        let (t_next, residual) = match t_next_rule {
            TRule::Fixed => {
                let t_next = update_t_fixed(st.t, q);
                (t_next, update_t_fixed_residual(st.t, t_next, q))
            }
            TRule::Adaptive => {
                let t_next = update_t(st.t, q, st.tau_eff / tau_eff)?;
                let omega = (1.0 - q * t_next) / (1.0 - q);
                (t_next, update_t_residual(st.tau_eff, tau_eff, st.t, t_next, omega))
            }
        };
        let omega = omega_factor(q, t_next)?;
        let beta = beta_factor(omega, st.t, t_next);
        let (momentum, correction) = if self.config.recompute_y_on_retry || self.config.mode == StepMode::Fixed {
            (beta, omega * st.t / t_next)
        } else {
            (st.lagged_momentum, st.lagged_correction)
        };
        let y = extrapolate(&st.x, &st.x_prev, &st.candidate, momentum, correction);
        let x_hat = forward_backward(p, &y, tau)?;
        let bregman = p.f_bregman(&x_hat, &y);
        let dist_sq = x_hat.dist_sq(&y);
        Ok(Trial {
            tau,
            tau_eff,
            q,
            t_next,
            omega,
            beta,
            x_hat,
            bregman,
            dist_sq,
            residual,
        })
    }

    fn fixed_step(&self, st: &State<Pr::Point>) -> Result<Trial<Pr::Point>> {
        self.trial(st, st.tau, TRule::Fixed)
    }

    fn backtracking_step(&self, st: &State<Pr::Point>, k: usize) -> Result<(Trial<Pr::Point>, usize)> {
        let cfg = &self.config;
        let mu_f = self.problem.mu_f();
        let mut rejected = 0;

        if cfg.mode == StepMode::FullBacktracking {
            let curvature = match st.curvature {
                Some(c) => c,
                None => {
                    let probe = self.trial(st, st.tau, TRule::Adaptive)?;
                    local_curvature(probe.bregman, probe.dist_sq)
                }
            };
            let grown = st.tau / cfg.rho;
            // A curvature at most c_bt / tau leaves room to grow the step.
            if curvature <= cfg.c_bt / st.tau && grown * mu_f < 1.0 {
                let trial = self.trial(st, grown, TRule::Adaptive)?;
                if cb_holds(trial.bregman, trial.dist_sq, trial.tau) {
                    return Ok((trial, 0));
                }
                rejected += 1;
            }
        }

        let mut tau = st.tau;
        loop {
            let trial = self.trial(st, tau, TRule::Adaptive)?;
            if cb_holds(trial.bregman, trial.dist_sq, trial.tau) {
                return Ok((trial, rejected));
            }
            rejected += 1;
            if rejected > cfg.i_max {
                return Err(Error::StepSizeFailure {
                    iteration: k + 1,
                    attempts: cfg.i_max,
                    tau,
                });
            }
            tau *= cfg.rho;
        }
    }

    fn check_invariants(&self, st: &State<Pr::Point>, trial: &Trial<Pr::Point>, k: usize) -> Result<()> {
        let violation = |name, value| Err(Error::InvariantViolation { name, iteration: k, value });
        if trial.t_next < 1.0 - SEQUENCE_TOL {
            return violation("t_k >= 1", trial.t_next);
        }
        if !(trial.omega > 0.0 && trial.omega <= 1.0 + SEQUENCE_TOL) {
            return violation("omega_k in (0, 1]", trial.omega);
        }
        // The adaptive t-rule has a fixed point with sqrt(q) t > 1 whenever
        // q > 0, so this bound is only enforced for the fixed-step rule.
        let sq_t = trial.q.sqrt() * trial.t_next;
        if self.config.mode == StepMode::Fixed && sq_t > 1.0 + SEQUENCE_TOL {
            return violation("sqrt(q_k) t_k <= 1", sq_t);
        }
        let scale = match self.config.mode {
            StepMode::Fixed => st.t * st.t,
            _ => st.tau_eff * st.t * st.t,
        };
        if trial.residual.abs() > RESIDUAL_TOL * scale.max(1.0) {
            return violation("t-update residual", trial.residual);
        }
        if self.config.mode != StepMode::Fixed && !cb_holds(trial.bregman, trial.dist_sq, trial.tau) {
            return violation("accepted step satisfies the decrease test", trial.bregman);
        }
        Ok(())
    }
}

#[derive(Clone, Copy)]
enum TRule {
    Fixed,
    Adaptive,
}

impl Certifier {
    fn bound(&self, k: usize, cfg: &SolverConfig) -> f64 {
        match self.kind {
            CertKind::Fixed { q, tau, mu_g } => {
                rate_certificate_fixed(k, q, cfg.t0, tau, mu_g, self.gap0, self.dist0_sq)
            }
            CertKind::Backtracking { q_w, step_bound, mu_f } => {
                rate_certificate_backtracking(k, q_w, cfg.t0, cfg.tau0, mu_f, step_bound, self.gap0, self.dist0_sq)
            }
        }
    }
}

fn at_iteration(err: Error, k: usize) -> Error {
    match err {
        Error::NumericalFailure { step, iteration: None } => Error::NumericalFailure {
            step,
            iteration: Some(k),
        },
        Error::InvariantViolation { name, value, .. } => Error::InvariantViolation {
            name,
            iteration: k,
            value,
        },
        other => other,
    }
}
