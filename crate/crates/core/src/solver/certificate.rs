//! Explicit worst-case bounds on `F(x^k) - F(x*)`, evaluated per iteration
//! so that every run can be checked against them.


/// Decay factor of the fixed-step method,
/// `min{4/(k+1)^2, (1+sqrt q)(1-sqrt q)^k, (1-sqrt q)^k / t0^2}`.
/// The last term is dropped when `t0 = 0`.
pub fn rate_factor_fixed(k: usize, q: f64, t0: f64) -> f64 {
    let sq = q.max(0.0).sqrt();
    let k_f = k as f64;
    let decay = (1.0 - sq).powf(k_f);
    let mut r = (4.0 / ((k_f + 1.0) * (k_f + 1.0))).min((1.0 + sq) * decay);
    if t0 > 0.0 {
        r = r.min(decay / (t0 * t0));
    }
    r
}

/// Fixed-step bound
/// `r_k(q) (t0^2 gap0 + (1 + tau mu_g)/(2 tau) |x0 - x*|^2)`.
pub fn rate_certificate_fixed(
    k: usize,
    q: f64,
    t0: f64,
    tau: f64,
    mu_g: f64,
    gap0: f64,
    dist0_sq: f64,
) -> f64 {
    let mut bracket = (1.0 + tau * mu_g) / (2.0 * tau) * dist0_sq;
    if t0 > 0.0 {
        bracket += t0 * t0 * gap0;
    }
    rate_factor_fixed(k, q, t0) * bracket
}

/// Decay factor of the backtracking method,
/// `min{4/(k+1)^2, (1-sqrt q_w)^(k-1), (1-sqrt q_w)^k / t0^2}`.
pub fn rate_factor_backtracking(k: usize, q_w: f64, t0: f64) -> f64 {
    let sq = q_w.max(0.0).sqrt();
    let k_f = k as f64;
    let mut r = (4.0 / ((k_f + 1.0) * (k_f + 1.0))).min((1.0 - sq).powf(k_f - 1.0));
    if t0 > 0.0 {
        r = r.min((1.0 - sq).powf(k_f) / (t0 * t0));
    }
    r
}

/// Backtracking bound
/// `r_k (L_bt - mu_f) (tau0 t0^2 / (1 - mu_f tau0) gap0 + |x0 - x*|^2 / 2)`,
/// where `step_bound = L_bt` bounds `1/tau_k` over the whole run.
#[allow(clippy::too_many_arguments)]
pub fn rate_certificate_backtracking(
    k: usize,
    q_w: f64,
    t0: f64,
    tau0: f64,
    mu_f: f64,
    step_bound: f64,
    gap0: f64,
    dist0_sq: f64,
) -> f64 {
    let mut bracket = 0.5 * dist0_sq;
    if t0 > 0.0 {
        bracket += tau0 * t0 * t0 / (1.0 - mu_f * tau0) * gap0;
    }
    rate_factor_backtracking(k, q_w, t0) * (step_bound - mu_f) * bracket
}

/// `mu / (L_w + mu_g)` with `L_w = max{L_f / rho, rho L0}`.
pub fn worst_case_q(lipschitz_f: f64, rho: f64, l0: f64, mu: f64, mu_g: f64) -> f64 {
    let l_w = (lipschitz_f / rho).max(rho * l0);
    mu / (l_w + mu_g)
}

/// Which constant multiplies the backtracking rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StepBoundRule {
    /// `max{L_f / rho, L0}`: what the reduction loop actually guarantees
    /// for `1/tau_k`, including the initial step.
    #[default]
    Reduction,
    /// `rho L_f`, as printed in the original statement of the bound. Only
    /// useful for side-by-side comparison; it is not a valid bound in general.
    Literal,
}

impl StepBoundRule {
    pub fn step_bound(self, lipschitz_f: f64, rho: f64, l0: f64) -> f64 {
        match self {
            StepBoundRule::Reduction => (lipschitz_f / rho).max(l0),
            StepBoundRule::Literal => rho * lipschitz_f,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn fixed_reduces_to_fista_bound() {
        for k in [1, 5, 40] {
            let (tau, d) = (1.0 / 8.0, 3.5);
            let expected = 4.0 / ((k as f64 + 1.0).powi(2)) * d / (2.0 * tau);
            assert_relative_eq!(rate_certificate_fixed(k, 0.0, 0.0, tau, 0.0, 7.0, d), expected, max_relative = 1e-15);
        }
    }

    #[test]
    fn fixed_factor_at_first_iterate() {
        // min{1, 1.25 * 0.5, 0.5}
        assert_relative_eq!(rate_factor_fixed(1, 0.25, 1.0), 0.5, epsilon = 1e-15);
        let (gap0, d, tau, mu_g) = (2.0, 3.0, 1.0, 0.0);
        let bracket = gap0 + d / 2.0;
        assert_relative_eq!(rate_certificate_fixed(1, 0.25, 1.0, tau, mu_g, gap0, d), 0.5 * bracket, epsilon = 1e-15);
        assert_eq!(rate_certificate_fixed(9, 0.3, 1.0, 0.2, 0.1, 0.0, 0.0), 0.0);
    }

    #[test]
    fn backtracking_reductions() {
        let (k, l_bt, d) = (6, 9.0, 2.0);
        let expected = 4.0 / 49.0 * l_bt * d / 2.0;
        assert_relative_eq!(
            rate_certificate_backtracking(k, 0.0, 0.0, 0.1, 0.0, l_bt, 5.0, d),
            expected,
            max_relative = 1e-15
        );
        for q_w in [0.0f64, 0.01, 0.3] {
            let expected = 1.0f64.min(1.0 - q_w.sqrt());
            assert_relative_eq!(rate_factor_backtracking(1, q_w, 1.0), expected, epsilon = 1e-15);
        }
    }

    #[test]
    fn worst_case_q_cases() {
        let expected = 0.1 / (8.0 / 0.9 + 0.1);
        assert_relative_eq!(worst_case_q(8.0, 0.9, 5.0, 0.1, 0.1), expected, epsilon = 1e-15);
        // 0.1 / 8.98889 by hand
        assert!((expected - 0.0111248).abs() < 1e-7);
        assert_eq!(worst_case_q(8.0, 0.9, 5.0, 0.0, 0.0), 0.0);
        assert_relative_eq!(worst_case_q(8.0, 0.9, 1e4, 0.2, 0.1), 0.2 / (0.9e4 + 0.1), epsilon = 1e-18);
    }

    #[test]
    fn step_bound_rules() {
        assert_relative_eq!(StepBoundRule::Reduction.step_bound(8.0, 0.9, 5.0), 8.0 / 0.9);
        assert_eq!(StepBoundRule::Reduction.step_bound(8.0, 0.9, 20.0), 20.0);
        assert_relative_eq!(StepBoundRule::Literal.step_bound(8.0, 0.9, 20.0), 7.2);
    }
}
