//! Scalar recursions driving the extrapolation: effective steps, inverse
//! condition numbers, the `t_k` sequence and the decay factors `omega_k`.

use crate::error::{Error, Result};

/// Slack used for the `t >= 1`, `omega in (0, 1]` and `sqrt(q) t <= 1` checks.
pub const SEQUENCE_TOL: f64 = 1e-12;

/// `tau / (1 - tau mu_f)`
pub fn effective_step(tau: f64, mu_f: f64) -> Result<f64> {
    if !(tau > 0.0) {
        return Err(Error::Domain(format!("step must be positive, got {tau}")));
    }
    let prod = tau * mu_f;
    if prod >= 1.0 {
        return Err(Error::Domain(format!(
            "tau * mu_f = {prod} >= 1: f is quadratic-degenerate at this step"
        )));
    }
    Ok(tau / (1.0 - prod))
}

/// `q = tau mu / (1 + tau mu_g)`, in `[0, 1)` whenever `mu_g <= mu` and
/// `tau mu_f < 1`.
pub fn inverse_condition(tau: f64, mu: f64, mu_g: f64) -> f64 {
    debug_assert!(tau > 0.0 && mu >= 0.0 && mu_g >= 0.0 && mu_g <= mu * (1.0 + 1e-12));
    tau * mu / (1.0 + tau * mu_g)
}

/// Nonnegative root `t_{k+1}` of
/// `tau'_{k+1} t (t - 1) = omega_{k+1}(t) tau'_k t_prev^2` with
/// `omega(t) = (1 - q t) / (1 - q)` and `step_ratio = tau'_k / tau'_{k+1}`.
pub fn update_t(t_prev: f64, q_next: f64, step_ratio: f64) -> Result<f64> {
    if !(step_ratio > 0.0) || !(0.0..1.0).contains(&q_next) || !(t_prev >= 0.0) {
        return Err(Error::Domain(format!(
            "update_t needs t_prev >= 0, q in [0,1), ratio > 0; got ({t_prev}, {q_next}, {step_ratio})"
        )));
    }
    let weighted = step_ratio * t_prev * t_prev;
    // t^2 + (a - 1) t - c = 0
    let a = q_next / (1.0 - q_next) * weighted;
    let c = weighted / (1.0 - q_next);
    let b = a - 1.0;
    let disc = b * b + 4.0 * c;
    if !(disc >= 0.0) || !disc.is_finite() {
        return Err(Error::NumericalFailure {
            step: "t-update discriminant",
            iteration: None,
        });
    }
    let root = disc.sqrt();
    // Pick the cancellation-free form of the positive root.
    let t = if b <= 0.0 {
        0.5 * (root - b)
    } else {
        2.0 * c / (root + b)
    };
    Ok(t)
}

/// Residual of the defining quadratic, `tau'_{k+1} t (t-1) - omega tau'_k t_prev^2`.
pub fn update_t_residual(tau_eff_prev: f64, tau_eff_next: f64, t_prev: f64, t_next: f64, omega: f64) -> f64 {
    tau_eff_next * t_next * (t_next - 1.0) - omega * tau_eff_prev * t_prev * t_prev
}

/// `t_{k+1}` for the fixed-step method,
/// `(1 - q t^2 + sqrt((1 - q t^2)^2 + 4 t^2)) / 2`.
///
/// This is the root of `t (t - 1) = (1 - q t) t_prev^2`; it coincides with
/// the classic FISTA rule when `q = 0`.
pub fn update_t_fixed(t_prev: f64, q: f64) -> f64 {
    let t2 = t_prev * t_prev;
    let b = q * t2 - 1.0;
    let root = (b * b + 4.0 * t2).sqrt();
    if b <= 0.0 {
        0.5 * (root - b)
    } else {
        2.0 * t2 / (root + b)
    }
}

pub fn update_t_fixed_residual(t_prev: f64, t_next: f64, q: f64) -> f64 {
    t_next * (t_next - 1.0) - (1.0 - q * t_next) * t_prev * t_prev
}

/// `omega = (1 - q t) / (1 - q)`; anything outside `(0, 1]` means the
/// sequences were not generated by a consistent update.
pub fn omega_factor(q: f64, t: f64) -> Result<f64> {
    let omega = (1.0 - q * t) / (1.0 - q);
    if omega > 0.0 && omega <= 1.0 + SEQUENCE_TOL {
        Ok(omega)
    } else {
        Err(Error::InvariantViolation {
            name: "omega in (0, 1]",
            iteration: 0,
            value: omega,
        })
    }
}

/// `beta = omega (t_prev - 1) / t_next`
pub fn beta_factor(omega: f64, t_prev: f64, t_next: f64) -> f64 {
    debug_assert!(t_next > 0.0);
    omega * (t_prev - 1.0) / t_next
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn effective_step_cases() {
        assert_eq!(effective_step(0.125, 0.0).unwrap(), 0.125);
        assert_relative_eq!(effective_step(0.1, 1.0).unwrap(), 0.1 / 0.9, epsilon = 1e-15);
        assert!(matches!(effective_step(0.5, 2.0), Err(Error::Domain(_))));
    }

    #[test]
    fn inverse_condition_cases() {
        assert_eq!(inverse_condition(3.7, 0.0, 0.0), 0.0);
        // (0.1/8) / (1 + 0.1/8), evaluated as 1/81 by hand
        assert_relative_eq!(inverse_condition(0.125, 0.1, 0.1), 1.0 / 81.0, epsilon = 1e-16);
        assert_relative_eq!(inverse_condition(0.125, 0.1, 0.1), 0.012345679012345678, epsilon = 1e-15);
        assert_relative_eq!(inverse_condition(10.0, 0.1, 0.1), 0.5, epsilon = 1e-16);
    }

    #[test]
    fn update_t_cases() {
        let golden = (1.0 + 5f64.sqrt()) / 2.0;
        assert_relative_eq!(update_t(1.0, 0.0, 1.0).unwrap(), golden, epsilon = 1e-15);
        assert_relative_eq!(update_t(0.0, 0.0, 1.0).unwrap(), 1.0, epsilon = 1e-15);

        let t = update_t(1.0, 0.1, 1.0).unwrap();
        let omega = (1.0 - 0.1 * t) / 0.9;
        assert!(update_t_residual(1.0, 1.0, 1.0, t, omega).abs() < 1e-12);
        assert!(t >= 1.0);
    }

    #[test]
    fn update_t_large_weight_is_accurate() {
        // a >> 1 exercises the second branch of the root formula.
        let (t_prev, q, ratio) = (9.0, 0.012, 1.0 / 0.9);
        let t = update_t(t_prev, q, ratio).unwrap();
        let omega = (1.0 - q * t) / (1.0 - q);
        let r = update_t_residual(ratio, 1.0, t_prev, t, omega);
        assert!(r.abs() < 1e-12 * ratio * t_prev * t_prev, "{r}");
    }

    #[test]
    fn fixed_rule_matches_fista_without_strong_convexity() {
        let mut t: f64 = 0.0;
        for _ in 0..50 {
            let fista = (1.0 + (1.0f64 + 4.0 * t * t).sqrt()) / 2.0;
            let next = update_t_fixed(t, 0.0);
            assert_relative_eq!(next, fista, max_relative = 1e-15);
            t = next;
        }
    }

    #[test]
    fn omega_cases() {
        assert_eq!(omega_factor(0.0, 7.3).unwrap(), 1.0);
        assert_relative_eq!(omega_factor(0.37, 1.0).unwrap(), 1.0, epsilon = 1e-15);
        assert_relative_eq!(omega_factor(0.1, 1.5).unwrap(), 0.85 / 0.9, epsilon = 1e-15);
        assert!(omega_factor(0.5, 2.5).is_err());
        assert!(omega_factor(0.5, 0.5).is_err());
    }

    #[test]
    fn beta_cases() {
        assert_eq!(beta_factor(1.0, 1.0, 4.2), 0.0);
        assert_relative_eq!(beta_factor(1.0, 2.5, 3.0), 0.5, epsilon = 1e-15);
        assert_relative_eq!(beta_factor(0.9444, 1.5, 1.588), 0.9444 * 0.5 / 1.588, epsilon = 1e-15);
        assert!((beta_factor(0.9444, 1.5, 1.588) - 0.29736).abs() < 1e-5);
    }
}
