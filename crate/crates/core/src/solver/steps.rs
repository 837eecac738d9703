//! Forward-backward step and the curvature tests used by backtracking.

use crate::error::{Error, Result};
use crate::problem::CompositeProblem;
use crate::space::Point;

/// Absolute slack for accepting the sufficient-decrease test.
pub const CB_TOL: f64 = 1e-12;

/// `prox_{tau g}(y - tau grad f(y))`
pub fn forward_backward<Pr: CompositeProblem>(problem: &Pr, y: &Pr::Point, tau: f64) -> Result<Pr::Point> {
    debug_assert!(tau > 0.0);
    let grad = problem.f_grad(y);
    if !grad.is_finite() {
        return Err(Error::NumericalFailure {
            step: "gradient of f",
            iteration: None,
        });
    }
    let z = Pr::Point::lin_comb(1.0, y, -tau, &grad);
    let x = problem.g_prox(&z, tau);
    if !x.is_finite() {
        return Err(Error::NumericalFailure {
            step: "prox of g",
            iteration: None,
        });
    }
    Ok(x)
}

/// `D_f(x_hat, x_bar)`, rejecting values that contradict convexity of `f`.
pub fn bregman_f<Pr: CompositeProblem>(problem: &Pr, x_hat: &Pr::Point, x_bar: &Pr::Point) -> Result<f64> {
    let d = problem.f_bregman(x_hat, x_bar);
    // round-off in f itself scales with |f|
    let tol = 1e-12 * problem.f_value(x_bar).abs().max(1.0);
    if d < -tol || d.is_nan() {
        return Err(Error::InvariantViolation {
            name: "Bregman distance >= 0",
            iteration: 0,
            value: d,
        });
    }
    Ok(d.max(0.0))
}

/// `D_f <= |x_hat - x_bar|^2 / (2 tau)`, given the Bregman distance.
pub(crate) fn cb_holds(bregman: f64, dist_sq: f64, tau: f64) -> bool {
    bregman <= dist_sq / (2.0 * tau) + CB_TOL
}

/// Local curvature `2 D_f / |x_hat - x_bar|^2`, zero for coincident points.
pub(crate) fn local_curvature(bregman: f64, dist_sq: f64) -> f64 {
    if dist_sq > 0.0 {
        2.0 * bregman / dist_sq
    } else {
        0.0
    }
}

/// Sufficient-decrease test for step `tau`.
pub fn check_cb<Pr: CompositeProblem>(problem: &Pr, x_hat: &Pr::Point, x_bar: &Pr::Point, tau: f64) -> bool {
    let d = problem.f_bregman(x_hat, x_bar);
    cb_holds(d, x_hat.dist_sq(x_bar), tau)
}

/// True when the local curvature exceeds `c_bt / tau`, i.e. the step must
/// not grow.
pub fn check_cb2<Pr: CompositeProblem>(
    problem: &Pr,
    x_hat: &Pr::Point,
    x_bar: &Pr::Point,
    tau: f64,
    c_bt: f64,
) -> bool {
    let d = problem.f_bregman(x_hat, x_bar);
    local_curvature(d, x_hat.dist_sq(x_bar)) > c_bt / tau
}

/// Checks `F(x_hat) + (1 + tau mu_g)|x - x_hat|^2/(2 tau) <= F(x) + (1 - tau mu_f)|x - x_bar|^2/(2 tau)`
/// for `x_hat = T_tau x_bar`, with slack `1e-10 (1 + |F(x)|)`.
pub fn verify_descent_inequality<Pr: CompositeProblem>(
    problem: &Pr,
    x: &Pr::Point,
    x_bar: &Pr::Point,
    tau: f64,
) -> Result<bool> {
    let x_hat = forward_backward(problem, x_bar, tau)?;
    let f_x = problem.objective(x);
    let lhs = problem.objective(&x_hat) + (1.0 + tau * problem.mu_g()) * x.dist_sq(&x_hat) / (2.0 * tau);
    let rhs = f_x + (1.0 - tau * problem.mu_f()) * x.dist_sq(x_bar) / (2.0 * tau);
    Ok(lhs <= rhs + 1e-10 * (1.0 + f_x.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::FnProblem;

    fn scaled_quadratic(l: f64) -> FnProblem<Vec<f64>> {
        FnProblem::smooth(
            move |x: &Vec<f64>| 0.5 * l * x.norm_sq(),
            move |x: &Vec<f64>| x.scaled(l),
        )
        .with_lipschitz(l)
    }

    #[test]
    fn fb_exact_gradient_step() {
        let p = scaled_quadratic(1.0);
        let x = forward_backward(&p, &vec![2.0, 0.0], 1.0).unwrap();
        assert_eq!(x, vec![0.0, 0.0]);
    }

    #[test]
    fn fb_projection_onto_ball() {
        let p: FnProblem<Vec<f64>> = FnProblem::new(
            |_| 0.0,
            |x: &Vec<f64>| x.zeros_like(),
            |x: &Vec<f64>| if x.norm_sq() <= 1.0 + 1e-12 { 0.0 } else { f64::INFINITY },
            |z: &Vec<f64>, _| z.scaled(1.0 / z.norm_sq().sqrt().max(1.0)),
        );
        for tau in [0.01, 1.0, 100.0] {
            let x = forward_backward(&p, &vec![3.0, 4.0], tau).unwrap();
            assert!((x[0] - 0.6).abs() < 1e-15 && (x[1] - 0.8).abs() < 1e-15);
        }
    }

    #[test]
    fn fb_reports_nonfinite_gradient() {
        let p: FnProblem<Vec<f64>> = FnProblem::smooth(|_| 0.0, |x: &Vec<f64>| x.scaled(f64::NAN));
        assert!(matches!(
            forward_backward(&p, &vec![1.0], 1.0),
            Err(Error::NumericalFailure { step: "gradient of f", .. })
        ));
    }

    #[test]
    fn bregman_cases() {
        let p = scaled_quadratic(1.0);
        let a = vec![0.3, -1.2];
        assert_eq!(bregman_f(&p, &a, &a).unwrap(), 0.0);
        assert_eq!(bregman_f(&p, &vec![1.0, 0.0], &vec![0.0, 0.0]).unwrap(), 0.5);

        let concave: FnProblem<Vec<f64>> =
            FnProblem::smooth(|x: &Vec<f64>| -x.norm_sq(), |x: &Vec<f64>| x.scaled(-2.0));
        assert!(bregman_f(&concave, &vec![1.0], &vec![0.0]).is_err());
    }

    #[test]
    fn cb_cases() {
        let l = 4.0;
        let p = scaled_quadratic(l);
        let a = vec![1.0, 2.0];
        let b = vec![-0.5, 0.25];
        assert!(check_cb(&p, &a, &a, 1.0));
        assert!(check_cb(&p, &a, &b, 1.0 / l));
        assert!(!check_cb(&p, &a, &b, 2.0 / l));
    }

    #[test]
    fn cb2_cases() {
        let l = 4.0;
        let p = scaled_quadratic(l);
        let a = vec![1.0, 2.0];
        let b = vec![-0.5, 0.25];
        assert!(!check_cb2(&p, &a, &a, 1.0 / l, 0.9));
        assert!(check_cb2(&p, &a, &b, 1.0 / l, 0.9));
        assert!(!check_cb2(&p, &a, &b, 1.0 / (2.0 * l), 0.9));
    }

    #[test]
    fn descent_inequality_at_minimizer_and_violation() {
        let l = 3.0;
        let p = scaled_quadratic(l);
        let zero = vec![0.0, 0.0];
        assert!(verify_descent_inequality(&p, &zero, &zero, 1.0 / l).unwrap());
        // tau = 10/L overshoots: T x_bar = -9 x_bar
        let far = vec![10.0, -10.0];
        assert!(!verify_descent_inequality(&p, &zero, &far, 10.0 / l).unwrap());
    }
}
