//! Monotone safeguard: reject candidates that increase `F`, and correct the
//! next extrapolation accordingly.

use crate::error::{Error, Result};
use crate::problem::CompositeProblem;
use crate::space::Point;

/// Returns `candidate` when `F(candidate) <= F(x_prev)`, else `x_prev`.
/// Ties keep the candidate.
pub fn monotone_select<Pr: CompositeProblem>(problem: &Pr, x_prev: &Pr::Point, candidate: &Pr::Point) -> Pr::Point {
    if problem.objective(candidate) <= problem.objective(x_prev) {
        candidate.clone()
    } else {
        x_prev.clone()
    }
}

/// `x_curr + beta ((x_curr - x_prev) + t_prev/(t_prev - 1) (candidate - x_curr))`.
///
/// With `t_prev = 1` the correction coefficient is undefined; since `beta`
/// vanishes too the product is taken as zero, which is only meaningful when
/// `candidate == x_curr`.
pub fn monotone_extrapolate<P: Point>(
    x_curr: &P,
    x_prev: &P,
    candidate: &P,
    beta: f64,
    t_prev: f64,
) -> Result<P> {
    let correction = if t_prev == 1.0 {
        if candidate.as_slice() != x_curr.as_slice() {
            return Err(Error::DegenerateExtrapolation);
        }
        0.0
    } else {
        beta * t_prev / (t_prev - 1.0)
    };
    Ok(extrapolate(x_curr, x_prev, candidate, beta, correction))
}

/// `x_curr + momentum (x_curr - x_prev) + correction (candidate - x_curr)`.
///
/// The solvers pass `correction = omega t_k / t_{k+1}`, which equals
/// `beta t_k / (t_k - 1)` and stays finite at `t_k = 1`.
pub(crate) fn extrapolate<P: Point>(x_curr: &P, x_prev: &P, candidate: &P, momentum: f64, correction: f64) -> P {
    let mut y = x_curr.clone();
    for (((yi, &xc), &xp), &c) in y
        .as_mut_slice()
        .iter_mut()
        .zip(x_curr.as_slice())
        .zip(x_prev.as_slice())
        .zip(candidate.as_slice())
    {
        *yi = xc + momentum * (xc - xp) + correction * (c - xc);
    }
    y
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::FnProblem;

    fn bowl() -> FnProblem<Vec<f64>> {
        FnProblem::smooth(|x: &Vec<f64>| x.norm_sq(), |x: &Vec<f64>| x.scaled(2.0))
    }

    #[test]
    fn select_cases() {
        let p = bowl();
        let near = vec![0.1];
        let far = vec![2.0];
        assert_eq!(monotone_select(&p, &far, &near), near);
        assert_eq!(monotone_select(&p, &near, &far), near);
        assert_eq!(monotone_select(&p, &vec![-1.0], &vec![1.0]), vec![1.0]);
    }

    #[test]
    fn accepted_candidate_gives_plain_extrapolation() {
        let (x, xp) = (vec![1.0, 2.0], vec![0.0, 1.0]);
        let y = monotone_extrapolate(&x, &xp, &x, 0.5, 1.7).unwrap();
        assert_eq!(y, vec![1.5, 2.5]);
    }

    #[test]
    fn rejected_step_uses_candidate_direction() {
        let x = vec![1.0, 1.0];
        let cand = vec![3.0, 0.0];
        let (beta, t) = (0.4, 2.0);
        let y = monotone_extrapolate(&x, &x, &cand, beta, t).unwrap();
        let c = beta * t / (t - 1.0);
        assert_eq!(y, vec![1.0 + c * 2.0, 1.0 - c]);
    }

    #[test]
    fn zero_beta_and_degenerate_cases() {
        let (x, xp, cand) = (vec![1.0], vec![4.0], vec![-2.0]);
        assert_eq!(monotone_extrapolate(&x, &xp, &cand, 0.0, 3.0).unwrap(), x);
        assert_eq!(monotone_extrapolate(&x, &xp, &x, 0.0, 1.0).unwrap(), x);
        assert!(matches!(
            monotone_extrapolate(&x, &xp, &cand, 0.0, 1.0),
            Err(Error::DegenerateExtrapolation)
        ));
    }
}
