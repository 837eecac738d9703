//! Smooth terms of the denoising models: Huber-smoothed TV and the
//! differentiable Kullback-Leibler data term.

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::prox::grad_forward;
use crate::space::Point;

/// `t^2 / (2 eps)` on `|t| <= eps`, `|t| - eps/2` beyond.
pub fn huber_scalar(t: f64, eps: f64) -> f64 {
    debug_assert!(eps > 0.0);
    let a = t.abs();
    if a <= eps {
        t * t / (2.0 * eps)
    } else {
        a - 0.5 * eps
    }
}

/// Derivative of [`huber_scalar`].
pub fn huber_scalar_deriv(t: f64, eps: f64) -> f64 {
    if t.abs() <= eps {
        t / eps
    } else {
        t.signum()
    }
}

/// `sum_ij h_eps(|(Du)_ij|_2)`
pub fn huber_tv_value(u: &ScalarField, eps: f64) -> f64 {
    grad_forward(u)
        .as_slice()
        .chunks_exact(2)
        .map(|c| huber_scalar(c[0].hypot(c[1]), eps))
        .sum()
}

/// Checks the data/background pair: `u0 >= 0`, `b > 0`, same grid.
pub fn validate_kl_data(u0: &ScalarField, b: &ScalarField) -> Result<()> {
    u0.same_shape(b)?;
    if let Some(v) = u0.as_slice().iter().find(|v| !(**v >= 0.0)) {
        return Err(Error::Domain(format!("KL data must be nonnegative, found {v}")));
    }
    if let Some(v) = b.as_slice().iter().find(|v| !(**v > 0.0)) {
        return Err(Error::Domain(format!("KL background must be positive, found {v}")));
    }
    Ok(())
}

fn xlogx_ratio(a: f64, c: f64) -> f64 {
    // a log(a / c), with 0 log 0 = 0
    if a == 0.0 {
        0.0
    } else {
        a * (a / c).ln()
    }
}

#[inline]
pub(crate) fn kl_pixel(u: f64, u0: f64, b: f64) -> f64 {
    if u >= 0.0 {
        u + b - u0 + xlogx_ratio(u0, u + b)
    } else {
        u0 / (2.0 * b * b) * u * u + (1.0 - u0 / b) * u + b - u0 + xlogx_ratio(u0, b)
    }
}

#[inline]
pub(crate) fn kl_pixel_grad(u: f64, u0: f64, b: f64) -> f64 {
    if u >= 0.0 {
        1.0 - u0 / (u + b)
    } else {
        u0 / (b * b) * u + 1.0 - u0 / b
    }
}

/// Differentiable KL divergence, extended quadratically to negative `u`.
pub fn kl_value(u: &ScalarField, u0: &ScalarField, b: &ScalarField) -> Result<f64> {
    validate_kl_data(u0, b)?;
    u.same_shape(u0)?;
    Ok(kl_value_unchecked(u, u0, b))
}

pub(crate) fn kl_value_unchecked(u: &ScalarField, u0: &ScalarField, b: &ScalarField) -> f64 {
    u.as_slice()
        .iter()
        .zip(u0.as_slice())
        .zip(b.as_slice())
        .map(|((&u, &u0), &b)| kl_pixel(u, u0, b))
        .sum()
}

pub fn kl_grad(u: &ScalarField, u0: &ScalarField, b: &ScalarField) -> Result<ScalarField> {
    validate_kl_data(u0, b)?;
    u.same_shape(u0)?;
    Ok(kl_grad_unchecked(u, u0, b))
}

pub(crate) fn kl_grad_unchecked(u: &ScalarField, u0: &ScalarField, b: &ScalarField) -> ScalarField {
    let mut g = u.clone();
    for ((gi, &u0), &b) in g.as_mut_slice().iter_mut().zip(u0.as_slice()).zip(b.as_slice()) {
        *gi = kl_pixel_grad(*gi, u0, b);
    }
    g
}

/// `max_ij u0_ij / b_ij^2`, a global Lipschitz constant of the KL gradient.
pub fn kl_lipschitz(u0: &ScalarField, b: &ScalarField) -> Result<f64> {
    validate_kl_data(u0, b)?;
    Ok(u0
        .as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(&a, &b)| a / (b * b))
        .fold(0.0, f64::max))
}
