use crate::error::{Error, Result};
use crate::fidelity::huber_tv_value;
use crate::field::{ScalarField, VectorField};
use crate::problem::CompositeProblem;
use crate::prox::{div_adjoint, grad_forward, project_l2inf_ball, prox_dual_huber_g};
use crate::space::Point;

/// Bound on `|D|^2` for forward differences on any grid.
pub const GRADIENT_NORM_SQ_BOUND: f64 = 8.0;

/// Huber-smoothed ROF denoising of `u0`.
#[derive(Debug, Clone)]
pub struct HuberRofSpec {
    pub u0: ScalarField,
    pub lambda: f64,
    pub eps_huber: f64,
}

impl HuberRofSpec {
    pub fn new(u0: ScalarField, lambda: f64, eps_huber: f64) -> Result<Self> {
        if !(lambda > 0.0 && eps_huber > 0.0) {
            return Err(Error::Domain(format!(
                "lambda and eps must be positive, got {lambda} and {eps_huber}"
            )));
        }
        Ok(Self { u0, lambda, eps_huber })
    }

    /// `lambda H_eps(u) + 1/2 |u - u0|^2`
    pub fn primal_energy(&self, u: &ScalarField) -> f64 {
        self.lambda * huber_tv_value(u, self.eps_huber) + 0.5 * u.dist_sq(&self.u0)
    }

    pub fn build(&self) -> HuberRofDual {
        build_huber_rof_dual(self)
    }
}

/// Dual of the Huber-ROF model,
/// `min_p 1/2 |D^* p - u0|^2 + eps/(2 lambda) |p|^2 + indicator{|p_ij| <= lambda}`.
#[derive(Debug, Clone)]
pub struct HuberRofDual {
    spec: HuberRofSpec,
    mu_g: f64,
}

pub fn build_huber_rof_dual(spec: &HuberRofSpec) -> HuberRofDual {
    HuberRofDual {
        spec: spec.clone(),
        mu_g: spec.eps_huber / spec.lambda,
    }
}

impl HuberRofDual {
    pub fn spec(&self) -> &HuberRofSpec {
        &self.spec
    }

    /// `D u0` projected onto the feasible set, so that `F(p0)` is finite.
    pub fn initial_point(&self) -> VectorField {
        project_l2inf_ball(&grad_forward(&self.spec.u0), self.spec.lambda)
    }

    pub fn primal(&self, p: &VectorField) -> ScalarField {
        primal_from_dual(&self.spec, p)
    }
}

/// `u = u0 - D^* p`. No clamping; that is left to image export.
pub fn primal_from_dual(spec: &HuberRofSpec, p: &VectorField) -> ScalarField {
    spec.u0.sub(&div_adjoint(p))
}

impl CompositeProblem for HuberRofDual {
    type Point = VectorField;

    fn f_value(&self, p: &VectorField) -> f64 {
        0.5 * div_adjoint(p).dist_sq(&self.spec.u0)
    }

    fn f_grad(&self, p: &VectorField) -> VectorField {
        grad_forward(&div_adjoint(p).sub(&self.spec.u0))
    }

    fn g_value(&self, p: &VectorField) -> f64 {
        // Projection output can overshoot the radius by an ulp.
        if p.max_pixel_norm() > self.spec.lambda * (1.0 + 1e-12) {
            return f64::INFINITY;
        }
        0.5 * self.mu_g * p.norm_sq()
    }

    fn g_prox(&self, z: &VectorField, tau: f64) -> VectorField {
        prox_dual_huber_g(z, tau, self.spec.lambda, self.mu_g)
    }

    fn mu_g(&self) -> f64 {
        self.mu_g
    }

    fn lipschitz_f(&self) -> Option<f64> {
        Some(GRADIENT_NORM_SQ_BOUND)
    }

    /// `f` is quadratic: `D_f(a, b) = 1/2 |D^*(a - b)|^2`.
    fn f_bregman(&self, x_hat: &VectorField, x_bar: &VectorField) -> f64 {
        0.5 * div_adjoint(&x_hat.sub(x_bar)).norm_sq()
    }
}
