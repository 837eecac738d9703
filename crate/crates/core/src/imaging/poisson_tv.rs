use crate::error::{Error, Result};
use crate::fidelity::{kl_grad_unchecked, kl_lipschitz, kl_value_unchecked, validate_kl_data};
use crate::field::ScalarField;
use crate::problem::CompositeProblem;
use crate::prox::{prox_compose, tv_value, TvProx};
use crate::space::Point;

/// Poisson denoising with a strongly convex TV prior.
#[derive(Debug, Clone)]
pub struct PoissonTvSpec {
    pub u0: ScalarField,
    pub background: ScalarField,
    pub lambda: f64,
    pub eps_sc: f64,
    pub inner_iters: usize,
}

impl PoissonTvSpec {
    pub fn new(u0: ScalarField, background: ScalarField, lambda: f64, eps_sc: f64, inner_iters: usize) -> Result<Self> {
        validate_kl_data(&u0, &background)?;
        if !(lambda > 0.0 && eps_sc > 0.0) || inner_iters == 0 {
            return Err(Error::Domain(format!(
                "need lambda > 0, eps > 0, inner_iters >= 1; got {lambda}, {eps_sc}, {inner_iters}"
            )));
        }
        Ok(Self {
            u0,
            background,
            lambda,
            eps_sc,
            inner_iters,
        })
    }

    /// Constant unit background.
    pub fn with_unit_background(u0: ScalarField, lambda: f64, eps_sc: f64, inner_iters: usize) -> Result<Self> {
        let (m, n) = u0.shape();
        Self::new(u0, ScalarField::filled(m, n, 1.0), lambda, eps_sc, inner_iters)
    }

    pub fn build(&self) -> Result<PoissonTv> {
        build_poisson_tv(self)
    }
}

/// `min_u KL(u0, u) + lambda |Du|_{2,1} + eps/2 |u|^2`.
#[derive(Debug, Clone)]
pub struct PoissonTv {
    spec: PoissonTvSpec,
    lipschitz: f64,
    tv: TvProx,
}

pub fn build_poisson_tv(spec: &PoissonTvSpec) -> Result<PoissonTv> {
    Ok(PoissonTv {
        lipschitz: kl_lipschitz(&spec.u0, &spec.background)?,
        tv: TvProx::new(spec.inner_iters),
        spec: spec.clone(),
    })
}

impl PoissonTv {
    pub fn spec(&self) -> &PoissonTvSpec {
        &self.spec
    }

    pub fn initial_point(&self) -> ScalarField {
        self.spec.u0.clone()
    }

    /// Carry the inner dual variable across prox calls.
    pub fn with_warm_start(mut self) -> Self {
        self.tv = TvProx::new(self.spec.inner_iters).with_warm_start();
        self
    }
}

impl CompositeProblem for PoissonTv {
    type Point = ScalarField;

    fn f_value(&self, u: &ScalarField) -> f64 {
        kl_value_unchecked(u, &self.spec.u0, &self.spec.background)
    }

    fn f_grad(&self, u: &ScalarField) -> ScalarField {
        kl_grad_unchecked(u, &self.spec.u0, &self.spec.background)
    }

    fn g_value(&self, u: &ScalarField) -> f64 {
        self.spec.lambda * tv_value(u) + 0.5 * self.spec.eps_sc * u.norm_sq()
    }

    fn g_prox(&self, z: &ScalarField, tau: f64) -> ScalarField {
        prox_compose(|v, s| self.tv.apply(v, s), self.spec.lambda, self.spec.eps_sc, tau, z)
    }

    fn mu_g(&self) -> f64 {
        self.spec.eps_sc
    }

    fn lipschitz_f(&self) -> Option<f64> {
        Some(self.lipschitz)
    }
}
