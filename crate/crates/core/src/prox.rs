//! Finite-difference image operators and proximal maps.

use std::sync::Mutex;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::field::{ScalarField, VectorField};
use crate::space::Point;

/// Forward differences with a zero last row (component 0) and zero last
/// column (component 1).
pub fn grad_forward(u: &ScalarField) -> VectorField {
    let (m, n) = u.shape();
    let src = u.as_slice();
    let mut out = VectorField::zeros(m, n);
    let dst = out.as_mut_slice();
    for i in 0..m {
        for j in 0..n {
            let idx = i * n + j;
            let here = src[idx];
            if i + 1 < m {
                dst[2 * idx] = src[idx + n] - here;
            }
            if j + 1 < n {
                dst[2 * idx + 1] = src[idx + 1] - here;
            }
        }
    }
    out
}

/// `D^* p`, the exact adjoint of [`grad_forward`] (a negative divergence).
pub fn div_adjoint(p: &VectorField) -> ScalarField {
    let (m, n) = p.shape();
    let src = p.as_slice();
    let mut out = ScalarField::zeros(m, n);
    let dst = out.as_mut_slice();
    for i in 0..m {
        for j in 0..n {
            let idx = i * n + j;
            let mut v = 0.0;
            if i + 1 < m {
                v -= src[2 * idx];
            }
            if i > 0 {
                v += src[2 * (idx - n)];
            }
            if j + 1 < n {
                v -= src[2 * idx + 1];
            }
            if j > 0 {
                v += src[2 * (idx - 1) + 1];
            }
            dst[idx] = v;
        }
    }
    out
}

/// Isotropic total variation `sum_ij |(Du)_ij|_2`.
pub fn tv_value(u: &ScalarField) -> f64 {
    grad_forward(u)
        .as_slice()
        .chunks_exact(2)
        .map(|c| c[0].hypot(c[1]))
        .sum()
}

/// Power-iteration estimate of `|D|^2`, the top eigenvalue of `D^* D` on an
/// `m x n` grid. Returns a Rayleigh quotient, hence never exceeds the true
/// value (which is below 8).
pub fn operator_norm_sq(m: usize, n: usize, iters: usize) -> f64 {
    assert!(iters >= 1);
    if m * n <= 1 {
        return 0.0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0f_d1ff);
    let mut u = ScalarField::from_fn(m, n, |_| rng.gen_range(-1.0..1.0));
    let mut estimate = 0.0;
    for _ in 0..iters {
        let norm = u.norm_sq().sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        u.scale(1.0 / norm);
        let du = grad_forward(&u);
        estimate = du.norm_sq();
        u = div_adjoint(&du);
    }
    estimate
}

/// Pixel-wise projection onto `{p : |p_ij|_2 <= radius}`.
pub fn project_l2inf_ball(p: &VectorField, radius: f64) -> VectorField {
    debug_assert!(radius > 0.0);
    let mut out = p.clone();
    for px in out.pixels_mut() {
        let scale = 1.0 / (px[0].hypot(px[1]) / radius).max(1.0);
        px[0] *= scale;
        px[1] *= scale;
    }
    out
}

/// Prox of `tau (mu_g/2 |p|^2 + indicator{|p_ij| <= lambda})`:
/// `(p/(1+tau mu_g)) / max{1, |p_ij| / (lambda (1 + tau mu_g))}` per pixel.
pub fn prox_dual_huber_g(p: &VectorField, tau: f64, lambda: f64, mu_g: f64) -> VectorField {
    debug_assert!(lambda > 0.0 && tau > 0.0);
    let s = 1.0 + tau * mu_g;
    let mut out = p.clone();
    for px in out.pixels_mut() {
        let denom = s * (px[0].hypot(px[1]) / (lambda * s)).max(1.0);
        px[0] /= denom;
        px[1] /= denom;
    }
    out
}

/// Prox of `tau (alpha h + eps/2 |.|^2)` from the prox of `h`:
/// `prox_h^{alpha tau / (1 + eps tau)}(z / (1 + eps tau))`.
///
/// `base_prox(v, s)` must return `prox_{s h}(v)`. With `alpha = 0` the result
/// is the pure shrinkage `z / (1 + eps tau)`.
pub fn prox_compose<P: Point>(
    base_prox: impl Fn(&P, f64) -> P,
    alpha: f64,
    eps: f64,
    tau: f64,
    z: &P,
) -> P {
    debug_assert!(alpha >= 0.0 && eps >= 0.0 && tau > 0.0);
    let shrink = 1.0 + eps * tau;
    let scaled = z.scaled(1.0 / shrink);
    if alpha == 0.0 {
        return scaled;
    }
    base_prox(&scaled, alpha * tau / shrink)
}

/// Dual-FISTA step size for the TV prox: `1/8 <= 1/|D|^2`.
pub const TV_DUAL_STEP: f64 = 0.125;

/// Approximate `argmin_u sigma |Du|_{2,1} + 1/2 |u - z|^2` by `inner_iters`
/// FISTA iterations on the dual `min_{|p_ij| <= sigma} 1/2 |D^* p - z|^2`,
/// started from `p = 0`. Returns `z - D^* p`.
pub fn tv_prox(z: &ScalarField, sigma: f64, inner_iters: usize) -> ScalarField {
    let (m, n) = z.shape();
    let (u, _) = tv_prox_dual(z, sigma, inner_iters, VectorField::zeros(m, n));
    u
}

/// [`tv_prox`] from an arbitrary dual start, also returning the final dual.
pub fn tv_prox_dual(z: &ScalarField, sigma: f64, inner_iters: usize, p_init: VectorField) -> (ScalarField, VectorField) {
    debug_assert!(sigma > 0.0 && inner_iters >= 1);
    let mut p = project_l2inf_ball(&p_init, sigma);
    let mut q = p.clone();
    let mut t: f64 = 1.0;
    for _ in 0..inner_iters {
        let residual = div_adjoint(&q).sub(z);
        let grad = grad_forward(&residual);
        let p_next = project_l2inf_ball(&VectorField::lin_comb(1.0, &q, -TV_DUAL_STEP, &grad), sigma);
        let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        q = VectorField::lin_comb(1.0 + (t - 1.0) / t_next, &p_next, -(t - 1.0) / t_next, &p);
        p = p_next;
        t = t_next;
    }
    (z.sub(&div_adjoint(&p)), p)
}

/// TV prox with a configurable inner solver and an optional dual warm start
/// carried between calls.
#[derive(Debug)]
pub struct TvProx {
    pub inner_iters: usize,
    warm_start: Option<Mutex<Option<VectorField>>>,
}

impl TvProx {
    pub fn new(inner_iters: usize) -> Self {
        assert!(inner_iters >= 1);
        Self {
            inner_iters,
            warm_start: None,
        }
    }

    /// Reuse the previous call's dual variable as the next starting point.
    /// Results then depend on call order.
    pub fn with_warm_start(mut self) -> Self {
        self.warm_start = Some(Mutex::new(None));
        self
    }

    pub fn apply(&self, z: &ScalarField, sigma: f64) -> ScalarField {
        let (m, n) = z.shape();
        let Some(cache) = &self.warm_start else {
            return tv_prox(z, sigma, self.inner_iters);
        };
        let mut guard = cache.lock().expect("warm-start cache poisoned");
        let start = match guard.take() {
            Some(p) if p.shape() == (m, n) => p,
            _ => VectorField::zeros(m, n),
        };
        let (u, p) = tv_prox_dual(z, sigma, self.inner_iters, start);
        *guard = Some(p);
        u
    }
}

impl Clone for TvProx {
    fn clone(&self) -> Self {
        Self {
            inner_iters: self.inner_iters,
            warm_start: self.warm_start.as_ref().map(|_| Mutex::new(None)),
        }
    }
}
