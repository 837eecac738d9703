//! Composite objectives `F = f + g`.

use crate::space::Point;

/// `F = f + g` with `f` convex and differentiable and `g` convex, lower
/// semicontinuous and prox-friendly.
///
/// Implementations are immutable once built, so one instance can be shared
/// by solver runs on several threads.
pub trait CompositeProblem: Sync {
    type Point: Point;

    fn f_value(&self, x: &Self::Point) -> f64;
    fn f_grad(&self, x: &Self::Point) -> Self::Point;

    /// May return `f64::INFINITY` outside the domain of `g`.
    fn g_value(&self, x: &Self::Point) -> f64;

    /// `argmin_y g(y) + |z - y|^2 / (2 tau)`
    fn g_prox(&self, z: &Self::Point, tau: f64) -> Self::Point;

    fn mu_f(&self) -> f64 {
        0.0
    }

    fn mu_g(&self) -> f64 {
        0.0
    }

    /// Global Lipschitz constant of `grad f`, when known.
    fn lipschitz_f(&self) -> Option<f64> {
        None
    }

    fn mu(&self) -> f64 {
        self.mu_f() + self.mu_g()
    }

    fn objective(&self, x: &Self::Point) -> f64 {
        self.f_value(x) + self.g_value(x)
    }

    /// Bregman distance `f(x_hat) - f(x_bar) - <grad f(x_bar), x_hat - x_bar>`.
    ///
    /// Problems with a closed form (quadratic `f`) override this to avoid the
    /// cancellation in the generic difference.
    fn f_bregman(&self, x_hat: &Self::Point, x_bar: &Self::Point) -> f64 {
        let grad = self.f_grad(x_bar);
        bregman_generic(self.f_value(x_hat), self.f_value(x_bar), &grad, x_hat, x_bar)
    }
}

pub(crate) fn bregman_generic<P: Point>(f_hat: f64, f_bar: f64, grad_bar: &P, x_hat: &P, x_bar: &P) -> f64 {
    let inner: f64 = grad_bar
        .as_slice()
        .iter()
        .zip(x_hat.as_slice().iter().zip(x_bar.as_slice()))
        .map(|(g, (h, b))| g * (h - b))
        .sum();
    f_hat - f_bar - inner
}

type ValueFn<P> = Box<dyn Fn(&P) -> f64 + Send + Sync>;
type MapFn<P> = Box<dyn Fn(&P) -> P + Send + Sync>;
type ProxFn<P> = Box<dyn Fn(&P, f64) -> P + Send + Sync>;

/// A problem assembled from closures.
pub struct FnProblem<P> {
    f_value: ValueFn<P>,
    f_grad: MapFn<P>,
    g_value: ValueFn<P>,
    g_prox: ProxFn<P>,
    mu_f: f64,
    mu_g: f64,
    lipschitz_f: Option<f64>,
}

impl<P: Point> FnProblem<P> {
    pub fn new(
        f_value: impl Fn(&P) -> f64 + Send + Sync + 'static,
        f_grad: impl Fn(&P) -> P + Send + Sync + 'static,
        g_value: impl Fn(&P) -> f64 + Send + Sync + 'static,
        g_prox: impl Fn(&P, f64) -> P + Send + Sync + 'static,
    ) -> Self {
        Self {
            f_value: Box::new(f_value),
            f_grad: Box::new(f_grad),
            g_value: Box::new(g_value),
            g_prox: Box::new(g_prox),
            mu_f: 0.0,
            mu_g: 0.0,
            lipschitz_f: None,
        }
    }

    /// Smooth-only problem (`g = 0`).
    pub fn smooth(
        f_value: impl Fn(&P) -> f64 + Send + Sync + 'static,
        f_grad: impl Fn(&P) -> P + Send + Sync + 'static,
    ) -> Self {
        Self::new(f_value, f_grad, |_| 0.0, |z, _| z.clone())
    }

    pub fn with_mu_f(mut self, mu_f: f64) -> Self {
        self.mu_f = mu_f;
        self
    }

    pub fn with_mu_g(mut self, mu_g: f64) -> Self {
        self.mu_g = mu_g;
        self
    }

    pub fn with_lipschitz(mut self, lipschitz_f: f64) -> Self {
        self.lipschitz_f = Some(lipschitz_f);
        self
    }
}

impl<P: Point> CompositeProblem for FnProblem<P> {
    type Point = P;

    fn f_value(&self, x: &P) -> f64 {
        (self.f_value)(x)
    }

    fn f_grad(&self, x: &P) -> P {
        (self.f_grad)(x)
    }

    fn g_value(&self, x: &P) -> f64 {
        (self.g_value)(x)
    }

    fn g_prox(&self, z: &P, tau: f64) -> P {
        (self.g_prox)(z, tau)
    }

    fn mu_f(&self) -> f64 {
        self.mu_f
    }

    fn mu_g(&self) -> f64 {
        self.mu_g
    }

    fn lipschitz_f(&self) -> Option<f64> {
        self.lipschitz_f
    }
}

/// Presents a problem to the solver with different convexity moduli.
///
/// Reporting `mu = 0` for a strongly convex problem runs plain FISTA on it.
pub struct WithConvexity<'a, Pr> {
    inner: &'a Pr,
    mu_f: f64,
    mu_g: f64,
}

impl<'a, Pr: CompositeProblem> WithConvexity<'a, Pr> {
    pub fn new(inner: &'a Pr, mu_f: f64, mu_g: f64) -> Self {
        Self { inner, mu_f, mu_g }
    }

    pub fn ignoring_strong_convexity(inner: &'a Pr) -> Self {
        Self::new(inner, 0.0, 0.0)
    }
}

impl<Pr: CompositeProblem> CompositeProblem for WithConvexity<'_, Pr> {
    type Point = Pr::Point;

    fn f_value(&self, x: &Self::Point) -> f64 {
        self.inner.f_value(x)
    }

    fn f_grad(&self, x: &Self::Point) -> Self::Point {
        self.inner.f_grad(x)
    }

    fn g_value(&self, x: &Self::Point) -> f64 {
        self.inner.g_value(x)
    }

    fn g_prox(&self, z: &Self::Point, tau: f64) -> Self::Point {
        self.inner.g_prox(z, tau)
    }

    fn mu_f(&self) -> f64 {
        self.mu_f
    }

    fn mu_g(&self) -> f64 {
        self.mu_g
    }

    fn lipschitz_f(&self) -> Option<f64> {
        self.inner.lipschitz_f()
    }

    fn f_bregman(&self, x_hat: &Self::Point, x_bar: &Self::Point) -> f64 {
        self.inner.f_bregman(x_hat, x_bar)
    }
}

/// `f(x) = 1/2 sum_i a_i (x_i - c_i)^2`, `g(x) = gamma/2 |x|^2 + kappa |x|_1`.
///
/// Everything is separable, so the minimizer is known in closed form:
/// `x*_i = soft(a_i c_i, kappa) / (a_i + gamma)`.
#[derive(Debug, Clone)]
pub struct SeparableQuadratic {
    pub curvature: Vec<f64>,
    pub center: Vec<f64>,
    pub ridge: f64,
    pub l1: f64,
}

impl SeparableQuadratic {
    pub fn new(curvature: Vec<f64>, center: Vec<f64>, ridge: f64, l1: f64) -> Self {
        assert_eq!(curvature.len(), center.len());
        assert!(curvature.iter().all(|&a| a >= 0.0) && ridge >= 0.0 && l1 >= 0.0);
        Self {
            curvature,
            center,
            ridge,
            l1,
        }
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn minimizer(&self) -> Vec<f64> {
        self.curvature
            .iter()
            .zip(&self.center)
            .map(|(&a, &c)| soft_threshold(a * c, self.l1) / (a + self.ridge))
            .collect()
    }
}

pub fn soft_threshold(z: f64, threshold: f64) -> f64 {
    z.signum() * (z.abs() - threshold).max(0.0)
}

impl CompositeProblem for SeparableQuadratic {
    type Point = Vec<f64>;

    fn f_value(&self, x: &Vec<f64>) -> f64 {
        x.iter()
            .zip(&self.curvature)
            .zip(&self.center)
            .map(|((x, a), c)| 0.5 * a * (x - c) * (x - c))
            .sum()
    }

    fn f_grad(&self, x: &Vec<f64>) -> Vec<f64> {
        x.iter()
            .zip(&self.curvature)
            .zip(&self.center)
            .map(|((x, a), c)| a * (x - c))
            .collect()
    }

    fn g_value(&self, x: &Vec<f64>) -> f64 {
        0.5 * self.ridge * x.norm_sq() + self.l1 * x.iter().map(|v| v.abs()).sum::<f64>()
    }

    fn g_prox(&self, z: &Vec<f64>, tau: f64) -> Vec<f64> {
        let shrink = 1.0 + tau * self.ridge;
        z.iter()
            .map(|&v| soft_threshold(v, tau * self.l1) / shrink)
            .collect()
    }

    fn mu_f(&self) -> f64 {
        self.curvature.iter().copied().fold(f64::INFINITY, f64::min)
    }

    fn mu_g(&self) -> f64 {
        self.ridge
    }

    fn lipschitz_f(&self) -> Option<f64> {
        Some(self.curvature.iter().copied().fold(0.0, f64::max))
    }

    fn f_bregman(&self, x_hat: &Vec<f64>, x_bar: &Vec<f64>) -> f64 {
        x_hat
            .iter()
            .zip(x_bar)
            .zip(&self.curvature)
            .map(|((h, b), a)| 0.5 * a * (h - b) * (h - b))
            .sum()
    }
}
