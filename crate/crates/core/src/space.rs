//! Flat real Hilbert-space points.
//!
//! Every iterate the solvers touch (plain vectors, images, dual fields)
//! exposes its coefficients as one contiguous slice, and the Euclidean
//! geometry is the one of that slice.

/// A point of a finite-dimensional real Hilbert space with the Euclidean
/// inner product of its coefficients.
pub trait Point: Clone + Send + Sync {
    fn as_slice(&self) -> &[f64];
    fn as_mut_slice(&mut self) -> &mut [f64];

    fn dot(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.as_slice().len(), other.as_slice().len());
        self.as_slice()
            .iter()
            .zip(other.as_slice())
            .map(|(a, b)| a * b)
            .sum()
    }

    fn norm_sq(&self) -> f64 {
        self.as_slice().iter().map(|a| a * a).sum()
    }

    fn dist_sq(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.as_slice().len(), other.as_slice().len());
        self.as_slice()
            .iter()
            .zip(other.as_slice())
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    }

    fn is_finite(&self) -> bool {
        self.as_slice().iter().all(|v| v.is_finite())
    }

    /// `self += a * x`
    fn axpy(&mut self, a: f64, x: &Self) {
        for (s, xi) in self.as_mut_slice().iter_mut().zip(x.as_slice()) {
            *s += a * xi;
        }
    }

    fn scale(&mut self, a: f64) {
        self.as_mut_slice().iter_mut().for_each(|s| *s *= a);
    }

    fn scaled(&self, a: f64) -> Self {
        let mut out = self.clone();
        out.scale(a);
        out
    }

    /// `a * x + b * y`, taking its shape from `x`.
    fn lin_comb(a: f64, x: &Self, b: f64, y: &Self) -> Self {
        let mut out = x.clone();
        for ((o, xi), yi) in out
            .as_mut_slice()
            .iter_mut()
            .zip(x.as_slice())
            .zip(y.as_slice())
        {
            *o = a * xi + b * yi;
        }
        out
    }

    fn sub(&self, other: &Self) -> Self {
        Self::lin_comb(1.0, self, -1.0, other)
    }

    fn zeros_like(&self) -> Self {
        let mut out = self.clone();
        out.as_mut_slice().iter_mut().for_each(|v| *v = 0.0);
        out
    }
}

impl Point for Vec<f64> {
    fn as_slice(&self) -> &[f64] {
        self
    }

    fn as_mut_slice(&mut self) -> &mut [f64] {
        self
    }
}
