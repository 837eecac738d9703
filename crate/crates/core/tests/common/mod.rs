#![allow(dead_code)]

use gfista::imaging::{add_gaussian_noise, add_poisson_noise, phantom, HuberRofSpec, PoissonTvSpec};
use gfista::{ScalarField, VectorField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const NOISE_VARIANCE: f64 = 0.005;
pub const POISSON_PEAK: f64 = 45.0;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn noisy_phantom(size: usize, seed: u64) -> ScalarField {
    add_gaussian_noise(&phantom(size, size), NOISE_VARIANCE, seed).unwrap()
}

pub fn huber_rof(size: usize, seed: u64) -> HuberRofSpec {
    HuberRofSpec::new(noisy_phantom(size, seed), 0.1, 0.01).unwrap()
}

pub fn poisson_tv(size: usize, seed: u64) -> PoissonTvSpec {
    let counts = add_poisson_noise(&phantom(size, size), POISSON_PEAK, seed).unwrap();
    PoissonTvSpec::with_unit_background(counts, 0.1, 0.15, 10).unwrap()
}

pub fn random_scalar(rng: &mut ChaCha8Rng, m: usize, n: usize, lo: f64, hi: f64) -> ScalarField {
    ScalarField::from_fn(m, n, |_| rng.gen_range(lo..hi))
}

pub fn random_vector(rng: &mut ChaCha8Rng, m: usize, n: usize, lo: f64, hi: f64) -> VectorField {
    VectorField::from_fn(m, n, |_| rng.gen_range(lo..hi))
}
