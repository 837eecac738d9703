use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson};

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::space::Point;

/// `u` plus i.i.d. zero-mean Gaussian noise; no clipping.
pub fn add_gaussian_noise(u: &ScalarField, variance: f64, seed: u64) -> Result<ScalarField> {
    if !(variance >= 0.0) {
        return Err(Error::Domain(format!("variance must be nonnegative, got {variance}")));
    }
    if variance == 0.0 {
        return Ok(u.clone());
    }
    let normal = Normal::new(0.0, variance.sqrt()).map_err(|e| Error::Domain(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = u.clone();
    out.as_mut_slice().iter_mut().for_each(|v| *v += normal.sample(&mut rng));
    Ok(out)
}

/// Poisson counts with mean `peak * u_ij`, reported on the count scale.
pub fn add_poisson_noise(u: &ScalarField, peak: f64, seed: u64) -> Result<ScalarField> {
    if !(peak > 0.0) {
        return Err(Error::Domain(format!("peak must be positive, got {peak}")));
    }
    if let Some(v) = u.as_slice().iter().find(|v| !(**v >= 0.0)) {
        return Err(Error::Domain(format!("Poisson intensities must be nonnegative, found {v}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = u.clone();
    for v in out.as_mut_slice() {
        let mean = peak * *v;
        *v = if mean > 0.0 {
            Poisson::new(mean)
                .map_err(|e| Error::Domain(e.to_string()))?
                .sample(&mut rng)
        } else {
            0.0
        };
    }
    Ok(out)
}
