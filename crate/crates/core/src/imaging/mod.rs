//! The two denoising case studies, with their data generators and the
//! long-run reference solutions used to measure optimality gaps.

mod huber_rof;
mod noise;
mod phantom;
mod poisson_tv;
mod reference;

pub use huber_rof::{primal_from_dual, HuberRofDual, HuberRofSpec};
pub use noise::{add_gaussian_noise, add_poisson_noise};
pub use phantom::phantom;
pub use poisson_tv::{PoissonTv, PoissonTvSpec};
pub use reference::{compute_reference, problem_hash, GridPoint, ReferenceCache, REFERENCE_MAGIC};
