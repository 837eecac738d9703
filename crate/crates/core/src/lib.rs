//! Accelerated proximal-gradient solvers for `min f + g` with strongly
//! convex components, adaptive step sizes, and per-iteration rate bounds.
//!
//! The crate is organised in four layers:
//!
//! - [`space`] and [`field`]: points the solvers operate on,
//! - [`problem`]: the composite objective abstraction,
//! - [`solver`]: fixed-step and backtracking iterations with certificates,
//! - [`prox`], [`fidelity`] and [`imaging`]: image operators, data terms and
//!   the two denoising problems used as case studies.

pub mod error;
pub mod field;
pub mod problem;
pub mod solver;
pub mod space;

pub use error::{Error, Result};
pub use field::{ScalarField, VectorField};
pub use problem::{CompositeProblem, FnProblem, SeparableQuadratic, WithConvexity};
pub use solver::{Gfista, Reference, SolverConfig, StepMode, Trace, TraceRecord};
pub use space::Point;
pub mod fidelity;
pub mod prox;
pub mod imaging;
