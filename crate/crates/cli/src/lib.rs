//! Experiment harness for the `gfista` solvers: PGM image I/O, trace CSV
//! export, and side-by-side runs of solver variants with certificate checks.

pub mod args;
pub mod experiment;
pub mod pgm;
pub mod trace_csv;

pub use experiment::{run_experiment, ExperimentConfig, ExperimentError, ProblemKind, Summary, Variant};
pub use pgm::{load_pgm, save_pgm};
pub use trace_csv::{emit_csv, read_csv, CsvRecord};
