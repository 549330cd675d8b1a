//! Experiment drivers behind the CLI: single trials, noise injection and
//! parameter sweeps written as CSV.

pub mod sweep;
pub mod trial;

pub use sweep::{run_sweep, write_csv, FilterChoice, SweepRow, SweepSpec, CSV_HEADER};
pub use trial::{run_trial, Trial, UniformNoise};
