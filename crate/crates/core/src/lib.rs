//! Recovery of bandlimited signals from modulo-folded samples.
//!
//! Samples `x_n = x(n Ts)` of a signal bandlimited to `[-W, W]` are observed
//! only through `x*_n = [x_n] mod delta`. When `W Ts < 1/2`, a monic linear
//! predictor built from a shifted Chebyshev polynomial keeps the prediction
//! residual below `delta/2`, so the folds can be undone one sample at a time.
//!
//! * [`math`]: modulo reduction and the predictor polynomial.
//! * [`signal`]: test signals, sampling, folding and sinc interpolation.
//! * [`recovery`]: filter sizing, start index and the sequential decoder.
//! * [`harness`]: experiment drivers behind the `modunfold` CLI.

pub mod error;
pub mod harness;
pub mod json;
pub mod math;
pub mod recovery;
pub mod signal;

pub use error::{Error, Result};
