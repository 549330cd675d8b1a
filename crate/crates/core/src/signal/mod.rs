//! Test signals, sampling, folding and Shannon-Whittaker interpolation.

pub mod spec;
pub mod stream;

pub use spec::{eval_signal, eval_signal_at_index, gen_signal, sinc, SignalSpec};
pub use stream::{fold, sample, sample_precise, whittaker_reconstruct, SampleStream, F64_PRECISION};
