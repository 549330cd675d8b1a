//! Modulo arithmetic, Chebyshev polynomials and the predictor construction.

pub mod chebyshev;
pub mod dyadic;
pub mod modulo;
pub mod predictor;

pub use chebyshev::chebyshev_value;
pub use modulo::{mod_reduce, mod_reduce_float};
pub use predictor::{
    band_edge_frequency, build_pk, eval_on_unit_circle, eval_on_unit_circle_precise, in_band_max,
    in_band_max_precise, PkSequence, PredictorTaps,
};
