//! Filter sizing, start-index selection and the sequential unfolding decoder.

pub mod config;
pub mod decoder;
pub mod filter;

pub use config::{required_k, start_index, RecoveryConfig, DEFAULT_MARGIN, MAX_CHEBYSHEV_ORDER};
pub use decoder::{max_prediction_error, unfold, verify_error_bound, TrialReport, SUCCESS_TOLERANCE};
pub use filter::{build_filter, predict, FilterKind, PredictorFilter};
