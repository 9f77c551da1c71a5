//! Orthonormal scaling filters and exact evaluation of φ, φ_{J,k} and the
//! periodized φ^per_{J,k} on `[0, 1]`.

pub mod dwt;
mod evaluator;
mod filters;

pub use evaluator::{ScalingEvaluator, DEFAULT_DEPTH};
pub use filters::{make_filter, WaveletFilter, FILTER_NAMES};

/// Shorthand for `ScalingEvaluator::new(make_filter(name)?)`.
pub fn evaluator(name: &str) -> crate::Result<ScalingEvaluator> {
    ScalingEvaluator::new(make_filter(name)?)
}
