//! Wavelet-based least-squares estimation of additive regression models on
//! non-equispaced random designs.
//!
//! The estimator expands each additive component in periodized scaling
//! functions at a common level `J`, solves one dense least-squares problem
//! for all coefficients and truncates predictions at a data-driven level
//! `β_n`. The crate also carries the Monte-Carlo harness for the nine
//! standard test functions and the CSV pipeline for real data.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod dataio;
pub mod design;
mod error;
pub mod model;
pub mod rng;
pub mod simbench;
pub mod solver;
pub mod wavelet;

pub use error::{Error, ErrorKind, Result};
