//! Adaptive significance levels for nested linear-model tests.
//!
//! The threshold a p-value is compared against shrinks as the design
//! accumulates information, tracking a Bayes-factor decision instead of a
//! fixed α₀. See [`alpha::adaptive_alpha`] for the core formula and
//! [`decision::run_nested_test`] for the end-to-end test.

// `!(x > 0.0)` is used on purpose so NaN lands in the rejecting branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod alpha;
pub mod calibration;
pub mod dataset;
pub mod decision;
pub mod distcore;
pub mod error;
pub mod linmod;
pub mod simlab;

pub use error::{Error, Result};
