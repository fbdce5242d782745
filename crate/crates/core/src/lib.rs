//! Workbench for comparing multiple linear regression (full, forward,
//! stepwise) with factor-analysis regression (principal components,
//! maximum likelihood, generalised least squares) on tabular data.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod data_io;
pub mod error;
pub mod factor;
pub mod metrics;
pub mod mlr;
pub mod numeric;
pub mod preprocess;

pub use error::{Error, Result};
