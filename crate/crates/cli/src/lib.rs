//! Experiment harness around `fhs-core`: configuration, drivers, result
//! tables and file output.

// `!(x > 0.0)` is used on purpose so that NaN fails range checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod emit;
pub mod error;
pub mod experiments;
pub mod result;
pub mod selftest;

pub use config::{Coupling, ExperimentConfig, ExperimentId, GridSpec, PointSpec};
pub use error::{HarnessError, Result};
pub use result::{Check, ExperimentResult, Table};
