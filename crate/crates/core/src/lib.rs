//! Langevin annealed importance sampling on the torus.

// `!(x > 0.0)` is how NaN gets rejected alongside the out-of-range values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod dynamics;
pub mod config;
pub mod error;
pub mod gaussian;
pub mod oracle;
pub mod potential;
pub mod runner;
pub mod sampler;
pub mod schedule;

pub use error::{Error, Result};
