//! Numerical claim auditor for Ermakov systems.
//!
//! The pipeline simulates a planar Ermakov system, maps the motion to polar
//! form, reduces it to a θ-dependent oscillator plus a conservation law,
//! builds Pinney solutions, the Ermakov–Lewis invariant and the point and
//! back-transformed symmetry generators, and checks each displayed
//! relation numerically. See [`audit::run_audit`] for the end-to-end entry.

// `!(x > 0.0)` deliberately rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod audit;
pub mod cli;
pub mod dynamics;
pub mod error;
pub mod exec;
pub mod expr;
pub mod jet;
pub mod pinney;
pub mod reduction;
pub mod symmetry;
pub mod systems;
pub mod verdict;

pub use error::{Error, Result};
pub use exec::Exec;
