//! Fractional heat semigroup, moment-matched asymptotic expansions and their
//! numerical verification.

// NaN-rejecting comparisons are written as `!(a > b)` on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod expansion;
pub mod field;
pub mod hotspot;
pub mod kernel;
pub mod moments;
pub mod nonlinear;
pub mod quad;
pub mod semigroup;

pub use error::{Error, Result};
