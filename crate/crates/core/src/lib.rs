// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod criteria;
pub mod error;
pub mod lattice;
pub mod report;
pub mod sim;
pub mod zeta;

pub use error::{Error, Result};
