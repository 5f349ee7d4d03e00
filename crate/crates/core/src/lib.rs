// NaN must fail every range check, so bounds are written as `!(x > a)`.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod arith;
pub mod error;
pub mod geodesic;
pub mod helix;
pub mod io;
pub mod oracle;
pub mod samples;
pub mod spaceform;
pub mod spectrum;
pub mod suites;

pub use error::{Error, Result};
