pub mod arith;
pub mod brset;
pub mod constructions;
pub mod dlog;
pub mod error;
pub mod experiments;
pub mod field;
pub mod fp_poly;
pub mod linalg;
pub mod multiset;
pub mod orbit;
pub mod qpoly;
pub mod sidon;
pub mod subspace;

pub use error::{Error, Result};
