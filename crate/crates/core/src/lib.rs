//! Exact computations with free DG algebras, their representation
//! functors, cyclic complexes and the associated generating functions.
//!
//! Everything is over the rationals; there is no floating point anywhere
//! in the crate.

pub mod comm;
pub mod cyclic;
pub mod derham;
pub mod error;
pub mod graded;
pub mod homology;
pub mod koszul;
pub mod presentation;
pub mod rep;
pub mod reproduce;
pub mod scalar;
pub mod series;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Default cap on the number of basis elements in a single (hdeg, weight) cell.
pub const DEFAULT_CELL_BUDGET: usize = 200_000;
