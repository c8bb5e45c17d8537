//! Finite-depth towers of clock/shift matrix algebras with exact relation checking.

pub mod commutant;
pub mod error;
pub mod linalg;
pub mod presentation;
pub mod report;
pub mod tl;
pub mod tower;
pub mod weyl;

pub use error::{Error, Result};

/// Default relative tolerance for numeric comparisons.
pub const DEFAULT_TOL: f64 = 1e-9;
