//! Exact monomial arithmetic and dense complex helpers.

pub mod dense;
pub mod monomial;
pub mod phase;
pub mod span;
pub mod sum;

pub use dense::{gram_rank, kernel_basis, DenseMatrix, DenseRows, OrthoBasis};
pub use monomial::{clock, shift, Exchange, MonomialMatrix};
pub use phase::{root_of_unity, Phase};
pub use span::{monomial_span_rank, numeric_rank};
pub use sum::MonomialSum;
