//! Exact arithmetic for supersingular Iwasawa growth formulas: cyclotomic
//! valuations, the `H_n` matrices, valuation matrices, Iwasawa invariants
//! and the q-sequence growth terms.

pub mod cyclotomic;
pub mod error;
pub mod growth;
pub mod matrix;
pub mod poly;
pub mod ranks;
pub mod resultant;
pub mod scalars;
pub mod series;
pub mod tropical;

pub use error::{Error, Result};
pub use matrix::{Mat2, PolyMatrix};
pub use poly::IntPolynomial;
pub use scalars::{ExtRational, Prime};
pub use series::{SeriesValuation, TruncatedSeries};
