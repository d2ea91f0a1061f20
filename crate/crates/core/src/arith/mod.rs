//! Truncated power series over a field and Laurent polynomials over them.

mod laurent;
mod series;

pub use laurent::{LaurentPoly, Monomial, PolyReader, MAX_VARS};
pub use series::{Order, TruncatedSeries};
