pub mod arith;
pub mod error;
pub mod lindvr;
pub mod linfield;
pub mod scalar;
pub mod skeleton;
pub mod theta;
pub mod valuation;

pub use error::{Error, Result};
pub use scalar::Field;

/// Exact rationals; the scalar type behind every concrete alias below.
pub type Rational = num_rational::BigRational;
pub type Series = arith::TruncatedSeries<Rational>;
pub type Laurent = arith::LaurentPoly<Rational>;
