//! Scalar abstraction.
//!
//! Every algorithm in this crate is a rank or membership computation, so it
//! only needs exact field arithmetic. [`Field`] captures that through
//! `num-traits`; the crate-level aliases pick `BigRational`.

use std::fmt::{Debug, Display};
use std::ops::Neg;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};

/// An exact field of characteristic zero.
///
/// Floating point types are deliberately not implementors: rank decisions
/// here compare against zero and must be exact.
pub trait Field:
    Num + Neg<Output = Self> + Clone + PartialEq + PartialOrd + Debug + Display + Send + Sync + 'static
{
    fn from_int(n: i64) -> Self;

    /// Embeds an exact rational. Used to turn valuation data into coefficients.
    fn from_rational(q: &BigRational) -> Self;
}

impl<T> Field for Ratio<T>
where
    T: Integer + Signed + Clone + Debug + Display + FromPrimitive + Send + Sync + 'static,
{
    fn from_int(n: i64) -> Self {
        Ratio::from_integer(T::from_i64(n).expect("integer out of range for scalar type"))
    }

    fn from_rational(q: &BigRational) -> Self {
        let convert = |b: &BigInt| -> T {
            if let Some(v) = b.to_i64() {
                T::from_i64(v).expect("rational out of range for scalar type")
            } else {
                // Only reachable for bignum-backed T.
                let s = b.to_str_radix(10);
                T::from_str_radix(&s, 10)
                    .ok()
                    .expect("rational out of range for scalar type")
            }
        };
        Ratio::new(convert(q.numer()), convert(q.denom()))
    }
}

/// Small helpers for the rational numbers used as filtration indices.
pub mod rat {
    use super::*;

    pub fn int(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    pub fn frac(p: i64, q: i64) -> BigRational {
        BigRational::new(BigInt::from(p), BigInt::from(q))
    }

    /// Least integer `>= q`.
    pub fn ceil_i64(q: &BigRational) -> i64 {
        q.ceil()
            .to_integer()
            .to_i64()
            .expect("ceiling out of i64 range")
    }

    pub fn floor_i64(q: &BigRational) -> i64 {
        q.floor()
            .to_integer()
            .to_i64()
            .expect("floor out of i64 range")
    }

    /// `max(0, ceil(q))` as an exponent of `t`.
    pub fn ceil_nonneg(q: &BigRational) -> u32 {
        ceil_i64(q).max(0) as u32
    }

    pub fn denom_u64(q: &BigRational) -> u64 {
        q.denom().to_u64().expect("denominator out of u64 range")
    }

    pub fn lcm(a: u64, b: u64) -> u64 {
        a.lcm(&b)
    }

    pub fn is_zero(q: &BigRational) -> bool {
        q.is_zero()
    }

    pub fn one() -> BigRational {
        BigRational::one()
    }

    pub fn abs(q: &BigRational) -> BigRational {
        q.abs()
    }

    /// Parses `"p"` or `"p/q"`.
    pub fn parse(s: &str) -> Option<BigRational> {
        let s = s.trim();
        match s.split_once('/') {
            Some((p, q)) => {
                let p: BigInt = p.trim().parse().ok()?;
                let q: BigInt = q.trim().parse().ok()?;
                if q.is_zero() {
                    None
                } else {
                    Some(BigRational::new(p, q))
                }
            }
            None => Some(BigRational::from_integer(s.parse().ok()?)),
        }
    }
}
