use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::scalar::Field;

/// The `t`-adic order of a truncated series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Order {
    Finite(u32),
    /// The series vanishes modulo `t^N`; carries `N`.
    AbovePrecision(u32),
}

impl Order {
    pub fn finite(self) -> Option<u32> {
        match self {
            Order::Finite(k) => Some(k),
            Order::AbovePrecision(_) => None,
        }
    }

    /// The order, with a vanishing series reported at its precision.
    pub fn lower_bound(self) -> u32 {
        match self {
            Order::Finite(k) | Order::AbovePrecision(k) => k,
        }
    }
}

/// An element of `F[[t]] / t^N`.
///
/// Coefficients live in a sparse map; zero coefficients and degrees `>= N`
/// are never stored, so structural equality is equality in `F[t]/t^N`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TruncatedSeries<F> {
    coeffs: BTreeMap<u32, F>,
    precision: u32,
}

impl<F: Field> TruncatedSeries<F> {
    pub fn zero(precision: u32) -> Self {
        assert!(precision > 0, "series precision must be positive");
        TruncatedSeries {
            coeffs: BTreeMap::new(),
            precision,
        }
    }

    pub fn one(precision: u32) -> Self {
        Self::constant(F::one(), precision)
    }

    pub fn constant(c: F, precision: u32) -> Self {
        Self::monomial(c, 0, precision)
    }

    /// `c * t^k`.
    pub fn monomial(c: F, k: u32, precision: u32) -> Self {
        let mut s = Self::zero(precision);
        s.set(k, c);
        s
    }

    pub fn t_power(k: u32, precision: u32) -> Self {
        Self::monomial(F::one(), k, precision)
    }

    /// Builds a series from `(degree, coefficient)` pairs; repeated degrees add.
    pub fn from_terms<I: IntoIterator<Item = (u32, F)>>(terms: I, precision: u32) -> Self {
        let mut s = Self::zero(precision);
        for (k, c) in terms {
            let cur = s.coeff(k);
            s.set(k, cur + c);
        }
        s
    }

    /// Dense coefficient list, lowest degree first.
    pub fn from_dense(coeffs: &[F], precision: u32) -> Self {
        Self::from_terms(
            coeffs
                .iter()
                .cloned()
                .enumerate()
                .map(|(k, c)| (k as u32, c)),
            precision,
        )
    }

    fn set(&mut self, k: u32, c: F) {
        if k >= self.precision {
            return;
        }
        if c.is_zero() {
            self.coeffs.remove(&k);
        } else {
            self.coeffs.insert(k, c);
        }
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn coeff(&self, k: u32) -> F {
        self.coeffs.get(&k).cloned().unwrap_or_else(F::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, &F)> + '_ {
        self.coeffs.iter().map(|(k, c)| (*k, c))
    }

    /// Degree of the highest stored term.
    pub fn degree(&self) -> Option<u32> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn ord(&self) -> Order {
        match self.coeffs.keys().next() {
            Some(k) => Order::Finite(*k),
            None => Order::AbovePrecision(self.precision),
        }
    }

    /// True when the series vanishes modulo `t^N`.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// True when the constant term is invertible.
    pub fn is_unit(&self) -> bool {
        self.ord() == Order::Finite(0)
    }

    /// Reduction modulo `t^m`.
    pub fn truncate(&self, m: u32) -> Result<Self> {
        if m > self.precision {
            return Err(Error::PrecisionIncrease {
                from: self.precision,
                to: m,
            });
        }
        Ok(self.reduce(m))
    }

    fn reduce(&self, m: u32) -> Self {
        TruncatedSeries {
            coeffs: self
                .coeffs
                .range(..m)
                .map(|(k, c)| (*k, c.clone()))
                .collect(),
            precision: m,
        }
    }

    /// Reinterprets the stored polynomial at precision `m`, truncating if
    /// `m` is smaller and lifting by zero coefficients if it is larger.
    pub fn with_precision(&self, m: u32) -> Self {
        assert!(m > 0, "series precision must be positive");
        if m <= self.precision {
            self.reduce(m)
        } else {
            TruncatedSeries {
                coeffs: self.coeffs.clone(),
                precision: m,
            }
        }
    }

    pub fn scale(&self, c: &F) -> Self {
        if c.is_zero() {
            return Self::zero(self.precision);
        }
        TruncatedSeries {
            coeffs: self
                .coeffs
                .iter()
                .map(|(k, a)| (*k, a.clone() * c.clone()))
                .collect(),
            precision: self.precision,
        }
    }

    /// Multiplication by `t^k`; the result is known to precision `N + k`.
    pub fn shift_up(&self, k: u32) -> Self {
        TruncatedSeries {
            coeffs: self
                .coeffs
                .iter()
                .map(|(d, c)| (d + k, c.clone()))
                .collect(),
            precision: self.precision + k,
        }
    }

    /// Exact division by `t^k`. Requires order at least `k`; precision drops by `k`.
    pub fn shift_down(&self, k: u32) -> Result<Self> {
        if k >= self.precision {
            return Err(Error::PrecisionExhausted(format!(
                "dividing a series of precision {} by t^{k}",
                self.precision
            )));
        }
        if let Order::Finite(o) = self.ord() {
            if o < k {
                return Err(Error::InvariantViolation(format!(
                    "series of order {o} is not divisible by t^{k}"
                )));
            }
        }
        Ok(TruncatedSeries {
            coeffs: self
                .coeffs
                .iter()
                .map(|(d, c)| (d - k, c.clone()))
                .collect(),
            precision: self.precision - k,
        })
    }

    /// Polynomial part of degree `>= k`, divided by `t^k`.
    pub fn quotient_by_t_power(&self, k: u32) -> Self {
        let precision = self.precision.saturating_sub(k).max(1);
        TruncatedSeries {
            coeffs: self
                .coeffs
                .range(k..)
                .map(|(d, c)| (d - k, c.clone()))
                .collect(),
            precision,
        }
    }

    /// Inverse of a unit, to the same precision.
    pub fn inverse(&self) -> Option<Self> {
        let a0 = self.coeffs.get(&0)?.clone();
        let inv0 = F::one() / a0;
        let n = self.precision;
        let mut out: Vec<F> = Vec::with_capacity(n as usize);
        out.push(inv0.clone());
        for k in 1..n {
            // sum_{j=1..k} a_j b_{k-j}
            let mut acc = F::zero();
            for (j, a) in self.coeffs.range(1..=k) {
                acc = acc + a.clone() * out[(k - j) as usize].clone();
            }
            out.push(-(acc * inv0.clone()));
        }
        Some(Self::from_dense(&out, n))
    }

    pub fn add_ref(&self, other: &Self) -> Self {
        let p = self.precision.min(other.precision);
        let mut s = self.reduce(p);
        for (k, c) in other.coeffs.range(..p) {
            let cur = s.coeff(*k);
            s.set(*k, cur + c.clone());
        }
        s
    }

    pub fn sub_ref(&self, other: &Self) -> Self {
        self.add_ref(&other.neg_ref())
    }

    pub fn neg_ref(&self) -> Self {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|(k, c)| (*k, -c.clone())).collect(),
            precision: self.precision,
        }
    }

    pub fn mul_ref(&self, other: &Self) -> Self {
        let p = self.precision.min(other.precision);
        let mut acc: BTreeMap<u32, F> = BTreeMap::new();
        for (i, a) in self.coeffs.range(..p) {
            for (j, b) in other.coeffs.range(..p - i) {
                let e = acc.entry(i + j).or_insert_with(F::zero);
                *e = e.clone() + a.clone() * b.clone();
            }
        }
        acc.retain(|_, c| !c.is_zero());
        TruncatedSeries {
            coeffs: acc,
            precision: p,
        }
    }
}

impl<F: Field> Add for &TruncatedSeries<F> {
    type Output = TruncatedSeries<F>;
    fn add(self, rhs: Self) -> TruncatedSeries<F> {
        self.add_ref(rhs)
    }
}

impl<F: Field> Sub for &TruncatedSeries<F> {
    type Output = TruncatedSeries<F>;
    fn sub(self, rhs: Self) -> TruncatedSeries<F> {
        self.sub_ref(rhs)
    }
}

impl<F: Field> Mul for &TruncatedSeries<F> {
    type Output = TruncatedSeries<F>;
    fn mul(self, rhs: Self) -> TruncatedSeries<F> {
        self.mul_ref(rhs)
    }
}

impl<F: Field> Neg for &TruncatedSeries<F> {
    type Output = TruncatedSeries<F>;
    fn neg(self) -> TruncatedSeries<F> {
        self.neg_ref()
    }
}

impl<F: Field> fmt::Display for TruncatedSeries<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "O(t^{})", self.precision);
        }
        for (i, (k, c)) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})*t")?,
                _ => write!(f, "({c})*t^{k}")?,
            }
        }
        write!(f, " + O(t^{})", self.precision)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;
    use crate::Rational;

    type S = TruncatedSeries<Rational>;

    fn s(coeffs: &[i64], n: u32) -> S {
        S::from_dense(&coeffs.iter().map(|c| rat::int(*c)).collect::<Vec<_>>(), n)
    }

    #[test]
    fn order_examples() {
        assert_eq!(s(&[0, 0, 1, 0, 0, 3], 8).ord(), Order::Finite(2));
        assert_eq!(S::zero(8).ord(), Order::AbovePrecision(8));
        let f = S::from_terms([(0, rat::frac(1, 2)), (1, rat::int(1))], 8);
        assert_eq!(f.ord(), Order::Finite(0));
    }

    #[test]
    fn terms_beyond_precision_are_dropped() {
        let f = s(&[1, 0, 0, 5], 3);
        assert_eq!(f, s(&[1], 3));
        assert_eq!(S::t_power(3, 3).ord(), Order::AbovePrecision(3));
    }

    #[test]
    fn inverse_of_unit() {
        let f = s(&[1, -1], 6); // 1 - t
        let g = f.inverse().unwrap();
        assert_eq!(g, s(&[1, 1, 1, 1, 1, 1], 6));
        assert_eq!(&f * &g, S::one(6));
        assert!(s(&[0, 1], 6).inverse().is_none());
    }

    #[test]
    fn shifts_track_precision() {
        let f = s(&[0, 0, 2, 1], 5);
        let g = f.shift_down(2).unwrap();
        assert_eq!(g, s(&[2, 1], 3));
        assert_eq!(g.shift_up(2), f);
        assert!(f.shift_down(3).is_err());
    }

    #[test]
    fn truncate_rejects_increase() {
        let f = s(&[1, 2, 3], 3);
        assert_eq!(f.truncate(2).unwrap(), s(&[1, 2], 2));
        assert_eq!(
            f.truncate(4),
            Err(Error::PrecisionIncrease { from: 3, to: 4 })
        );
    }

    #[test]
    fn mixed_precision_arithmetic_takes_minimum() {
        let f = s(&[1, 1, 1], 3);
        let g = s(&[1, 1], 5);
        assert_eq!((&f + &g).precision(), 3);
        assert_eq!(&f * &g, s(&[1, 2, 2], 3));
    }
}
