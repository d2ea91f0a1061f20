//! Monomial valuations on Laurent polynomials over `F[[t]]`, the filtrations
//! they induce on section spaces, and the linear data attached to divisors.
//!
//! Valuations are stored normalized: `v(t) = 1`. A divisor `E` with weight
//! vector `w` and multiplicity `b` carries `ord_E(t^k x^beta) = b k + <w, beta>`,
//! and its normalized valuation has weights `w / b`. Multiplicities are kept
//! only to convert back to `ord_E` when reporting.

mod induced;
mod sections;

use num_traits::{Signed, Zero};

use crate::arith::LaurentPoly;
use crate::error::{Error, Result};
use crate::scalar::{rat, Field};
use crate::Rational;

pub use induced::{induced_filtration, induced_filtrations};
pub use sections::SectionSpace;

/// `v(sum c t^k x^beta) = min (k + <w, beta>)` over the nonzero terms.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MonomialValuation {
    weights: Vec<Rational>,
}

impl MonomialValuation {
    pub fn new(weights: Vec<Rational>) -> Self {
        MonomialValuation { weights }
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn num_vars(&self) -> usize {
        self.weights.len()
    }

    /// `k + <w, beta>`.
    pub fn term_value(&self, t_degree: i64, exponents: &[i32]) -> Rational {
        self.weights
            .iter()
            .zip(exponents)
            .fold(rat::int(t_degree), |acc, (w, &b)| acc + w * rat::int(b as i64))
    }

    /// `None` when `f` vanishes modulo its precision.
    pub fn eval<F: Field>(&self, f: &LaurentPoly<F>) -> Option<Rational> {
        f.terms().map(|(m, _)| self.term_value(m.t_degree, &m.exponents)).min()
    }

    /// The valuation on polynomials with one more variable, acting on it by `w_last`.
    pub fn extended(&self, w_last: Rational) -> Self {
        let mut weights = self.weights.clone();
        weights.push(w_last);
        MonomialValuation { weights }
    }
}

/// `v(f)`; `None` when `f` vanishes modulo its precision.
pub fn eval_valuation<F: Field>(v: &MonomialValuation, f: &LaurentPoly<F>) -> Option<Rational> {
    v.eval(f)
}

/// A component of the special fiber in a global monomial chart.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DivisorData {
    pub label: String,
    weights: Vec<Rational>,
    multiplicity: u32,
    log_discrepancy: Rational,
}

impl DivisorData {
    pub fn new(label: impl Into<String>, weights: Vec<Rational>, multiplicity: u32, log_discrepancy: Rational) -> Result<Self> {
        let label = label.into();
        if multiplicity == 0 {
            return Err(Error::InvariantViolation(format!("divisor {label}: multiplicity must be at least 1")));
        }
        if log_discrepancy.is_negative() {
            return Err(Error::InvariantViolation(format!("divisor {label}: log discrepancy must be nonnegative")));
        }
        Ok(DivisorData { label, weights, multiplicity, log_discrepancy })
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn multiplicity(&self) -> u32 {
        self.multiplicity
    }

    pub fn log_discrepancy(&self) -> &Rational {
        &self.log_discrepancy
    }

    /// `b^{-1} ord_E`.
    pub fn valuation(&self) -> MonomialValuation {
        let b = rat::int(self.multiplicity as i64);
        MonomialValuation::new(self.weights.iter().map(|w| w / &b).collect())
    }

    /// Converts a normalized value back to `ord_E`.
    pub fn ord_e(&self, normalized: &Rational) -> Rational {
        normalized * rat::int(self.multiplicity as i64)
    }
}

fn check_support(simplices: &[Vec<usize>], alpha: &[Rational], n: usize) -> Result<()> {
    if alpha.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: alpha.len() });
    }
    if alpha.iter().any(|a| a.is_negative()) {
        return Err(Error::InvariantViolation("barycentric weights must be nonnegative".into()));
    }
    let support: Vec<usize> = (0..n).filter(|&j| !alpha[j].is_zero()).collect();
    if support.len() > 1 && !simplices.iter().any(|s| support.iter().all(|j| s.contains(j))) {
        return Err(Error::IncidenceViolation(support));
    }
    Ok(())
}

/// `sum_j alpha_j A_j` for `alpha` supported on a declared simplex.
pub fn log_discrepancy_on_cone(divisors: &[DivisorData], simplices: &[Vec<usize>], alpha: &[Rational]) -> Result<Rational> {
    check_support(simplices, alpha, divisors.len())?;
    Ok(divisors.iter().zip(alpha).map(|(d, a)| a * &d.log_discrepancy).sum())
}

/// Whether the quasi-monomial valuation `alpha` has vanishing log discrepancy
/// and value 1 on the special fiber, i.e. `sum_j alpha_j b_j = 1`.
pub fn skeleton_membership(divisors: &[DivisorData], simplices: &[Vec<usize>], alpha: &[Rational]) -> Result<bool> {
    let a = log_discrepancy_on_cone(divisors, simplices, alpha)?;
    let fiber: Rational = divisors.iter().zip(alpha).map(|(d, x)| x * rat::int(d.multiplicity as i64)).sum();
    Ok(a.is_zero() && fiber == rat::one())
}

/// Value of the vertical divisor `sum_j shift_j E_j` at the valuation with
/// barycentric weights `alpha`: `sum_j alpha_j shift_j / sum_k alpha_k b_k`.
pub fn vertical_value(divisors: &[DivisorData], alpha: &[Rational], shift: &[i64]) -> Result<Rational> {
    if alpha.len() != divisors.len() || shift.len() != divisors.len() {
        return Err(Error::DimensionMismatch { expected: divisors.len(), found: alpha.len().min(shift.len()) });
    }
    let norm: Rational = divisors.iter().zip(alpha).map(|(d, a)| a * rat::int(d.multiplicity as i64)).sum();
    if norm.is_zero() {
        return Err(Error::InvariantViolation("barycentric weights vanish".into()));
    }
    let raw: Rational = alpha.iter().zip(shift).map(|(a, &s)| a * rat::int(s)).sum();
    Ok(raw / norm)
}

/// Shifts each `(alpha, value)` pair by the vertical divisor `shift`, as when
/// the model is changed by that divisor.
pub fn metric_shift(values: &[(Vec<Rational>, Rational)], divisors: &[DivisorData], shift: &[i64]) -> Result<Vec<Rational>> {
    values.iter().map(|(alpha, v)| Ok(v + vertical_value(divisors, alpha, shift)?)).collect()
}
