use num_traits::{One, Zero};

use crate::arith::LaurentPoly;
use crate::error::{Error, Result};
use crate::scalar::Field;
use crate::skeleton::SkeletonComplex;
use crate::theta::basis::{construct_at, skeleton_probes, Construction, ThetaBasis, Verdict};
use crate::theta::{check_independence, Probe};
use crate::valuation::{MonomialValuation, SectionSpace};
use crate::Rational;

/// Probe label of the level valuation `ord_0`.
pub const ORD_0: &str = "ord_0";
/// Probe label of the level valuation `ord_D`.
pub const ORD_D: &str = "ord_D";

/// Level spaces `W_0, ..., W_m` and their direct sum, realized as
/// `sum_i W_i y^i` with one extra variable `y` carrying the level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConeSpace<F> {
    levels: Vec<SectionSpace<F>>,
    assembled: SectionSpace<F>,
    level_of: Vec<usize>,
}

/// Sums the levels into one space graded by the exponent of `y`.
pub fn cone_assemble<F: Field>(levels: Vec<SectionSpace<F>>) -> Result<ConeSpace<F>> {
    let n = levels.first().ok_or_else(|| Error::InvariantViolation("no levels".into()))?.num_vars();
    let mut sections = Vec::new();
    let mut level_of = Vec::new();
    for (i, w) in levels.iter().enumerate() {
        if w.num_vars() != n {
            return Err(Error::VariableMismatch(n, w.num_vars()));
        }
        for s in w.sections() {
            sections.push(s.with_extra_var(i as i32)?);
            level_of.push(i);
        }
    }
    let mut grading = vec![0; n + 1];
    grading[n] = 1;
    let assembled = SectionSpace::new(sections)?.with_grading(vec![grading])?;
    Ok(ConeSpace { levels, assembled, level_of })
}

impl<F: Field> ConeSpace<F> {
    pub fn levels(&self) -> &[SectionSpace<F>] {
        &self.levels
    }

    pub fn assembled(&self) -> &SectionSpace<F> {
        &self.assembled
    }

    /// Level tag of each assembled section.
    pub fn level_of(&self) -> &[usize] {
        &self.level_of
    }

    /// `min { i : f_i != 0 }`.
    pub fn ord_0(f: &LaurentPoly<F>) -> Option<i64> {
        f.split_last_var().keys().next().map(|&i| i as i64)
    }

    /// `min { -i : f_i != 0 }`.
    pub fn ord_d(f: &LaurentPoly<F>) -> Option<i64> {
        f.split_last_var().keys().next_back().map(|&i| -(i as i64))
    }

    /// The monomial valuation agreeing with [`Self::ord_0`] on `t`-free input.
    pub fn ord_0_valuation(&self) -> MonomialValuation {
        self.level_valuation(Rational::one())
    }

    /// The monomial valuation agreeing with [`Self::ord_d`] on `t`-free input.
    pub fn ord_d_valuation(&self) -> MonomialValuation {
        self.level_valuation(-Rational::one())
    }

    fn level_valuation(&self, y_weight: Rational) -> MonomialValuation {
        let mut w = vec![Rational::zero(); self.levels[0].num_vars()];
        w.push(y_weight);
        MonomialValuation::new(w)
    }

    /// The level pieces `f_i` of `f`, with `y` removed.
    pub fn split(f: &LaurentPoly<F>) -> Vec<(usize, LaurentPoly<F>)> {
        f.split_last_var().into_iter().map(|(i, p)| (i as usize, p)).collect()
    }
}

/// Constructs a level-homogeneous basis of the cone, certified at the
/// refinement vertices of the lifted complex and at both level valuations.
pub fn cone_construct<F: Field>(
    cone: &ConeSpace<F>,
    k: &SkeletonComplex,
    seed: Option<u64>,
) -> Result<Construction<F>> {
    let lifted = k.lifted();
    let mut probes = skeleton_probes(&lifted, &cone.assembled)?;
    probes.push(Probe { label: ORD_0.into(), valuation: cone.ord_0_valuation(), point: None });
    probes.push(Probe { label: ORD_D.into(), valuation: cone.ord_d_valuation(), point: None });
    construct_at(&cone.assembled, probes, seed)
}

/// Sections of level `m`, i.e. with `ord_0 >= m` and `ord_D >= -m`, read as
/// a basis of `W_m` and recertified on `k`.
pub fn cone_extract<F: Field>(
    theta: &ThetaBasis<F>,
    cone: &ConeSpace<F>,
    m: usize,
    k: &SkeletonComplex,
) -> Result<ThetaBasis<F>> {
    if !theta.probes.iter().any(|p| p.label == ORD_0) {
        return Err(Error::InvariantViolation("basis was not certified at ord_0".into()));
    }
    let level = cone.levels.get(m).ok_or_else(|| Error::NotGradedBasis(format!("no level {m}")))?;
    let m = m as i64;
    let mut picked = Vec::new();
    for s in &theta.sections {
        let (Some(lo), Some(hi)) = (ConeSpace::ord_0(s), ConeSpace::ord_d(s)) else { continue };
        if lo >= m && hi >= -m {
            let pieces = ConeSpace::split(s);
            picked.push(pieces.into_iter().next().expect("single level").1);
        }
    }
    if picked.len() != level.rank() {
        return Err(Error::NotGradedBasis(format!(
            "{} sections at level {m} for a level of rank {}",
            picked.len(),
            level.rank()
        )));
    }
    for s in &picked {
        level.coordinates(s).map_err(|e| Error::NotGradedBasis(format!("section outside level {m}: {e}")))?;
    }
    match check_independence(&picked, k, None)? {
        Verdict::Independent(b) => Ok(b),
        Verdict::Dependent(c) => {
            Err(Error::NotGradedBasis(format!("level {m} sections are not independent at {}", c.probe.label)))
        }
    }
}
