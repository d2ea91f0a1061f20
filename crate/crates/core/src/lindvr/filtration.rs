use std::collections::BTreeSet;

use num_traits::Zero;

use crate::arith::TruncatedSeries;
use crate::error::{Error, Result};
use crate::lindvr::submodule::{ModVector, Submodule};
use crate::linfield::ExtRational;
use crate::scalar::{rat, Field};
use crate::Rational;

/// A bounded filtration of `R^n` by submodules with rational jumps.
///
/// `steps[0] = (lo, R^n)` and the remaining steps strictly decrease, with
/// `F^mu = W_j` for `lambda_{j-1} < mu <= lambda_j`. Above `hi`, the last jump,
/// the filtration continues periodically: `F^mu = t^q F^{mu-q}` with
/// `q = ceil(mu - hi)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DvrFiltration<F> {
    rank: usize,
    denominator: u64,
    steps: Vec<(Rational, Submodule<F>)>,
}

impl<F: Field> DvrFiltration<F> {
    /// `F^lambda = sum_i t^{max(0, ceil(lambda - ords[i]))} R s_i` for a basis `s`.
    pub fn from_diagonal(basis: &[ModVector<F>], ords: &[Rational]) -> Result<Self> {
        let n = basis.len();
        if ords.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: ords.len(),
            });
        }
        if n == 0 {
            return Err(Error::NotABasis("empty basis".into()));
        }
        check_unimodular(basis)?;
        let lo = ords.iter().min().expect("nonempty").clone();
        let hi = ords.iter().max().expect("nonempty").clone();
        let mut jumps: BTreeSet<Rational> = BTreeSet::new();
        for o in ords {
            // s_i first drops a power of t just past o, so only k >= 0 are jumps.
            let mut k = (rat::floor_i64(&(&lo - o)) + 1).max(0);
            loop {
                let l = o + rat::int(k);
                if l > hi {
                    break;
                }
                if l > lo {
                    jumps.insert(l);
                }
                k += 1;
            }
        }
        let mut steps = vec![(lo, Submodule::full(n))];
        for l in jumps {
            steps.push((l.clone(), diagonal_step(basis, ords, &l)?));
        }
        Self::from_steps(n, steps)
    }

    /// `F^lambda = t^{max(0, ceil(lambda))} R^n`.
    pub fn trivial(rank: usize) -> Self {
        Self::from_steps_unchecked(rank, vec![(Rational::zero(), Submodule::full(rank))])
            .expect("valid")
    }

    /// Validates the steps, including boundedness and `F^{l+1} ∩ tV = t F^l`.
    pub fn from_steps(rank: usize, steps: Vec<(Rational, Submodule<F>)>) -> Result<Self> {
        let f = Self::from_steps_unchecked(rank, steps)?;
        f.check_axioms()?;
        Ok(f)
    }

    /// Checks only the shape of the data, so that deliberately broken
    /// filtrations can be built for negative tests.
    pub fn from_steps_unchecked(rank: usize, steps: Vec<(Rational, Submodule<F>)>) -> Result<Self> {
        let Some((_, first)) = steps.first() else {
            return Err(Error::InvariantViolation(
                "a filtration needs at least one step".into(),
            ));
        };
        if !first.is_full() {
            return Err(Error::InvariantViolation(
                "the first step must be the whole module".into(),
            ));
        }
        let mut denominator = 1u64;
        for (i, (l, w)) in steps.iter().enumerate() {
            if w.rank() != rank {
                return Err(Error::DimensionMismatch {
                    expected: rank,
                    found: w.rank(),
                });
            }
            if i > 0 && *l <= steps[i - 1].0 {
                return Err(Error::InvariantViolation(format!(
                    "jump {l} does not increase"
                )));
            }
            denominator = rat::lcm(denominator, rat::denom_u64(l));
        }
        Ok(DvrFiltration {
            rank,
            denominator,
            steps,
        }
        .canonical())
    }

    /// Drops trailing steps that the periodic continuation already produces,
    /// so equal filtrations have equal step lists.
    fn canonical(mut self) -> Self {
        while self.steps.len() > 1 {
            let k = self.steps.len();
            let prev = self.steps[k - 2].0.clone();
            let last = self.steps[k - 1].0.clone();
            let shorter = DvrFiltration {
                rank: self.rank,
                denominator: self.denominator,
                steps: self.steps[..k - 1].to_vec(),
            };
            let d = self.denominator as i64;
            let a = rat::floor_i64(&(&prev * rat::int(d))) + 1;
            let b = rat::ceil_i64(&(&last * rat::int(d)));
            if (a..=b)
                .map(|j| rat::frac(j, d))
                .any(|mu| shorter.step(&mu) != self.step(&mu))
            {
                break;
            }
            self.steps.pop();
        }
        self.denominator = self
            .steps
            .iter()
            .fold(1, |acc, (l, _)| rat::lcm(acc, rat::denom_u64(l)));
        self
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Least common denominator of the jumps.
    pub fn denominator(&self) -> u64 {
        self.denominator
    }

    pub fn steps(&self) -> &[(Rational, Submodule<F>)] {
        &self.steps
    }

    pub fn lo(&self) -> &Rational {
        &self.steps[0].0
    }

    pub fn hi(&self) -> &Rational {
        &self.steps.last().expect("nonempty").0
    }

    /// `F^lambda`.
    pub fn step(&self, lambda: &Rational) -> Submodule<F> {
        if lambda <= self.lo() {
            return Submodule::full(self.rank);
        }
        if lambda <= self.hi() {
            let (_, w) = self
                .steps
                .iter()
                .find(|(l, _)| lambda <= l)
                .expect("lambda <= hi");
            return w.clone();
        }
        let q = rat::ceil_i64(&(lambda - self.hi()));
        self.step(&(lambda - rat::int(q))).scale_t(q as u32)
    }

    /// Least value above `lambda` at which the filtration may change.
    pub fn next_breakpoint(&self, lambda: &Rational) -> Rational {
        self.steps
            .iter()
            .map(|(l, _)| {
                let k = (rat::floor_i64(&(lambda - l)) + 1).max(0);
                l + rat::int(k)
            })
            .min()
            .expect("nonempty")
    }

    /// `F^{>lambda}`.
    pub fn step_above(&self, lambda: &Rational) -> Submodule<F> {
        self.step(&self.next_breakpoint(lambda))
    }

    /// Least value `>= lambda` at which the filtration may change.
    fn breakpoint_from(&self, lambda: &Rational) -> Rational {
        self.steps
            .iter()
            .map(|(l, _)| l + rat::int(rat::ceil_i64(&(lambda - l)).max(0)))
            .min()
            .expect("nonempty")
    }

    /// Values in `[a, b]` at which the filtration genuinely jumps.
    pub fn jumps_in(&self, a: &Rational, b: &Rational) -> Vec<Rational> {
        let mut out = Vec::new();
        let mut x = self.breakpoint_from(a);
        while &x <= b {
            if self.step(&x) != self.step_above(&x) {
                out.push(x.clone());
            }
            x = self.next_breakpoint(&x);
        }
        out
    }

    /// `max { lambda : s in F^lambda }` for a vector known modulo its precision.
    pub fn ord(&self, s: &[TruncatedSeries<F>]) -> Result<ExtRational> {
        if s.len() != self.rank {
            return Err(Error::DimensionMismatch {
                expected: self.rank,
                found: s.len(),
            });
        }
        let Some(e) = s.iter().filter_map(|x| x.ord().finite()).min() else {
            return Err(Error::PrecisionExhausted(
                "vector vanishes to its precision".into(),
            ));
        };
        let primitive: ModVector<F> = s.iter().map(|x| x.shift_down(e)).collect::<Result<_>>()?;
        let mut best = self.lo().clone();
        for (l, w) in &self.steps[1..] {
            if w.contains(&primitive)? {
                best = l.clone();
            } else {
                break;
            }
        }
        Ok(ExtRational::Finite(best + rat::int(e as i64)))
    }

    /// Order of the image in `(R/t^i)^n`; `+inf` for vectors in `t^i R^n`.
    pub fn ord_at_level(&self, s: &[TruncatedSeries<F>], level: u32) -> Result<ExtRational> {
        if s.len() != self.rank {
            return Err(Error::DimensionMismatch {
                expected: self.rank,
                found: s.len(),
            });
        }
        let v: ModVector<F> = s.iter().map(|x| x.truncate(level)).collect::<Result<_>>()?;
        if v.iter().all(|x| x.is_zero()) {
            return Ok(ExtRational::PlusInfinity);
        }
        let top = self.hi() + rat::int(level as i64);
        let mut best = self.lo().clone();
        for l in self.jumps_in(self.lo(), &top) {
            if self.step(&l).plus_t_power(level).contains_exact(&v) {
                best = l;
            } else {
                break;
            }
        }
        Ok(ExtRational::Finite(best))
    }

    /// Breakpoints relevant to the axioms: shifts of the jumps by `0` and `-1`
    /// that lie in `(lo - 1, hi]`.
    fn axiom_points(&self) -> Vec<Rational> {
        let lower = self.lo() - rat::int(1);
        let mut pts: BTreeSet<Rational> = BTreeSet::new();
        for (l, _) in &self.steps {
            for shift in [0, -1] {
                let p = l + rat::int(shift);
                if p > lower && &p <= self.hi() {
                    pts.insert(p);
                }
            }
        }
        pts.into_iter().collect()
    }

    /// Decreasing steps (including across the periodic continuation) and
    /// `F^{lambda+1} ∩ tV = t F^lambda` at every breakpoint.
    pub fn check_axioms(&self) -> Result<()> {
        for w in self.steps.windows(2) {
            if !w[0].1.contains_submodule(&w[1].1) || w[0].1 == w[1].1 {
                return Err(Error::InvariantViolation(format!(
                    "step at {} is not strictly smaller than the step at {}",
                    w[1].0, w[0].0
                )));
            }
        }
        let after_hi = self.step_above(self.hi());
        if !self.step(self.hi()).contains_submodule(&after_hi) {
            return Err(Error::InvariantViolation(
                "periodic continuation is not decreasing".into(),
            ));
        }
        let tv = Submodule::t_power(self.rank, 1);
        for l in self.axiom_points() {
            let lhs = self.step(&(&l + rat::int(1))).intersect(&tv)?;
            let rhs = self.step(&l).scale_t(1);
            if lhs != rhs {
                return Err(Error::InvariantViolation(format!(
                    "F^(lambda+1) ∩ tV differs from t F^lambda at lambda = {l}"
                )));
            }
        }
        Ok(())
    }

    /// The same filtration with every order increased by `c`.
    pub fn shift(&self, c: &Rational) -> Self {
        let steps: Vec<_> = self.steps.iter().map(|(l, w)| (l + c, w.clone())).collect();
        Self::from_steps_unchecked(self.rank, steps).expect("shape preserved")
    }

    /// View indexed by `d * lambda`, matching the filtration after the base
    /// change `t = s^d`.
    pub fn rescale(&self, d: u64) -> Rescaled<'_, F> {
        Rescaled { inner: self, d }
    }
}

/// A filtration read through `lambda -> lambda / d`.
#[derive(Debug, Clone, Copy)]
pub struct Rescaled<'a, F> {
    inner: &'a DvrFiltration<F>,
    d: u64,
}

impl<F: Field> Rescaled<'_, F> {
    pub fn step(&self, lambda: &Rational) -> Submodule<F> {
        self.inner.step(&(lambda / rat::int(self.d as i64)))
    }

    pub fn ord(&self, s: &[TruncatedSeries<F>]) -> Result<ExtRational> {
        Ok(match self.inner.ord(s)? {
            ExtRational::Finite(q) => ExtRational::Finite(q * rat::int(self.d as i64)),
            ExtRational::PlusInfinity => ExtRational::PlusInfinity,
        })
    }
}

pub(crate) fn diagonal_step<F: Field>(
    basis: &[ModVector<F>],
    ords: &[Rational],
    l: &Rational,
) -> Result<Submodule<F>> {
    let n = basis.len();
    let exps: Vec<u32> = ords.iter().map(|o| rat::ceil_nonneg(&(l - o))).collect();
    let m = exps.iter().copied().max().unwrap_or(0);
    let gens: Vec<ModVector<F>> = basis
        .iter()
        .zip(&exps)
        .map(|(s, &e)| s.iter().map(|x| x.shift_up(e)).collect())
        .collect();
    Submodule::hermite_form_with_floor(n, &gens, m)
}

/// Checks that the residues mod `t` are linearly independent.
pub(crate) fn check_unimodular<F: Field>(basis: &[ModVector<F>]) -> Result<()> {
    let n = basis.len();
    for b in basis {
        if b.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: b.len(),
            });
        }
    }
    let residues: Vec<Vec<F>> = basis
        .iter()
        .map(|b| b.iter().map(|x| x.coeff(0)).collect())
        .collect();
    if crate::linfield::rank(&residues, n) != n {
        return Err(Error::NotABasis("residues modulo t are dependent".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat::{frac, int};

    type S = TruncatedSeries<Rational>;

    fn s(c: &[i64], n: u32) -> S {
        S::from_dense(&c.iter().map(|x| int(*x)).collect::<Vec<_>>(), n)
    }

    fn std_basis(n: usize, p: u32) -> Vec<ModVector<Rational>> {
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { S::one(p) } else { S::zero(p) })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn diagonal_with_offset_orders() {
        // Orders -1, 0, 1/2: nothing changes between -1/2 and 0.
        let f = DvrFiltration::from_diagonal(&std_basis(3, 6), &[int(-1), int(0), frac(1, 2)]).unwrap();
        f.check_axioms().unwrap();
        assert_eq!(f.step(&frac(-1, 2)), f.step(&int(0)));
        for (v, o) in std_basis(3, 6).iter().zip([int(-1), int(0), frac(1, 2)]) {
            assert_eq!(f.ord(v).unwrap(), ExtRational::Finite(o));
        }
    }

    #[test]
    fn rank_one_is_t_power() {
        let f = DvrFiltration::<Rational>::trivial(1);
        assert!(f.step(&int(0)).is_full());
        assert_eq!(f.step(&frac(1, 2)), Submodule::t_power(1, 1));
        assert_eq!(f.step(&int(3)), Submodule::t_power(1, 3));
        assert_eq!(
            f.ord(&[s(&[0, 0, 5], 8)]).unwrap(),
            ExtRational::Finite(int(2))
        );
        f.check_axioms().unwrap();
    }

    #[test]
    fn diagonal_half_integer() {
        let f = DvrFiltration::from_diagonal(&std_basis(2, 4), &[int(0), frac(1, 2)]).unwrap();
        assert_eq!(f.denominator(), 2);
        assert_eq!(
            f.jumps_in(&int(0), &int(2)),
            vec![int(0), frac(1, 2), int(1), frac(3, 2), int(2)]
        );
        assert_eq!(
            f.ord(&[S::zero(4), S::one(4)]).unwrap(),
            ExtRational::Finite(frac(1, 2))
        );
        assert_eq!(
            f.ord(&[S::one(4), S::one(4)]).unwrap(),
            ExtRational::Finite(int(0))
        );
        assert_eq!(
            f.ord(&[S::zero(4), s(&[0, 1], 4)]).unwrap(),
            ExtRational::Finite(frac(3, 2))
        );
        assert_eq!(
            f.rescale(2).ord(&[S::zero(4), S::one(4)]).unwrap(),
            ExtRational::Finite(int(1))
        );
    }

    #[test]
    fn sheared_basis_orders() {
        let basis = vec![
            vec![s(&[1], 6), s(&[1, 1], 6)],
            vec![s(&[0, 1], 6), s(&[1], 6)],
        ];
        let f = DvrFiltration::from_diagonal(&basis, &[int(1), int(0)]).unwrap();
        assert_eq!(f.ord(&basis[0]).unwrap(), ExtRational::Finite(int(1)));
        assert_eq!(f.ord(&basis[1]).unwrap(), ExtRational::Finite(int(0)));
        assert_eq!(
            f.ord_at_level(&basis[0], 1).unwrap(),
            ExtRational::Finite(int(1))
        );
        assert_eq!(
            f.ord_at_level(&[s(&[0, 1], 6), S::zero(6)], 1).unwrap(),
            ExtRational::PlusInfinity
        );
    }

    #[test]
    fn violated_axiom_is_reported() {
        let w = Submodule::hermite_form_with_floor(2, &[vec![s(&[1], 4), s(&[0], 4)]], 1).unwrap();
        let steps = vec![
            (int(0), Submodule::full(2)),
            (int(1), w),
            (int(2), Submodule::t_power(2, 1)),
        ];
        assert!(DvrFiltration::from_steps(2, steps.clone()).is_err());
        assert!(DvrFiltration::from_steps_unchecked(2, steps).is_ok());
    }

    #[test]
    fn dependent_residues_rejected() {
        let basis = vec![
            vec![s(&[1], 4), s(&[1], 4)],
            vec![s(&[1, 1], 4), s(&[1], 4)],
        ];
        assert!(matches!(
            DvrFiltration::from_diagonal(&basis, &[int(0), int(0)]),
            Err(Error::NotABasis(_))
        ));
    }
}
