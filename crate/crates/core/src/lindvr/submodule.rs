//! Full-rank submodules `t^M R^n ⊆ L ⊆ R^n` over `R = F[[t]]`.
//!
//! A submodule is stored in row Hermite form: row `i` is zero before column
//! `i`, has pivot `t^{a_i}` in column `i`, and every entry to the right of a
//! pivot in column `j` has degree `< a_j`. All entries are polynomials, so the
//! form is exact and canonical. The floor `M` (least exponent with
//! `t^M R^n ⊆ L`) is computed, never guessed: every operation below is then
//! a finite-dimensional problem in `(R/t^M)^n`.

use crate::arith::TruncatedSeries;
use crate::error::{Error, Result};
use crate::linfield::nullspace;
use crate::scalar::Field;

pub type ModVector<F> = Vec<TruncatedSeries<F>>;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Submodule<F> {
    rank: usize,
    rows: Vec<ModVector<F>>,
    pivots: Vec<u32>,
    floor: u32,
}

impl<F: Field> Submodule<F> {
    /// The whole module `R^n`.
    pub fn full(rank: usize) -> Self {
        Self::t_power(rank, 0)
    }

    /// `t^k R^n`.
    pub fn t_power(rank: usize, k: u32) -> Self {
        let rows = (0..rank)
            .map(|i| {
                (0..rank)
                    .map(|j| {
                        if i == j {
                            TruncatedSeries::t_power(k, k + 1)
                        } else {
                            TruncatedSeries::zero(k + 1)
                        }
                    })
                    .collect()
            })
            .collect();
        Submodule {
            rank,
            rows,
            pivots: vec![k; rank],
            floor: k,
        }
    }

    /// Canonical form of the span of `generators`.
    ///
    /// Entries are known modulo `t^P` with `P` the smallest generator
    /// precision. The span is certified when `span + t^P R^n` already contains
    /// `t^m R^n` for some `m < P`: by Nakayama every lift of the generators then
    /// spans the same module. Otherwise the precision is exhausted.
    pub fn hermite_form(rank: usize, generators: &[ModVector<F>]) -> Result<Self> {
        let p = min_precision(rank, generators)?;
        let candidate = Self::hnf_mod(rank, generators, p);
        if candidate.floor < p {
            Ok(candidate)
        } else {
            Err(Error::PrecisionExhausted(format!(
                "span of {} generators does not contain t^m R^{rank} for any m below precision {p}",
                generators.len()
            )))
        }
    }

    /// Canonical form of `span(generators) + t^m R^n`.
    pub fn hermite_form_with_floor(
        rank: usize,
        generators: &[ModVector<F>],
        m: u32,
    ) -> Result<Self> {
        if generators.is_empty() {
            return Ok(Self::t_power(rank, m));
        }
        let p = min_precision(rank, generators)?;
        if p >= m {
            return Ok(Self::hnf_mod(rank, generators, m));
        }
        let candidate = Self::hnf_mod(rank, generators, p);
        if candidate.floor < p {
            Ok(candidate)
        } else {
            Err(Error::PrecisionExhausted(format!(
                "generators known to t^{p} cannot fix a submodule with floor t^{m}"
            )))
        }
    }

    /// Span of exact polynomial generators together with `t^q R^n`.
    pub(crate) fn hnf_mod(rank: usize, generators: &[ModVector<F>], q: u32) -> Self {
        if q == 0 {
            return Self::full(rank);
        }
        let mut remaining: Vec<ModVector<F>> = generators
            .iter()
            .map(|g| {
                g.iter()
                    .map(|x| x.with_precision(q))
                    .collect::<ModVector<F>>()
            })
            .filter(|g| g.iter().any(|x| !x.is_zero()))
            .collect();
        let mut rows: Vec<ModVector<F>> = Vec::with_capacity(rank);
        let mut pivots = Vec::with_capacity(rank);
        for col in 0..rank {
            let best = remaining
                .iter()
                .enumerate()
                .filter_map(|(i, r)| r[col].ord().finite().map(|o| (o, i)))
                .min();
            let Some((a, idx)) = best else {
                let mut row = vec![TruncatedSeries::zero(q); rank];
                row[col] = TruncatedSeries::t_power(q, q + 1);
                rows.push(row);
                pivots.push(q);
                continue;
            };
            let mut pivot = remaining.swap_remove(idx);
            let unit = pivot[col].quotient_by_t_power(a);
            let inv = unit
                .inverse()
                .expect("pivot entry has exact order")
                .with_precision(q);
            pivot = pivot.iter().map(|x| x * &inv).collect();
            for r in remaining.iter_mut() {
                let quot = r[col].quotient_by_t_power(a).with_precision(q);
                if !quot.is_zero() {
                    for (x, y) in r.iter_mut().zip(&pivot) {
                        *x = &*x - &(&quot * y);
                    }
                }
            }
            // t^{q-a} * pivot - t^q e_col also lies in the span; dropping it
            // would overstate the pivots of later columns.
            if a > 0 {
                let tail: ModVector<F> = pivot
                    .iter()
                    .enumerate()
                    .map(|(j, x)| if j == col { TruncatedSeries::zero(q) } else { x.shift_up(q - a).with_precision(q) })
                    .collect();
                remaining.push(tail);
            }
            remaining.retain(|r| r.iter().any(|x| !x.is_zero()));
            rows.push(pivot);
            pivots.push(a);
        }
        for j in 0..rank {
            let (upper, lower) = rows.split_at_mut(j);
            let pivot_row = &lower[0];
            for row in upper.iter_mut() {
                let quot = row[j].quotient_by_t_power(pivots[j]).with_precision(q);
                if !quot.is_zero() {
                    for (x, y) in row.iter_mut().zip(pivot_row) {
                        *x = &*x - &(&quot * y);
                    }
                }
            }
        }
        let mut out = Submodule {
            rank,
            rows,
            pivots,
            floor: q,
        };
        out.floor = out.compute_floor(q);
        for row in out.rows.iter_mut() {
            for x in row.iter_mut() {
                *x = x.with_precision(out.floor + 1);
            }
        }
        out
    }

    fn compute_floor(&self, q: u32) -> u32 {
        let mut floor = 0;
        for j in 0..self.rank {
            let mut m = self.pivots[j];
            while m < q {
                let mut v = vec![TruncatedSeries::zero(q); self.rank];
                v[j] = TruncatedSeries::t_power(m, q);
                if self.remainder_mod(&v, q).iter().all(|x| x.is_zero()) {
                    break;
                }
                m += 1;
            }
            floor = floor.max(m);
        }
        floor
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Least `M` with `t^M R^n ⊆ self`.
    pub fn floor(&self) -> u32 {
        self.floor
    }

    /// Exponents of the pivots.
    pub fn pivots(&self) -> &[u32] {
        &self.pivots
    }

    pub fn rows(&self) -> &[ModVector<F>] {
        &self.rows
    }

    /// `dim_F R^n / self`.
    pub fn colength(&self) -> u32 {
        self.pivots.iter().sum()
    }

    pub fn is_full(&self) -> bool {
        self.floor == 0
    }

    /// Normal form of `v` modulo `self`: column `j` reduced below degree `a_j`.
    /// The map is `F`-linear and vanishes exactly on `self`.
    pub fn remainder(&self, v: &[TruncatedSeries<F>]) -> ModVector<F> {
        self.remainder_mod(v, self.floor.max(1))
    }

    fn remainder_mod(&self, v: &[TruncatedSeries<F>], q: u32) -> ModVector<F> {
        let mut out: ModVector<F> = v.iter().map(|x| x.with_precision(q)).collect();
        for j in 0..self.rank {
            let a = self.pivots[j];
            let quot = out[j].quotient_by_t_power(a).with_precision(q);
            if !quot.is_zero() {
                for (x, y) in out.iter_mut().zip(&self.rows[j]) {
                    *x = &*x - &(&quot * &y.with_precision(q));
                }
            }
        }
        out
    }

    /// Coordinates of the remainder in the monomial basis of `R^n / self`.
    pub fn quotient_coordinates(&self, v: &[TruncatedSeries<F>]) -> Vec<F> {
        let r = self.remainder(v);
        let mut out = Vec::with_capacity(self.colength() as usize);
        for (x, &a) in r.iter().zip(&self.pivots) {
            out.extend((0..a).map(|k| x.coeff(k)));
        }
        out
    }

    /// Membership of an exactly known polynomial vector.
    pub fn contains_exact(&self, v: &[TruncatedSeries<F>]) -> bool {
        self.floor == 0 || self.remainder(v).iter().all(|x| x.is_zero())
    }

    /// Membership for a vector known modulo its entries' precision.
    pub fn contains(&self, v: &[TruncatedSeries<F>]) -> Result<bool> {
        if v.len() != self.rank {
            return Err(Error::DimensionMismatch {
                expected: self.rank,
                found: v.len(),
            });
        }
        let p = v.iter().map(|x| x.precision()).min().unwrap_or(u32::MAX);
        if p >= self.floor {
            return Ok(self.contains_exact(v));
        }
        // Only `v + t^p R^n` is known.
        let coarse = self.sum(&Self::t_power(self.rank, p))?;
        if !coarse.contains_exact(v) {
            Ok(false)
        } else {
            Err(Error::PrecisionExhausted(format!(
                "vector known to t^{p} cannot be tested against a submodule with floor t^{}",
                self.floor
            )))
        }
    }

    pub fn contains_submodule(&self, other: &Self) -> bool {
        other.rows.iter().all(|r| self.contains_exact(r))
    }

    /// An `F`-basis of `self / t^q R^n` for `q >= floor`.
    pub fn f_basis(&self, q: u32) -> Vec<ModVector<F>> {
        let mut out = Vec::new();
        for (row, &a) in self.rows.iter().zip(&self.pivots) {
            for k in 0..q.saturating_sub(a) {
                out.push(
                    row.iter()
                        .map(|x| x.with_precision(q).shift_up(k).with_precision(q))
                        .collect(),
                );
            }
        }
        out
    }

    pub fn sum(&self, other: &Self) -> Result<Self> {
        self.check_rank(other)?;
        let q = self.floor.min(other.floor);
        let mut gens = self.rows.clone();
        gens.extend(other.rows.iter().cloned());
        Ok(Self::hnf_mod(self.rank, &gens, q))
    }

    pub fn intersect(&self, other: &Self) -> Result<Self> {
        self.check_rank(other)?;
        if self.is_full() || self.contains_submodule(other) {
            return Ok(other.clone());
        }
        if other.is_full() || other.contains_submodule(self) {
            return Ok(self.clone());
        }
        let q = self.floor.max(other.floor);
        let basis = self.f_basis(q);
        // Columns of the system: coordinates of each basis vector modulo `other`.
        let coords: Vec<Vec<F>> = basis
            .iter()
            .map(|b| other.quotient_coordinates(b))
            .collect();
        let m = other.colength() as usize;
        let equations: Vec<Vec<F>> = (0..m)
            .map(|e| coords.iter().map(|c| c[e].clone()).collect())
            .collect();
        let kernel = nullspace(&equations, basis.len());
        let gens: Vec<ModVector<F>> = kernel
            .iter()
            .map(|combo| {
                let mut acc = vec![TruncatedSeries::zero(q); self.rank];
                for (c, b) in combo.iter().zip(&basis) {
                    if !c.is_zero() {
                        for (x, y) in acc.iter_mut().zip(b) {
                            *x = &*x + &y.scale(c);
                        }
                    }
                }
                acc
            })
            .collect();
        Ok(Self::hnf_mod(self.rank, &gens, q))
    }

    /// `t^k * self`.
    pub fn scale_t(&self, k: u32) -> Self {
        if k == 0 {
            return self.clone();
        }
        Submodule {
            rank: self.rank,
            rows: self
                .rows
                .iter()
                .map(|r| r.iter().map(|x| x.shift_up(k)).collect())
                .collect(),
            pivots: self.pivots.iter().map(|a| a + k).collect(),
            floor: self.floor + k,
        }
    }

    /// `self + t^i R^n`, the preimage of the image in `(R/t^i)^n`.
    pub fn plus_t_power(&self, i: u32) -> Self {
        if i >= self.floor {
            return self.clone();
        }
        Self::hnf_mod(self.rank, &self.rows, i)
    }

    /// Representatives of an `F`-basis of `self / sub`; requires `sub ⊆ self`.
    ///
    /// Scans the monomial `F`-basis of `self` in order and keeps each vector
    /// that is independent of `sub` and of the vectors already kept.
    pub fn complement_reps(&self, sub: &Self) -> Vec<ModVector<F>> {
        let q = self.floor.max(sub.floor).max(1);
        let want = (sub.colength() - self.colength()) as usize;
        let mut kept = Vec::new();
        let mut echelon: Vec<Vec<F>> = Vec::new();
        for b in self.f_basis(q) {
            if kept.len() == want {
                break;
            }
            let mut c = sub.quotient_coordinates(&b);
            for row in &echelon {
                let p = row
                    .iter()
                    .position(|x: &F| !x.is_zero())
                    .expect("nonzero row");
                if !c[p].is_zero() {
                    let f = c[p].clone() / row[p].clone();
                    for (x, y) in c.iter_mut().zip(row) {
                        *x = x.clone() - f.clone() * y.clone();
                    }
                }
            }
            if c.iter().any(|x| !x.is_zero()) {
                echelon.push(c);
                kept.push(b);
            }
        }
        kept
    }

    fn check_rank(&self, other: &Self) -> Result<()> {
        if self.rank != other.rank {
            return Err(Error::DimensionMismatch {
                expected: self.rank,
                found: other.rank,
            });
        }
        Ok(())
    }
}

fn min_precision<F: Field>(rank: usize, generators: &[ModVector<F>]) -> Result<u32> {
    let mut p = u32::MAX;
    for g in generators {
        if g.len() != rank {
            return Err(Error::DimensionMismatch {
                expected: rank,
                found: g.len(),
            });
        }
        for x in g {
            p = p.min(x.precision());
        }
    }
    if p == u32::MAX {
        return Err(Error::PrecisionExhausted("no generators given".into()));
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat::int;
    use crate::Rational;

    type S = TruncatedSeries<Rational>;

    fn s(c: &[i64], n: u32) -> S {
        S::from_dense(&c.iter().map(|x| int(*x)).collect::<Vec<_>>(), n)
    }

    #[test]
    fn floor_generators_take_part() {
        // span((t, 1)) + t^2 R^2 also contains t * (t, 1) - (t^2, 0) = (0, t).
        let m = Submodule::hnf_mod(2, &[vec![s(&[0, 1], 4), s(&[1], 4)]], 2);
        assert_eq!(m.colength(), 2);
        assert!(m.contains_exact(&[s(&[0], 4), s(&[0, 1], 4)]));
        assert!(!m.contains_exact(&[s(&[1], 4), s(&[0], 4)]));
    }

    #[test]
    fn already_canonical() {
        let m = Submodule::hermite_form(
            2,
            &[
                vec![s(&[0, 1], 4), s(&[0], 4)],
                vec![s(&[0], 4), s(&[1], 4)],
            ],
        )
        .unwrap();
        assert_eq!(m.pivots(), &[1, 0]);
        assert_eq!(m.floor(), 1);
        assert_eq!(m.colength(), 1);
    }

    #[test]
    fn two_step_elimination() {
        let m = Submodule::hermite_form(
            2,
            &[
                vec![s(&[1], 4), s(&[1], 4)],
                vec![s(&[1], 4), s(&[1, 1], 4)],
            ],
        )
        .unwrap();
        assert_eq!(m.pivots(), &[0, 1]);
        assert_eq!(m.rows()[0][1].clone().with_precision(4), s(&[1], 4));
        assert!(m.contains_exact(&[s(&[0], 4), s(&[0, 1], 4)]));
        assert!(!m.contains_exact(&[s(&[0], 4), s(&[1], 4)]));
    }

    #[test]
    fn explicit_floor() {
        let m = Submodule::hermite_form_with_floor(2, &[vec![s(&[0, 1], 4), s(&[0, 1], 4)]], 2)
            .unwrap();
        assert_eq!(m.pivots(), &[1, 2]);
        assert_eq!(m.floor(), 2);
        assert!(m.contains_exact(&[s(&[0, 0, 1], 4), s(&[0], 4)]));
        assert!(!m.contains_exact(&[s(&[0, 1], 4), s(&[0], 4)]));
    }

    #[test]
    fn uncertifiable_span() {
        // (t, t) alone never contains a power of t times R^2.
        assert!(matches!(
            Submodule::hermite_form(2, &[vec![s(&[0, 1], 4), s(&[0, 1], 4)]]),
            Err(Error::PrecisionExhausted(_))
        ));
    }

    #[test]
    fn intersection_examples() {
        let v = Submodule::<Rational>::full(2);
        let tv = Submodule::t_power(2, 1);
        assert_eq!(tv.intersect(&v).unwrap(), tv);
        let a = Submodule::hermite_form(
            2,
            &[
                vec![s(&[1], 3), s(&[0], 3)],
                vec![s(&[0], 3), s(&[0, 1], 3)],
            ],
        )
        .unwrap();
        let b = Submodule::hermite_form(
            2,
            &[
                vec![s(&[1], 3), s(&[1], 3)],
                vec![s(&[0], 3), s(&[0, 1], 3)],
            ],
        )
        .unwrap();
        assert_eq!(a.intersect(&a).unwrap(), a);
        let i = a.intersect(&b).unwrap();
        assert_eq!(i, tv);
    }

    #[test]
    fn floor_can_exceed_pivots() {
        // span{(1, 1/t...)} style: rows (1, t^0 * 1) and (0, t^2) give floor 2.
        let m = Submodule::hermite_form_with_floor(2, &[vec![s(&[1], 4), s(&[1], 4)]], 2).unwrap();
        assert_eq!(m.pivots(), &[0, 2]);
        assert_eq!(m.floor(), 2);
    }

    #[test]
    fn complement_counts() {
        let v = Submodule::<Rational>::full(2);
        let sub =
            Submodule::hermite_form_with_floor(2, &[vec![s(&[1], 4), s(&[1], 4)]], 2).unwrap();
        assert_eq!(v.complement_reps(&sub).len(), 2);
        assert_eq!(
            sub.plus_t_power(1),
            Submodule::hermite_form_with_floor(2, &[vec![s(&[1], 4), s(&[1], 4)]], 1).unwrap()
        );
    }
}
