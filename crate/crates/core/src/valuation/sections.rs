use std::collections::BTreeSet;

use crate::arith::{LaurentPoly, Monomial, TruncatedSeries};
use crate::error::{Error, Result};
use crate::lindvr::{invert_matrix, ModVector};
use crate::linfield::{rank, rref};
use crate::scalar::Field;

/// A free `R`-module given by a designated basis of sections.
///
/// An optional grading matrix `G` assigns the weight `G beta` to `x^beta`;
/// when present every section must be homogeneous.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectionSpace<F> {
    sections: Vec<LaurentPoly<F>>,
    grading: Option<Vec<Vec<i64>>>,
}

impl<F: Field> SectionSpace<F> {
    /// Checks that the sections are nonzero, share their variables, and are
    /// linearly independent over `F((t))`.
    pub fn new(sections: Vec<LaurentPoly<F>>) -> Result<Self> {
        let first = sections.first().ok_or_else(|| Error::NotABasis("no sections".into()))?;
        let n = first.num_vars();
        for s in &sections {
            if s.num_vars() != n {
                return Err(Error::VariableMismatch(n, s.num_vars()));
            }
            if s.is_zero() {
                return Err(Error::NotABasis("a section vanishes to the working precision".into()));
            }
        }
        if !independent(&sections) {
            return Err(Error::NotABasis(format!("the {} sections are linearly dependent", sections.len())));
        }
        Ok(SectionSpace { sections, grading: None })
    }

    /// Attaches a grading matrix with one column per torus variable.
    pub fn with_grading(mut self, grading: Vec<Vec<i64>>) -> Result<Self> {
        let n = self.num_vars();
        if let Some(row) = grading.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: row.len() });
        }
        self.grading = Some(grading);
        for s in &self.sections {
            self.weight_of(s)?;
        }
        Ok(self)
    }

    pub fn sections(&self) -> &[LaurentPoly<F>] {
        &self.sections
    }

    pub fn rank(&self) -> usize {
        self.sections.len()
    }

    pub fn num_vars(&self) -> usize {
        self.sections[0].num_vars()
    }

    /// Smallest precision among the sections.
    pub fn precision(&self) -> u32 {
        self.sections.iter().map(|s| s.precision()).min().expect("nonempty")
    }

    pub fn grading(&self) -> Option<&[Vec<i64>]> {
        self.grading.as_deref()
    }

    /// Union of the exponent supports of the sections.
    pub fn support(&self) -> BTreeSet<Vec<i32>> {
        self.sections.iter().flat_map(|s| s.support()).collect()
    }

    /// Weight of a homogeneous polynomial under the grading (empty without one).
    pub fn weight_of(&self, f: &LaurentPoly<F>) -> Result<Vec<i64>> {
        let Some(g) = &self.grading else { return Ok(Vec::new()) };
        let weigh = |beta: &[i32]| -> Vec<i64> {
            g.iter().map(|row| row.iter().zip(beta).map(|(a, b)| a * *b as i64).sum()).collect()
        };
        let weights: BTreeSet<Vec<i64>> = f.support().iter().map(|b| weigh(b)).collect();
        match weights.len() {
            0 => Ok(vec![0; g.len()]),
            1 => Ok(weights.into_iter().next().expect("one weight")),
            _ => Err(Error::NotWeightCompatible(format!("section has weights {weights:?}"))),
        }
    }

    /// `sum_i a_i s_i`, with the coefficients read as exact polynomials.
    pub fn combine(&self, a: &[TruncatedSeries<F>]) -> Result<LaurentPoly<F>> {
        LaurentPoly::combination(a, &self.sections)
    }

    /// Coordinates of `f` in the designated basis.
    ///
    /// Requires the residues of the sections at `t = 0` to be independent, so
    /// that some square minor of the coefficient matrix is a unit; the
    /// coordinates are then unique and determined modulo the working precision.
    pub fn coordinates(&self, f: &LaurentPoly<F>) -> Result<ModVector<F>> {
        if f.num_vars() != self.num_vars() {
            return Err(Error::VariableMismatch(self.num_vars(), f.num_vars()));
        }
        let p = self.precision().min(f.precision());
        let all = self.sections.iter().chain(std::iter::once(f));
        if all.clone().any(|s| s.min_t_degree().is_some_and(|k| k < 0)) {
            return Err(Error::InvariantViolation("coordinates need sections without negative powers of t".into()));
        }
        let support: Vec<Vec<i32>> = self.support().into_iter().collect();
        let residue = |s: &LaurentPoly<F>, beta: &[i32]| s.coeff(&Monomial::new(0, beta.to_vec()));
        let rows: Vec<Vec<F>> =
            self.sections.iter().map(|s| support.iter().map(|b| residue(s, b)).collect()).collect();
        let n = self.rank();
        // Pivot columns of the residue matrix select an invertible minor.
        let (_, cols) = rref(rows, support.len());
        if cols.len() != n {
            return Err(Error::NotABasis("section residues are dependent; coordinates are not determined".into()));
        }
        let series = |s: &LaurentPoly<F>, beta: &[i32]| -> TruncatedSeries<F> {
            TruncatedSeries::from_terms(
                s.terms().filter(|(m, _)| m.exponents == beta).map(|(m, c)| (m.t_degree as u32, c.clone())),
                p,
            )
        };
        let minor: Vec<Vec<TruncatedSeries<F>>> =
            self.sections.iter().map(|s| cols.iter().map(|&j| series(s, &support[j])).collect()).collect();
        let inv = invert_matrix(&minor, p)?;
        let target: Vec<TruncatedSeries<F>> = cols.iter().map(|&j| series(f, &support[j])).collect();
        let coords: ModVector<F> = (0..n)
            .map(|i| {
                target.iter().zip(&inv).fold(TruncatedSeries::zero(p), |acc, (y, row)| &acc + &(y * &row[i]))
            })
            .collect();
        let back = self.combine(&coords)?.with_precision(p);
        if back != f.with_precision(p) {
            return Err(Error::NotABasis("polynomial is not in the span of the sections".into()));
        }
        Ok(coords)
    }
}

/// Rank over `F(t)` by evaluation at integer points; a nonzero maximal minor
/// is a polynomial of bounded degree, so finitely many points decide it.
fn independent<F: Field>(sections: &[LaurentPoly<F>]) -> bool {
    let support: Vec<Vec<i32>> = sections.iter().flat_map(|s| s.support()).collect::<BTreeSet<_>>().into_iter().collect();
    let n = sections.len();
    if support.len() < n {
        return false;
    }
    let lo = sections.iter().filter_map(|s| s.min_t_degree()).min().unwrap_or(0);
    let hi = sections.iter().filter_map(|s| s.max_t_degree()).max().unwrap_or(0);
    let degree = (hi - lo) as usize;
    for point in 0..=(n * degree) as i64 {
        let tau = F::from_int(point);
        let rows: Vec<Vec<F>> = sections
            .iter()
            .map(|s| {
                let mut row = vec![F::zero(); support.len()];
                for (m, c) in s.terms() {
                    let j = support.binary_search(&m.exponents).expect("in support");
                    let mut term = c.clone();
                    for _ in 0..(m.t_degree - lo) {
                        term = term * tau.clone();
                    }
                    row[j] = row[j].clone() + term;
                }
                row
            })
            .collect();
        if rank(&rows, support.len()) == n {
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::PolyReader;
    use crate::Rational;

    fn read(ss: &[&str]) -> Vec<LaurentPoly<Rational>> {
        let r = PolyReader::new(&["x", "y"], 6);
        ss.iter().map(|s| r.read(s).unwrap()).collect()
    }

    #[test]
    fn rejects_dependent_sections() {
        assert!(SectionSpace::new(read(&["x", "x + x"])).is_err());
        assert!(SectionSpace::new(read(&["1", "1 + t*x"])).is_ok());
        assert!(SectionSpace::new(read(&["1 + x", "2 + 2*x"])).is_err());
    }

    #[test]
    fn coordinates_round_trip() {
        let v = SectionSpace::new(read(&["1", "x + t", "x*y - t^2"])).unwrap();
        let f = read(&["3 + 2*x + t*x*y"])[0].clone();
        let c = v.coordinates(&f).unwrap();
        assert_eq!(v.combine(&c).unwrap().with_precision(6), f);
        assert!(v.coordinates(&read(&["y"])[0]).is_err());
    }

    #[test]
    fn grading_detects_inhomogeneous_sections() {
        let v = SectionSpace::new(read(&["1", "x + y"])).unwrap();
        assert!(v.clone().with_grading(vec![vec![1, 1]]).is_ok());
        assert!(matches!(v.with_grading(vec![vec![1, 0]]), Err(Error::NotWeightCompatible(_))));
    }
}
