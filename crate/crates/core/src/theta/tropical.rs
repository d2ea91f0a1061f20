use std::collections::BTreeSet;

use num_traits::Zero;

use crate::arith::LaurentPoly;
use crate::error::Result;
use crate::scalar::Field;
use crate::skeleton::{refine_sections, subdivision_vertices, Polytope, SkeletonComplex, SkeletonPoint};
use crate::Rational;

/// One linear piece: on `polytope` (normalized coordinates of `simplex`) the
/// function is `<form, mu>`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TropicalCell {
    pub simplex: Vec<usize>,
    pub polytope: Polytope,
    pub form: Vec<Rational>,
}

impl TropicalCell {
    /// `(slope, offset)` in the affine chart `mu_0 = 1 - mu_1 - ... - mu_k`.
    pub fn slope_offset(&self) -> (Vec<Rational>, Rational) {
        let offset = self.form[0].clone();
        (self.form[1..].iter().map(|c| c - &offset).collect(), offset)
    }
}

/// The piecewise linear function `v -> v(s)` on the skeleton.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TropicalFunction<F> {
    section: LaurentPoly<F>,
    cells: Vec<TropicalCell>,
}

/// Tropicalization of `s` over every maximal simplex of `k`.
pub fn tropicalize<F: Field>(s: &LaurentPoly<F>, k: &SkeletonComplex) -> Result<TropicalFunction<F>> {
    let sub = refine_sections(k, std::slice::from_ref(s))?;
    let cells = sub
        .cells
        .into_iter()
        .map(|c| TropicalCell { simplex: c.simplex, polytope: c.polytope, form: c.forms[0].clone() })
        .collect();
    Ok(TropicalFunction { section: s.clone(), cells })
}

impl<F: Field> TropicalFunction<F> {
    pub fn section(&self) -> &LaurentPoly<F> {
        &self.section
    }

    pub fn cells(&self) -> &[TropicalCell] {
        &self.cells
    }

    /// Value at a point, read off the cell containing it.
    pub fn eval(&self, p: &SkeletonPoint) -> Option<Rational> {
        self.cells.iter().find_map(|c| {
            if !p.simplex.iter().all(|j| c.simplex.contains(j)) {
                return None;
            }
            let mu: Vec<Rational> = c
                .simplex
                .iter()
                .map(|j| p.simplex.iter().position(|x| x == j).map_or_else(Rational::zero, |i| p.mu[i].clone()))
                .collect();
            c.polytope.contains(&mu).then(|| c.form.iter().zip(&mu).map(|(a, b)| a * b).sum())
        })
    }

    /// Breakpoints: the cell vertices, without repeats.
    pub fn vertices(&self, k: &SkeletonComplex) -> Vec<SkeletonPoint> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for c in &self.cells {
            for mu in c.polytope.vertices() {
                let (face, coords): (Vec<usize>, Vec<Rational>) =
                    c.simplex.iter().zip(mu).filter(|(_, m)| !m.is_zero()).map(|(&j, m)| (j, m.clone())).unzip();
                let p = k.point(&face, coords).expect("cell vertices lie on the complex");
                if seen.insert(p.clone()) {
                    out.push(p);
                }
            }
        }
        out
    }

    /// `Some(c)` when `self - other` is the constant `c` on the whole skeleton.
    ///
    /// Both functions are linear on the cells of the joint refinement, so it
    /// suffices to compare at its vertices.
    pub fn constant_difference(&self, other: &Self, k: &SkeletonComplex) -> Result<Option<Rational>> {
        let joint = refine_sections(k, &[self.section.clone(), other.section.clone()])?;
        let mut diff: Option<Rational> = None;
        for p in subdivision_vertices(k, &joint) {
            let a = p.valuation.eval(&self.section).expect("nonzero");
            let b = p.valuation.eval(&other.section).expect("nonzero");
            let d = a - b;
            match &diff {
                None => diff = Some(d),
                Some(e) if *e != d => return Ok(None),
                _ => {}
            }
        }
        Ok(diff)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::PolyReader;
    use crate::scalar::rat::{frac, int};
    use crate::valuation::DivisorData;

    fn interval() -> SkeletonComplex {
        let d0 = DivisorData::new("E0", vec![int(1)], 1, int(0)).unwrap();
        let d1 = DivisorData::new("E1", vec![int(-1)], 1, int(0)).unwrap();
        SkeletonComplex::new(vec![d0, d1], vec![vec![0, 1]]).unwrap()
    }

    fn read(s: &str) -> LaurentPoly<Rational> {
        PolyReader::new(&["x"], 6).read(s).unwrap()
    }

    #[test]
    fn monomial_has_one_piece() {
        let f = tropicalize(&read("x^2"), &interval()).unwrap();
        assert_eq!(f.cells().len(), 1);
        assert_eq!(f.cells()[0].slope_offset(), (vec![int(-4)], int(2)));
    }

    #[test]
    fn t_multiple_shifts_by_one() {
        let k = interval();
        let f = tropicalize(&read("1 + x"), &k).unwrap();
        let g = tropicalize(&read("t + t*x"), &k).unwrap();
        assert_eq!(g.constant_difference(&f, &k).unwrap(), Some(int(1)));
        let p = k.point(&[0, 1], vec![frac(1, 4), frac(3, 4)]).unwrap();
        assert_eq!(g.eval(&p), Some(f.eval(&p).unwrap() + int(1)));
    }

    #[test]
    fn kink_at_midpoint() {
        let k = interval();
        let f = tropicalize(&read("1 + x"), &k).unwrap();
        let vals: Vec<_> = f.vertices(&k).iter().map(|p| f.eval(p).unwrap()).collect();
        assert_eq!(vals.len(), 3);
        assert!(vals.iter().all(|v| *v == int(0) || *v == int(-1)));
        assert_eq!(f.eval(&k.point(&[0, 1], vec![frac(1, 4), frac(3, 4)]).unwrap()), Some(frac(-1, 2)));
        assert_eq!(f.eval(&k.point(&[0, 1], vec![frac(3, 4), frac(1, 4)]).unwrap()), Some(int(0)));
    }
}
