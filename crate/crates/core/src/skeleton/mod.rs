//! Skeleton complexes and their refinement into cells on which every section's
//! tropicalization is affine.
//!
//! A point of a simplex is described either by barycentric weights `alpha`
//! or by the normalized coordinates `mu_j = alpha_j b_j / sum_k alpha_k b_k`.
//! The valuation at the point has weights `sum_j mu_j w_j / b_j`, so every
//! term value `k + <w, beta>` is linear in `mu`. Cells are therefore polytopes
//! in `mu`-coordinates; both coordinate systems give the same polytopes since
//! the change of coordinates maps hyperplanes to hyperplanes.

mod polytope;
mod refine;

use std::collections::BTreeSet;

use itertools::Itertools;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::scalar::rat;
use crate::valuation::{skeleton_membership, DivisorData, MonomialValuation};
use crate::Rational;

pub use polytope::Polytope;
pub use refine::{refine, refine_sections, subdivision_vertices, Cell, Subdivision};

/// Largest supported simplex dimension.
pub const MAX_SIMPLEX_DIM: usize = 3;

/// A simplicial complex on special-fiber components.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkeletonComplex {
    vertices: Vec<DivisorData>,
    simplices: BTreeSet<Vec<usize>>,
}

impl SkeletonComplex {
    /// Closes `simplices` under taking faces and adds every vertex.
    pub fn new(vertices: Vec<DivisorData>, simplices: Vec<Vec<usize>>) -> Result<Self> {
        let n = vertices.first().map(|d| d.weights().len()).ok_or_else(|| Error::InvariantViolation("no vertices".into()))?;
        for d in &vertices {
            if d.weights().len() != n {
                return Err(Error::VariableMismatch(n, d.weights().len()));
            }
        }
        let mut closed: BTreeSet<Vec<usize>> = (0..vertices.len()).map(|j| vec![j]).collect();
        for s in simplices {
            let s: Vec<usize> = s.into_iter().sorted().dedup().collect();
            if s.is_empty() || s.iter().any(|&j| j >= vertices.len()) {
                return Err(Error::NotASimplex(s));
            }
            if s.len() > MAX_SIMPLEX_DIM + 1 {
                return Err(Error::InvariantViolation(format!(
                    "simplex {s:?} has dimension {}, at most {MAX_SIMPLEX_DIM} supported",
                    s.len() - 1
                )));
            }
            for k in 1..=s.len() {
                closed.extend(s.iter().copied().combinations(k));
            }
        }
        let k = SkeletonComplex { vertices, simplices: closed };
        let declared: Vec<Vec<usize>> = k.simplices.iter().cloned().collect();
        for (j, d) in k.vertices.iter().enumerate() {
            let mut alpha = vec![Rational::zero(); k.vertices.len()];
            alpha[j] = rat::frac(1, d.multiplicity() as i64);
            if !skeleton_membership(&k.vertices, &declared, &alpha)? {
                return Err(Error::InvariantViolation(format!(
                    "vertex {} has positive log discrepancy and is not on the skeleton",
                    d.label
                )));
            }
        }
        Ok(k)
    }

    pub fn vertices(&self) -> &[DivisorData] {
        &self.vertices
    }

    pub fn num_vars(&self) -> usize {
        self.vertices[0].weights().len()
    }

    /// All simplices, faces included, in lexicographic order.
    pub fn simplices(&self) -> impl Iterator<Item = &Vec<usize>> + '_ {
        self.simplices.iter()
    }

    /// Simplices not contained in a larger one.
    pub fn maximal_simplices(&self) -> Vec<Vec<usize>> {
        self.simplices
            .iter()
            .filter(|s| !self.simplices.iter().any(|t| t.len() > s.len() && s.iter().all(|j| t.contains(j))))
            .cloned()
            .collect()
    }

    pub fn dimension(&self) -> usize {
        self.simplices.iter().map(|s| s.len() - 1).max().unwrap_or(0)
    }

    pub fn contains_simplex(&self, s: &[usize]) -> bool {
        self.simplices.contains(s)
    }

    fn check_simplex(&self, s: &[usize], coords: &[Rational]) -> Result<()> {
        if !self.contains_simplex(s) {
            return Err(Error::NotASimplex(s.to_vec()));
        }
        if coords.len() != s.len() {
            return Err(Error::DimensionMismatch { expected: s.len(), found: coords.len() });
        }
        if coords.iter().any(|a| a.is_negative()) || coords.iter().sum::<Rational>() != rat::one() {
            return Err(Error::InvariantViolation("coordinates must be nonnegative and sum to 1".into()));
        }
        Ok(())
    }

    /// `mu_j = alpha_j b_j / sum_k alpha_k b_k`.
    pub fn mu_from_alpha(&self, s: &[usize], alpha: &[Rational]) -> Vec<Rational> {
        let scaled: Vec<Rational> =
            s.iter().zip(alpha).map(|(&j, a)| a * rat::int(self.vertices[j].multiplicity() as i64)).collect();
        let norm: Rational = scaled.iter().sum();
        scaled.into_iter().map(|x| x / &norm).collect()
    }

    /// Inverse of [`Self::mu_from_alpha`].
    pub fn alpha_from_mu(&self, s: &[usize], mu: &[Rational]) -> Vec<Rational> {
        let scaled: Vec<Rational> =
            s.iter().zip(mu).map(|(&j, m)| m / rat::int(self.vertices[j].multiplicity() as i64)).collect();
        let norm: Rational = scaled.iter().sum();
        scaled.into_iter().map(|x| x / &norm).collect()
    }

    /// The normalized valuation `(sum_j alpha_j b_j)^{-1} sum_j alpha_j w_j`.
    pub fn point_valuation(&self, s: &[usize], alpha: &[Rational]) -> Result<MonomialValuation> {
        self.check_simplex(s, alpha)?;
        Ok(self.valuation_at_mu(s, &self.mu_from_alpha(s, alpha)))
    }

    pub(crate) fn valuation_at_mu(&self, s: &[usize], mu: &[Rational]) -> MonomialValuation {
        let mut weights = vec![Rational::zero(); self.num_vars()];
        for (&j, m) in s.iter().zip(mu) {
            let d = &self.vertices[j];
            let b = rat::int(d.multiplicity() as i64);
            for (w, x) in weights.iter_mut().zip(d.weights()) {
                *w += m * x / &b;
            }
        }
        MonomialValuation::new(weights)
    }

    /// The point with normalized coordinates `mu` on `s`.
    pub fn point(&self, s: &[usize], mu: Vec<Rational>) -> Result<SkeletonPoint> {
        self.check_simplex(s, &mu)?;
        let valuation = self.valuation_at_mu(s, &mu);
        Ok(SkeletonPoint { simplex: s.to_vec(), mu, valuation })
    }

    /// Barycentric weights of `p` on all vertices, for vertical-divisor shifts.
    pub fn full_alpha(&self, p: &SkeletonPoint) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.vertices.len()];
        for (&j, a) in p.simplex.iter().zip(self.alpha_from_mu(&p.simplex, &p.mu)) {
            out[j] = a;
        }
        out
    }

    /// Whether some simplex has as many vertices as there are torus variables plus one.
    pub fn is_maximal(&self) -> bool {
        self.dimension() == self.num_vars()
    }

    /// The same complex on one more torus variable, on which every vertex has weight 0.
    pub fn lifted(&self) -> SkeletonComplex {
        let vertices = self
            .vertices
            .iter()
            .map(|d| {
                let mut w = d.weights().to_vec();
                w.push(Rational::zero());
                DivisorData::new(d.label.clone(), w, d.multiplicity(), d.log_discrepancy().clone()).expect("valid")
            })
            .collect();
        SkeletonComplex { vertices, simplices: self.simplices.clone() }
    }
}

/// A rational point of the skeleton with its valuation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SkeletonPoint {
    pub simplex: Vec<usize>,
    pub mu: Vec<Rational>,
    pub valuation: MonomialValuation,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat::{frac, int};

    fn interval(b: [u32; 2]) -> SkeletonComplex {
        let d0 = DivisorData::new("E0", vec![int(1), int(0)], b[0], int(0)).unwrap();
        let d1 = DivisorData::new("E1", vec![int(0), int(3)], b[1], int(0)).unwrap();
        SkeletonComplex::new(vec![d0, d1], vec![vec![1, 0]]).unwrap()
    }

    #[test]
    fn closure_and_maximal() {
        let k = interval([1, 1]);
        assert_eq!(k.simplices().count(), 3);
        assert_eq!(k.maximal_simplices(), vec![vec![0, 1]]);
        assert_eq!(k.dimension(), 1);
    }

    #[test]
    fn point_valuation_examples() {
        let k = interval([1, 2]);
        assert_eq!(k.point_valuation(&[0, 1], &[int(0), int(1)]).unwrap().weights(), &[int(0), frac(3, 2)]);
        // Normalizer 3/2: (w0 + w1) / 3.
        assert_eq!(k.point_valuation(&[0, 1], &[frac(1, 2), frac(1, 2)]).unwrap().weights(), &[frac(1, 3), int(1)]);
        let k1 = interval([1, 1]);
        assert_eq!(k1.point_valuation(&[0, 1], &[frac(1, 2), frac(1, 2)]).unwrap().weights(), &[frac(1, 2), frac(3, 2)]);
        assert_eq!(k.point_valuation(&[0, 2], &[frac(1, 2), frac(1, 2)]), Err(Error::NotASimplex(vec![0, 2])));
    }

    #[test]
    fn coordinates_round_trip() {
        let k = interval([2, 3]);
        let alpha = vec![frac(1, 4), frac(3, 4)];
        let mu = k.mu_from_alpha(&[0, 1], &alpha);
        assert_eq!(k.alpha_from_mu(&[0, 1], &mu), alpha);
    }

    #[test]
    fn positive_discrepancy_vertex_rejected() {
        let d = DivisorData::new("E", vec![int(0)], 1, int(1)).unwrap();
        assert!(SkeletonComplex::new(vec![d], vec![]).is_err());
    }
}
