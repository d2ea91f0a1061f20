use itertools::Itertools;
use num_traits::{One, Signed, Zero};

use crate::linfield::rref;
use crate::Rational;

/// A convex polytope inside the standard simplex `{mu >= 0, sum mu = 1}`.
///
/// The vertex list is the primary data. The defining inequalities
/// `<a, mu> >= 0` that produced it are kept as well, since cutting by a
/// hyperplane is easiest on that side.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polytope {
    facets: Vec<Vec<Rational>>,
    vertices: Vec<Vec<Rational>>,
}

impl Polytope {
    /// The whole simplex with `k` vertices.
    pub fn simplex(k: usize) -> Self {
        let unit = |i: usize| (0..k).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect::<Vec<_>>();
        Polytope { facets: (0..k).map(unit).collect(), vertices: (0..k).map(unit).collect() }
    }

    pub fn vertices(&self) -> &[Vec<Rational>] {
        &self.vertices
    }

    /// Inequalities `<a, mu> >= 0` cutting the polytope out of the simplex.
    pub fn facets(&self) -> &[Vec<Rational>] {
        &self.facets
    }

    pub fn centroid(&self) -> Vec<Rational> {
        let k = Rational::from_integer(self.vertices.len().into());
        let n = self.vertices[0].len();
        (0..n).map(|j| self.vertices.iter().map(|v| &v[j]).sum::<Rational>() / &k).collect()
    }

    pub fn contains(&self, mu: &[Rational]) -> bool {
        mu.iter().sum::<Rational>() == Rational::one()
            && mu.iter().all(|x| !x.is_negative())
            && self.facets.iter().all(|a| !dot(a, mu).is_negative())
    }

    /// Splits along `<h, mu> = 0` when the hyperplane meets the interior.
    pub fn split(&self, h: &[Rational]) -> Option<(Polytope, Polytope)> {
        let values: Vec<Rational> = self.vertices.iter().map(|v| dot(h, v)).collect();
        if !values.iter().any(|x| x.is_positive()) || !values.iter().any(|x| x.is_negative()) {
            return None;
        }
        let neg: Vec<Rational> = h.iter().map(|x| -x).collect();
        Some((self.with_facet(h.to_vec()), self.with_facet(neg)))
    }

    fn with_facet(&self, a: Vec<Rational>) -> Polytope {
        let mut facets = self.facets.clone();
        facets.push(a);
        let vertices = enumerate_vertices(&facets);
        let dim = facets[0].len() - 1;
        // Inequalities tight at fewer than `dim` vertices do not bound a facet.
        facets.retain(|f| vertices.iter().filter(|v| dot(f, v).is_zero()).count() >= dim);
        Polytope { facets, vertices }
    }
}

pub(crate) fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Points where `sum mu = 1` and `dim` independent inequalities are tight,
/// kept when all inequalities hold.
fn enumerate_vertices(facets: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let n = facets[0].len();
    let dim = n - 1;
    let mut out: Vec<Vec<Rational>> = Vec::new();
    for chosen in facets.iter().combinations(dim) {
        let mut rows: Vec<Vec<Rational>> = chosen
            .iter()
            .map(|a| {
                let mut r = (*a).clone();
                r.push(Rational::zero());
                r
            })
            .collect();
        let mut sum = vec![Rational::one(); n];
        sum.push(Rational::one());
        rows.push(sum);
        let (r, pivots) = rref(rows, n + 1);
        if pivots.len() != n || pivots.contains(&n) {
            continue;
        }
        let mut p = vec![Rational::zero(); n];
        for (row, &c) in r.iter().zip(&pivots) {
            p[c] = row[n].clone();
        }
        if p.iter().all(|x| !x.is_negative()) && facets.iter().all(|a| !dot(a, &p).is_negative()) && !out.contains(&p) {
            out.push(p);
        }
    }
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat::{frac, int};

    #[test]
    fn split_interval() {
        let p = Polytope::simplex(2);
        // mu_0 - mu_1 = 0 at the midpoint.
        let (a, b) = p.split(&[int(1), int(-1)]).unwrap();
        assert_eq!(a.vertices(), &[vec![frac(1, 2), frac(1, 2)], vec![int(1), int(0)]]);
        assert_eq!(b.vertices(), &[vec![int(0), int(1)], vec![frac(1, 2), frac(1, 2)]]);
        assert!(a.split(&[int(1), int(-1)]).is_none());
    }

    #[test]
    fn split_triangle_through_vertex() {
        let p = Polytope::simplex(3);
        let (a, b) = p.split(&[int(0), int(1), int(-1)]).unwrap();
        assert_eq!(a.vertices().len(), 3);
        assert_eq!(b.vertices().len(), 3);
        assert!(a.contains(&[int(1), int(0), int(0)]) && b.contains(&[int(1), int(0), int(0)]));
        // A hyperplane missing the interior leaves the cell alone.
        assert!(p.split(&[int(1), int(1), int(1)]).is_none());
    }
}
