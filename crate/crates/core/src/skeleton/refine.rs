use std::collections::BTreeSet;

use num_traits::Zero;
use rayon::prelude::*;

use crate::arith::LaurentPoly;
use crate::error::{Error, Result};
use crate::scalar::{rat, Field};
use crate::skeleton::polytope::{dot, Polytope};
use crate::skeleton::{SkeletonComplex, SkeletonPoint};
use crate::valuation::SectionSpace;
use crate::Rational;

/// A cell of a refined simplex together with the linear form, in
/// `mu`-coordinates, that computes each tracked section's valuation on it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cell {
    pub simplex: Vec<usize>,
    pub polytope: Polytope,
    pub forms: Vec<Vec<Rational>>,
}

impl Cell {
    /// Value of section `i` at `mu` (meaningful only for `mu` in the cell).
    pub fn value(&self, i: usize, mu: &[Rational]) -> Rational {
        dot(&self.forms[i], mu)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subdivision {
    pub cells: Vec<Cell>,
}

/// Cuts every maximal simplex so that, on each cell, the valuation of every
/// `R`-combination of the sections is a single linear form.
///
/// Each term `t^k x^beta` contributes the form with vertex values
/// `k + <w_j, beta> / b_j`. A combination's terms are terms of the sections
/// shifted by powers of `t`, so its minimizing term is fixed on any region
/// where no difference of two term forms crosses an integer. The cuts are the
/// hyperplanes `<c - c', mu> = n` for every pair of term forms and every
/// integer `n` strictly inside the range of `c - c'` on the simplex. The
/// number of cells grows with the number of such hyperplanes; the naive
/// incremental cutting is meant for small simplices and term counts.
pub fn refine<F: Field>(k: &SkeletonComplex, space: &SectionSpace<F>) -> Result<Subdivision> {
    refine_sections(k, space.sections())
}

/// [`refine`] for any list of nonzero polynomials.
pub fn refine_sections<F: Field>(k: &SkeletonComplex, sections: &[LaurentPoly<F>]) -> Result<Subdivision> {
    for s in sections {
        if s.num_vars() != k.num_vars() {
            return Err(Error::VariableMismatch(k.num_vars(), s.num_vars()));
        }
        if s.is_zero() {
            return Err(Error::PrecisionExhausted("a section vanishes to the working precision".into()));
        }
    }
    let per_simplex: Vec<Vec<Cell>> =
        k.maximal_simplices().par_iter().map(|s| refine_simplex(k, sections, s)).collect();
    Ok(Subdivision { cells: per_simplex.into_iter().flatten().collect() })
}

fn term_forms<F: Field>(k: &SkeletonComplex, s: &[usize], section: &LaurentPoly<F>) -> Vec<Vec<Rational>> {
    section
        .terms()
        .map(|(m, _)| s.iter().map(|&j| k.vertices()[j].valuation().term_value(m.t_degree, &m.exponents)).collect())
        .collect::<BTreeSet<Vec<Rational>>>()
        .into_iter()
        .collect()
}

fn refine_simplex<F: Field>(k: &SkeletonComplex, sections: &[LaurentPoly<F>], s: &[usize]) -> Vec<Cell> {
    let per_section: Vec<Vec<Vec<Rational>>> = sections.iter().map(|f| term_forms(k, s, f)).collect();
    let all: Vec<&Vec<Rational>> = per_section.iter().flatten().collect::<BTreeSet<_>>().into_iter().collect();
    let mut hyperplanes: BTreeSet<Vec<Rational>> = BTreeSet::new();
    for (a, c) in all.iter().enumerate() {
        for c2 in &all[a + 1..] {
            let diff: Vec<Rational> = c.iter().zip(c2.iter()).map(|(x, y)| x - y).collect();
            let lo = rat::floor_i64(diff.iter().min().expect("nonempty")) + 1;
            let hi = rat::ceil_i64(diff.iter().max().expect("nonempty")) - 1;
            for n in lo..=hi {
                let h: Vec<Rational> = diff.iter().map(|x| x - rat::int(n)).collect();
                hyperplanes.insert(normalize(h));
            }
        }
    }
    let mut cells = vec![Polytope::simplex(s.len())];
    for h in &hyperplanes {
        cells = cells
            .into_iter()
            .flat_map(|p| match p.split(h) {
                Some((a, b)) => vec![a, b],
                None => vec![p],
            })
            .collect();
    }
    cells
        .into_iter()
        .map(|polytope| {
            let c = polytope.centroid();
            let forms = per_section
                .iter()
                .map(|terms| terms.iter().min_by(|x, y| dot(x, &c).cmp(&dot(y, &c))).expect("nonzero section").clone())
                .collect();
            Cell { simplex: s.to_vec(), polytope, forms }
        })
        .collect()
}

/// Scales a hyperplane so that its first nonzero coefficient is 1, making
/// `h` and `-h` compare equal.
fn normalize(h: Vec<Rational>) -> Vec<Rational> {
    let Some(lead) = h.iter().find(|x| !x.is_zero()).cloned() else { return h };
    h.into_iter().map(|x| x / &lead).collect()
}

/// Every cell vertex as a skeleton point, without repeats.
pub fn subdivision_vertices(k: &SkeletonComplex, sub: &Subdivision) -> Vec<SkeletonPoint> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for cell in &sub.cells {
        for mu in cell.polytope.vertices() {
            // Report each point on its smallest face.
            let (face, coords): (Vec<usize>, Vec<Rational>) =
                cell.simplex.iter().zip(mu).filter(|(_, m)| !m.is_zero()).map(|(&j, m)| (j, m.clone())).unzip();
            let p = k.point(&face, coords).expect("cell vertices lie on the complex");
            if seen.insert(p.valuation.clone()) {
                out.push(p);
            }
        }
    }
    out.sort();
    out
}
