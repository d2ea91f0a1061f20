use std::collections::BTreeMap;

use itertools::Itertools;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linfield::filtration::{multi_intersection, shared_dim, ExtRational, FieldFiltration};
use crate::linfield::subspace::Subspace;
use crate::scalar::Field;
use crate::Rational;

/// One nonzero graded piece: its dimension and vectors lifting a basis of it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedPiece<F> {
    pub dim: usize,
    pub representatives: Vec<Vec<F>>,
}

/// The multigraded space `gr(V)`, keyed by multi-index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedTable<F> {
    pub entries: BTreeMap<Vec<Rational>, GradedPiece<F>>,
}

impl<F: Field> GradedTable<F> {
    pub fn total_dim(&self) -> usize {
        self.entries.values().map(|p| p.dim).sum()
    }

    pub fn dims(&self) -> BTreeMap<Vec<Rational>, usize> {
        self.entries
            .iter()
            .map(|(k, p)| (k.clone(), p.dim))
            .collect()
    }

    /// Multi-indices repeated according to their dimensions, in sorted order.
    pub fn multiset(&self) -> Vec<Vec<Rational>> {
        self.entries
            .iter()
            .flat_map(|(k, p)| std::iter::repeat_n(k.clone(), p.dim))
            .collect()
    }
}

/// A basis together with its vector of orders under each filtration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagonalBasis<F> {
    pub vectors: Vec<Vec<F>>,
    pub ords: Vec<Vec<Rational>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Diagonalization<F> {
    Diagonal(DiagonalBasis<F>),
    /// The graded table, whose total dimension exceeds the ambient dimension.
    Obstruction(GradedTable<F>),
}

/// Computes every nonzero `gr^lambda`.
///
/// Each `F_j^mu` is constant on the half-open intervals between consecutive
/// jumps of `F_j`, so if `lambda_j` is not a jump then `F_j^{>lambda_j}`
/// already equals `F_j^{lambda_j}` and the piece at `lambda` vanishes. Only
/// the product grid of jump values needs to be visited.
pub fn graded_table<F: Field>(fs: &[FieldFiltration<F>]) -> Result<GradedTable<F>> {
    shared_dim(fs)?;
    let grid: Vec<Vec<Rational>> = fs
        .iter()
        .map(|f| f.jump_values())
        .multi_cartesian_product()
        .collect();
    let pieces: Vec<Option<(Vec<Rational>, GradedPiece<F>)>> = grid
        .into_par_iter()
        .map(|lambda| {
            let s = multi_intersection(fs, &lambda)?;
            if s.is_zero() {
                return Ok(None);
            }
            let mut t = Subspace::zero(s.ambient_dim());
            for (f, l) in fs.iter().zip(&lambda) {
                t = t.sum(&s.intersect(&f.step_above(l))?)?;
            }
            let dim = s.dim() - t.dim();
            if dim == 0 {
                return Ok(None);
            }
            Ok(Some((
                lambda,
                GradedPiece {
                    dim,
                    representatives: s.complement_rows(&t),
                },
            )))
        })
        .collect::<Result<_>>()?;
    Ok(GradedTable {
        entries: pieces.into_iter().flatten().collect(),
    })
}

/// Returns a simultaneously diagonalizing basis, or the graded table when none exists.
pub fn diagonalize_field<F: Field>(fs: &[FieldFiltration<F>]) -> Result<Diagonalization<F>> {
    let n = shared_dim(fs)?;
    let table = graded_table(fs)?;
    if table.total_dim() != n {
        return Ok(Diagonalization::Obstruction(table));
    }
    let mut vectors = Vec::with_capacity(n);
    let mut ords = Vec::with_capacity(n);
    for (lambda, piece) in &table.entries {
        for r in &piece.representatives {
            vectors.push(r.clone());
            ords.push(lambda.clone());
        }
    }
    if !verify_diagonalizes(&vectors, fs)? {
        return Err(Error::InvariantViolation(
            "graded representatives failed to diagonalize".into(),
        ));
    }
    Ok(Diagonalization::Diagonal(DiagonalBasis { vectors, ords }))
}

/// Checks `F^lambda = span(s_i : ord(s_i) >= lambda)` at every jump of every filtration.
pub fn verify_diagonalizes<F: Field>(basis: &[Vec<F>], fs: &[FieldFiltration<F>]) -> Result<bool> {
    let n = shared_dim(fs)?;
    if basis.len() != n || !Subspace::span(n, basis)?.is_full() {
        return Err(Error::NotABasis(format!(
            "{} vectors do not span a space of dimension {n}",
            basis.len()
        )));
    }
    for f in fs {
        for (_, w) in f.steps() {
            let inside = basis
                .iter()
                .filter(|s| w.reduce(s).iter().all(|x| x.is_zero()))
                .count();
            if inside != w.dim() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Sorted multiset of order vectors of a diagonalizing basis.
pub fn jump_multiset<F: Field>(
    basis: &[Vec<F>],
    fs: &[FieldFiltration<F>],
) -> Result<Vec<Vec<Rational>>> {
    if !verify_diagonalizes(basis, fs)? {
        return Err(Error::NotDiagonalizing);
    }
    let mut out = Vec::with_capacity(basis.len());
    for s in basis {
        let mut ordv = Vec::with_capacity(fs.len());
        for f in fs {
            match f.ord(s)? {
                ExtRational::Finite(q) => ordv.push(q),
                ExtRational::PlusInfinity => return Err(Error::NotABasis("zero vector".into())),
            }
        }
        out.push(ordv);
    }
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat::int;

    fn v(xs: &[i64]) -> Vec<Rational> {
        xs.iter().map(|x| int(*x)).collect()
    }

    fn middle(xs: &[i64]) -> FieldFiltration<Rational> {
        FieldFiltration::new(
            xs.len(),
            vec![(int(1), Subspace::span(xs.len(), &[v(xs)]).unwrap())],
        )
        .unwrap()
    }

    #[test]
    fn single_flag_has_full_gr() {
        let f = FieldFiltration::from_basis(
            &[v(&[1, 0, 0]), v(&[1, 1, 0]), v(&[0, 1, 1])],
            &[int(0), int(1), int(2)],
        )
        .unwrap();
        let t = graded_table(std::slice::from_ref(&f)).unwrap();
        assert_eq!(t.total_dim(), 3);
        let Diagonalization::Diagonal(b) = diagonalize_field(std::slice::from_ref(&f)).unwrap() else {
            panic!()
        };
        assert_eq!(
            jump_multiset(&b.vectors, &[f]).unwrap(),
            vec![vec![int(0)], vec![int(1)], vec![int(2)]]
        );
    }

    #[test]
    fn two_filtrations_fixture() {
        let fs = [middle(&[1, 0]), middle(&[1, 1])];
        let t = graded_table(&fs).unwrap();
        let expected: BTreeMap<_, _> =
            [(vec![int(0), int(1)], 1), (vec![int(1), int(0)], 1)].into();
        assert_eq!(t.dims(), expected);
        let Diagonalization::Diagonal(b) = diagonalize_field(&fs).unwrap() else {
            panic!()
        };
        let mut got = b.vectors.clone();
        got.sort();
        assert_eq!(got, vec![v(&[1, 0]), v(&[1, 1])]);
    }

    #[test]
    fn three_lines_obstruct() {
        let fs = [middle(&[1, 0]), middle(&[0, 1]), middle(&[1, 1])];
        let Diagonalization::Obstruction(t) = diagonalize_field(&fs).unwrap() else {
            panic!()
        };
        assert_eq!(t.total_dim(), 3);
        assert!(!verify_diagonalizes(&[v(&[1, 0]), v(&[0, 1])], &fs).unwrap());
    }

    #[test]
    fn verify_rejects_non_basis() {
        let fs = [middle(&[1, 0])];
        assert!(matches!(
            verify_diagonalizes(&[v(&[1, 0]), v(&[2, 0])], &fs),
            Err(Error::NotABasis(_))
        ));
        assert_eq!(
            jump_multiset(&[v(&[1, 1]), v(&[0, 1])], &fs),
            Err(Error::NotDiagonalizing)
        );
    }
}
