use crate::error::{Error, Result};
use crate::linfield::echelon::rref;
use crate::scalar::Field;

/// A subspace of `F^n`, stored by its reduced row echelon basis.
///
/// The echelon form is canonical, so derived equality is subspace equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Subspace<F> {
    ambient_dim: usize,
    rows: Vec<Vec<F>>,
    pivots: Vec<usize>,
}

impl<F: Field> Subspace<F> {
    pub fn zero(ambient_dim: usize) -> Self {
        Subspace {
            ambient_dim,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn full(ambient_dim: usize) -> Self {
        let rows = (0..ambient_dim).map(|i| unit(ambient_dim, i)).collect();
        Subspace {
            ambient_dim,
            rows,
            pivots: (0..ambient_dim).collect(),
        }
    }

    /// Span of the given vectors.
    pub fn span(ambient_dim: usize, vectors: &[Vec<F>]) -> Result<Self> {
        for v in vectors {
            check_len(ambient_dim, v)?;
        }
        let (rows, pivots) = rref(vectors.to_vec(), ambient_dim);
        Ok(Subspace {
            ambient_dim,
            rows,
            pivots,
        })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.ambient_dim
    }

    /// The echelon basis.
    pub fn basis(&self) -> &[Vec<F>] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Remainder of `v` after elimination against the echelon basis.
    pub fn reduce(&self, v: &[F]) -> Vec<F> {
        let mut out = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if !out[p].is_zero() {
                let c = out[p].clone();
                for (x, r) in out.iter_mut().zip(row) {
                    *x = x.clone() - c.clone() * r.clone();
                }
            }
        }
        out
    }

    pub fn contains(&self, v: &[F]) -> Result<bool> {
        check_len(self.ambient_dim, v)?;
        Ok(self.reduce(v).iter().all(|x| x.is_zero()))
    }

    pub fn contains_subspace(&self, other: &Self) -> bool {
        other
            .rows
            .iter()
            .all(|r| self.reduce(r).iter().all(|x| x.is_zero()))
    }

    pub fn sum(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut vs = self.rows.clone();
        vs.extend(other.rows.iter().cloned());
        Self::span(self.ambient_dim, &vs)
    }

    /// Intersection by the Zassenhaus construction.
    pub fn intersect(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        if self.is_full() {
            return Ok(other.clone());
        }
        if other.is_full() {
            return Ok(self.clone());
        }
        let n = self.ambient_dim;
        let mut block: Vec<Vec<F>> = Vec::new();
        for r in &self.rows {
            let mut row = r.clone();
            row.extend(r.iter().cloned());
            block.push(row);
        }
        for r in &other.rows {
            let mut row = r.clone();
            row.extend(std::iter::repeat_n(F::zero(), n));
            block.push(row);
        }
        let (rows, pivots) = rref(block, 2 * n);
        let inter: Vec<Vec<F>> = rows
            .into_iter()
            .zip(pivots)
            .filter(|(_, p)| *p >= n)
            .map(|(r, _)| r[n..].to_vec())
            .collect();
        Self::span(n, &inter)
    }

    /// Echelon rows of `self` that, added to a basis of `sub`, give a basis of `self`.
    ///
    /// Requires `sub` to be contained in `self`. Rows are scanned in echelon
    /// order, so the choice is deterministic.
    pub fn complement_rows(&self, sub: &Self) -> Vec<Vec<F>> {
        let mut acc = sub.clone();
        let mut out = Vec::new();
        for r in &self.rows {
            if acc.reduce(r).iter().any(|x| !x.is_zero()) {
                out.push(r.clone());
                acc = acc
                    .sum(&Subspace::span(self.ambient_dim, std::slice::from_ref(r)).expect("length checked"))
                    .expect("same ambient");
            }
        }
        out
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.ambient_dim != other.ambient_dim {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim,
                found: other.ambient_dim,
            });
        }
        Ok(())
    }
}

pub(crate) fn unit<F: Field>(n: usize, i: usize) -> Vec<F> {
    let mut v = vec![F::zero(); n];
    v[i] = F::one();
    v
}

pub(crate) fn check_len<F>(n: usize, v: &[F]) -> Result<()> {
    if v.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: v.len(),
        });
    }
    Ok(())
}
