//! Lifting diagonalizing bases from `(R/t^i)^n` to `(R/t^{i+1})^n`.
//!
//! Two bases that diagonalize the same family modulo `t^i`, matched by order
//! vectors, differ by a matrix `g` whose entry `g_ab` is divisible by
//! `t^{c_ab}`, `c_ab = max(0, max_alpha ceil(m_{alpha,b} - m_{alpha,a}))`.
//! Those matrices form a group cut out by divisibility conditions alone, so
//! any coefficientwise lift of `g` stays inside it. Applying the lift to a
//! fresh basis at level `i + 1` yields a basis compatible with the old one.

use std::collections::BTreeMap;

use crate::arith::TruncatedSeries;
use crate::error::{Error, Result};
use crate::lindvr::filtration::check_unimodular;
use crate::lindvr::filtration::DvrFiltration;
use crate::lindvr::graded::{graded_table_at, shared_rank, verify_span_identities};
use crate::lindvr::submodule::ModVector;
use crate::scalar::{rat, Field};
use crate::Rational;

/// A basis of `(R/t^level)^n` with the order vector of each element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModBasis<F> {
    pub level: u32,
    pub vectors: Vec<ModVector<F>>,
    pub ords: Vec<Vec<Rational>>,
}

impl<F: Field> ModBasis<F> {
    /// Reduction to a lower level; orders are unchanged.
    pub fn truncate(&self, level: u32) -> Result<Self> {
        let vectors = self
            .vectors
            .iter()
            .map(|v| v.iter().map(|x| x.truncate(level)).collect::<Result<_>>())
            .collect::<Result<_>>()?;
        Ok(ModBasis {
            level,
            vectors,
            ords: self.ords.clone(),
        })
    }
}

/// A diagonalizing basis of the images of `fs` in `(R/t^i)^n`.
pub fn diagonalize_mod<F: Field>(
    fs: &[DvrFiltration<F>],
    level: u32,
    seed: Option<u64>,
) -> Result<ModBasis<F>> {
    let n = shared_rank(fs)?;
    if level == 0 {
        return Err(Error::InvariantViolation("level must be positive".into()));
    }
    let table = graded_table_at(fs, Some(level), seed)?;
    if table.total_dim() != n {
        return Err(Error::NotDiagonalizableMod { level });
    }
    let mut vectors = Vec::with_capacity(n);
    let mut ords = Vec::with_capacity(n);
    for (l, piece) in &table.entries {
        for r in &piece.representatives {
            vectors.push(r.clone());
            ords.push(l.clone());
        }
    }
    if !verify_span_identities(&vectors, fs, Some(level))? {
        if !table.complete {
            return Err(Error::NotDiagonalizableMod { level });
        }
        return Err(Error::InvariantViolation(format!(
            "level {level} representatives failed to diagonalize"
        )));
    }
    Ok(ModBasis {
        level,
        vectors,
        ords,
    })
}

/// `c_ab = max(0, max_alpha ceil(m_{b,alpha} - m_{a,alpha}))` for order vectors `m`.
pub fn constraint_matrix(orders: &[Vec<Rational>]) -> Vec<Vec<u32>> {
    orders
        .iter()
        .map(|ma| {
            orders
                .iter()
                .map(|mb| {
                    mb.iter()
                        .zip(ma)
                        .map(|(x, y)| rat::ceil_nonneg(&(x - y)))
                        .max()
                        .unwrap_or(0)
                })
                .collect()
        })
        .collect()
}

/// A change of basis `b_b = sum_a g_ab c_a` together with its divisibility constraints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstrainedMatrix<F> {
    entries: Vec<Vec<TruncatedSeries<F>>>,
    constraint: Vec<Vec<u32>>,
}

impl<F: Field> ConstrainedMatrix<F> {
    /// `entries[a][b] = g_ab`; fails on a violated constraint or a non-unit determinant.
    pub fn new(entries: Vec<Vec<TruncatedSeries<F>>>, constraint: Vec<Vec<u32>>) -> Result<Self> {
        let n = entries.len();
        if constraint.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: constraint.len(),
            });
        }
        for (a, (row, crow)) in entries.iter().zip(&constraint).enumerate() {
            if row.len() != n || crow.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: row.len().min(crow.len()),
                });
            }
            for (b, (g, &c)) in row.iter().zip(crow).enumerate() {
                // Modulo t^p, divisibility by t^c with c >= p just means zero.
                if g.ord().lower_bound() < c.min(g.precision()) {
                    return Err(Error::NotInTorsor { row: a, col: b });
                }
            }
        }
        check_unimodular(&entries)?;
        Ok(ConstrainedMatrix {
            entries,
            constraint,
        })
    }

    pub fn entries(&self) -> &[Vec<TruncatedSeries<F>>] {
        &self.entries
    }

    pub fn constraint(&self) -> &[Vec<u32>] {
        &self.constraint
    }

    /// Coefficientwise lift to a higher precision; constraints survive.
    pub fn lift(&self, precision: u32) -> Self {
        ConstrainedMatrix {
            entries: self
                .entries
                .iter()
                .map(|r| r.iter().map(|x| x.with_precision(precision)).collect())
                .collect(),
            constraint: self.constraint.clone(),
        }
    }

    /// The vectors `b_b = sum_a g_ab c_a`.
    pub fn apply(&self, c: &[ModVector<F>]) -> Vec<ModVector<F>> {
        let n = self.entries.len();
        (0..n)
            .map(|b| {
                let p = c.iter().flatten().map(|x| x.precision()).min().unwrap_or(1);
                let mut acc = vec![TruncatedSeries::zero(p); c[0].len()];
                for (a, ca) in c.iter().enumerate() {
                    let g = &self.entries[a][b];
                    if !g.is_zero() {
                        for (x, y) in acc.iter_mut().zip(ca) {
                            *x = &*x + &(g * y);
                        }
                    }
                }
                acc
            })
            .collect()
    }
}

/// Inverse of a square matrix over `R/t^p`, if its residue is invertible.
pub fn invert_matrix<F: Field>(
    m: &[Vec<TruncatedSeries<F>>],
    p: u32,
) -> Result<Vec<Vec<TruncatedSeries<F>>>> {
    let n = m.len();
    let mut a: Vec<Vec<TruncatedSeries<F>>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r: Vec<_> = row.iter().map(|x| x.truncate(p)).collect::<Result<_>>()?;
            r.extend((0..n).map(|j| {
                if i == j {
                    TruncatedSeries::one(p)
                } else {
                    TruncatedSeries::zero(p)
                }
            }));
            Ok(r)
        })
        .collect::<Result<_>>()?;
    for col in 0..n {
        let piv = (col..n)
            .find(|&r| a[r][col].is_unit())
            .ok_or_else(|| Error::NotABasis("matrix is singular modulo t".into()))?;
        a.swap(col, piv);
        let inv = a[col][col].inverse().expect("unit pivot");
        a[col] = a[col].iter().map(|x| x * &inv).collect();
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                let sub: Vec<_> = a[col].iter().map(|y| &f * y).collect();
                a[r] = a[r].iter().zip(&sub).map(|(x, y)| x - y).collect();
            }
        }
    }
    Ok(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Lifts `b` (level `i`) along `c_next` (level `i + 1`). The two bases must be
/// listed with matching order vectors; `constraint` is their constraint matrix.
pub fn torsor_transfer<F: Field>(
    b: &ModBasis<F>,
    c_next: &ModBasis<F>,
    constraint: &[Vec<u32>],
) -> Result<ModBasis<F>> {
    let i = b.level;
    if c_next.level != i + 1 {
        return Err(Error::InvariantViolation(format!(
            "expected a basis at level {}, got level {}",
            i + 1,
            c_next.level
        )));
    }
    let n = b.vectors.len();
    if c_next.vectors.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: c_next.vectors.len(),
        });
    }
    let c_bar = c_next.truncate(i)?;
    let c_inv = invert_matrix(&c_bar.vectors, i)?;
    // X = B * C^{-1}; X[b][a] = g_ab.
    let mut g = vec![vec![TruncatedSeries::zero(i); n]; n];
    for (bi, row) in b.vectors.iter().enumerate() {
        for a in 0..n {
            let mut acc = TruncatedSeries::zero(i);
            for (k, x) in row.iter().enumerate() {
                acc = &acc + &(&x.with_precision(i) * &c_inv[k][a]);
            }
            g[a][bi] = acc;
        }
    }
    let g = ConstrainedMatrix::new(g, constraint.to_vec())?;
    let vectors = g.lift(i + 1).apply(&c_next.vectors);
    Ok(ModBasis {
        level: i + 1,
        vectors,
        ords: c_next.ords.clone(),
    })
}

/// Reorders `c` so that its order vectors line up with `target`.
fn match_orders<F: Field>(target: &[Vec<Rational>], c: &ModBasis<F>) -> Result<ModBasis<F>> {
    let mut pools: BTreeMap<&Vec<Rational>, Vec<usize>> = BTreeMap::new();
    for (k, o) in c.ords.iter().enumerate() {
        pools.entry(o).or_default().push(k);
    }
    let mut order = Vec::with_capacity(target.len());
    for o in target {
        let k = pools
            .get_mut(o)
            .and_then(|p| {
                if p.is_empty() {
                    None
                } else {
                    Some(p.remove(0))
                }
            })
            .ok_or(Error::NotInTorsor {
                row: order.len(),
                col: order.len(),
            })?;
        order.push(k);
    }
    Ok(ModBasis {
        level: c.level,
        vectors: order.iter().map(|&k| c.vectors[k].clone()).collect(),
        ords: order.iter().map(|&k| c.ords[k].clone()).collect(),
    })
}

/// Builds a compatible system of diagonalizing bases up to `target` by
/// repeatedly transferring the current basis along the oracle's next one.
pub fn lift_chain<F, O>(mut oracle: O, target: u32) -> Result<ModBasis<F>>
where
    F: Field,
    O: FnMut(u32) -> Result<ModBasis<F>>,
{
    let mut b = oracle(1)?;
    for i in 1..target {
        let c = match_orders(&b.ords, &oracle(i + 1)?)?;
        let constraint = constraint_matrix(&b.ords);
        b = torsor_transfer(&b, &c, &constraint)?;
    }
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat::int;

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

    fn sheared() -> Vec<DvrFiltration<Rational>> {
        let f1 = DvrFiltration::from_diagonal(&std_basis(2, 8), &[int(0), int(1)]).unwrap();
        let b = vec![
            vec![s(&[1], 8), s(&[1, 1], 8)],
            vec![s(&[0, 1], 8), s(&[1], 8)],
        ];
        let f2 = DvrFiltration::from_diagonal(&b, &[int(1), int(0)]).unwrap();
        vec![f1, f2]
    }

    #[test]
    fn constraint_examples() {
        assert_eq!(
            constraint_matrix(&[vec![int(0)], vec![int(0)]]),
            vec![vec![0, 0], vec![0, 0]]
        );
        assert_eq!(
            constraint_matrix(&[vec![int(0)], vec![int(1)]]),
            vec![vec![0, 1], vec![0, 0]]
        );
        assert_eq!(
            constraint_matrix(&[vec![int(0), int(1)], vec![int(1), int(0)]]),
            vec![vec![0, 1], vec![1, 0]]
        );
    }

    #[test]
    fn transfer_along_own_lift_is_identity() {
        let fs = sheared();
        let c = diagonalize_mod(&fs, 3, None).unwrap();
        let b = c.truncate(2).unwrap();
        let out = torsor_transfer(&b, &c, &constraint_matrix(&b.ords)).unwrap();
        assert_eq!(out.vectors, c.vectors);
    }

    #[test]
    fn rank_one_unit_factor() {
        let f = DvrFiltration::<Rational>::trivial(1);
        let c = diagonalize_mod(std::slice::from_ref(&f), 3, None).unwrap();
        let u = s(&[2, 1], 2);
        let b = ModBasis {
            level: 2,
            vectors: vec![vec![&c.vectors[0][0].truncate(2).unwrap() * &u]],
            ords: c.ords.clone(),
        };
        let out = torsor_transfer(&b, &c, &[vec![0]]).unwrap();
        assert_eq!(out.vectors[0][0], &c.vectors[0][0] * &u.with_precision(3));
    }

    #[test]
    fn constraint_beyond_precision_accepts_zero() {
        let one = S::one(1);
        let zero = S::zero(1);
        let g = vec![vec![one.clone(), zero.clone()], vec![zero, one]];
        assert!(ConstrainedMatrix::new(g, vec![vec![0, 2], vec![0, 0]]).is_ok());
    }

    #[test]
    fn mismatched_bases_leave_torsor() {
        let fs = sheared();
        let c = diagonalize_mod(&fs, 2, None).unwrap();
        let b = c.truncate(1).unwrap();
        // Pair b with c listed in the opposite order but keep b's orders.
        let swapped = ModBasis {
            level: 2,
            vectors: vec![c.vectors[1].clone(), c.vectors[0].clone()],
            ords: c.ords.clone(),
        };
        assert!(matches!(
            torsor_transfer(&b, &swapped, &constraint_matrix(&b.ords)),
            Err(Error::NotInTorsor { .. })
        ));
    }

    #[test]
    fn chain_on_sheared_fixture() {
        let fs = sheared();
        let out = lift_chain(|i| diagonalize_mod(&fs, i, Some(i as u64)), 5).unwrap();
        for i in 1..=5 {
            let b = out.truncate(i).unwrap();
            assert!(
                verify_span_identities(&b.vectors, &fs, Some(i)).unwrap(),
                "level {i}"
            );
        }
    }
}
