use std::fmt;

use crate::error::{Error, Result};
use crate::linfield::subspace::{check_len, Subspace};
use crate::scalar::{rat, Field};
use crate::Rational;

/// An order value that may be `+infinity` (the order of the zero vector).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExtRational {
    Finite(Rational),
    PlusInfinity,
}

impl ExtRational {
    pub fn finite(&self) -> Option<&Rational> {
        match self {
            ExtRational::Finite(q) => Some(q),
            ExtRational::PlusInfinity => None,
        }
    }
}

impl fmt::Display for ExtRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtRational::Finite(q) => write!(f, "{q}"),
            ExtRational::PlusInfinity => write!(f, "+inf"),
        }
    }
}

/// A decreasing, left-continuous filtration of `F^n` with finitely many jumps.
///
/// Stored as steps `(lambda_0, V) > (lambda_1, W_1) > ...` with `F^mu = W_j`
/// for `lambda_{j-1} < mu <= lambda_j`, `F^mu = V` for `mu <= lambda_0` and
/// `F^mu = 0` beyond the last step. When the caller's first subspace is not
/// the whole space, a full step is placed at `ceil(lambda_0) - 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldFiltration<F> {
    ambient_dim: usize,
    steps: Vec<(Rational, Subspace<F>)>,
}

impl<F: Field> FieldFiltration<F> {
    pub fn new(ambient_dim: usize, jumps: Vec<(Rational, Subspace<F>)>) -> Result<Self> {
        let mut steps: Vec<(Rational, Subspace<F>)> = Vec::with_capacity(jumps.len() + 1);
        for (lambda, w) in jumps {
            if w.ambient_dim() != ambient_dim {
                return Err(Error::DimensionMismatch {
                    expected: ambient_dim,
                    found: w.ambient_dim(),
                });
            }
            if let Some((prev_l, prev_w)) = steps.last() {
                if lambda <= *prev_l {
                    return Err(Error::InvariantViolation(format!(
                        "jump values must increase strictly ({lambda} after {prev_l})"
                    )));
                }
                if !prev_w.contains_subspace(&w) || prev_w.dim() == w.dim() {
                    return Err(Error::InvariantViolation(format!(
                        "subspace at jump {lambda} is not strictly smaller than its predecessor"
                    )));
                }
            }
            steps.push((lambda, w));
        }
        while steps.last().is_some_and(|(_, w)| w.is_zero()) {
            steps.pop();
        }
        match steps.first() {
            None => steps.push((rat::int(0), Subspace::full(ambient_dim))),
            Some((l0, w0)) if !w0.is_full() => {
                let below = rat::int(rat::ceil_i64(l0) - 1);
                steps.insert(0, (below, Subspace::full(ambient_dim)));
            }
            _ => {}
        }
        Ok(FieldFiltration { ambient_dim, steps })
    }

    /// The filtration in which `vectors[i]` has order `ords[i]`; `vectors` must be a basis.
    pub fn from_basis(vectors: &[Vec<F>], ords: &[Rational]) -> Result<Self> {
        let n = vectors.len();
        if ords.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: ords.len(),
            });
        }
        if !Subspace::span(n, vectors)?.is_full() {
            return Err(Error::NotABasis("vectors are dependent".into()));
        }
        let mut levels: Vec<Rational> = ords.to_vec();
        levels.sort();
        levels.dedup();
        let mut jumps = Vec::new();
        for l in levels {
            let members: Vec<Vec<F>> = vectors
                .iter()
                .zip(ords)
                .filter(|(_, o)| **o >= l)
                .map(|(v, _)| v.clone())
                .collect();
            jumps.push((l, Subspace::span(n, &members)?));
        }
        Self::new(n, jumps)
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// Stored steps, the first being the whole space.
    pub fn steps(&self) -> &[(Rational, Subspace<F>)] {
        &self.steps
    }

    pub fn jump_values(&self) -> Vec<Rational> {
        self.steps.iter().map(|(l, _)| l.clone()).collect()
    }

    /// `F^lambda`.
    pub fn step(&self, lambda: &Rational) -> Subspace<F> {
        match self.steps.iter().find(|(l, _)| lambda <= l) {
            Some((_, w)) => w.clone(),
            None => Subspace::zero(self.ambient_dim),
        }
    }

    /// `F^{>lambda}`, the union of `F^mu` over `mu > lambda`.
    pub fn step_above(&self, lambda: &Rational) -> Subspace<F> {
        match self.steps.iter().find(|(l, _)| lambda < l) {
            Some((_, w)) => w.clone(),
            None => Subspace::zero(self.ambient_dim),
        }
    }

    /// `max { lambda : s in F^lambda }`, or `+infinity` for `s = 0`.
    pub fn ord(&self, s: &[F]) -> Result<ExtRational> {
        check_len(self.ambient_dim, s)?;
        if s.iter().all(|x| x.is_zero()) {
            return Ok(ExtRational::PlusInfinity);
        }
        let mut best = self.steps[0].0.clone();
        for (l, w) in &self.steps {
            if w.contains(s)? {
                best = l.clone();
            } else {
                break;
            }
        }
        Ok(ExtRational::Finite(best))
    }
}

/// `ord_F(s)`; free-function form of [`FieldFiltration::ord`].
pub fn ord_filtration<F: Field>(filtration: &FieldFiltration<F>, s: &[F]) -> Result<ExtRational> {
    filtration.ord(s)
}

/// `F_1^{lambda_1} cap ... cap F_r^{lambda_r}`.
pub fn multi_intersection<F: Field>(
    fs: &[FieldFiltration<F>],
    lambda: &[Rational],
) -> Result<Subspace<F>> {
    let n = shared_dim(fs)?;
    if lambda.len() != fs.len() {
        return Err(Error::DimensionMismatch {
            expected: fs.len(),
            found: lambda.len(),
        });
    }
    let mut acc = Subspace::full(n);
    for (f, l) in fs.iter().zip(lambda) {
        acc = acc.intersect(&f.step(l))?;
        if acc.is_zero() {
            break;
        }
    }
    Ok(acc)
}

pub(crate) fn shared_dim<F: Field>(fs: &[FieldFiltration<F>]) -> Result<usize> {
    let n = fs
        .first()
        .map(|f| f.ambient_dim)
        .ok_or_else(|| Error::InvariantViolation("at least one filtration is required".into()))?;
    for f in fs {
        if f.ambient_dim != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: f.ambient_dim,
            });
        }
    }
    Ok(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat::int;

    fn v(xs: &[i64]) -> Vec<Rational> {
        xs.iter().map(|x| int(*x)).collect()
    }

    fn line(xs: &[i64]) -> Subspace<Rational> {
        Subspace::span(xs.len(), &[v(xs)]).unwrap()
    }

    #[test]
    fn ord_examples() {
        let f = FieldFiltration::new(2, vec![(int(1), line(&[1, 0]))]).unwrap();
        assert_eq!(f.ord(&v(&[1, 0])).unwrap(), ExtRational::Finite(int(1)));
        assert_eq!(f.ord(&v(&[0, 1])).unwrap(), ExtRational::Finite(int(0)));
        assert_eq!(f.ord(&v(&[0, 0])).unwrap(), ExtRational::PlusInfinity);
        assert!(f.ord(&v(&[1])).is_err());
    }

    #[test]
    fn steps_are_left_continuous() {
        let f = FieldFiltration::new(2, vec![(int(1), line(&[1, 0]))]).unwrap();
        assert!(f.step(&rat::frac(1, 2)).contains(&v(&[1, 0])).unwrap());
        assert_eq!(f.step(&int(1)), line(&[1, 0]));
        assert!(f.step(&rat::frac(3, 2)).is_zero());
        assert!(f.step(&int(0)).is_full());
        assert!(f.step_above(&int(1)).is_zero());
    }

    #[test]
    fn rejects_non_decreasing_steps() {
        let bad = FieldFiltration::new(2, vec![(int(0), line(&[1, 0])), (int(1), line(&[0, 1]))]);
        assert!(bad.is_err());
    }

    #[test]
    fn three_lines_pairwise_intersection_vanishes() {
        let fs: Vec<_> = [[1, 0], [0, 1], [1, 1]]
            .iter()
            .map(|l| FieldFiltration::new(2, vec![(int(1), line(l))]).unwrap())
            .collect();
        assert!(multi_intersection(&fs, &[int(1), int(1), int(0)])
            .unwrap()
            .is_zero());
        assert!(multi_intersection(&fs, &[int(-3), int(-3), int(-3)])
            .unwrap()
            .is_full());
        assert_eq!(
            multi_intersection(&fs[..1], &[int(1)]).unwrap(),
            line(&[1, 0])
        );
    }
}
