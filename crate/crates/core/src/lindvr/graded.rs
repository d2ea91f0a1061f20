use std::collections::BTreeMap;
use std::ops::Range;

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::arith::TruncatedSeries;
use crate::error::{Error, Result};
use crate::lindvr::filtration::{check_unimodular, DvrFiltration};
use crate::lindvr::submodule::{ModVector, Submodule};
use crate::linfield::{rank, ExtRational};
use crate::scalar::{rat, Field};
use crate::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DvrPiece<F> {
    /// Dimension over the residue field.
    pub dim: usize,
    pub representatives: Vec<ModVector<F>>,
}

/// `gr^lambda = F^lambda / (F^{>lambda} + t F^{lambda - (1,...,1)})` for every
/// `lambda` where it is nonzero. With `level = Some(i)` the filtrations are
/// first pushed to `(R/t^i)^n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DvrGradedTable<F> {
    pub level: Option<u32>,
    /// False when the index set was pruned. The table is still exact for a
    /// diagonalizable family; otherwise nonzero pieces may be absent.
    pub complete: bool,
    pub entries: BTreeMap<Vec<Rational>, DvrPiece<F>>,
}

impl<F: Field> DvrGradedTable<F> {
    pub fn total_dim(&self) -> usize {
        self.entries.values().map(|p| p.dim).sum()
    }

    pub fn dims(&self) -> BTreeMap<Vec<Rational>, usize> {
        self.entries
            .iter()
            .map(|(k, p)| (k.clone(), p.dim))
            .collect()
    }

    pub fn dim_at(&self, lambda: &[Rational]) -> usize {
        self.entries.get(lambda).map_or(0, |p| p.dim)
    }

    /// Multi-indices repeated by dimension, sorted.
    pub fn multiset(&self) -> Vec<Vec<Rational>> {
        self.entries
            .iter()
            .flat_map(|(k, p)| std::iter::repeat_n(k.clone(), p.dim))
            .collect()
    }
}

/// A free basis with the order vector of each element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DvrBasis<F> {
    pub vectors: Vec<ModVector<F>>,
    pub ords: Vec<Vec<Rational>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DvrDiagonalization<F> {
    Diagonal(DvrBasis<F>),
    Obstruction(DvrGradedTable<F>),
}

/// Knobs for representative choice. Without a seed the choice is the
/// deterministic echelon one; with a seed every representative is moved by a
/// random element of the piece's denominator and the pieces are mixed by a
/// random invertible matrix, then the basis order is shuffled.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DiagonalizeOptions {
    pub seed: Option<u64>,
}

pub(crate) fn shared_rank<F: Field>(fs: &[DvrFiltration<F>]) -> Result<usize> {
    let n = fs
        .first()
        .map(|f| f.rank())
        .ok_or_else(|| Error::InvariantViolation("at least one filtration is required".into()))?;
    for f in fs {
        if f.rank() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: f.rank(),
            });
        }
    }
    Ok(n)
}

fn at_level<F: Field>(m: Submodule<F>, level: Option<u32>) -> Submodule<F> {
    match level {
        Some(i) => m.plus_t_power(i),
        None => m,
    }
}

/// `F^lambda = F_1^{lambda_1} ∩ ... ∩ F_r^{lambda_r}`, optionally at a level.
pub fn multi_step<F: Field>(
    fs: &[DvrFiltration<F>],
    lambda: &[Rational],
    level: Option<u32>,
) -> Result<Submodule<F>> {
    let n = shared_rank(fs)?;
    if lambda.len() != fs.len() {
        return Err(Error::DimensionMismatch {
            expected: fs.len(),
            found: lambda.len(),
        });
    }
    let mut acc = at_level(Submodule::full(n), level);
    for (f, l) in fs.iter().zip(lambda) {
        acc = acc.intersect(&at_level(f.step(l), level))?;
    }
    Ok(acc)
}

/// The pair `(S, T)` with `gr^lambda = S / T`.
pub fn piece_bounds<F: Field>(
    fs: &[DvrFiltration<F>],
    lambda: &[Rational],
    level: Option<u32>,
) -> Result<(Submodule<F>, Submodule<F>)> {
    let s = multi_step(fs, lambda, level)?;
    let below: Vec<Rational> = lambda.iter().map(|l| l - rat::int(1)).collect();
    let mut t = at_level(multi_step(fs, &below, level)?.scale_t(1), level);
    for (f, l) in fs.iter().zip(lambda) {
        t = t.sum(&s.intersect(&at_level(f.step_above(l), level))?)?;
    }
    Ok((s, t))
}

fn jump_lists<F: Field>(fs: &[DvrFiltration<F>], level: Option<u32>) -> Vec<Vec<Rational>> {
    fs.iter()
        .map(|f| {
            let top = match level {
                Some(i) => f.hi() + rat::int(i as i64),
                None => f.hi().clone(),
            };
            f.jumps_in(f.lo(), &top)
        })
        .collect()
}

/// Grids up to this many points are scanned exhaustively.
const EXHAUSTIVE_LIMIT: usize = 4096;

/// Filtrations consulted when pruning a prefix.
const WINDOW: usize = 6;
/// Frontier size above which the prefix is also checked against every filtration so far.
const FRONTIER_LIMIT: usize = 64;

/// Candidate indices for nonzero pieces. Large grids are searched one
/// filtration at a time, keeping a prefix only while the graded piece of the
/// most recent few filtrations is nonzero there (of all filtrations so far
/// once the frontier grows large). For a diagonalizable family every nonzero
/// piece sits at the order vector of a basis element, and its restriction to
/// any subfamily is a nonzero piece of that subfamily, so nothing is lost;
/// otherwise pieces may be missed and the second component is `false`.
/// Points surviving only the windowed check have zero pieces and are dropped
/// by the caller.
fn candidates<F: Field>(fs: &[DvrFiltration<F>], level: Option<u32>) -> Result<(Vec<Vec<Rational>>, bool)> {
    let lists = jump_lists(fs, level);
    let size = lists.iter().try_fold(1usize, |acc, l| acc.checked_mul(l.len()));
    if size.is_some_and(|s| s <= EXHAUSTIVE_LIMIT) {
        return Ok((lists.into_iter().multi_cartesian_product().collect(), true));
    }
    let mut frontier: Vec<Vec<Rational>> = vec![Vec::new()];
    for (k, list) in lists.iter().enumerate() {
        let extended = frontier
            .iter()
            .flat_map(|p| {
                list.iter().map(move |l| {
                    let mut c = p.clone();
                    c.push(l.clone());
                    c
                })
            })
            .collect();
        frontier = nonzero_on(fs, (k + 1).saturating_sub(WINDOW)..k + 1, extended, level)?;
        if frontier.len() > FRONTIER_LIMIT {
            frontier = nonzero_on(fs, 0..k + 1, frontier, level)?;
        }
    }
    Ok((frontier, false))
}

/// The points of `grid` where the subfamily `fs[range]` has a nonzero piece.
fn nonzero_on<F: Field>(
    fs: &[DvrFiltration<F>],
    range: Range<usize>,
    grid: Vec<Vec<Rational>>,
    level: Option<u32>,
) -> Result<Vec<Vec<Rational>>> {
    let kept = grid
        .into_par_iter()
        .map(|c| {
            let (s, t) = piece_bounds(&fs[range.clone()], &c[range.clone()], level)?;
            Ok((t.colength() > s.colength()).then_some(c))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(kept.into_iter().flatten().collect())
}

pub fn dvr_graded_table<F: Field>(fs: &[DvrFiltration<F>]) -> Result<DvrGradedTable<F>> {
    graded_table_at(fs, None, None)
}

/// Graded table of the filtrations, or of their images in `(R/t^i)^n`.
///
/// A piece can only be nonzero where every `lambda_j` is a jump of `F_j`.
/// Below the first jump `F_j^{>lambda_j}` is the whole module; above the last
/// one `F^lambda ⊆ tV`, and intersecting `F_k^{lambda_k} ∩ tV = t F_k^{lambda_k - 1}`
/// over all `k` shows `F^lambda = t F^{lambda - 1}`. The grid of jumps in
/// `[lo_j, hi_j]` (extended by the level) therefore carries the whole table;
/// large grids are pruned as described at [`DvrGradedTable::complete`].
pub fn graded_table_at<F: Field>(
    fs: &[DvrFiltration<F>],
    level: Option<u32>,
    seed: Option<u64>,
) -> Result<DvrGradedTable<F>> {
    shared_rank(fs)?;
    let (grid, complete) = candidates(fs, level)?;
    let pieces: Vec<Option<(Vec<Rational>, DvrPiece<F>)>> = grid
        .into_par_iter()
        .enumerate()
        .map(|(idx, lambda)| {
            let (s, t) = piece_bounds(fs, &lambda, level)?;
            let dim = (t.colength() - s.colength()) as usize;
            if dim == 0 {
                return Ok(None);
            }
            let mut reps = s.complement_reps(&t);
            if let Some(seed) = seed {
                let mut rng = ChaCha8Rng::seed_from_u64(
                    seed.wrapping_mul(0x9E37_79B9).wrapping_add(idx as u64),
                );
                reps = perturb(&reps, &t, &mut rng);
            }
            if let Some(i) = level {
                reps = reps
                    .iter()
                    .map(|v| v.iter().map(|x| x.with_precision(i)).collect())
                    .collect();
            }
            Ok(Some((
                lambda,
                DvrPiece {
                    dim,
                    representatives: reps,
                },
            )))
        })
        .collect::<Result<_>>()?;
    Ok(DvrGradedTable {
        level,
        complete,
        entries: pieces.into_iter().flatten().collect(),
    })
}

fn perturb<F: Field>(
    reps: &[ModVector<F>],
    t: &Submodule<F>,
    rng: &mut ChaCha8Rng,
) -> Vec<ModVector<F>> {
    let k = reps.len();
    let q = reps
        .iter()
        .flatten()
        .map(|x| x.precision())
        .max()
        .unwrap_or(1)
        .max(t.floor())
        .max(1);
    let mixing = loop {
        let m: Vec<Vec<F>> = (0..k)
            .map(|_| (0..k).map(|_| F::from_int(rng.gen_range(-2..=2))).collect())
            .collect();
        if rank(&m, k) == k {
            break m;
        }
    };
    let t_basis = t.f_basis(q);
    mixing
        .iter()
        .map(|row| {
            let mut v = vec![TruncatedSeries::zero(q); reps[0].len()];
            for (c, r) in row.iter().zip(reps) {
                add_scaled(&mut v, r, c);
            }
            for b in &t_basis {
                let c = F::from_int(rng.gen_range(-1..=1));
                add_scaled(&mut v, b, &c);
            }
            v
        })
        .collect()
}

fn add_scaled<F: Field>(acc: &mut [TruncatedSeries<F>], v: &[TruncatedSeries<F>], c: &F) {
    if c.is_zero() {
        return;
    }
    for (x, y) in acc.iter_mut().zip(v) {
        let q = x.precision().max(y.precision());
        *x = &x.with_precision(q) + &y.with_precision(q).scale(c);
    }
}

/// Builds a diagonalizing basis from graded representatives, or returns the
/// table when its total dimension differs from the rank or, for a pruned
/// table, when the representatives do not diagonalize.
pub fn diagonalize_dvr<F: Field>(
    fs: &[DvrFiltration<F>],
    options: DiagonalizeOptions,
) -> Result<DvrDiagonalization<F>> {
    let n = shared_rank(fs)?;
    let table = graded_table_at(fs, None, options.seed)?;
    if table.total_dim() != n {
        return Ok(DvrDiagonalization::Obstruction(table));
    }
    let mut pairs: Vec<(ModVector<F>, Vec<Rational>)> = table
        .entries
        .iter()
        .flat_map(|(l, p)| {
            p.representatives
                .iter()
                .map(move |r| (r.clone(), l.clone()))
        })
        .collect();
    if let Some(seed) = options.seed {
        pairs.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    }
    let (vectors, ords): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
    if !verify_span_identities(&vectors, fs, None)? {
        // A pruned table is exact only for diagonalizable families, so a
        // failure there is itself the obstruction.
        if !table.complete {
            return Ok(DvrDiagonalization::Obstruction(table));
        }
        return Err(Error::InvariantViolation(
            "graded representatives failed to diagonalize".into(),
        ));
    }
    Ok(DvrDiagonalization::Diagonal(DvrBasis { vectors, ords }))
}

/// Order vector of `s` under each filtration, reading `s` as an exact polynomial vector.
pub fn ord_vector<F: Field>(
    fs: &[DvrFiltration<F>],
    s: &[TruncatedSeries<F>],
    level: Option<u32>,
) -> Result<Vec<ExtRational>> {
    fs.iter()
        .map(|f| match level {
            Some(i) => f.ord_at_level(s, i),
            None => {
                let p = f.steps().iter().map(|(_, w)| w.floor()).max().unwrap_or(0)
                    + s.iter().filter_map(|x| x.ord().finite()).min().unwrap_or(0)
                    + 1;
                let lifted: ModVector<F> = s
                    .iter()
                    .map(|x| x.with_precision(x.precision().max(p)))
                    .collect();
                f.ord(&lifted)
            }
        })
        .collect()
}

/// Checks `F^lambda = sum_i t^{max(0, ceil(lambda - ord(s_i)))} R s_i` at every
/// jump of every filtration (modulo `t^i` when a level is given). The vectors
/// are read as exact polynomials.
pub fn verify_span_identities<F: Field>(
    basis: &[ModVector<F>],
    fs: &[DvrFiltration<F>],
    level: Option<u32>,
) -> Result<bool> {
    let n = shared_rank(fs)?;
    if basis.len() != n {
        return Err(Error::NotABasis(format!(
            "{} vectors for rank {n}",
            basis.len()
        )));
    }
    check_unimodular(basis)?;
    for f in fs {
        let mut ords = Vec::with_capacity(n);
        for s in basis {
            match ord_vector(std::slice::from_ref(f), s, level)?.pop() {
                Some(ExtRational::Finite(q)) => ords.push(q),
                _ => return Err(Error::NotABasis("basis vector vanishes".into())),
            }
        }
        let top = match level {
            Some(i) => f.hi() + rat::int(i as i64),
            None => f.hi().clone(),
        };
        for l in f.jumps_in(f.lo(), &top) {
            let exps: Vec<u32> = ords.iter().map(|o| rat::ceil_nonneg(&(&l - o))).collect();
            let mut m = exps.iter().copied().max().unwrap_or(0);
            if let Some(i) = level {
                m = m.min(i);
            }
            let gens: Vec<ModVector<F>> = basis
                .iter()
                .zip(&exps)
                .map(|(s, &e)| s.iter().map(|x| x.shift_up(e)).collect())
                .collect();
            let got = Submodule::hnf_mod(n, &gens, m);
            if got != at_level(f.step(&l), level) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Compares, at each sample, the graded table with the quotient
/// `F^lambda / (sum_i F^{lambda + e_i/d} + t F^{lambda - 1})` taken on the
/// common `1/d` grid. Data violating the filtration axioms fails outright,
/// since neither side is then a graded piece of anything.
pub fn rees_quotient_check<F: Field>(
    fs: &[DvrFiltration<F>],
    samples: &[Vec<Rational>],
) -> Result<bool> {
    shared_rank(fs)?;
    if fs.iter().any(|f| f.check_axioms().is_err()) {
        return Ok(false);
    }
    let d = fs
        .iter()
        .fold(1u64, |acc, f| rat::lcm(acc, f.denominator()));
    let step = rat::frac(1, d as i64);
    let table = dvr_graded_table(fs)?;
    let mismatches: Vec<bool> = samples
        .par_iter()
        .map(|lambda| {
            let s = multi_step(fs, lambda, None)?;
            let below: Vec<Rational> = lambda.iter().map(|l| l - rat::int(1)).collect();
            let mut t = multi_step(fs, &below, None)?.scale_t(1);
            for i in 0..lambda.len() {
                let mut up = lambda.clone();
                up[i] = &up[i] + &step;
                t = t.sum(&multi_step(fs, &up, None)?)?;
            }
            let dim = (t.colength() - s.colength()) as usize;
            Ok(dim != table.dim_at(lambda))
        })
        .collect::<Result<_>>()?;
    Ok(!mismatches.into_iter().any(|m| m))
}

/// All points of the common `1/d` grid within `margin` of each `[lo_j, hi_j]`.
pub fn jump_grid<F: Field>(fs: &[DvrFiltration<F>], margin: i64) -> Vec<Vec<Rational>> {
    let d = fs
        .iter()
        .fold(1u64, |acc, f| rat::lcm(acc, f.denominator())) as i64;
    fs.iter()
        .map(|f| {
            let a = rat::floor_i64(&(f.lo() * rat::int(d))) - margin * d;
            let b = rat::ceil_i64(&(f.hi() * rat::int(d))) + margin * d;
            (a..=b).map(|k| rat::frac(k, d)).collect::<Vec<_>>()
        })
        .multi_cartesian_product()
        .collect()
}
