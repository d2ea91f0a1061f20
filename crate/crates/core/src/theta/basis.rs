use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::arith::{LaurentPoly, TruncatedSeries};
use crate::error::{Error, Result};
use crate::lindvr::{
    diagonalize_dvr, dvr_graded_table, graded_table_at, ord_vector, piece_bounds, verify_span_identities,
    DiagonalizeOptions, DvrBasis, DvrDiagonalization, DvrFiltration, DvrGradedTable, ModVector, Submodule,
};
use crate::linfield::ExtRational;
use crate::scalar::{rat, Field};
use crate::skeleton::{refine, subdivision_vertices, SkeletonComplex, SkeletonPoint};
use crate::theta::Probe;
use crate::valuation::{induced_filtration, vertical_value, SectionSpace};
use crate::Rational;

/// Record of how a basis was certified.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    /// Common denominator of every jump at every probe.
    pub denominator: u64,
    /// Labels of the probes at which the span identities were verified.
    pub verified_at: Vec<String>,
    /// Vertical divisor by which all values were shifted.
    pub shift: Option<Vec<i64>>,
}

/// A basis of a section space that is diagonal at every probe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThetaBasis<F> {
    pub sections: Vec<LaurentPoly<F>>,
    /// Coordinates of each section in the designated basis of its space.
    pub coordinates: Vec<ModVector<F>>,
    pub probes: Vec<Probe>,
    /// `ord_vectors[i][p]` is the value of section `i` at probe `p`.
    pub ord_vectors: Vec<Vec<Rational>>,
    pub certificate: Certificate,
}

/// A combination violating `v(sum a_i theta_i) = min v(a_i theta_i)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample<F> {
    pub probe: Probe,
    pub filtration: DvrFiltration<F>,
    pub coefficients: ModVector<F>,
    /// `v(sum a_i theta_i)`.
    pub value: Rational,
    /// `min_i v(a_i theta_i)`.
    pub min_of_terms: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict<F> {
    Independent(ThetaBasis<F>),
    Dependent(Box<Counterexample<F>>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Construction<F> {
    Basis(ThetaBasis<F>),
    Obstruction { probes: Vec<Probe>, table: DvrGradedTable<F> },
}

pub(crate) fn skeleton_probes<F: Field>(k: &SkeletonComplex, space: &SectionSpace<F>) -> Result<Vec<Probe>> {
    Ok(subdivision_vertices(k, &refine(k, space)?).into_iter().map(Probe::at).collect())
}

fn shift_at(k: &SkeletonComplex, p: &SkeletonPoint, shift: Option<&[i64]>) -> Result<Rational> {
    match shift {
        Some(d) => vertical_value(k.vertices(), &k.full_alpha(p), d),
        None => Ok(Rational::from_integer(0.into())),
    }
}

fn probe_filtrations<F: Field>(space: &SectionSpace<F>, probes: &[Probe]) -> Result<Vec<DvrFiltration<F>>> {
    probes.par_iter().map(|p| induced_filtration(&p.valuation, space)).collect()
}

fn common_denominator<F: Field>(fs: &[DvrFiltration<F>]) -> u64 {
    fs.iter().fold(1, |acc, f| rat::lcm(acc, f.denominator()))
}

fn identity<F: Field>(n: usize) -> Vec<ModVector<F>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { TruncatedSeries::one(1) } else { TruncatedSeries::zero(1) }).collect())
        .collect()
}

/// Decides whether `basis` is valuatively independent on the skeleton.
///
/// The basis is refined, the induced filtration is built at every vertex and
/// the span identities of the coordinate basis are checked there. With a
/// vertical divisor `shift`, every valuation is moved by its value on that
/// divisor, which shifts both sides of each identity equally.
pub fn check_independence<F: Field>(
    basis: &[LaurentPoly<F>],
    k: &SkeletonComplex,
    shift: Option<&[i64]>,
) -> Result<Verdict<F>> {
    let space = SectionSpace::new(basis.to_vec())?;
    let n = space.rank();
    let probes = skeleton_probes(k, &space)?;
    let fs: Vec<DvrFiltration<F>> = probe_filtrations(&space, &probes)?
        .into_iter()
        .zip(&probes)
        .map(|(f, p)| Ok(f.shift(&shift_at(k, p.point.as_ref().expect("skeleton probe"), shift)?)))
        .collect::<Result<_>>()?;
    let id = identity::<F>(n);
    let checks: Vec<bool> = fs
        .par_iter()
        .map(|f| verify_span_identities(&id, std::slice::from_ref(f), None))
        .collect::<Result<_>>()?;
    if let Some(bad) = checks.iter().position(|ok| !ok) {
        let c = counterexample(&space, &probes[bad], &fs[bad])?;
        return Ok(Verdict::Dependent(Box::new(c)));
    }
    let ord_vectors = (0..n)
        .map(|i| {
            ord_vector(&fs, &id[i], None)
                .map(|os| os.into_iter().map(|o| o.finite().expect("nonzero").clone()).collect())
        })
        .collect::<Result<_>>()?;
    Ok(Verdict::Independent(ThetaBasis {
        sections: basis.to_vec(),
        coordinates: id,
        certificate: Certificate {
            denominator: common_denominator(&fs),
            verified_at: probes.iter().map(|p| p.label.clone()).collect(),
            shift: shift.map(|s| s.to_vec()),
        },
        probes,
        ord_vectors,
    }))
}

/// Finds an element of some `F^lambda` outside the span predicted by the
/// coordinate orders; its coefficients witness the failure.
fn counterexample<F: Field>(space: &SectionSpace<F>, probe: &Probe, f: &DvrFiltration<F>) -> Result<Counterexample<F>> {
    let n = space.rank();
    let id = identity::<F>(n);
    let ords: Vec<Rational> = id
        .iter()
        .map(|e| ord_vector(std::slice::from_ref(f), e, None).map(|mut o| o.pop().and_then(|o| o.finite().cloned()).expect("nonzero")))
        .collect::<Result<_>>()?;
    let hi = f.hi().clone();
    for l in f.jumps_in(f.lo(), &hi) {
        let w = f.step(&l);
        let exps: Vec<u32> = ords.iter().map(|o| rat::ceil_nonneg(&(&l - o))).collect();
        let m = exps.iter().copied().max().unwrap_or(0).max(w.floor());
        let gens: Vec<ModVector<F>> = id.iter().zip(&exps).map(|(e, &x)| e.iter().map(|c| c.shift_up(x)).collect()).collect();
        let predicted = Submodule::hnf_mod(n, &gens, m.max(1));
        if let Some(row) = w.rows().iter().find(|r| !predicted.contains_exact(r)) {
            let combo = space.combine(row)?;
            let shift = &ords[0] - probe.valuation.eval(&space.sections()[0]).expect("nonzero");
            let value = probe.valuation.eval(&combo).map(|v| v + &shift).unwrap_or_else(|| l.clone());
            let min_of_terms = row
                .iter()
                .zip(&ords)
                .filter_map(|(a, o)| a.ord().finite().map(|k| o + rat::int(k as i64)))
                .min()
                .expect("nonzero row");
            return Ok(Counterexample { probe: probe.clone(), filtration: f.clone(), coefficients: row.clone(), value, min_of_terms });
        }
    }
    Err(Error::InvariantViolation("span identities failed but no witness was found".into()))
}

/// Builds a basis of `space` diagonal at every vertex of the refinement, or
/// returns the graded table that rules one out. Graded spaces are
/// diagonalized weight by weight.
pub fn construct_basis<F: Field>(space: &SectionSpace<F>, k: &SkeletonComplex, seed: Option<u64>) -> Result<Construction<F>> {
    let probes = skeleton_probes(k, space)?;
    construct_at(space, probes, seed)
}

pub(crate) fn construct_at<F: Field>(space: &SectionSpace<F>, probes: Vec<Probe>, seed: Option<u64>) -> Result<Construction<F>> {
    let fs = probe_filtrations(space, &probes)?;
    let outcome = if space.grading().is_some() {
        equivariant_diagonalize(space, &fs, seed)?
    } else {
        diagonalize_dvr(&fs, DiagonalizeOptions { seed })?
    };
    match outcome {
        DvrDiagonalization::Obstruction(table) => Ok(Construction::Obstruction { probes, table }),
        DvrDiagonalization::Diagonal(DvrBasis { vectors, ords }) => {
            let sections = vectors.iter().map(|a| space.combine(a)).collect::<Result<_>>()?;
            Ok(Construction::Basis(ThetaBasis {
                sections,
                coordinates: vectors,
                certificate: Certificate {
                    denominator: common_denominator(&fs),
                    verified_at: probes.iter().map(|p| p.label.clone()).collect(),
                    shift: None,
                },
                probes,
                ord_vectors: ords,
            }))
        }
    }
}

/// Diagonalizes weight block by weight block, so that every output vector is
/// supported on sections of a single weight.
pub fn equivariant_diagonalize<F: Field>(
    space: &SectionSpace<F>,
    fs: &[DvrFiltration<F>],
    seed: Option<u64>,
) -> Result<DvrDiagonalization<F>> {
    let n = space.rank();
    let mut blocks: BTreeMap<Vec<i64>, Vec<usize>> = BTreeMap::new();
    for (i, s) in space.sections().iter().enumerate() {
        blocks.entry(space.weight_of(s)?).or_default().push(i);
    }
    let blocks: Vec<Vec<usize>> = blocks.into_values().collect();
    for f in fs {
        for (l, w) in f.steps() {
            for r in w.rows() {
                for b in &blocks {
                    if !w.contains_exact(&project(r, b)) {
                        return Err(Error::NotWeightCompatible(format!("step at {l} does not split along weights")));
                    }
                }
            }
        }
    }
    let mut vectors = Vec::with_capacity(n);
    let mut ords = Vec::with_capacity(n);
    for (bi, b) in blocks.iter().enumerate() {
        let restricted = fs.iter().map(|f| restrict(f, b)).collect::<Result<Vec<_>>>()?;
        let options = DiagonalizeOptions { seed: seed.map(|s| s.wrapping_add(bi as u64)) };
        match diagonalize_dvr(&restricted, options)? {
            DvrDiagonalization::Obstruction(_) => return Ok(DvrDiagonalization::Obstruction(dvr_graded_table(fs)?)),
            DvrDiagonalization::Diagonal(d) => {
                for (v, o) in d.vectors.into_iter().zip(d.ords) {
                    let p = v.iter().map(|x| x.precision()).max().unwrap_or(1);
                    let mut full = vec![TruncatedSeries::zero(p); n];
                    for (x, &i) in v.into_iter().zip(b) {
                        full[i] = x;
                    }
                    vectors.push(full);
                    ords.push(o);
                }
            }
        }
    }
    if !verify_span_identities(&vectors, fs, None)? {
        return Err(Error::InvariantViolation("blockwise bases failed to diagonalize".into()));
    }
    Ok(DvrDiagonalization::Diagonal(DvrBasis { vectors, ords }))
}

fn project<F: Field>(r: &[TruncatedSeries<F>], block: &[usize]) -> ModVector<F> {
    r.iter()
        .enumerate()
        .map(|(i, x)| if block.contains(&i) { x.clone() } else { TruncatedSeries::zero(x.precision()) })
        .collect()
}

/// The filtration induced on the coordinates in `block`, for a filtration
/// whose steps split along the blocks.
fn restrict<F: Field>(f: &DvrFiltration<F>, block: &[usize]) -> Result<DvrFiltration<F>> {
    let mut steps: Vec<(Rational, Submodule<F>)> = Vec::new();
    for (l, w) in f.steps() {
        let gens: Vec<ModVector<F>> = w.rows().iter().map(|r| block.iter().map(|&i| r[i].clone()).collect()).collect();
        let sub = Submodule::hnf_mod(block.len(), &gens, w.floor());
        // F is constant on (lambda_{j-1}, lambda_j]; merging equal neighbours keeps the right end.
        if steps.last().is_some_and(|(_, prev)| *prev == sub) {
            steps.pop();
        }
        steps.push((l.clone(), sub));
    }
    DvrFiltration::from_steps(block.len(), steps)
}

/// Extends a certified basis of a smaller space to one of `space`, keeping
/// every inner section verbatim.
///
/// The inner sections' classes must be independent in the graded pieces of
/// `space`; each piece is then completed by representatives of its quotient
/// by the inner classes.
pub fn extend_basis<F: Field>(
    inner: &ThetaBasis<F>,
    space: &SectionSpace<F>,
    k: &SkeletonComplex,
    seed: Option<u64>,
) -> Result<ThetaBasis<F>> {
    let n = space.rank();
    let inner_coords: Vec<ModVector<F>> = inner
        .sections
        .iter()
        .map(|s| space.coordinates(s).map_err(|e| Error::NestingViolated(format!("inner section outside the space: {e}"))))
        .collect::<Result<_>>()?;
    let probes = skeleton_probes(k, space)?;
    let fs = probe_filtrations(space, &probes)?;
    let mut by_index: BTreeMap<Vec<Rational>, Vec<ModVector<F>>> = BTreeMap::new();
    for u in &inner_coords {
        let o: Vec<Rational> = ord_vector(&fs, u, None)?
            .into_iter()
            .map(|x| match x {
                ExtRational::Finite(q) => Ok(q),
                ExtRational::PlusInfinity => Err(Error::NestingViolated("inner section vanishes".into())),
            })
            .collect::<Result<_>>()?;
        by_index.entry(o).or_default().push(u.clone());
    }
    let table = graded_table_at(&fs, None, seed)?;
    if table.total_dim() != n {
        return Err(Error::NestingViolated(format!("graded table has dimension {} for rank {n}", table.total_dim())));
    }
    let mut extras: Vec<(ModVector<F>, Vec<Rational>)> = Vec::new();
    for (lambda, piece) in &table.entries {
        let (s, t) = piece_bounds(&fs, lambda, None)?;
        let mine = by_index.remove(lambda).unwrap_or_default();
        let with_inner = if mine.is_empty() { t.clone() } else { t.sum(&Submodule::hnf_mod(n, &mine, t.floor()))? };
        if t.colength() - with_inner.colength() != mine.len() as u32 {
            return Err(Error::NestingViolated(format!("inner classes at {lambda:?} are dependent in the graded piece")));
        }
        let reps = s.complement_reps(&with_inner);
        debug_assert_eq!(reps.len() + mine.len(), piece.dim);
        extras.extend(reps.into_iter().map(|r| (r, lambda.clone())));
    }
    if let Some(lambda) = by_index.keys().next() {
        return Err(Error::NestingViolated(format!("inner classes at {lambda:?} vanish in the graded space")));
    }
    let mut coordinates = inner_coords;
    coordinates.extend(extras.iter().map(|(r, _)| r.clone()));
    if !verify_span_identities(&coordinates, &fs, None)? {
        return Err(Error::NestingViolated("extended basis fails the span identities".into()));
    }
    let mut sections = inner.sections.clone();
    for (r, _) in &extras {
        sections.push(space.combine(r)?);
    }
    let ord_vectors = coordinates
        .iter()
        .map(|u| ord_vector(&fs, u, None).map(|os| os.into_iter().map(|o| o.finite().expect("nonzero").clone()).collect()))
        .collect::<Result<_>>()?;
    Ok(ThetaBasis {
        sections,
        coordinates,
        certificate: Certificate {
            denominator: common_denominator(&fs),
            verified_at: probes.iter().map(|p| p.label.clone()).collect(),
            shift: None,
        },
        probes,
        ord_vectors,
    })
}
