use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::{LaurentPoly, TruncatedSeries};
use crate::error::Result;
use crate::lindvr::{dvr_graded_table, piece_bounds, DvrFiltration, ModVector, Submodule};
use crate::scalar::Field;
use crate::valuation::{induced_filtrations, MonomialValuation, SectionSpace};
use crate::Rational;

/// Outcome of the graded-ring sample checks. Reducedness is never checked.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrRingReport {
    /// `v(st) = v(s) + v(t)` held for every sampled product.
    pub multiplicative: bool,
    /// Multiplication by the unit section was injective on every checked piece.
    pub injective: bool,
    pub reduced: &'static str,
    pub products_checked: usize,
    pub pieces_checked: usize,
    pub failures: Vec<String>,
    pub warnings: Vec<String>,
}

/// Samples the graded ring `sum_m gr W_m` built from the filtrations the
/// valuations induce on each level.
///
/// Each sample `(a, b)` multiplies random combinations of levels `a` and `b`
/// and compares valuations. For each sampled `a` with a level `a + 1`, every
/// graded piece of `W_a` is pushed through multiplication by `unit` and its
/// image is checked to stay independent in the matching piece of `W_{a+1}`.
pub fn gr_ring_check<F: Field>(
    families: &BTreeMap<u32, SectionSpace<F>>,
    valuations: &[MonomialValuation],
    unit: &LaurentPoly<F>,
    samples: &[(u32, u32)],
    seed: u64,
) -> Result<GrRingReport> {
    let mut report = GrRingReport {
        multiplicative: true,
        injective: true,
        reduced: "unchecked",
        products_checked: 0,
        pieces_checked: 0,
        failures: Vec::new(),
        warnings: Vec::new(),
    };
    if samples.is_empty() {
        report.warnings.push("no samples given; nothing was checked".into());
        return Ok(report);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut filtrations: BTreeMap<u32, Vec<DvrFiltration<F>>> = BTreeMap::new();
    let mut fs_of = |m: u32| -> Result<Vec<DvrFiltration<F>>> {
        if let Some(fs) = filtrations.get(&m) {
            return Ok(fs.clone());
        }
        let fs = induced_filtrations(valuations, &families[&m])?;
        filtrations.insert(m, fs.clone());
        Ok(fs)
    };
    for &(a, b) in samples {
        let (Some(va), Some(vb)) = (families.get(&a), families.get(&b)) else {
            report.warnings.push(format!("sample ({a}, {b}) names a missing level"));
            continue;
        };
        let s = va.combine(&random_coeffs(va.rank(), &mut rng))?;
        let u = vb.combine(&random_coeffs(vb.rank(), &mut rng))?;
        if s.is_zero() || u.is_zero() {
            continue;
        }
        let su = s.mul(&u)?;
        report.products_checked += 1;
        for v in valuations {
            let expected = v.eval(&s).zip(v.eval(&u)).map(|(x, y)| x + y);
            if v.eval(&su) != expected {
                report.multiplicative = false;
                report.failures.push(format!("product of levels {a} and {b} is not multiplicative at {:?}", v.weights()));
            }
        }
        if let Some(target) = families.get(&(a + b)) {
            if target.coordinates(&su).is_err() {
                report.warnings.push(format!("product of levels {a} and {b} leaves level {}", a + b));
            }
        }
    }
    let shift: Vec<Rational> = valuations.iter().map(|v| v.eval(unit).expect("nonzero unit")).collect();
    let mut sources: Vec<u32> = samples.iter().map(|s| s.0).collect();
    sources.sort_unstable();
    sources.dedup();
    for a in sources {
        let (Some(va), Some(vb)) = (families.get(&a), families.get(&(a + 1))) else { continue };
        let (fa, fb) = (fs_of(a)?, fs_of(a + 1)?);
        let table = dvr_graded_table(&fa)?;
        for (lambda, piece) in &table.entries {
            report.pieces_checked += 1;
            let target: Vec<Rational> = lambda.iter().zip(&shift).map(|(l, c)| l + c).collect();
            let (s, t) = piece_bounds(&fb, &target, None)?;
            let mut images: Vec<ModVector<F>> = Vec::new();
            let mut inside = true;
            for r in &piece.representatives {
                let product = va.combine(r)?.mul(unit)?;
                match vb.coordinates(&product) {
                    Ok(c) if s.contains_exact(&c) => images.push(c),
                    _ => inside = false,
                }
            }
            let independent = inside && {
                let with = t.sum(&Submodule::hnf_mod(t.rank(), &images, t.floor()))?;
                (t.colength() - with.colength()) as usize == piece.dim
            };
            if !independent {
                report.injective = false;
                report.failures.push(format!("multiplication by the unit kills a class of level {a} at {lambda:?}"));
            }
        }
    }
    Ok(report)
}

fn random_coeffs<F: Field>(n: usize, rng: &mut ChaCha8Rng) -> Vec<TruncatedSeries<F>> {
    (0..n).map(|_| TruncatedSeries::constant(F::from_int(rng.gen_range(-3..=3)), 1)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::PolyReader;
    use crate::scalar::rat::int;

    fn tower() -> BTreeMap<u32, SectionSpace<Rational>> {
        let r = PolyReader::new(&["x"], 8);
        let level = |ss: &[&str]| SectionSpace::new(ss.iter().map(|s| r.read(s).unwrap()).collect()).unwrap();
        [(0, level(&["1"])), (1, level(&["1", "x"])), (2, level(&["1", "x", "x^2"]))].into_iter().collect()
    }

    fn valuations() -> Vec<MonomialValuation> {
        vec![MonomialValuation::new(vec![int(1)]), MonomialValuation::new(vec![int(-1)])]
    }

    #[test]
    fn monomial_tower_passes() {
        let one = PolyReader::new(&["x"], 8).read("1").unwrap();
        let r = gr_ring_check(&tower(), &valuations(), &one, &[(0, 1), (1, 1), (0, 0)], 7).unwrap();
        assert!(r.multiplicative && r.injective, "{r:?}");
        assert_eq!(r.reduced, "unchecked");
        assert!(r.pieces_checked > 0);
    }

    #[test]
    fn t_as_unit_kills_classes() {
        let t = PolyReader::new(&["x"], 8).read("t").unwrap();
        let r = gr_ring_check(&tower(), &valuations(), &t, &[(1, 1)], 7).unwrap();
        assert!(!r.injective);
    }

    #[test]
    fn empty_sample_warns() {
        let one = PolyReader::new(&["x"], 8).read("1").unwrap();
        let r = gr_ring_check(&tower(), &valuations(), &one, &[], 0).unwrap();
        assert!(r.multiplicative && r.injective && !r.warnings.is_empty());
    }
}
