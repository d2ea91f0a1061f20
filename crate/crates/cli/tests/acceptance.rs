//! Acceptance suite: one line per criterion, non-zero exit if any fails.
//!
//! Runs as a plain binary (`harness = false`) so the report is printed under
//! `cargo test` without `--nocapture`.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use reesdiag::model::{Model, ModelFile};
use reesdiag_core::arith::{LaurentPoly, Monomial, PolyReader};
use reesdiag_core::lindvr::{
    diagonalize_dvr, diagonalize_mod, jump_grid, lift_chain, rees_quotient_check, verify_span_identities,
    DiagonalizeOptions, DvrDiagonalization, DvrFiltration, ModVector,
};
use reesdiag_core::linfield::{diagonalize_field, graded_table, rank, verify_diagonalizes, Diagonalization, FieldFiltration};
use reesdiag_core::scalar::rat::{frac, int};
use reesdiag_core::skeleton::{refine, subdivision_vertices, SkeletonComplex};
use reesdiag_core::theta::{
    check_independence, cone_assemble, cone_construct, cone_extract, construct_basis, extend_basis, gr_ring_check,
    tropicalize, ConeSpace, Construction, ThetaBasis, Verdict,
};
use reesdiag_core::valuation::{eval_valuation, MonomialValuation, SectionSpace};
use reesdiag_core::{Laurent, Rational, Series};

type Outcome = Result<String, String>;

type Criterion = (u32, &'static str, Duration, fn() -> Outcome);

fn main() {
    let criteria: Vec<Criterion> = vec![
        (1, "three-lines obstruction", secs(1), three_lines),
        (2, "dim-2 flag classification", secs(10), flag_classification),
        (3, "two-filtration field completeness", secs(30), field_pairs),
        (4, "rank-one DVR orders equal Smith invariants", secs(60), smith_oracle),
        (5, "graded-quotient identity", secs(120), rees_quotient),
        (6, "lifting contract on sheared fixture", secs(5), lifting),
        (7, "tropicalization exactness", secs(120), tropical_exactness),
        (8, "independence round trip and counterexample", secs(120), round_trip),
        (9, "trop functions unique up to shifts", secs(120), trop_uniqueness),
        (10, "metric-shift invariance", secs(300), metric_shift),
        (11, "cone grading", secs(120), cone_grading),
        (12, "nesting over a 4-level tower", secs(120), nesting),
    ];
    // Panics become FAIL lines; the default hook would interleave backtraces.
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (n, name, budget, run) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            Err(e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let took = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if took > budget => Err(format!("{detail}; over the {}s budget", budget.as_secs())),
            other => other,
        };
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        println!("criterion {n:>2} {tag} {name} ({:.2}s): {detail}", took.as_secs_f64());
        failed += outcome.is_err() as u32;
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn fixture(name: &str) -> Model {
    let root = Path::new(env!("CARGO_MANIFEST_DIR"));
    let path = if name == "sum_difference" {
        root.join("tests/data/sum_difference.json")
    } else {
        root.join("fixtures").join(format!("{name}.json"))
    };
    ModelFile::read(&path).unwrap().validate().unwrap()
}

fn q(n: i64) -> Rational {
    int(n)
}

// ---------------------------------------------------------------- field case

fn line_flag(line: &[Rational], lo: i64) -> FieldFiltration<Rational> {
    let complement = if line[0] == q(0) { vec![q(1), q(0)] } else { vec![q(0), q(1)] };
    FieldFiltration::from_basis(&[line.to_vec(), complement], &[q(lo + 1), q(lo)]).unwrap()
}

fn three_lines() -> Outcome {
    let fs: Vec<_> = [[1, 0], [0, 1], [1, 1]].iter().map(|l| line_flag(&[q(l[0]), q(l[1])], 0)).collect();
    let total = graded_table(&fs).map_err(|e| e.to_string())?.total_dim();
    ensure(total == 3, || format!("graded total {total}, expected 3"))?;
    let Diagonalization::Obstruction(_) = diagonalize_field(&fs).map_err(|e| e.to_string())? else {
        return Err("diagonalize_field returned a basis".into());
    };
    Ok("graded total 3 on dimension 2, obstruction returned".into())
}

fn flag_classification() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let lines: Vec<Vec<Rational>> = (-2..=2).map(|a| vec![q(1), q(a)]).chain([vec![q(0), q(1)]]).collect();
    let mut diag = 0;
    for case in 0..500 {
        let r = rng.gen_range(3..=4);
        let picks: Vec<usize> = (0..r).map(|_| rng.gen_range(0..lines.len())).collect();
        let fs: Vec<_> = picks.iter().map(|&i| line_flag(&lines[i], rng.gen_range(-2..=2))).collect();
        let mut distinct = picks.clone();
        distinct.sort_unstable();
        distinct.dedup();
        let expected = distinct.len() <= 2;
        let got = matches!(diagonalize_field(&fs).map_err(|e| e.to_string())?, Diagonalization::Diagonal(_));
        ensure(got == expected, || format!("case {case}: lines {picks:?}, verdict {got}, oracle {expected}"))?;
        diag += got as usize;
    }
    Ok(format!("500/500 agree ({diag} diagonalizable)"))
}

fn random_field_filtration(n: usize, rng: &mut ChaCha8Rng) -> FieldFiltration<Rational> {
    loop {
        let basis: Vec<Vec<Rational>> = (0..n).map(|_| (0..n).map(|_| q(rng.gen_range(-3..=3))).collect()).collect();
        if rank(&basis, n) == n {
            let ords: Vec<Rational> = (0..n).map(|_| frac(rng.gen_range(-4..=4), rng.gen_range(1..=2))).collect();
            return FieldFiltration::from_basis(&basis, &ords).unwrap();
        }
    }
}

fn field_pairs() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for case in 0..200 {
        let n = rng.gen_range(1..=5);
        let fs = vec![random_field_filtration(n, &mut rng), random_field_filtration(n, &mut rng)];
        let Diagonalization::Diagonal(b) = diagonalize_field(&fs).map_err(|e| e.to_string())? else {
            return Err(format!("case {case}: pair in dimension {n} reported an obstruction"));
        };
        ensure(verify_diagonalizes(&b.vectors, &fs).map_err(|e| e.to_string())?, || {
            format!("case {case}: basis fails verification")
        })?;
    }
    Ok("200/200 diagonalized and verified".into())
}

// ------------------------------------------------------------------ DVR case

const N: u32 = 8;

fn series(coeffs: &[i64], p: u32) -> Series {
    Series::from_dense(&coeffs.iter().map(|c| q(*c)).collect::<Vec<_>>(), p)
}

/// A random basis of `R^n`: polynomial entries whose constant terms are invertible.
fn random_unimodular(n: usize, rng: &mut ChaCha8Rng) -> Vec<ModVector<Rational>> {
    loop {
        let rows: Vec<Vec<Vec<i64>>> =
            (0..n).map(|_| (0..n).map(|_| (0..3).map(|_| rng.gen_range(-2..=2)).collect()).collect()).collect();
        let residues: Vec<Vec<Rational>> = rows.iter().map(|r| r.iter().map(|c| q(c[0])).collect()).collect();
        if rank(&residues, n) == n {
            return rows.iter().map(|r| r.iter().map(|c| series(c, N)).collect()).collect();
        }
    }
}

/// Smith invariants (`t`-orders of the elementary divisors) of a square or
/// tall matrix over `R/t^N`, by pivoting on an entry of least order.
fn smith_orders(mut m: Vec<Vec<Series>>, n: usize) -> Vec<u32> {
    let mut out = Vec::new();
    for k in 0..n {
        let best = (k..m.len())
            .flat_map(|i| (k..n).map(move |j| (i, j)))
            .filter_map(|(i, j)| m[i][j].ord().finite().map(|o| (o, i, j)))
            .min();
        let Some((e, i, j)) = best else {
            out.extend(std::iter::repeat_n(N, n - k));
            break;
        };
        m.swap(k, i);
        for row in m.iter_mut() {
            row.swap(k, j);
        }
        let unit_inv = m[k][k].shift_down(e).unwrap().with_precision(N).inverse().unwrap();
        for i in 0..m.len() {
            if i != k && !m[i][k].is_zero() {
                let f = &m[i][k].shift_down(e).unwrap().with_precision(N) * &unit_inv;
                let pivot_row = m[k].clone();
                for (x, y) in m[i].iter_mut().zip(&pivot_row) {
                    *x = &*x - &(&f * y);
                }
            }
        }
        for j in k + 1..n {
            if !m[k][j].is_zero() {
                let f = &m[k][j].shift_down(e).unwrap().with_precision(N) * &unit_inv;
                for row in m.iter_mut() {
                    let y = row[k].clone();
                    row[j] = &row[j] - &(&f * &y);
                }
            }
        }
        out.push(e);
    }
    out.sort_unstable();
    out
}

fn smith_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for case in 0..100 {
        let n = rng.gen_range(1..=4);
        let basis = random_unimodular(n, &mut rng);
        let ords: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=5)).collect();
        let f = DvrFiltration::from_diagonal(&basis, &ords.iter().map(|o| q(*o)).collect::<Vec<_>>())
            .map_err(|e| format!("case {case}: orders {ords:?}: {e}"))?;
        // F^M = sum t^{M - m_i} R s_i, so its Smith invariants are M - m_i.
        let top = *ords.iter().max().unwrap();
        let lattice = f.step(&q(top));
        let rows: Vec<Vec<Series>> = lattice.rows().iter().map(|r| r.iter().map(|x| x.with_precision(N)).collect()).collect();
        let mut expected: Vec<Rational> = smith_orders(rows, n).into_iter().map(|e| q(top - e as i64)).collect();
        expected.sort();
        let DvrDiagonalization::Diagonal(b) =
            diagonalize_dvr(std::slice::from_ref(&f), DiagonalizeOptions::default()).map_err(|e| e.to_string())?
        else {
            return Err(format!("case {case}: single filtration reported an obstruction"));
        };
        let mut got: Vec<Rational> = b.ords.iter().map(|o| o[0].clone()).collect();
        got.sort();
        ensure(got == expected, || format!("case {case}: orders {got:?}, Smith {expected:?}"))?;
    }
    Ok("100/100 order multisets equal the Smith invariants".into())
}

fn rees_quotient() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut points = 0;
    for case in 0..50 {
        let n = rng.gen_range(1..=3);
        let r = rng.gen_range(1..=3);
        let d = rng.gen_range(1..=3);
        let fs: Vec<DvrFiltration<Rational>> = (0..r)
            .map(|_| {
                let basis = random_unimodular(n, &mut rng);
                let ords: Vec<Rational> = (0..n).map(|_| frac(rng.gen_range(-d..=d), d)).collect();
                DvrFiltration::from_diagonal(&basis, &ords).unwrap()
            })
            .collect();
        let grid = jump_grid(&fs, 1);
        points += grid.len();
        ensure(rees_quotient_check(&fs, &grid).map_err(|e| e.to_string())?, || {
            format!("case {case}: rank {n}, {r} filtrations, d = {d}")
        })?;
    }
    Ok(format!("50/50 families agree on {points} grid points"))
}

fn sheared() -> Vec<DvrFiltration<Rational>> {
    let id = vec![vec![series(&[1], N), series(&[0], N)], vec![series(&[0], N), series(&[1], N)]];
    let f1 = DvrFiltration::from_diagonal(&id, &[q(0), q(1)]).unwrap();
    let b = vec![vec![series(&[1], N), series(&[1, 1], N)], vec![series(&[0, 1], N), series(&[1], N)]];
    let f2 = DvrFiltration::from_diagonal(&b, &[q(1), q(0)]).unwrap();
    vec![f1, f2]
}

fn lifting() -> Outcome {
    let fs = sheared();
    let out = lift_chain(|i| diagonalize_mod(&fs, i, Some(1000 + i as u64)), N).map_err(|e| e.to_string())?;
    for i in 1..=N {
        let b = out.truncate(i).map_err(|e| e.to_string())?;
        ensure(verify_span_identities(&b.vectors, &fs, Some(i)).map_err(|e| e.to_string())?, || {
            format!("truncation to level {i} fails")
        })?;
    }
    Ok(format!("truncations at levels 1..={N} all diagonalize"))
}

// --------------------------------------------------------------- skeleton

fn random_section(vars: usize, rng: &mut ChaCha8Rng) -> Laurent {
    let terms: Vec<(Monomial, Rational)> = (0..rng.gen_range(1..=4))
        .map(|_| {
            let exps = (0..vars).map(|_| rng.gen_range(-3..=3)).collect();
            let c = [-3, -2, -1, 1, 2, 3][rng.gen_range(0..6)];
            (Monomial::new(rng.gen_range(0..=2), exps), q(c))
        })
        .collect();
    LaurentPoly::from_terms(vars, 6, terms).unwrap()
}

fn tropical_exactness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut checked = 0;
    for name in ["interval", "torus"] {
        let model = fixture(name);
        let k = model.complex().unwrap();
        let simplices: Vec<Vec<usize>> = k.simplices().cloned().collect();
        let mut made = 0;
        while made < 20 {
            let s = random_section(k.num_vars(), &mut rng);
            if s.is_zero() {
                continue;
            }
            made += 1;
            let trop = tropicalize(&s, k).map_err(|e| e.to_string())?;
            for _ in 0..100 {
                let simplex = &simplices[rng.gen_range(0..simplices.len())];
                let w: Vec<i64> = simplex.iter().map(|_| rng.gen_range(1..=12)).collect();
                let total: i64 = w.iter().sum();
                let mu: Vec<Rational> = w.iter().map(|x| frac(*x, total)).collect();
                let alpha = k.alpha_from_mu(simplex, &mu);
                let v = k.point_valuation(simplex, &alpha).map_err(|e| e.to_string())?;
                let expected = eval_valuation(&v, &s);
                let got = trop.eval(&k.point(simplex, mu.clone()).map_err(|e| e.to_string())?);
                ensure(got == expected, || {
                    format!("{name}: {} at {simplex:?} {mu:?}: trop {got:?}, valuation {expected:?}", s.display_with(model.vars()))
                })?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked}/{checked} points agree exactly"))
}

fn read(vars: &[&str], ss: &[&str]) -> Vec<Laurent> {
    let r = PolyReader::new(vars, 8);
    ss.iter().map(|s| r.read(s).unwrap()).collect()
}

fn basis_of(c: Construction<Rational>) -> Result<ThetaBasis<Rational>, String> {
    match c {
        Construction::Basis(b) => Ok(b),
        Construction::Obstruction { .. } => Err("construction reported an obstruction".into()),
    }
}

fn round_trip() -> Outcome {
    let torus = fixture("torus");
    let k = torus.complex().unwrap();
    // The degree-2 monomials, presented through a non-monomial basis.
    let mixed = read(&["x", "y"], &["1", "1 + x", "x + y", "1 + x^2", "y + x*y", "x + y^2"]);
    let space = SectionSpace::new(mixed).unwrap();
    let b = basis_of(construct_basis(&space, k, None).map_err(|e| e.to_string())?)?;
    let mut supports: Vec<Vec<i32>> = Vec::new();
    for s in &b.sections {
        ensure(s.len() == 1 && s.min_t_degree() == Some(0), || format!("{} is not a unit times a monomial", s.display_with(torus.vars())))?;
        supports.extend(s.support());
    }
    supports.sort();
    let monomials = vec![vec![0, 0], vec![0, 1], vec![0, 2], vec![1, 0], vec![1, 1], vec![2, 0]];
    ensure(supports == monomials, || format!("supports {supports:?}"))?;
    let Verdict::Independent(_) = check_independence(&b.sections, k, None).map_err(|e| e.to_string())? else {
        return Err("constructed basis is not certified".into());
    };
    let sd = fixture("sum_difference");
    let ki = sd.complex().unwrap();
    let Verdict::Dependent(c) = check_independence(sd.levels[0].sections(), ki, None).map_err(|e| e.to_string())? else {
        return Err("{1+x, 1-x} was certified".into());
    };
    let combo = sd.levels[0].combine(&c.coefficients).map_err(|e| e.to_string())?;
    ensure(c.value > c.min_of_terms && c.probe.valuation.eval(&combo) == Some(c.value.clone()), || {
        format!("counterexample at {} does not witness dependence", c.probe.label)
    })?;
    ensure(c.probe.valuation.weights()[0] > q(0), || format!("witness {} has v(x) <= 0", c.probe.label))?;
    Ok(format!(
        "torus basis is the 6 monomials and certified; {{1+x, 1-x}} rejected at {} with value {} > min {}",
        c.probe.label, c.value, c.min_of_terms
    ))
}

fn trop_uniqueness() -> Outcome {
    let model = fixture("interval");
    let k = model.complex().unwrap();
    let space = model.levels.last().unwrap();
    ensure(space.rank() == 3, || "interval fixture's top level should have 3 sections".into())?;
    let a = basis_of(construct_basis(space, k, Some(11)).map_err(|e| e.to_string())?)?;
    let b = basis_of(construct_basis(space, k, Some(29)).map_err(|e| e.to_string())?)?;
    let ta: Vec<_> = a.sections.iter().map(|s| tropicalize(s, k).unwrap()).collect();
    let tb: Vec<_> = b.sections.iter().map(|s| tropicalize(s, k).unwrap()).collect();
    let mut unused: Vec<usize> = (0..tb.len()).collect();
    let mut shifts = Vec::new();
    for f in &ta {
        let hit = unused.iter().position(|&j| {
            f.constant_difference(&tb[j], k).unwrap().is_some_and(|c| c.is_integer() && {
                shifts.push(c);
                true
            })
        });
        match hit {
            Some(p) => {
                unused.remove(p);
            }
            None => return Err(format!("{} has no partner", f.section().display_with(model.vars()))),
        }
    }
    let differ = a.sections != b.sections;
    Ok(format!(
        "3 functions matched, shifts {:?}; the two runs {} differently",
        shifts.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        if differ { "chose sections" } else { "did not choose sections" }
    ))
}

fn metric_shift() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut cases = 0;
    let mut verdicts = Vec::new();
    for name in ["torus", "interval", "sum_difference"] {
        let model = fixture(name);
        let k = model.complex().unwrap();
        for (m, level) in model.levels.iter().enumerate() {
            let plain = matches!(check_independence(level.sections(), k, None).map_err(|e| e.to_string())?, Verdict::Independent(_));
            verdicts.push(format!("{name}[{m}]={}", if plain { "indep" } else { "dep" }));
            for _ in 0..20 {
                let shift: Vec<i64> = (0..k.vertices().len()).map(|_| rng.gen_range(-5..=5)).collect();
                let shifted = matches!(
                    check_independence(level.sections(), k, Some(&shift)).map_err(|e| e.to_string())?,
                    Verdict::Independent(_)
                );
                ensure(shifted == plain, || format!("{name} level {m}: verdict flips under shift {shift:?}"))?;
                cases += 1;
            }
        }
    }
    Ok(format!("{cases}/{cases} shifted verdicts unchanged ({})", verdicts.join(", ")))
}

fn interval_complex() -> SkeletonComplex {
    fixture("interval").complex().unwrap().clone()
}

fn cone_grading() -> Outcome {
    let k = interval_complex();
    let levels: Vec<SectionSpace<Rational>> = [&["1"][..], &["1 + x", "x"][..], &["1", "x + x^2", "x^2"][..]]
        .iter()
        .map(|ss| SectionSpace::new(read(&["x"], ss)).unwrap())
        .collect();
    let cone = cone_assemble(levels.clone()).map_err(|e| e.to_string())?;
    let b = basis_of(cone_construct(&cone, &k, None).map_err(|e| e.to_string())?)?;
    let (v0, vd) = (cone.ord_0_valuation(), cone.ord_d_valuation());
    let mut terms = 0;
    for s in &b.sections {
        for (mono, c) in s.terms() {
            let single = LaurentPoly::monomial(c.clone(), mono.t_degree, mono.exponents.clone(), s.precision()).unwrap();
            ensure(mono.t_degree == 0, || "cone basis section carries a power of t".into())?;
            let (f0, fd) = (ConeSpace::ord_0(&single), ConeSpace::ord_d(&single));
            ensure(f0.map(q) == v0.eval(&single) && fd.map(q) == vd.eval(&single), || {
                format!("term {mono:?}: formulas ({f0:?}, {fd:?}) valuations ({:?}, {:?})", v0.eval(&single), vd.eval(&single))
            })?;
            terms += 1;
        }
        let (f0, fd) = (ConeSpace::ord_0(s), ConeSpace::ord_d(s));
        ensure(f0.map(q) == v0.eval(s) && fd.map(q) == vd.eval(s), || "section-level ord mismatch".into())?;
    }
    for (m, level) in levels.iter().enumerate() {
        let e = cone_extract(&b, &cone, m, &k).map_err(|e| format!("level {m}: {e}"))?;
        ensure(e.sections.len() == level.rank(), || format!("level {m}: {} sections", e.sections.len()))?;
        for s in &e.sections {
            level.coordinates(s).map_err(|err| format!("level {m}: section outside the level: {err}"))?;
        }
        let Verdict::Independent(_) = check_independence(&e.sections, &k, None).map_err(|e| e.to_string())? else {
            return Err(format!("level {m}: extracted basis not certified"));
        };
    }
    Ok(format!("{terms} terms match both formulas; levels 0, 1, 2 extracted and certified"))
}

fn nesting() -> Outcome {
    let k = interval_complex();
    let spec: [&[&str]; 4] = [
        &["1"],
        &["1", "x + 1", "x^-1 + x"],
        &["1", "x + 1", "x^-1 + x", "x^2 + x", "x^-2 + 1"],
        &["1", "x + 1", "x^-1 + x", "x^2 + x", "x^-2 + 1", "x^3 + x^-1", "x^-3 + x^2"],
    ];
    let levels: Vec<SectionSpace<Rational>> = spec.iter().map(|ss| SectionSpace::new(read(&["x"], ss)).unwrap()).collect();
    let mut current = basis_of(construct_basis(&levels[0], &k, Some(1)).map_err(|e| e.to_string())?)?;
    for (m, level) in levels.iter().enumerate().skip(1) {
        let next = extend_basis(&current, level, &k, Some(m as u64)).map_err(|e| format!("level {m}: {e}"))?;
        ensure(next.sections.len() == level.rank() && next.sections[..current.sections.len()] == current.sections[..], || {
            format!("level {m}: inner basis not kept verbatim")
        })?;
        let Verdict::Independent(_) = check_independence(&next.sections, &k, None).map_err(|e| e.to_string())? else {
            return Err(format!("level {m}: extension not certified"));
        };
        current = next;
    }
    let valuations: Vec<MonomialValuation> =
        subdivision_vertices(&k, &refine(&k, &levels[3]).map_err(|e| e.to_string())?).into_iter().map(|p| p.valuation).collect();
    let families: BTreeMap<u32, SectionSpace<Rational>> = levels.into_iter().enumerate().map(|(m, l)| (m as u32, l)).collect();
    let one = read(&["x"], &["1"]).remove(0);
    let report = gr_ring_check(&families, &valuations, &one, &[(0, 1), (1, 1), (1, 2), (2, 1), (0, 3)], 12)
        .map_err(|e| e.to_string())?;
    ensure(report.multiplicative && report.injective && report.failures.is_empty(), || format!("{:?}", report.failures))?;
    Ok(format!(
        "ranks 1, 3, 5, 7 nested verbatim; gr injective on {} pieces, {} products multiplicative",
        report.pieces_checked, report.products_checked
    ))
}
