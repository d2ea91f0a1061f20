use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::arith::{Monomial, TruncatedSeries};
use crate::error::{Error, Result};
use crate::lindvr::{DvrFiltration, ModVector, Submodule};
use crate::linfield::nullspace;
use crate::scalar::{rat, Field};
use crate::valuation::{MonomialValuation, SectionSpace};
use crate::Rational;

/// `F^lambda = {a in R^N : v(sum a_i s_i) >= lambda}` as a filtration of the
/// coordinate module.
///
/// A coefficient `a_ij t^j` of `s_i` only matters while `j + v(s_i) < lambda`,
/// so `F^lambda` is cut out by finitely many linear conditions on those `a_ij`
/// together with `t^{ceil(lambda - v(s_i))} e_i`. Values are scanned on the
/// grid `(1/d) Z` spanned by the term values until `F^lambda ⊆ tR^N`; beyond
/// that point `F^{mu} = t F^{mu-1}` because `v(t a) = v(a) + 1`.
pub fn induced_filtration<F: Field>(v: &MonomialValuation, space: &SectionSpace<F>) -> Result<DvrFiltration<F>> {
    if v.num_vars() != space.num_vars() {
        return Err(Error::VariableMismatch(space.num_vars(), v.num_vars()));
    }
    let n = space.rank();
    let values: Vec<Rational> = space
        .sections()
        .iter()
        .map(|s| v.eval(s).expect("sections are nonzero"))
        .collect();
    let support_values: Vec<Rational> = space.support().iter().map(|b| v.term_value(0, b)).collect();
    let d = support_values.iter().fold(1u64, |acc, x| rat::lcm(acc, rat::denom_u64(x)));
    let step = rat::frac(1, d as i64);
    let lo = values.iter().min().expect("nonempty").clone();
    let inside_t = Submodule::t_power(n, 1);
    // Values at lo + k/d up to the last grid point before F^lambda ⊆ tR^N.
    let mut values_on_grid = vec![(lo.clone(), Submodule::full(n))];
    let mut lambda = lo.clone();
    loop {
        lambda = &lambda + &step;
        let w = step_at(v, space, &values, &support_values, &lambda)?;
        if inside_t.contains_submodule(&w) {
            break;
        }
        values_on_grid.push((lambda.clone(), w));
    }
    // F is constant on (lambda_{j-1}, lambda_j]; keep the right endpoints.
    let mut steps = vec![(lo, Submodule::full(n))];
    let last = values_on_grid.len() - 1;
    for k in 1..=last {
        if k == last || values_on_grid[k].1 != values_on_grid[k + 1].1 {
            steps.push(values_on_grid[k].clone());
        }
    }
    DvrFiltration::from_steps(n, steps)
}

/// One filtration per valuation, computed in parallel.
pub fn induced_filtrations<F: Field>(vs: &[MonomialValuation], space: &SectionSpace<F>) -> Result<Vec<DvrFiltration<F>>> {
    vs.par_iter().map(|v| induced_filtration(v, space)).collect()
}

fn step_at<F: Field>(
    v: &MonomialValuation,
    space: &SectionSpace<F>,
    values: &[Rational],
    support_values: &[Rational],
    lambda: &Rational,
) -> Result<Submodule<F>> {
    let p = space.precision();
    if let Some(w) = support_values.iter().min() {
        if lambda - w > rat::int(p as i64) {
            return Err(Error::PrecisionExhausted(format!(
                "v >= {lambda} needs coefficients beyond t^{p}"
            )));
        }
    }
    let n = space.rank();
    let free: Vec<u32> = values.iter().map(|x| rat::ceil_nonneg(&(lambda - x))).collect();
    let top = free.iter().copied().max().unwrap_or(0);
    if top == 0 {
        return Ok(Submodule::full(n));
    }
    let offsets: Vec<usize> = free.iter().scan(0usize, |acc, &m| {
        let o = *acc;
        *acc += m as usize;
        Some(o)
    }).collect();
    let unknowns = free.iter().map(|&m| m as usize).sum::<usize>();
    let mut equations: BTreeMap<Monomial, Vec<F>> = BTreeMap::new();
    for (i, s) in space.sections().iter().enumerate() {
        for (m, c) in s.terms() {
            let base = v.term_value(m.t_degree, &m.exponents);
            for j in 0..free[i] {
                if &base + rat::int(j as i64) >= *lambda {
                    break;
                }
                let key = Monomial::new(m.t_degree + j as i64, m.exponents.clone());
                let row = equations.entry(key).or_insert_with(|| vec![F::zero(); unknowns]);
                let col = offsets[i] + j as usize;
                row[col] = row[col].clone() + c.clone();
            }
        }
    }
    let rows: Vec<Vec<F>> = equations.into_values().collect();
    let mut gens: Vec<ModVector<F>> = nullspace(&rows, unknowns)
        .into_iter()
        .map(|a| {
            (0..n)
                .map(|i| {
                    let coeffs = (0..free[i]).map(|j| (j, a[offsets[i] + j as usize].clone()));
                    TruncatedSeries::from_terms(coeffs, top + 1)
                })
                .collect()
        })
        .collect();
    for (i, &m) in free.iter().enumerate() {
        gens.push((0..n).map(|k| if k == i { TruncatedSeries::t_power(m, top + 1) } else { TruncatedSeries::zero(top + 1) }).collect());
    }
    Submodule::hermite_form_with_floor(n, &gens, top)
}
