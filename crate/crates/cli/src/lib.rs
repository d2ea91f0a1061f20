//! Command-line front end: model ingestion, dispatch to the core pipeline and
//! canonical JSON / SVG output.

pub mod model;
pub mod plot;

use std::collections::BTreeMap;

use reesdiag_core::lindvr::{
    diagonalize_dvr, diagonalize_mod, dvr_graded_table, lift_chain, verify_span_identities, DiagonalizeOptions,
    DvrDiagonalization, DvrFiltration, DvrGradedTable, ModVector,
};
use reesdiag_core::skeleton::{refine, subdivision_vertices, SkeletonComplex, SkeletonPoint};
use reesdiag_core::theta::{
    check_independence, cone_assemble, cone_construct, cone_extract, construct_basis, extend_basis, gr_ring_check,
    tropicalize, ConeSpace, Construction, Probe, ThetaBasis, TropicalFunction, Verdict,
};
use reesdiag_core::valuation::{induced_filtrations, MonomialValuation, SectionSpace};
use reesdiag_core::{Error, Laurent, Rational};
use serde_json::{json, Value};

use crate::model::{series_str, Model};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unsupported schema: {0}")]
    SchemaVersion(String),
    #[error("invalid model: {0}")]
    Invariant(String),
    #[error("cannot plot a skeleton of dimension {0} as SVG; use --format json")]
    UnsupportedDimension(usize),
    #[error("{0}")]
    Usage(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error(transparent)]
    Core(#[from] Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Command {
    Grdim,
    Diagonalize,
    Tropicalize,
    Refine,
    Check,
    Construct,
    Extend,
    Lift,
    Cone,
    GrRing,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Grdim => "grdim",
            Command::Diagonalize => "diagonalize",
            Command::Tropicalize => "tropicalize",
            Command::Refine => "refine",
            Command::Check => "check",
            Command::Construct => "construct",
            Command::Extend => "extend",
            Command::Lift => "lift",
            Command::Cone => "cone",
            Command::GrRing => "gr-ring",
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Options {
    pub level: Option<usize>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    Obstruction,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Success => 0,
            Outcome::Obstruction => 2,
        }
    }
}

/// Result of one command. Contains no timing, so equal inputs give
/// byte-identical output.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub command: Command,
    pub outcome: Outcome,
    pub body: Value,
    /// Tropicalizations of the sections the command produced, for plotting.
    pub trop: Vec<(String, TropicalFunction<Rational>)>,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        let verdict = match self.outcome {
            Outcome::Success => "success",
            Outcome::Obstruction => "obstruction",
        };
        let mut doc = json!({"command": self.command.name(), "verdict": verdict, "result": self.body});
        if !self.trop.is_empty() {
            doc["trop"] = self.trop.iter().map(|(label, f)| trop_json(label, f)).collect();
        }
        serde_json::to_string_pretty(&doc).expect("report serializes") + "\n"
    }
}

pub fn run(command: Command, model: &Model, options: Options) -> Result<RunReport, CliError> {
    let mut trop = Vec::new();
    let (outcome, body) = match command {
        Command::Grdim => {
            let (fs, probes) = filtrations(model, options.level)?;
            let table = dvr_graded_table(&fs)?;
            let rank = fs[0].rank();
            let diagonalizable = if table.complete {
                table.total_dim() == rank
            } else {
                matches!(diagonalize_dvr(&fs, DiagonalizeOptions::default())?, DvrDiagonalization::Diagonal(_))
            };
            let body = json!({
                "rank": rank,
                "total": table.total_dim(),
                "diagonalizable": diagonalizable,
                "probes": probes,
                "table": table_json(&table),
            });
            (Outcome::Success, body)
        }
        Command::Diagonalize => {
            let (fs, probes) = filtrations(model, options.level)?;
            match diagonalize_dvr(&fs, DiagonalizeOptions { seed: options.seed })? {
                DvrDiagonalization::Diagonal(b) => (
                    Outcome::Success,
                    json!({"probes": probes, "basis": vectors_json(&b.vectors), "ords": ords_json(&b.ords)}),
                ),
                DvrDiagonalization::Obstruction(t) => {
                    (Outcome::Obstruction, json!({"probes": probes, "obstruction": table_json(&t)}))
                }
            }
        }
        Command::Tropicalize => {
            let k = model.complex()?;
            let (m, space) = model.level(options.level)?;
            trop = trop_of(model, space.sections(), k)?;
            (Outcome::Success, json!({"level": m}))
        }
        Command::Refine => {
            let k = model.complex()?;
            let (m, space) = model.level(options.level)?;
            let sub = refine(k, space)?;
            let cells: Vec<Value> = sub
                .cells
                .iter()
                .map(|c| {
                    json!({
                        "simplex": c.simplex,
                        "vertices": c.polytope.vertices().iter().map(|v| rats(v)).collect::<Vec<_>>(),
                        "forms": c.forms.iter().map(|f| rats(f)).collect::<Vec<_>>(),
                    })
                })
                .collect();
            let vertices: Vec<Value> = subdivision_vertices(k, &sub).iter().map(point_json).collect();
            (Outcome::Success, json!({"level": m, "cells": cells, "vertices": vertices}))
        }
        Command::Check => {
            let k = model.complex()?;
            let (m, space) = model.level(options.level)?;
            match check_independence(space.sections(), k, None)? {
                Verdict::Independent(b) => {
                    trop = trop_of(model, &b.sections, k)?;
                    (Outcome::Success, json!({"level": m, "independent": true, "basis": basis_json(model, &b)}))
                }
                Verdict::Dependent(c) => {
                    let body = json!({
                        "level": m,
                        "independent": false,
                        "counterexample": {
                            "probe": probe_json(&c.probe),
                            "coefficients": c.coefficients.iter().map(series_str).collect::<Vec<_>>(),
                            "value": c.value.to_string(),
                            "min_of_terms": c.min_of_terms.to_string(),
                        },
                    });
                    (Outcome::Obstruction, body)
                }
            }
        }
        Command::Construct => {
            let k = model.complex()?;
            let (m, space) = model.level(options.level)?;
            match construct_basis(space, k, options.seed)? {
                Construction::Basis(b) => {
                    trop = trop_of(model, &b.sections, k)?;
                    (Outcome::Success, json!({"level": m, "basis": basis_json(model, &b)}))
                }
                Construction::Obstruction { probes, table } => (
                    Outcome::Obstruction,
                    json!({
                        "level": m,
                        "probes": probes.iter().map(probe_json).collect::<Vec<_>>(),
                        "obstruction": table_json(&table),
                    }),
                ),
            }
        }
        Command::Extend => extend(model, options)?,
        Command::Lift => lift(model, options)?,
        Command::Cone => cone(model, options)?,
        Command::GrRing => gr_ring(model, options)?,
    };
    Ok(RunReport { command, outcome, body, trop })
}

fn extend(model: &Model, options: Options) -> Result<(Outcome, Value), CliError> {
    let k = model.complex()?;
    let (top, _) = model.level(options.level)?;
    let first = match construct_basis(&model.levels[0], k, options.seed)? {
        Construction::Basis(b) => b,
        Construction::Obstruction { table, .. } => {
            return Ok((Outcome::Obstruction, json!({"level": 0, "obstruction": table_json(&table)})))
        }
    };
    let mut steps = vec![json!({"level": 0, "sections": sections_json(model, &first.sections)})];
    let mut current = first;
    for m in 1..=top {
        let next = extend_basis(&current, &model.levels[m], k, options.seed)?;
        let nested = next.sections[..current.sections.len()] == current.sections[..];
        steps.push(json!({"level": m, "sections": sections_json(model, &next.sections), "contains_previous": nested}));
        current = next;
    }
    Ok((Outcome::Success, json!({"steps": steps})))
}

fn lift(model: &Model, options: Options) -> Result<(Outcome, Value), CliError> {
    let (fs, probes) = filtrations(model, options.level)?;
    let target = model.precision;
    let oracle = |i: u32| diagonalize_mod(&fs, i, options.seed);
    let b = match lift_chain(oracle, target) {
        Ok(b) => b,
        Err(Error::NotDiagonalizableMod { level }) => {
            return Ok((Outcome::Obstruction, json!({"probes": probes, "obstructed_at_level": level})))
        }
        Err(e) => return Err(e.into()),
    };
    let mut verified = Vec::new();
    for i in 1..=target {
        let t = b.truncate(i)?;
        if !verify_span_identities(&t.vectors, &fs, Some(i))? {
            return Err(CliError::Core(Error::InvariantViolation(format!("lifted basis fails at level {i}"))));
        }
        verified.push(i);
    }
    Ok((
        Outcome::Success,
        json!({
            "probes": probes,
            "level": b.level,
            "basis": vectors_json(&b.vectors),
            "ords": ords_json(&b.ords),
            "verified_levels": verified,
        }),
    ))
}

fn cone(model: &Model, options: Options) -> Result<(Outcome, Value), CliError> {
    let k = model.complex()?;
    let cone = cone_assemble(model.levels.clone())?;
    let b = match cone_construct(&cone, k, options.seed)? {
        Construction::Basis(b) => b,
        Construction::Obstruction { table, .. } => {
            return Ok((Outcome::Obstruction, json!({"obstruction": table_json(&table)})))
        }
    };
    let mut cone_vars = model.vars().to_vec();
    cone_vars.push("y".into());
    let sections: Vec<Value> = b
        .sections
        .iter()
        .map(|s| {
            json!({
                "section": s.display_with(&cone_vars).to_string(),
                "ord_0": ConeSpace::ord_0(s),
                "ord_D": ConeSpace::ord_d(s),
            })
        })
        .collect();
    let mut levels = Vec::new();
    for m in 0..model.levels.len() {
        let e = cone_extract(&b, &cone, m, k)?;
        levels.push(json!({"level": m, "sections": sections_json(model, &e.sections)}));
    }
    Ok((Outcome::Success, json!({"sections": sections, "levels": levels})))
}

fn gr_ring(model: &Model, options: Options) -> Result<(Outcome, Value), CliError> {
    let k = model.complex()?;
    let (top, space) = model.level(None)?;
    let valuations: Vec<MonomialValuation> =
        subdivision_vertices(k, &refine(k, space)?).into_iter().map(|p| p.valuation).collect();
    let families: BTreeMap<u32, SectionSpace<Rational>> =
        model.levels.iter().enumerate().map(|(m, l)| (m as u32, l.clone())).collect();
    let top = top as u32;
    let mut samples = Vec::new();
    for a in 0..=top {
        for b in 0..=top - a {
            samples.push((a, b));
        }
    }
    let r = gr_ring_check(&families, &valuations, &model.unit, &samples, options.seed.unwrap_or(0))?;
    let outcome = if r.multiplicative && r.injective { Outcome::Success } else { Outcome::Obstruction };
    let body = json!({
        "multiplicative": r.multiplicative,
        "injective": r.injective,
        "reduced": r.reduced,
        "products_checked": r.products_checked,
        "pieces_checked": r.pieces_checked,
        "failures": r.failures,
        "warnings": r.warnings,
    });
    Ok((outcome, body))
}

/// Explicit filtrations of the model, or those induced on level `m` at the
/// refinement vertices; returned with probe labels.
fn filtrations(model: &Model, m: Option<usize>) -> Result<(Vec<DvrFiltration<Rational>>, Vec<String>), CliError> {
    if !model.filtrations.is_empty() {
        let labels = (0..model.filtrations.len()).map(|j| format!("filtrations[{j}]")).collect();
        return Ok((model.filtrations.clone(), labels));
    }
    let k = model.complex()?;
    let (_, space) = model.level(m)?;
    let points = subdivision_vertices(k, &refine(k, space)?);
    let vs: Vec<MonomialValuation> = points.iter().map(|p| p.valuation.clone()).collect();
    let labels = points.into_iter().map(|p| Probe::at(p).label).collect();
    Ok((induced_filtrations(&vs, space)?, labels))
}

fn trop_of(
    model: &Model,
    sections: &[Laurent],
    k: &SkeletonComplex,
) -> Result<Vec<(String, TropicalFunction<Rational>)>, CliError> {
    sections.iter().map(|s| Ok((poly(model, s), tropicalize(s, k)?))).collect()
}

fn poly(model: &Model, s: &Laurent) -> String {
    s.display_with(model.vars()).to_string()
}

fn rats(v: &[Rational]) -> Vec<String> {
    v.iter().map(|q| q.to_string()).collect()
}

fn ords_json(ords: &[Vec<Rational>]) -> Vec<Vec<String>> {
    ords.iter().map(|o| rats(o)).collect()
}

fn vectors_json(vs: &[ModVector<Rational>]) -> Vec<Vec<String>> {
    vs.iter().map(|v| v.iter().map(series_str).collect()).collect()
}

fn sections_json(model: &Model, ss: &[Laurent]) -> Vec<String> {
    ss.iter().map(|s| poly(model, s)).collect()
}

fn table_json<F: reesdiag_core::Field>(t: &DvrGradedTable<F>) -> Value {
    let pieces: Vec<Value> =
        t.entries.iter().map(|(l, p)| json!({"index": rats(l), "dim": p.dim})).collect();
    json!({"total": t.total_dim(), "complete": t.complete, "pieces": pieces})
}

fn point_json(p: &SkeletonPoint) -> Value {
    json!({"simplex": p.simplex, "mu": rats(&p.mu), "weights": rats(p.valuation.weights())})
}

fn probe_json(p: &Probe) -> Value {
    json!({"label": p.label, "weights": rats(p.valuation.weights())})
}

fn basis_json(model: &Model, b: &ThetaBasis<Rational>) -> Value {
    json!({
        "sections": sections_json(model, &b.sections),
        "probes": b.probes.iter().map(probe_json).collect::<Vec<_>>(),
        "ord_vectors": ords_json(&b.ord_vectors),
        "certificate": {
            "denominator": b.certificate.denominator,
            "verified_at": b.certificate.verified_at,
        },
    })
}

fn trop_json(label: &str, f: &TropicalFunction<Rational>) -> Value {
    let cells: Vec<Value> = f
        .cells()
        .iter()
        .map(|c| {
            let (slope, offset) = c.slope_offset();
            json!({
                "simplex": c.simplex,
                "vertices": c.polytope.vertices().iter().map(|v| rats(v)).collect::<Vec<_>>(),
                "slope": rats(&slope),
                "offset": offset.to_string(),
            })
        })
        .collect();
    json!({"section": label, "cells": cells})
}
