//! Model files: one declarative document describing a skeleton, the level
//! section spaces and optional explicit filtrations.
//!
//! JSON is canonical; TOML with the same fields is accepted. Every rational
//! is a string (`"3"`, `"-2/5"`), every polynomial a string in the declared
//! variables and `t`.

use std::collections::BTreeMap;
use std::path::Path;

use reesdiag_core::arith::{LaurentPoly, Monomial, TruncatedSeries};
use reesdiag_core::lindvr::{DvrFiltration, ModVector};
use reesdiag_core::scalar::rat;
use reesdiag_core::skeleton::SkeletonComplex;
use reesdiag_core::valuation::{DivisorData, SectionSpace};
use reesdiag_core::{Laurent, Rational, Series};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Supported value of the `spec` field.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spec: Option<u32>,
    pub variables: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision: Option<u32>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub divisors: Vec<DivisorSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub simplices: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub levels: Vec<LevelSpec>,
    /// The designated section for the graded-ring check; defaults to `1`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unit: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub filtrations: Vec<FiltrationSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metadata: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DivisorSpec {
    pub label: String,
    pub weights: Vec<String>,
    pub multiplicity: i64,
    #[serde(default = "zero_string")]
    pub log_discrepancy: String,
}

fn zero_string() -> String {
    "0".into()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelSpec {
    pub sections: Vec<String>,
    /// Rows of an integer matrix; the weight of `x^beta` is `G beta`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grading: Option<Vec<Vec<i64>>>,
}

/// A filtration given by a basis of `R^n` (rows, entries polynomials in `t`)
/// and the order of each basis vector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiltrationSpec {
    pub basis: Vec<Vec<String>>,
    pub ords: Vec<String>,
}

/// A validated model.
#[derive(Debug, Clone)]
pub struct Model {
    pub file: ModelFile,
    pub precision: u32,
    pub complex: Option<SkeletonComplex>,
    pub levels: Vec<SectionSpace<Rational>>,
    pub filtrations: Vec<DvrFiltration<Rational>>,
    pub unit: Laurent,
}

impl ModelFile {
    /// Reads JSON, or TOML when the extension is `.toml`.
    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        if path.extension().is_some_and(|e| e == "toml") {
            Self::from_toml(&text)
        } else {
            Self::from_json(&text)
        }
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
    }

    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
    }

    /// Canonical JSON form.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes") + "\n"
    }

    pub fn validate(self) -> Result<Model, CliError> {
        match self.spec {
            Some(SCHEMA_VERSION) => {}
            Some(v) => return Err(CliError::SchemaVersion(format!("spec = {v} is not supported (expected {SCHEMA_VERSION})"))),
            None => return Err(CliError::SchemaVersion("missing field `spec`".into())),
        }
        let precision = self
            .precision
            .ok_or_else(|| CliError::SchemaVersion("missing field `precision`; no default is assumed".into()))?;
        if precision == 0 {
            return Err(invalid("precision", "must be positive"));
        }
        let n = self.variables.len();
        let complex = if self.divisors.is_empty() {
            None
        } else {
            let mut ds = Vec::with_capacity(self.divisors.len());
            for (i, d) in self.divisors.iter().enumerate() {
                let field = format!("divisors[{i}] ({})", d.label);
                if d.multiplicity < 1 {
                    return Err(invalid(&field, &format!("multiplicity {} must be positive", d.multiplicity)));
                }
                if d.weights.len() != n {
                    return Err(invalid(&field, &format!("{} weights for {n} variables", d.weights.len())));
                }
                let weights = d.weights.iter().map(|w| rational(&field, w)).collect::<Result<_, _>>()?;
                let a = rational(&field, &d.log_discrepancy)?;
                let dd = DivisorData::new(d.label.clone(), weights, d.multiplicity as u32, a)
                    .map_err(|e| invalid(&field, &e.to_string()))?;
                ds.push(dd);
            }
            Some(SkeletonComplex::new(ds, self.simplices.clone()).map_err(|e| invalid("simplices", &e.to_string()))?)
        };
        let levels = self
            .levels
            .iter()
            .enumerate()
            .map(|(m, l)| {
                let field = format!("levels[{m}]");
                let sections = l
                    .sections
                    .iter()
                    .map(|s| LaurentPoly::parse(s, &self.variables, precision).map_err(|e| invalid(&field, &e.to_string())))
                    .collect::<Result<Vec<Laurent>, _>>()?;
                let space = SectionSpace::new(sections).map_err(|e| invalid(&field, &e.to_string()))?;
                match &l.grading {
                    Some(g) => space.with_grading(g.clone()).map_err(|e| invalid(&field, &e.to_string())),
                    None => Ok(space),
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        let filtrations = self
            .filtrations
            .iter()
            .enumerate()
            .map(|(j, f)| {
                let field = format!("filtrations[{j}]");
                let basis = f
                    .basis
                    .iter()
                    .map(|row| row.iter().map(|x| series(&field, x, precision)).collect::<Result<ModVector<_>, _>>())
                    .collect::<Result<Vec<_>, _>>()?;
                let ords = f.ords.iter().map(|o| rational(&field, o)).collect::<Result<Vec<_>, _>>()?;
                DvrFiltration::from_diagonal(&basis, &ords).map_err(|e| invalid(&field, &e.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let unit = LaurentPoly::parse(self.unit.as_deref().unwrap_or("1"), &self.variables, precision)
            .map_err(|e| invalid("unit", &e.to_string()))?;
        Ok(Model { file: self, precision, complex, levels, filtrations, unit })
    }
}

fn invalid(field: &str, msg: &str) -> CliError {
    CliError::Invariant(format!("{field}: {msg}"))
}

fn rational(field: &str, s: &str) -> Result<Rational, CliError> {
    rat::parse(s).ok_or_else(|| CliError::Parse(format!("{field}: `{s}` is not a rational")))
}

fn series(field: &str, s: &str, precision: u32) -> Result<Series, CliError> {
    let p: Laurent = LaurentPoly::parse(s, &[], precision).map_err(|e| invalid(field, &e.to_string()))?;
    let mut terms = Vec::new();
    for (m, c) in p.terms() {
        let k = u32::try_from(m.t_degree).map_err(|_| invalid(field, &format!("`{s}` has a negative power of t")))?;
        terms.push((k, c.clone()));
    }
    Ok(TruncatedSeries::from_terms(terms, precision))
}

/// Renders a series as an exact polynomial in `t`, parseable back.
pub fn series_str(s: &Series) -> String {
    let p = LaurentPoly::from_terms(0, s.precision(), s.terms().map(|(k, c)| (Monomial::new(k as i64, vec![]), c.clone())))
        .expect("zero variables");
    let rendered = p.display_with(&[]).to_string();
    rendered
}

impl Model {
    pub fn complex(&self) -> Result<&SkeletonComplex, CliError> {
        self.complex.as_ref().ok_or_else(|| CliError::Invariant("model declares no divisors".into()))
    }

    /// Level `m`, or the last one.
    pub fn level(&self, m: Option<usize>) -> Result<(usize, &SectionSpace<Rational>), CliError> {
        let m = match m {
            Some(m) => m,
            None => self.levels.len().checked_sub(1).ok_or_else(|| CliError::Invariant("model declares no levels".into()))?,
        };
        let l = self.levels.get(m).ok_or_else(|| CliError::Invariant(format!("no level {m}")))?;
        Ok((m, l))
    }

    pub fn vars(&self) -> &[String] {
        &self.file.variables
    }
}
