use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::arith::TruncatedSeries;
use crate::error::{Error, Result};
use crate::scalar::Field;

/// Largest supported number of torus variables.
pub const MAX_VARS: usize = 8;

/// Exponent of a term: a power of `t` and a Laurent exponent vector.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    pub t_degree: i64,
    pub exponents: Vec<i32>,
}

impl Monomial {
    pub fn new(t_degree: i64, exponents: Vec<i32>) -> Self {
        Monomial {
            t_degree,
            exponents,
        }
    }
}

/// A Laurent polynomial in the torus variables with coefficients in
/// `F((t))`, known modulo terms of `t`-degree `>= precision`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LaurentPoly<F> {
    terms: BTreeMap<Monomial, F>,
    num_vars: usize,
    precision: u32,
}

impl<F: Field> LaurentPoly<F> {
    pub fn zero(num_vars: usize, precision: u32) -> Result<Self> {
        if num_vars > MAX_VARS {
            return Err(Error::InvariantViolation(format!(
                "{num_vars} variables requested, at most {MAX_VARS} supported"
            )));
        }
        if precision == 0 {
            return Err(Error::InvariantViolation(
                "precision must be positive".into(),
            ));
        }
        Ok(LaurentPoly {
            terms: BTreeMap::new(),
            num_vars,
            precision,
        })
    }

    /// `c * t^k * x^exponents`.
    pub fn monomial(c: F, t_degree: i64, exponents: Vec<i32>, precision: u32) -> Result<Self> {
        let mut p = Self::zero(exponents.len(), precision)?;
        p.add_term(Monomial::new(t_degree, exponents), c);
        Ok(p)
    }

    pub fn constant(c: F, num_vars: usize, precision: u32) -> Result<Self> {
        Self::monomial(c, 0, vec![0; num_vars], precision)
    }

    /// Builds a polynomial from explicit terms; repeated monomials add up.
    pub fn from_terms<I>(num_vars: usize, precision: u32, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Monomial, F)>,
    {
        let mut p = Self::zero(num_vars, precision)?;
        for (m, c) in terms {
            if m.exponents.len() != num_vars {
                return Err(Error::VariableMismatch(num_vars, m.exponents.len()));
            }
            p.add_term(m, c);
        }
        Ok(p)
    }

    fn add_term(&mut self, m: Monomial, c: F) {
        if m.t_degree >= self.precision as i64 {
            return;
        }
        let cur = self.terms.remove(&m).unwrap_or_else(F::zero);
        let next = cur + c;
        if !next.is_zero() {
            self.terms.insert(m, next);
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &F)> + '_ {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &Monomial) -> F {
        self.terms.get(m).cloned().unwrap_or_else(F::zero)
    }

    /// Exponent vectors carrying a nonzero coefficient.
    pub fn support(&self) -> BTreeSet<Vec<i32>> {
        self.terms.keys().map(|m| m.exponents.clone()).collect()
    }

    /// Smallest `t`-degree present; `None` when the polynomial vanishes to precision.
    pub fn min_t_degree(&self) -> Option<i64> {
        self.terms.keys().map(|m| m.t_degree).min()
    }

    pub fn max_t_degree(&self) -> Option<i64> {
        self.terms.keys().map(|m| m.t_degree).max()
    }

    fn check_vars(&self, other: &Self) -> Result<()> {
        if self.num_vars != other.num_vars {
            return Err(Error::VariableMismatch(self.num_vars, other.num_vars));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_vars(other)?;
        let precision = self.precision.min(other.precision);
        let mut out = Self::zero(self.num_vars, precision)?;
        for (m, c) in self.terms.iter().chain(other.terms.iter()) {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&-F::one())
    }

    pub fn scale(&self, c: &F) -> Self {
        let mut out = LaurentPoly {
            terms: BTreeMap::new(),
            ..*self
        };
        for (m, a) in &self.terms {
            out.add_term(m.clone(), a.clone() * c.clone());
        }
        out
    }

    /// Exact product, truncated at the smaller precision.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_vars(other)?;
        let precision = self.precision.min(other.precision);
        let mut out = Self::zero(self.num_vars, precision)?;
        for (m1, a) in &self.terms {
            for (m2, b) in &other.terms {
                let exps = m1
                    .exponents
                    .iter()
                    .zip(&m2.exponents)
                    .map(|(x, y)| x + y)
                    .collect();
                out.add_term(
                    Monomial::new(m1.t_degree + m2.t_degree, exps),
                    a.clone() * b.clone(),
                );
            }
        }
        Ok(out)
    }

    /// Multiplication by `t^k`, `k >= 0`; the known range grows by `k`.
    pub fn mul_t_power(&self, k: u32) -> Self {
        LaurentPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| {
                    (
                        Monomial::new(m.t_degree + k as i64, m.exponents.clone()),
                        c.clone(),
                    )
                })
                .collect(),
            num_vars: self.num_vars,
            precision: self.precision + k,
        }
    }

    /// Drops every term of `t`-degree `>= m`.
    pub fn truncate(&self, m: u32) -> Result<Self> {
        if m > self.precision {
            return Err(Error::PrecisionIncrease {
                from: self.precision,
                to: m,
            });
        }
        let mut out = Self::zero(self.num_vars, m)?;
        for (mono, c) in &self.terms {
            out.add_term(mono.clone(), c.clone());
        }
        Ok(out)
    }

    /// Same terms at a different precision (drops terms when lowering).
    pub fn with_precision(&self, m: u32) -> Self {
        let mut out = LaurentPoly {
            terms: BTreeMap::new(),
            num_vars: self.num_vars,
            precision: m,
        };
        for (mono, c) in &self.terms {
            out.add_term(mono.clone(), c.clone());
        }
        out
    }

    /// Multiplies by a power series in `t` whose coefficients are taken as exact.
    pub fn mul_series(&self, a: &TruncatedSeries<F>) -> Self {
        let mut out = LaurentPoly {
            terms: BTreeMap::new(),
            num_vars: self.num_vars,
            precision: self.precision,
        };
        for (k, c) in a.terms() {
            for (m, b) in &self.terms {
                out.add_term(
                    Monomial::new(m.t_degree + k as i64, m.exponents.clone()),
                    c.clone() * b.clone(),
                );
            }
        }
        out
    }

    /// `sum_i coeffs[i] * polys[i]`, coefficients read as exact polynomials in `t`.
    pub fn combination(coeffs: &[TruncatedSeries<F>], polys: &[LaurentPoly<F>]) -> Result<Self> {
        let first = polys
            .first()
            .ok_or_else(|| Error::InvariantViolation("empty combination".into()))?;
        if coeffs.len() != polys.len() {
            return Err(Error::DimensionMismatch {
                expected: polys.len(),
                found: coeffs.len(),
            });
        }
        let precision = polys
            .iter()
            .map(|p| p.precision)
            .min()
            .unwrap_or(first.precision);
        let mut out = Self::zero(first.num_vars, precision)?;
        for (a, p) in coeffs.iter().zip(polys) {
            first.check_vars(p)?;
            for (m, c) in p.mul_series(a).terms {
                out.add_term(m, c);
            }
        }
        Ok(out)
    }

    /// Appends one more variable, placing every term at exponent `e` in it.
    pub fn with_extra_var(&self, e: i32) -> Result<Self> {
        let mut out = Self::zero(self.num_vars + 1, self.precision)?;
        for (m, c) in &self.terms {
            let mut exps = m.exponents.clone();
            exps.push(e);
            out.add_term(Monomial::new(m.t_degree, exps), c.clone());
        }
        Ok(out)
    }

    /// Splits off the last variable: returns the pieces by exponent of that variable.
    pub fn split_last_var(&self) -> BTreeMap<i32, LaurentPoly<F>> {
        let mut out: BTreeMap<i32, LaurentPoly<F>> = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut exps = m.exponents.clone();
            let e = exps.pop().expect("no variable to split");
            out.entry(e)
                .or_insert_with(|| LaurentPoly {
                    terms: BTreeMap::new(),
                    num_vars: self.num_vars - 1,
                    precision: self.precision,
                })
                .add_term(Monomial::new(m.t_degree, exps), c.clone());
        }
        out
    }

    /// Parses `2/3*t^2*x*y^-1 - x + 1`-style input.
    pub fn parse(input: &str, vars: &[String], precision: u32) -> Result<Self> {
        Parser::new(input, vars)?.parse_expr(precision)
    }

    /// Canonical textual form, inverse to [`LaurentPoly::parse`].
    pub fn display_with<'a>(&'a self, vars: &'a [String]) -> impl fmt::Display + 'a {
        Rendered { poly: self, vars }
    }
}

struct Rendered<'a, F> {
    poly: &'a LaurentPoly<F>,
    vars: &'a [String],
}

impl<F: Field> fmt::Display for Rendered<'_, F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.poly.terms.iter().enumerate() {
            let mut factors = Vec::new();
            match m.t_degree {
                0 => {}
                1 => factors.push("t".to_string()),
                k => factors.push(format!("t^{k}")),
            }
            for (name, e) in self.vars.iter().zip(&m.exponents) {
                match e {
                    0 => {}
                    1 => factors.push(name.clone()),
                    e => factors.push(format!("{name}^{e}")),
                }
            }
            let negative = c.clone() < F::zero();
            let magnitude = if negative { -c.clone() } else { c.clone() };
            if i == 0 {
                if negative {
                    write!(f, "-")?;
                }
            } else if negative {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if factors.is_empty() {
                write!(f, "{magnitude}")?;
            } else if magnitude.is_one() {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{magnitude}*{}", factors.join("*"))?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(String),
    Ident(String),
    Plus,
    Minus,
    Star,
    Caret,
    Slash,
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    vars: &'a [String],
}

impl<'a> Parser<'a> {
    fn new(input: &str, vars: &'a [String]) -> Result<Self> {
        let mut tokens = Vec::new();
        let chars: Vec<char> = input.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let ch = chars[i];
            match ch {
                ' ' | '\t' | '\n' => i += 1,
                '+' => {
                    tokens.push(Token::Plus);
                    i += 1
                }
                '-' => {
                    tokens.push(Token::Minus);
                    i += 1
                }
                '*' => {
                    tokens.push(Token::Star);
                    i += 1
                }
                '^' => {
                    tokens.push(Token::Caret);
                    i += 1
                }
                '/' => {
                    tokens.push(Token::Slash);
                    i += 1
                }
                c if c.is_ascii_digit() => {
                    let start = i;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                    tokens.push(Token::Num(chars[start..i].iter().collect()));
                }
                c if c.is_alphabetic() || c == '_' => {
                    let start = i;
                    while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                        i += 1;
                    }
                    tokens.push(Token::Ident(chars[start..i].iter().collect()));
                }
                other => {
                    return Err(Error::Parse(format!(
                        "unexpected character {other:?} in {input:?}"
                    )))
                }
            }
        }
        if vars.iter().any(|v| v == "t") {
            return Err(Error::Parse(
                "variable name `t` is reserved for the uniformizer".into(),
            ));
        }
        Ok(Parser {
            tokens,
            pos: 0,
            vars,
        })
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn parse_expr<F: Field>(&mut self, precision: u32) -> Result<LaurentPoly<F>> {
        let mut out = LaurentPoly::zero(self.vars.len(), precision)?;
        if self.tokens.is_empty() {
            return Err(Error::Parse("empty polynomial".into()));
        }
        let mut first = true;
        while self.peek().is_some() {
            let sign = match self.peek() {
                Some(Token::Plus) => {
                    self.pos += 1;
                    1
                }
                Some(Token::Minus) => {
                    self.pos += 1;
                    -1
                }
                _ if first => 1,
                other => return Err(Error::Parse(format!("expected + or -, found {other:?}"))),
            };
            first = false;
            let (m, c) = self.parse_term::<F>()?;
            out.add_term(m, if sign < 0 { -c } else { c });
        }
        Ok(out)
    }

    fn parse_int(&mut self) -> Result<i64> {
        let neg = if self.peek() == Some(&Token::Minus) {
            self.pos += 1;
            true
        } else {
            false
        };
        match self.next() {
            Some(Token::Num(s)) => {
                let v: i64 = s
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad exponent {s}")))?;
                Ok(if neg { -v } else { v })
            }
            other => Err(Error::Parse(format!(
                "expected integer exponent, found {other:?}"
            ))),
        }
    }

    fn parse_term<F: Field>(&mut self) -> Result<(Monomial, F)> {
        let mut coeff = F::one();
        let mut t_degree = 0i64;
        let mut exps = vec![0i32; self.vars.len()];
        loop {
            match self.next() {
                Some(Token::Num(p)) => {
                    let p: i64 = p
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad number {p}")))?;
                    let mut value = F::from_int(p);
                    if self.peek() == Some(&Token::Slash) {
                        self.pos += 1;
                        match self.next() {
                            Some(Token::Num(q)) => {
                                let q: i64 = q
                                    .parse()
                                    .map_err(|_| Error::Parse(format!("bad number {q}")))?;
                                if q == 0 {
                                    return Err(Error::Parse("zero denominator".into()));
                                }
                                value = value / F::from_int(q);
                            }
                            other => {
                                return Err(Error::Parse(format!(
                                    "expected denominator, found {other:?}"
                                )))
                            }
                        }
                    }
                    coeff = coeff * value;
                }
                Some(Token::Ident(name)) => {
                    let e = if self.peek() == Some(&Token::Caret) {
                        self.pos += 1;
                        self.parse_int()?
                    } else {
                        1
                    };
                    if name == "t" {
                        t_degree += e;
                    } else if let Some(idx) = self.vars.iter().position(|v| *v == name) {
                        exps[idx] += i32::try_from(e)
                            .map_err(|_| Error::Parse("exponent too large".into()))?;
                    } else {
                        return Err(Error::Parse(format!("unknown variable {name}")));
                    }
                }
                other => return Err(Error::Parse(format!("expected factor, found {other:?}"))),
            }
            if self.peek() == Some(&Token::Star) {
                self.pos += 1;
            } else {
                break;
            }
        }
        Ok((Monomial::new(t_degree, exps), coeff))
    }
}

/// Parser bound to a fixed variable list, for `str::parse`-style use in tests.
pub struct PolyReader {
    pub vars: Vec<String>,
    pub precision: u32,
}

impl PolyReader {
    pub fn new(vars: &[&str], precision: u32) -> Self {
        PolyReader {
            vars: vars.iter().map(|s| s.to_string()).collect(),
            precision,
        }
    }

    pub fn read<F: Field>(&self, s: &str) -> Result<LaurentPoly<F>> {
        LaurentPoly::parse(s, &self.vars, self.precision)
    }
}
