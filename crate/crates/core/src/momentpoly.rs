//! Polynomial abstract moment maps on a linear representation `ℂ^d` of `T^n`.
//!
//! `Ψ = Σ β_{k,l} z^k z̄^l` with `β_{k,l} ∈ 𝔤^*`. `Ψ` is a moment map exactly
//! when each `β_{k,l}` lies in the span of the weights `α_i` with
//! `k_i ≠ 0` or `l_i ≠ 0`; then `Ψ = Σ_j (z_j f_j + z̄_j g_j) α_j` for
//! polynomials `f_j, g_j`, and `μ = −√−1 Σ (f_j dz_j − g_j dz̄_j)` is a
//! one-form inducing it.
//!
//! Text grammar: a sum of terms `[c_1, …, c_n] * z1^a * zb2 …` joined by `+`
//! or `-`; the `*` and exponents `^1` are optional, whitespace is ignored,
//! and `0` is the zero polynomial.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::builders::WeightMatrix;
use crate::ratlin::{format_rational, parse_rational, rank, solve, RatMatrix, RatVec, Rational};

/// Exponents `(k, l)` of `z^k z̄^l`.
pub type Monomial = (Vec<u32>, Vec<u32>);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("syntax error at column {column}: {message}")]
    Syntax { column: usize, message: String },
    #[error("coefficient vector at column {column} has length {found}, expected {expected}")]
    Arity { column: usize, expected: usize, found: usize },
    #[error("polynomial has a nonzero constant term")]
    NonzeroConstantTerm,
    #[error("moment condition fails at {}", .0.join(", "))]
    ConditionFailed(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MomentPolynomial {
    pub weights: WeightMatrix,
    /// No zero coefficients are stored.
    pub terms: BTreeMap<Monomial, RatVec>,
}

/// Scalar polynomial in `z, z̄` with rational coefficients.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ScalarPoly {
    pub terms: BTreeMap<Monomial, Rational>,
}

impl ScalarPoly {
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        let e = self.terms.entry(m.clone()).or_default();
        *e += c;
        if e.is_zero() {
            self.terms.remove(&m);
        }
    }
}

/// `f_j, g_j` with `Ψ = Σ_j (z_j f_j + z̄_j g_j) α_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormCoefficients {
    pub f: Vec<ScalarPoly>,
    pub g: Vec<ScalarPoly>,
}

impl FormCoefficients {
    pub fn zero(d: usize) -> Self {
        FormCoefficients { f: vec![ScalarPoly::default(); d], g: vec![ScalarPoly::default(); d] }
    }
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
    d: usize,
    n: usize,
}

impl Parser {
    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, PolyError> {
        Err(PolyError::Syntax { column: self.pos + 1, message: message.into() })
    }

    fn expect(&mut self, c: char) -> Result<(), PolyError> {
        match self.peek() {
            Some(x) if x == c => {
                self.pos += 1;
                Ok(())
            }
            Some(x) => self.err(format!("expected {c:?}, found {x:?}")),
            None => self.err(format!("expected {c:?}, found end of input")),
        }
    }

    fn number(&mut self) -> Result<u32, PolyError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected a number");
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse().or_else(|_| {
            self.pos = start;
            self.err("number out of range")
        })
    }

    fn vector(&mut self) -> Result<RatVec, PolyError> {
        self.skip_ws();
        let column = self.pos + 1;
        self.expect('[')?;
        let mut out = Vec::new();
        loop {
            self.skip_ws();
            let start = self.pos;
            while self.pos < self.chars.len() && matches!(self.chars[self.pos], '0'..='9' | '/' | '-' | '+' | ' ') {
                self.pos += 1;
            }
            let token: String = self.chars[start..self.pos].iter().filter(|c| !c.is_whitespace()).collect();
            match parse_rational(&token) {
                Ok(r) => out.push(r),
                Err(_) => {
                    self.pos = start;
                    return self.err(format!("expected a rational number, found {token:?}"));
                }
            }
            match self.peek() {
                Some(',') => self.pos += 1,
                Some(']') => {
                    self.pos += 1;
                    break;
                }
                Some(x) => return self.err(format!("expected ',' or ']', found {x:?}")),
                None => return self.err("unclosed coefficient vector"),
            }
        }
        if out.len() != self.n {
            return Err(PolyError::Arity { column, expected: self.n, found: out.len() });
        }
        Ok(out)
    }

    fn term(&mut self) -> Result<(Monomial, RatVec), PolyError> {
        let coeff = self.vector()?;
        let mut k = vec![0u32; self.d];
        let mut l = vec![0u32; self.d];
        loop {
            if self.peek() == Some('*') {
                self.pos += 1;
            }
            if self.peek() != Some('z') {
                break;
            }
            self.pos += 1;
            let bar = self.chars.get(self.pos) == Some(&'b');
            if bar {
                self.pos += 1;
            }
            let at = self.pos;
            let i = self.number()? as usize;
            if i == 0 || i > self.d {
                self.pos = at;
                return self.err(format!("variable index {i} outside 1..={}", self.d));
            }
            let e = if self.peek() == Some('^') {
                self.pos += 1;
                self.number()?
            } else {
                1
            };
            let slot = if bar { &mut l[i - 1] } else { &mut k[i - 1] };
            *slot += e;
        }
        Ok(((k, l), coeff))
    }
}

/// Parses the text grammar into a canonical term map.
pub fn parse_poly(text: &str, weights: &WeightMatrix) -> Result<MomentPolynomial, PolyError> {
    let mut p = Parser { chars: text.chars().collect(), pos: 0, d: weights.d(), n: weights.n };
    let mut out = MomentPolynomial { weights: weights.clone(), terms: BTreeMap::new() };
    if p.peek() == Some('0') {
        p.pos += 1;
        if p.peek().is_none() {
            return Ok(out);
        }
        return p.err("unexpected input after 0");
    }
    let mut sign = Rational::one();
    if p.peek() == Some('-') {
        p.pos += 1;
        sign = -sign;
    } else if p.peek() == Some('+') {
        p.pos += 1;
    }
    loop {
        let (m, c) = p.term()?;
        out.add_term(m, c.iter().map(|x| x * &sign).collect());
        match p.peek() {
            None => break,
            Some('+') => sign = Rational::one(),
            Some('-') => sign = -Rational::one(),
            Some(x) => return p.err(format!("expected '+', '-' or end of input, found {x:?}")),
        }
        p.pos += 1;
    }
    Ok(out)
}

fn format_monomial(m: &Monomial) -> String {
    let mut s = String::new();
    for (name, exps) in [("z", &m.0), ("zb", &m.1)] {
        for (i, &e) in exps.iter().enumerate() {
            match e {
                0 => {}
                1 => write!(s, " {name}{}", i + 1).unwrap(),
                _ => write!(s, " {name}{}^{e}", i + 1).unwrap(),
            }
        }
    }
    s
}

fn format_vec(v: &[Rational]) -> String {
    format!("[{}]", v.iter().map(format_rational).collect::<Vec<_>>().join(","))
}

impl MomentPolynomial {
    pub fn zero(weights: WeightMatrix) -> Self {
        MomentPolynomial { weights, terms: BTreeMap::new() }
    }

    pub fn add_term(&mut self, m: Monomial, c: RatVec) {
        let e = self.terms.entry(m.clone()).or_insert_with(|| vec![Rational::zero(); c.len()]);
        for (a, b) in e.iter_mut().zip(c) {
            *a += b;
        }
        if e.iter().all(Zero::is_zero) {
            self.terms.remove(&m);
        }
    }

    /// Text in the parse grammar; `0` for the zero polynomial.
    pub fn to_text(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let parts: Vec<String> =
            self.terms.iter().map(|(m, c)| format!("{}{}", format_vec(c), format_monomial(m))).collect();
        parts.join(" + ")
    }
}

impl ScalarPoly {
    /// Text in the parse grammar with one-entry coefficient vectors.
    pub fn to_text(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let parts: Vec<String> =
            self.terms.iter().map(|(m, c)| format!("{}{}", format_vec(std::slice::from_ref(c)), format_monomial(m))).collect();
        parts.join(" + ")
    }
}

/// Indices `i` with `k_i ≠ 0` or `l_i ≠ 0`.
pub fn support(m: &Monomial) -> Vec<usize> {
    (0..m.0.len()).filter(|&i| m.0[i] != 0 || m.1[i] != 0).collect()
}

fn weight_columns(w: &WeightMatrix, idx: &[usize]) -> RatMatrix {
    let cols: Vec<RatVec> = idx.iter().map(|&i| w.weight_rational(i)).collect();
    RatMatrix::from_cols(w.n, &cols).expect("weight lengths are n")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionReport {
    /// Monomials, as text, whose coefficient leaves the span of their weights.
    pub failing: Vec<String>,
}

impl ConditionReport {
    pub fn passes(&self) -> bool {
        self.failing.is_empty()
    }
}

/// Rank test `β_{k,l} ∈ span{α_i : i ∈ support(k,l)}` for every term.
pub fn check_moment_condition(p: &MomentPolynomial) -> Result<ConditionReport, PolyError> {
    let mut failing = Vec::new();
    for (m, beta) in &p.terms {
        let idx = support(m);
        if idx.is_empty() {
            return Err(PolyError::NonzeroConstantTerm);
        }
        let a = weight_columns(&p.weights, &idx);
        let ab = a.hstack(&RatMatrix::from_cols(p.weights.n, std::slice::from_ref(beta)).expect("length n")).expect("rows agree");
        if rank(&ab) != rank(&a) {
            failing.push(format_monomial(m).trim_start().to_string());
        }
    }
    Ok(ConditionReport { failing })
}

/// Writes `β_{k,l} = Σ λ_i α_i` (smallest-index pivots, free coefficients 0)
/// and moves `λ_i z^k z̄^l / z_i` into `f_i` when `k_i > 0`, otherwise
/// `λ_i z^k z̄^l / z̄_i` into `g_i`.
pub fn decompose(p: &MomentPolynomial) -> Result<FormCoefficients, PolyError> {
    let report = check_moment_condition(p)?;
    if !report.passes() {
        return Err(PolyError::ConditionFailed(report.failing));
    }
    let mut fc = FormCoefficients::zero(p.weights.d());
    for (m, beta) in &p.terms {
        let idx = support(m);
        let lambda = solve(&weight_columns(&p.weights, &idx), beta).expect("shapes agree").expect("condition checked");
        for (&i, l) in idx.iter().zip(lambda) {
            if l.is_zero() {
                continue;
            }
            let (mut k, mut lb) = m.clone();
            if k[i] > 0 {
                k[i] -= 1;
                fc.f[i].add_term((k, lb), l);
            } else {
                lb[i] -= 1;
                fc.g[i].add_term((k, lb), l);
            }
        }
    }
    Ok(fc)
}

/// `Σ_j (z_j f_j + z̄_j g_j) α_j`.
pub fn recombine(weights: &WeightMatrix, fc: &FormCoefficients) -> MomentPolynomial {
    let mut out = MomentPolynomial::zero(weights.clone());
    for j in 0..weights.d() {
        let alpha = weights.weight_rational(j);
        for (poly, conj) in [(&fc.f[j], false), (&fc.g[j], true)] {
            for ((k, l), c) in &poly.terms {
                let (mut k, mut l) = (k.clone(), l.clone());
                if conj {
                    l[j] += 1;
                } else {
                    k[j] += 1;
                }
                out.add_term((k, l), alpha.iter().map(|a| a * c).collect());
            }
        }
    }
    out
}

pub fn verify_decomposition(p: &MomentPolynomial, fc: &FormCoefficients) -> bool {
    fc.f.len() == p.weights.d() && fc.g.len() == p.weights.d() && recombine(&p.weights, fc).terms == p.terms
}

/// `μ = −√−1 Σ (f_j dz_j − g_j dz̄_j)`, omitting zero coefficients.
pub fn render_one_form(fc: &FormCoefficients) -> String {
    let mut parts = Vec::new();
    for j in 0..fc.f.len() {
        if !fc.f[j].is_zero() {
            parts.push(format!("+ ({}) dz{}", fc.f[j].to_text(), j + 1));
        }
        if !fc.g[j].is_zero() {
            parts.push(format!("− ({}) dz̄{}", fc.g[j].to_text(), j + 1));
        }
    }
    if parts.is_empty() {
        return "μ = 0".into();
    }
    let body = parts.join(" ");
    let body = body.strip_prefix("+ ").unwrap_or(&body);
    format!("μ = −√−1 ( {body} )")
}
