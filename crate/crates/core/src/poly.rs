//! Exact multivariate polynomials over the rationals in the trace variables `t{S}`.
//!
//! Terms live in a `BTreeMap` keyed by [`Monomial`], whose `Ord` is graded
//! reverse lexicographic under the default variable ranking. Other orders are
//! applied on demand through [`MonomialOrder`].

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("trace variable needs 1 to 3 strictly increasing positive indices, got {0:?}")]
    BadVariable(Vec<u32>),
    #[error("primitive part of the zero polynomial")]
    ZeroPolynomial,
    #[error("no value assigned to {0}")]
    MissingAssignment(TraceVariable),
    #[error("cannot parse polynomial at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

/// The symbol `t{S}` standing for the trace of `X_{s1}...X_{sk}`, `S` sorted, `|S| <= 3`.
///
/// The derived `Ord` is the default ranking: shorter index tuples rank lower,
/// ties broken lexicographically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TraceVariable {
    len: u8,
    idx: [u32; 3],
}

impl TraceVariable {
    pub fn new(indices: &[u32]) -> Result<Self, PolyError> {
        let ok = (1..=3).contains(&indices.len())
            && indices[0] > 0
            && indices.windows(2).all(|p| p[0] < p[1]);
        if !ok {
            return Err(PolyError::BadVariable(indices.to_vec()));
        }
        let mut idx = [0; 3];
        idx[..indices.len()].copy_from_slice(indices);
        Ok(TraceVariable {
            len: indices.len() as u8,
            idx,
        })
    }

    pub fn single(i: u32) -> Self {
        TraceVariable::new(&[i]).expect("positive index")
    }

    pub fn pair(i: u32, j: u32) -> Self {
        TraceVariable::new(&[i, j]).expect("increasing pair")
    }

    pub fn triple(i: u32, j: u32, k: u32) -> Self {
        TraceVariable::new(&[i, j, k]).expect("increasing triple")
    }

    pub fn indices(&self) -> &[u32] {
        &self.idx[..self.len as usize]
    }

    pub fn max_index(&self) -> u32 {
        self.idx[self.len as usize - 1]
    }
}

impl fmt::Display for TraceVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t{{")?;
        for (k, i) in self.indices().iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

/// A power product of trace variables; exponents are stored sparsely and never zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    // sorted ascending by variable
    factors: Vec<(TraceVariable, u32)>,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn var(v: TraceVariable) -> Self {
        Monomial {
            factors: vec![(v, 1)],
        }
    }

    /// Builds a monomial from `(variable, exponent)` pairs in any order; zero
    /// exponents are dropped and repeated variables accumulate.
    pub fn from_pairs<I: IntoIterator<Item = (TraceVariable, u32)>>(pairs: I) -> Self {
        let mut map: BTreeMap<TraceVariable, u32> = BTreeMap::new();
        for (v, e) in pairs {
            *map.entry(v).or_insert(0) += e;
        }
        Monomial {
            factors: map.into_iter().filter(|&(_, e)| e > 0).collect(),
        }
    }

    pub fn factors(&self) -> &[(TraceVariable, u32)] {
        &self.factors
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.factors.iter().map(|&(_, e)| e).sum()
    }

    pub fn exponent(&self, v: &TraceVariable) -> u32 {
        self.factors
            .binary_search_by(|(w, _)| w.cmp(v))
            .map(|k| self.factors[k].1)
            .unwrap_or(0)
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.factors.iter().all(|(v, e)| other.exponent(v) >= *e)
    }

    fn merge<F: Fn(u32, u32) -> u32>(&self, other: &Monomial, f: F) -> Monomial {
        let mut out = Vec::with_capacity(self.factors.len() + other.factors.len());
        let (mut i, mut j) = (0, 0);
        while i < self.factors.len() || j < other.factors.len() {
            let (v, e) = match (self.factors.get(i), other.factors.get(j)) {
                (Some(&(a, ea)), Some(&(b, eb))) => match a.cmp(&b) {
                    Ordering::Less => {
                        i += 1;
                        (a, f(ea, 0))
                    }
                    Ordering::Greater => {
                        j += 1;
                        (b, f(0, eb))
                    }
                    Ordering::Equal => {
                        i += 1;
                        j += 1;
                        (a, f(ea, eb))
                    }
                },
                (Some(&(a, ea)), None) => {
                    i += 1;
                    (a, f(ea, 0))
                }
                (None, Some(&(b, eb))) => {
                    j += 1;
                    (b, f(0, eb))
                }
                (None, None) => unreachable!(),
            };
            if e > 0 {
                out.push((v, e));
            }
        }
        Monomial { factors: out }
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        self.merge(other, |a, b| a + b)
    }

    /// `self / other`, or `None` if `other` does not divide `self`.
    pub fn checked_div(&self, other: &Monomial) -> Option<Monomial> {
        other.divides(self).then(|| self.merge(other, |a, b| a - b))
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        self.merge(other, u32::max)
    }

    pub fn variables(&self) -> impl Iterator<Item = TraceVariable> + '_ {
        self.factors.iter().map(|&(v, _)| v)
    }

    fn evaluate(
        &self,
        assignment: &HashMap<TraceVariable, Complex64>,
    ) -> Result<Complex64, PolyError> {
        let mut acc = Complex64::new(1.0, 0.0);
        for &(v, e) in &self.factors {
            let x = assignment.get(&v).ok_or(PolyError::MissingAssignment(v))?;
            acc *= x.powu(e);
        }
        Ok(acc)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        grevlex_default(self, other)
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        for (k, (v, e)) in self.factors.iter().enumerate() {
            if k > 0 {
                write!(f, "*")?;
            }
            if *e == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}^{e}")?;
            }
        }
        Ok(())
    }
}

fn grevlex_default(a: &Monomial, b: &Monomial) -> Ordering {
    match a.degree().cmp(&b.degree()) {
        Ordering::Equal => {}
        o => return o,
    }
    // scan from the lowest-ranked variable upward
    let (mut i, mut j) = (0, 0);
    while i < a.factors.len() || j < b.factors.len() {
        let (ea, eb) = match (a.factors.get(i), b.factors.get(j)) {
            (Some(&(va, ea)), Some(&(vb, eb))) => match va.cmp(&vb) {
                Ordering::Less => {
                    i += 1;
                    (ea, 0)
                }
                Ordering::Greater => {
                    j += 1;
                    (0, eb)
                }
                Ordering::Equal => {
                    i += 1;
                    j += 1;
                    (ea, eb)
                }
            },
            (Some(&(_, ea)), None) => {
                i += 1;
                (ea, 0)
            }
            (None, Some(&(_, eb))) => {
                j += 1;
                (0, eb)
            }
            (None, None) => unreachable!(),
        };
        if ea != eb {
            return eb.cmp(&ea);
        }
    }
    Ordering::Equal
}

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, Default, serde::Serialize, serde::Deserialize,
)]
#[serde(rename_all = "lowercase")]
pub enum OrderKind {
    Lex,
    #[default]
    Grevlex,
}

impl FromStr for OrderKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "lex" => Ok(OrderKind::Lex),
            "grevlex" => Ok(OrderKind::Grevlex),
            other => Err(format!("unknown monomial order {other:?}")),
        }
    }
}

/// A monomial order: lex or grevlex over a total ranking of the trace variables.
///
/// `ranking` lists variables from highest to lowest. Variables not listed rank
/// below every listed one and among themselves follow the default ranking.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct MonomialOrder {
    pub kind: OrderKind,
    pub ranking: Vec<TraceVariable>,
}

impl MonomialOrder {
    pub fn grevlex() -> Self {
        MonomialOrder::default()
    }

    pub fn lex() -> Self {
        MonomialOrder {
            kind: OrderKind::Lex,
            ranking: Vec::new(),
        }
    }

    pub fn with_ranking(kind: OrderKind, ranking: Vec<TraceVariable>) -> Self {
        MonomialOrder { kind, ranking }
    }

    pub fn is_default_grevlex(&self) -> bool {
        self.kind == OrderKind::Grevlex && self.ranking.is_empty()
    }

    /// Sort key of a variable; larger means ranked higher.
    pub fn rank_key(&self, v: &TraceVariable) -> (u8, usize, TraceVariable) {
        match self.ranking.iter().position(|w| w == v) {
            Some(p) => (1, self.ranking.len() - p, *v),
            None => (0, 0, *v),
        }
    }

    /// Compares `v` and `w` by rank.
    pub fn compare_vars(&self, v: &TraceVariable, w: &TraceVariable) -> Ordering {
        self.rank_key(v).cmp(&self.rank_key(w))
    }

    pub fn compare(&self, a: &Monomial, b: &Monomial) -> Ordering {
        if self.is_default_grevlex() {
            return grevlex_default(a, b);
        }
        let mut vars: Vec<TraceVariable> = a.variables().chain(b.variables()).collect();
        vars.sort_by_key(|v| self.rank_key(v));
        vars.dedup();
        match self.kind {
            OrderKind::Lex => vars
                .iter()
                .rev()
                .map(|v| a.exponent(v).cmp(&b.exponent(v)))
                .find(|o| o.is_ne())
                .unwrap_or(Ordering::Equal),
            OrderKind::Grevlex => a.degree().cmp(&b.degree()).then_with(|| {
                vars.iter()
                    .map(|v| b.exponent(v).cmp(&a.exponent(v)))
                    .find(|o| o.is_ne())
                    .unwrap_or(Ordering::Equal)
            }),
        }
    }
}

/// An exact polynomial in trace variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct TracePolynomial {
    terms: BTreeMap<Monomial, Rational>,
}

impl TracePolynomial {
    pub fn zero() -> Self {
        TracePolynomial::default()
    }

    pub fn one() -> Self {
        TracePolynomial::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        TracePolynomial::term(c, Monomial::one())
    }

    pub fn from_int(c: i64) -> Self {
        TracePolynomial::constant(Rational::from_integer(c.into()))
    }

    pub fn var(v: TraceVariable) -> Self {
        TracePolynomial::term(Rational::one(), Monomial::var(v))
    }

    pub fn term(c: Rational, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        TracePolynomial { terms }
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, Rational)>>(terms: I) -> Self {
        let mut p = TracePolynomial::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending default order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    /// Terms sorted descending under `order`.
    pub fn sorted_terms(&self, order: &MonomialOrder) -> Vec<(&Monomial, &Rational)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        if order.is_default_grevlex() {
            v.reverse();
        } else {
            v.sort_by(|a, b| order.compare(b.0, a.0));
        }
        v
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn leading_term(&self, order: &MonomialOrder) -> Option<(&Monomial, &Rational)> {
        if order.is_default_grevlex() {
            self.terms.iter().next_back()
        } else {
            self.terms.iter().max_by(|a, b| order.compare(a.0, b.0))
        }
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn variables(&self) -> BTreeSet<TraceVariable> {
        self.terms.keys().flat_map(|m| m.variables()).collect()
    }

    pub fn scale(&self, c: &Rational) -> TracePolynomial {
        if c.is_zero() {
            return TracePolynomial::zero();
        }
        TracePolynomial {
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> TracePolynomial {
        TracePolynomial {
            terms: self
                .terms
                .iter()
                .map(|(n, a)| (n.mul(m), a.clone()))
                .collect(),
        }
    }

    pub fn pow(&self, e: u32) -> TracePolynomial {
        let mut acc = TracePolynomial::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Integer-coefficient multiple of `self` with unit content and positive
    /// leading coefficient under the default order.
    pub fn primitive_part(&self) -> Result<TracePolynomial, PolyError> {
        self.primitive_part_with(&MonomialOrder::default())
    }

    pub fn primitive_part_with(&self, order: &MonomialOrder) -> Result<TracePolynomial, PolyError> {
        let (_, lc) = self.leading_term(order).ok_or(PolyError::ZeroPolynomial)?;
        let mut den = BigInt::one();
        let mut num = BigInt::zero();
        for c in self.terms.values() {
            den = den.lcm(c.denom());
            num = num.gcd(c.numer());
        }
        let mut factor = Rational::new(den, num);
        if lc.is_negative() {
            factor = -factor;
        }
        Ok(self.scale(&factor))
    }

    /// `self / other` if it is a constant multiple, as that constant.
    pub fn scalar_ratio(&self, other: &TracePolynomial) -> Option<Rational> {
        if self.terms.len() != other.terms.len() || other.is_zero() {
            return None;
        }
        let mut ratio: Option<Rational> = None;
        for (m, a) in &self.terms {
            let b = other.terms.get(m)?;
            let r = a / b;
            match &ratio {
                None => ratio = Some(r),
                Some(q) if *q == r => {}
                Some(_) => return None,
            }
        }
        ratio
    }

    pub fn evaluate(
        &self,
        assignment: &HashMap<TraceVariable, Complex64>,
    ) -> Result<Complex64, PolyError> {
        let mut acc = Complex64::new(0.0, 0.0);
        for (m, c) in &self.terms {
            acc += m.evaluate(assignment)? * rational_to_f64(c);
        }
        Ok(acc)
    }

    /// Largest `|c * m(assignment)|` over the terms; the scale for relative tolerances.
    pub fn max_term_magnitude(
        &self,
        assignment: &HashMap<TraceVariable, Complex64>,
    ) -> Result<f64, PolyError> {
        let mut best: f64 = 0.0;
        for (m, c) in &self.terms {
            best = best.max((m.evaluate(assignment)? * rational_to_f64(c)).norm());
        }
        Ok(best)
    }

    /// Canonical text rendering with terms in descending `order`.
    pub fn render(&self, order: &MonomialOrder) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (k, (m, c)) in self.sorted_terms(order).into_iter().enumerate() {
            let negative = c.is_negative();
            if k == 0 {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            let a = c.abs();
            if m.is_one() {
                out.push_str(&a.to_string());
            } else if a.is_one() {
                out.push_str(&m.to_string());
            } else {
                out.push_str(&format!("{a}*{m}"));
            }
        }
        out
    }
}

pub fn rational_to_f64(c: &Rational) -> f64 {
    c.to_f64().unwrap_or_else(|| {
        let n = c.numer().to_f64().unwrap_or(f64::NAN);
        let d = c.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

impl fmt::Display for TracePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(&MonomialOrder::default()))
    }
}

impl Add for &TracePolynomial {
    type Output = TracePolynomial;

    fn add(self, rhs: &TracePolynomial) -> TracePolynomial {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &TracePolynomial {
    type Output = TracePolynomial;

    fn sub(self, rhs: &TracePolynomial) -> TracePolynomial {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl Mul for &TracePolynomial {
    type Output = TracePolynomial;

    fn mul(self, rhs: &TracePolynomial) -> TracePolynomial {
        let mut out = TracePolynomial::zero();
        for (m, a) in &self.terms {
            for (n, b) in &rhs.terms {
                out.add_term(m.mul(n), a * b);
            }
        }
        out
    }
}

impl Neg for &TracePolynomial {
    type Output = TracePolynomial;

    fn neg(self) -> TracePolynomial {
        TracePolynomial {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr for TracePolynomial {
            type Output = TracePolynomial;
            fn $f(self, rhs: TracePolynomial) -> TracePolynomial {
                (&self).$f(&rhs)
            }
        }
        impl $tr<&TracePolynomial> for TracePolynomial {
            type Output = TracePolynomial;
            fn $f(self, rhs: &TracePolynomial) -> TracePolynomial {
                (&self).$f(rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for TracePolynomial {
    type Output = TracePolynomial;

    fn neg(self) -> TracePolynomial {
        -&self
    }
}

impl FromStr for TraceVariable {
    type Err = PolyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let p = parse_polynomial(s, &[])?;
        let mut terms = p.terms();
        match (terms.next(), terms.next()) {
            (Some((m, c)), None)
                if c.is_one() && m.factors().len() == 1 && m.factors()[0].1 == 1 =>
            {
                Ok(m.factors()[0].0)
            }
            _ => Err(PolyError::Parse {
                pos: 0,
                msg: format!("{s:?} is not a single trace variable"),
            }),
        }
    }
}

impl FromStr for TracePolynomial {
    type Err = PolyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_polynomial(s, &[])
    }
}

/// Parses a polynomial expression in `t{..}` variables, optionally with named
/// aliases (e.g. `x` for `t{1}`).
///
/// Grammar: sums and differences of products; `*` or juxtaposition for
/// products; `^` with a nonnegative integer exponent; parentheses; integer
/// literals; `/` by a constant.
pub fn parse_polynomial(
    text: &str,
    aliases: &[(&str, TraceVariable)],
) -> Result<TracePolynomial, PolyError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        aliases,
    };
    let poly = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(poly)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    aliases: &'a [(&'a str, TraceVariable)],
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> PolyError {
        PolyError::Parse {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<TracePolynomial, PolyError> {
        let mut acc = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                -self.product()?
            }
            Some(b'+') => {
                self.pos += 1;
                self.product()?
            }
            _ => self.product()?,
        };
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = acc + self.product()?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = acc - self.product()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn starts_atom(&mut self) -> bool {
        matches!(self.peek(), Some(c) if c == b'(' || c.is_ascii_alphanumeric())
    }

    fn product(&mut self) -> Result<TracePolynomial, PolyError> {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = acc * self.power()?;
                }
                Some(b'/') => {
                    self.pos += 1;
                    let d = self.power()?;
                    if !d.is_constant() || d.is_zero() {
                        return Err(self.error("division only by a nonzero constant"));
                    }
                    let c = d.coefficient(&Monomial::one());
                    acc = acc.scale(&c.recip());
                }
                _ if self.starts_atom() => {
                    acc = acc * self.power()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn power(&mut self) -> Result<TracePolynomial, PolyError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let e = self.integer()?;
            let e = e
                .to_u32()
                .ok_or_else(|| self.error("exponent must be a small nonnegative integer"))?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<BigInt, PolyError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected integer"));
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok(s.parse().expect("digits parse"))
    }

    fn atom(&mut self) -> Result<TracePolynomial, PolyError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer()?;
                Ok(TracePolynomial::constant(Rational::from_integer(n)))
            }
            Some(b't') if self.src.get(self.pos + 1) == Some(&b'{') => {
                self.pos += 2;
                let mut idx = Vec::new();
                loop {
                    self.skip_ws();
                    let i = self.integer()?;
                    idx.push(i.to_u32().ok_or_else(|| self.error("index too large"))?);
                    match self.peek() {
                        Some(b',') => self.pos += 1,
                        Some(b'}') => {
                            self.pos += 1;
                            break;
                        }
                        _ => return Err(self.error("expected ',' or '}'")),
                    }
                }
                Ok(TracePolynomial::var(TraceVariable::new(&idx)?))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                match self.aliases.iter().find(|(n, _)| *n == name) {
                    Some(&(_, v)) => Ok(TracePolynomial::var(v)),
                    None => {
                        self.pos = start;
                        Err(self.error(&format!("unknown identifier {name:?}")))
                    }
                }
            }
            _ => Err(self.error("expected a term")),
        }
    }
}
