//! Reduced Gröbner bases over the rationals, ideal membership and radical membership.
//!
//! Polynomials are converted to dense exponent vectors over the variables that
//! actually occur, ordered from highest to lowest rank, and Buchberger's
//! algorithm runs on that representation with the coprime and chain criteria
//! and normal pair selection (smallest lcm first).

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashSet};
use std::fmt;

use log::debug;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::poly::{Monomial, MonomialOrder, OrderKind, Rational, TracePolynomial, TraceVariable};

/// Default bound on the number of critical pairs processed by one run.
pub const DEFAULT_PAIR_LIMIT: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroebnerError {
    #[error("limit exceeded: more than {limit} critical pairs processed")]
    LimitExceeded { limit: usize },
}

/// An ideal given by generators, together with the order used to compute in it.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialIdeal {
    generators: Vec<TracePolynomial>,
    order: MonomialOrder,
}

impl PolynomialIdeal {
    /// Zero generators are discarded.
    pub fn new(generators: Vec<TracePolynomial>, order: MonomialOrder) -> Self {
        let generators = generators.into_iter().filter(|g| !g.is_zero()).collect();
        PolynomialIdeal { generators, order }
    }

    pub fn generators(&self) -> &[TracePolynomial] {
        &self.generators
    }

    pub fn order(&self) -> &MonomialOrder {
        &self.order
    }

    pub fn variables(&self) -> BTreeSet<TraceVariable> {
        self.generators.iter().flat_map(|g| g.variables()).collect()
    }
}

/// A reduced Gröbner basis, sorted by increasing leading monomial.
#[derive(Debug, Clone, PartialEq)]
pub struct GroebnerBasis {
    basis: Vec<TracePolynomial>,
    order: MonomialOrder,
}

impl GroebnerBasis {
    pub fn basis(&self) -> &[TracePolynomial] {
        &self.basis
    }

    pub fn order(&self) -> &MonomialOrder {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    /// True when the basis is `{1}`.
    pub fn is_unit(&self) -> bool {
        self.basis.len() == 1 && self.basis[0] == TracePolynomial::one()
    }

    pub fn contains(&self, f: &TracePolynomial) -> bool {
        normal_form(f, self).is_zero()
    }
}

impl fmt::Display for GroebnerBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, g) in self.basis.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{}", g.render(&self.order))?;
        }
        Ok(())
    }
}

pub fn buchberger(ideal: &PolynomialIdeal) -> Result<GroebnerBasis, GroebnerError> {
    buchberger_with_limit(ideal, DEFAULT_PAIR_LIMIT)
}

pub fn buchberger_with_limit(
    ideal: &PolynomialIdeal,
    limit: usize,
) -> Result<GroebnerBasis, GroebnerError> {
    let ring = Ring::new(ideal.variables(), &ideal.order, false);
    let gens: Vec<DPoly> = ideal.generators.iter().map(|g| ring.to_dense(g)).collect();
    let basis = ring.groebner(gens, limit, false)?;
    Ok(GroebnerBasis {
        basis: basis.iter().map(|p| ring.to_sparse(p)).collect(),
        order: ideal.order.clone(),
    })
}

/// Remainder of `f` under multivariate division by `gb`, in `gb`'s order.
pub fn normal_form(f: &TracePolynomial, gb: &GroebnerBasis) -> TracePolynomial {
    let mut vars: BTreeSet<TraceVariable> = f.variables();
    vars.extend(gb.basis.iter().flat_map(|g| g.variables()));
    let ring = Ring::new(vars, &gb.order, false);
    let divisors: Vec<DPoly> = gb.basis.iter().map(|g| ring.to_dense(g)).collect();
    ring.to_sparse(&ring.reduce(ring.to_dense(f), &divisors))
}

/// Whether `f` lies in the radical of `ideal`: `ideal + <1 - u f>` is the unit
/// ideal for a fresh variable `u` ranked above every other.
pub fn radical_member(f: &TracePolynomial, ideal: &PolynomialIdeal) -> Result<bool, GroebnerError> {
    radical_member_with_limit(f, ideal, DEFAULT_PAIR_LIMIT)
}

pub fn radical_member_with_limit(
    f: &TracePolynomial,
    ideal: &PolynomialIdeal,
    limit: usize,
) -> Result<bool, GroebnerError> {
    if f.is_zero() {
        return Ok(true);
    }
    let mut vars = ideal.variables();
    vars.extend(f.variables());
    let ring = Ring::new(vars, &ideal.order, true);
    let mut gens: Vec<DPoly> = ideal.generators.iter().map(|g| ring.to_dense(g)).collect();
    let mut aux = ring.to_dense(&f.scale(&-Rational::one()));
    for (e, _) in aux.iter_mut() {
        e[0] += 1;
    }
    let aux = ring.add(&aux, &vec![(vec![0; ring.nvars], Rational::one())]);
    gens.push(aux);
    let basis = ring.groebner(gens, limit, true)?;
    Ok(ring.is_unit(&basis))
}

/// Whether the two ideals have the same radical.
pub fn radical_equal(a: &PolynomialIdeal, b: &PolynomialIdeal) -> Result<bool, GroebnerError> {
    radical_equal_with_limit(a, b, DEFAULT_PAIR_LIMIT)
}

pub fn radical_equal_with_limit(
    a: &PolynomialIdeal,
    b: &PolynomialIdeal,
    limit: usize,
) -> Result<bool, GroebnerError> {
    Ok(radical_contains(a, b, limit)? && radical_contains(b, a, limit)?)
}

/// Every generator of `a` lies in the radical of `b`.
fn radical_contains(
    a: &PolynomialIdeal,
    b: &PolynomialIdeal,
    limit: usize,
) -> Result<bool, GroebnerError> {
    let gb = buchberger_with_limit(b, limit)?;
    for g in &a.generators {
        if normal_form(g, &gb).is_zero() {
            continue;
        }
        if !radical_member_with_limit(g, b, limit)? {
            debug!("{} is not in the radical", g.render(&a.order));
            return Ok(false);
        }
    }
    Ok(true)
}

type Exp = Vec<u32>;

/// Terms in increasing order, so the leading term is last.
type DPoly = Vec<(Exp, Rational)>;

/// Variables indexed from highest to lowest rank. With `elim` set, index 0 is
/// an extra variable compared before everything else.
struct Ring {
    vars: Vec<TraceVariable>,
    nvars: usize,
    offset: usize,
    kind: OrderKind,
}

struct Pair {
    i: usize,
    j: usize,
    lcm: Exp,
    degree: u32,
}

impl Ring {
    fn new(vars: BTreeSet<TraceVariable>, order: &MonomialOrder, elim: bool) -> Self {
        let mut vars: Vec<TraceVariable> = vars.into_iter().collect();
        vars.sort_by(|a, b| order.compare_vars(b, a));
        let offset = usize::from(elim);
        Ring {
            nvars: vars.len() + offset,
            vars,
            offset,
            kind: order.kind,
        }
    }

    fn to_dense(&self, p: &TracePolynomial) -> DPoly {
        let mut out: DPoly = p
            .terms()
            .map(|(m, c)| {
                let mut e = vec![0; self.nvars];
                for (v, k) in m.factors() {
                    let pos = self
                        .vars
                        .iter()
                        .position(|w| w == v)
                        .expect("variable in ring");
                    e[pos + self.offset] = *k;
                }
                (e, c.clone())
            })
            .collect();
        out.sort_by(|a, b| self.cmp(&a.0, &b.0));
        out
    }

    fn to_sparse(&self, p: &DPoly) -> TracePolynomial {
        TracePolynomial::from_terms(p.iter().map(|(e, c)| {
            let m = Monomial::from_pairs(
                self.vars
                    .iter()
                    .zip(&e[self.offset..])
                    .filter(|(_, &k)| k > 0)
                    .map(|(v, &k)| (*v, k)),
            );
            (m, c.clone())
        }))
    }

    fn cmp(&self, a: &[u32], b: &[u32]) -> Ordering {
        let head = a[..self.offset].cmp(&b[..self.offset]);
        if head.is_ne() {
            return head;
        }
        let (a, b) = (&a[self.offset..], &b[self.offset..]);
        match self.kind {
            OrderKind::Lex => a.cmp(b),
            OrderKind::Grevlex => {
                let (da, db): (u32, u32) = (a.iter().sum(), b.iter().sum());
                da.cmp(&db).then_with(|| {
                    a.iter()
                        .zip(b)
                        .rev()
                        .map(|(x, y)| y.cmp(x))
                        .find(|o| o.is_ne())
                        .unwrap_or(Ordering::Equal)
                })
            }
        }
    }

    fn is_unit(&self, basis: &[DPoly]) -> bool {
        basis
            .iter()
            .any(|p| p.len() == 1 && p[0].0.iter().all(|&k| k == 0))
    }

    fn add(&self, p: &DPoly, q: &DPoly) -> DPoly {
        self.merge(p, q, &Rational::one(), None)
    }

    /// `p + c·x^shift·q`.
    fn merge(&self, p: &DPoly, q: &DPoly, c: &Rational, shift: Option<&[u32]>) -> DPoly {
        let mut out = Vec::with_capacity(p.len() + q.len());
        let mut qi = q.iter().map(|(e, k)| {
            let e = match shift {
                Some(s) => e.iter().zip(s).map(|(a, b)| a + b).collect(),
                None => e.clone(),
            };
            (e, k * c)
        });
        let mut pi = p.iter();
        let (mut a, mut b) = (pi.next(), qi.next());
        loop {
            match (a, b.take()) {
                (None, None) => break,
                (Some(x), None) => {
                    out.push(x.clone());
                    a = pi.next();
                }
                (None, Some(y)) => {
                    out.push(y);
                    b = qi.next();
                }
                (Some(x), Some(y)) => match self.cmp(&x.0, &y.0) {
                    Ordering::Less => {
                        out.push(x.clone());
                        a = pi.next();
                        b = Some(y);
                    }
                    Ordering::Greater => {
                        out.push(y);
                        b = qi.next();
                    }
                    Ordering::Equal => {
                        let s = &x.1 + &y.1;
                        if !s.is_zero() {
                            out.push((y.0, s));
                        }
                        a = pi.next();
                        b = qi.next();
                    }
                },
            }
        }
        out
    }

    fn make_monic(&self, mut p: DPoly) -> DPoly {
        if let Some((_, lc)) = p.last() {
            if !lc.is_one() {
                let inv = lc.recip();
                for (_, c) in p.iter_mut() {
                    *c = &*c * &inv;
                }
            }
        }
        p
    }

    /// Full reduction of `f` by monic `divisors`.
    fn reduce(&self, mut f: DPoly, divisors: &[DPoly]) -> DPoly {
        let mut rem: DPoly = Vec::new();
        while let Some((lead, lc)) = f.last().cloned() {
            let hit = divisors.iter().find_map(|g| {
                let lt = &g.last()?.0;
                divides(lt, &lead).then(|| (g, quotient(&lead, lt)))
            });
            match hit {
                Some((g, shift)) => {
                    f = self.merge(&f, g, &-lc, Some(&shift));
                }
                None => {
                    f.pop();
                    rem.push((lead, lc));
                }
            }
        }
        rem.reverse();
        rem
    }

    fn spoly(&self, f: &DPoly, g: &DPoly, lcm: &[u32]) -> DPoly {
        let sf = quotient(lcm, &f.last().expect("nonzero").0);
        let sg = quotient(lcm, &g.last().expect("nonzero").0);
        let a = self.merge(&Vec::new(), f, &Rational::one(), Some(&sf));
        self.merge(&a, g, &-Rational::one(), Some(&sg))
    }

    /// Buchberger's algorithm; returns the reduced basis in increasing order of
    /// leading monomials. With `stop_at_unit`, returns `{1}` as soon as a
    /// nonzero constant appears.
    fn groebner(
        &self,
        gens: Vec<DPoly>,
        limit: usize,
        stop_at_unit: bool,
    ) -> Result<Vec<DPoly>, GroebnerError> {
        let unit = || vec![vec![(vec![0; self.nvars], Rational::one())]];
        let mut g: Vec<DPoly> = Vec::new();
        let mut pairs: Vec<Pair> = Vec::new();
        let mut live: HashSet<(usize, usize)> = HashSet::new();
        let mut pending: Vec<DPoly> = gens.into_iter().filter(|p| !p.is_empty()).collect();
        pending.sort_by(|a, b| self.cmp(&a.last().unwrap().0, &b.last().unwrap().0));
        let mut processed = 0usize;
        loop {
            for p in pending.drain(..) {
                let p = self.make_monic(self.reduce(p, &g));
                if p.is_empty() {
                    continue;
                }
                if p.len() == 1 && p[0].0.iter().all(|&k| k == 0) {
                    return Ok(unit());
                }
                let n = g.len();
                let lt = &p.last().unwrap().0;
                for (k, h) in g.iter().enumerate() {
                    let l = lcm(&h.last().unwrap().0, lt);
                    let degree = l.iter().sum();
                    pairs.push(Pair {
                        i: k,
                        j: n,
                        lcm: l,
                        degree,
                    });
                    live.insert((k, n));
                }
                g.push(p);
            }
            let Some(best) = (0..pairs.len()).min_by(|&a, &b| {
                pairs[a]
                    .degree
                    .cmp(&pairs[b].degree)
                    .then_with(|| self.cmp(&pairs[a].lcm, &pairs[b].lcm))
                    .then_with(|| (pairs[a].i, pairs[a].j).cmp(&(pairs[b].i, pairs[b].j)))
            }) else {
                break;
            };
            let pair = pairs.swap_remove(best);
            live.remove(&(pair.i, pair.j));
            processed += 1;
            if processed > limit {
                return Err(GroebnerError::LimitExceeded { limit });
            }
            let (lti, ltj) = (&g[pair.i].last().unwrap().0, &g[pair.j].last().unwrap().0);
            if coprime(lti, ltj) {
                continue;
            }
            let chain = (0..g.len()).any(|k| {
                k != pair.i
                    && k != pair.j
                    && divides(&g[k].last().unwrap().0, &pair.lcm)
                    && !live.contains(&(pair.i.min(k), pair.i.max(k)))
                    && !live.contains(&(pair.j.min(k), pair.j.max(k)))
            });
            if chain {
                continue;
            }
            let s = self.spoly(&g[pair.i], &g[pair.j], &pair.lcm);
            let r = self.reduce(s, &g);
            if !r.is_empty() {
                if stop_at_unit && r.len() == 1 && r[0].0.iter().all(|&k| k == 0) {
                    return Ok(unit());
                }
                pending.push(r);
            }
        }
        debug!(
            "buchberger: {} pairs processed, {} basis elements before reduction",
            processed,
            g.len()
        );
        Ok(self.reduce_basis(g))
    }

    fn reduce_basis(&self, g: Vec<DPoly>) -> Vec<DPoly> {
        let mut minimal: Vec<DPoly> = Vec::new();
        for (i, p) in g.iter().enumerate() {
            let lt = &p.last().unwrap().0;
            let redundant = g.iter().enumerate().any(|(j, q)| {
                let lq = &q.last().unwrap().0;
                j != i && divides(lq, lt) && (lq != lt || j < i)
            });
            if !redundant {
                minimal.push(p.clone());
            }
        }
        let mut out: Vec<DPoly> = Vec::with_capacity(minimal.len());
        for i in 0..minimal.len() {
            let others: Vec<DPoly> = minimal
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, q)| q.clone())
                .collect();
            let mut p = minimal[i].clone();
            let lead = p.pop().unwrap();
            let mut tail = self.reduce(p, &others);
            tail.push(lead);
            out.push(self.make_monic(tail));
        }
        out.sort_by(|a, b| self.cmp(&a.last().unwrap().0, &b.last().unwrap().0));
        out
    }
}

fn divides(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

fn quotient(a: &[u32], b: &[u32]) -> Exp {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn lcm(a: &[u32], b: &[u32]) -> Exp {
    a.iter().zip(b).map(|(x, y)| *x.max(y)).collect()
}

fn coprime(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| *x == 0 || *y == 0)
}
