//! Reduction of traces of free-group words to polynomials in `t{S}`, `|S| <= 3`.
//!
//! The reducer rewrites `tr(w)` with the SL(2) trace identities:
//!
//! 1. `tr(1) = 2`;
//! 2. `tr(U X^-k V) = tr(X^k) tr(VU) - tr(U X^k V)`;
//! 3. `tr(U X^2 V) = tr(X) tr(XVU) - tr(VU)`;
//! 4. traces are cyclic, so every word is first rotated into a canonical
//!    representative (and a length-3 word with decreasing tail is flipped via
//!    `tr(XZY) = tr(X)tr(YZ) + tr(Y)tr(XZ) + tr(Z)tr(XY) - tr(X)tr(Y)tr(Z) - tr(XYZ)`);
//! 5. a positive word of length at least 4 is split with the four-letter
//!    identity, taking `X, Y, Z` to be its first three letters and `W` the rest.
//!
//! Rules fire in that priority, leftmost occurrence first, until only
//! variables remain. Every step strictly decreases
//! (negative letters, length, rotation distance), so the recursion terminates.

use std::collections::{BTreeMap, HashMap};
use std::sync::{LazyLock, RwLock};

use crate::poly::{Rational, TracePolynomial, TraceVariable};
use crate::words::{free_reduce_letters, invert_letters, min_rotation, FreeWord, WordError};

/// Memoizing trace reducer. Entries are keyed by the canonical representative
/// of the word's conjugacy class up to inversion, so the cache can be shared
/// freely between threads.
#[derive(Debug, Default)]
pub struct TraceReducer {
    cache: RwLock<HashMap<Vec<i32>, TracePolynomial>>,
}

static SHARED: LazyLock<TraceReducer> = LazyLock::new(TraceReducer::new);

/// Reduces `tr(w)` with the process-wide memoized reducer.
pub fn reduce_trace(w: &FreeWord) -> TracePolynomial {
    SHARED.reduce(w)
}

impl TraceReducer {
    pub fn new() -> Self {
        TraceReducer::default()
    }

    pub fn reduce(&self, w: &FreeWord) -> TracePolynomial {
        self.reduce_letters(w.letters())
    }

    pub fn cached_entries(&self) -> usize {
        self.cache.read().expect("trace cache poisoned").len()
    }

    pub fn reduce_letters(&self, letters: &[i32]) -> TracePolynomial {
        let key = canonical_key(letters);
        if let Some(p) = self.cache.read().expect("trace cache poisoned").get(&key) {
            return p.clone();
        }
        let p = self.apply_rules(&key);
        self.cache
            .write()
            .expect("trace cache poisoned")
            .insert(key, p.clone());
        p
    }

    fn apply_rules(&self, w: &[i32]) -> TracePolynomial {
        if w.is_empty() {
            return TracePolynomial::from_int(2);
        }
        if let Some(start) = w.iter().position(|&l| l < 0) {
            let end = run_end(w, start);
            let x = -w[start];
            let power = vec![x; end - start];
            let (u, v) = (&w[..start], &w[end..]);
            let trace_power = self.reduce_letters(&power);
            let vu = [v, u].concat();
            let uxv = [u, &power[..], v].concat();
            return &trace_power * &self.reduce_letters(&vu) - self.reduce_letters(&uxv);
        }
        if let Some(i) = w.windows(2).position(|p| p[0] == p[1]) {
            let x = w[i];
            let (u, v) = (&w[..i], &w[i + 2..]);
            let xvu = [&[x][..], v, u].concat();
            let vu = [v, u].concat();
            return &single(x) * &self.reduce_letters(&xvu) - self.reduce_letters(&vu);
        }
        match w.len() {
            1 => single(w[0]),
            2 => TracePolynomial::var(TraceVariable::pair(w[0] as u32, w[1] as u32)),
            3 => {
                let (a, b, c) = (w[0], w[1], w[2]);
                if b < c {
                    TracePolynomial::var(TraceVariable::triple(a as u32, b as u32, c as u32))
                } else {
                    // w = (a, c', b') with a < b' < c'
                    let (lo, hi) = (c, b);
                    let p = &single(a) * &pair(lo, hi)
                        + &single(lo) * &pair(a, hi)
                        + &single(hi) * &pair(a, lo)
                        - &(&single(a) * &single(lo)) * &single(hi);
                    p - TracePolynomial::var(TraceVariable::triple(a as u32, lo as u32, hi as u32))
                }
            }
            _ => self.four_letter_identity(w[0], w[1], w[2], &w[3..]),
        }
    }

    fn four_letter_identity(&self, x: i32, y: i32, z: i32, wsuf: &[i32]) -> TracePolynomial {
        let tr = |parts: &[&[i32]]| self.reduce_letters(&parts.concat());
        let (x, y, z) = (&[x][..], &[y][..], &[z][..]);
        let w = wsuf;
        let tx = tr(&[x]);
        let ty = tr(&[y]);
        let tz = tr(&[z]);
        let tw = tr(&[w]);
        let mut sum = &(&(&tx * &ty) * &tz) * &tw;
        sum = sum + &tx * &tr(&[y, z, w]);
        sum = sum + &ty * &tr(&[x, z, w]);
        sum = sum + &tz * &tr(&[x, y, w]);
        sum = sum + &tw * &tr(&[x, y, z]);
        sum = sum - &tr(&[x, z]) * &tr(&[y, w]);
        sum = sum + &tr(&[x, w]) * &tr(&[y, z]);
        sum = sum + &tr(&[x, y]) * &tr(&[z, w]);
        sum = sum - &(&tx * &ty) * &tr(&[z, w]);
        sum = sum - &(&tx * &tw) * &tr(&[y, z]);
        sum = sum - &(&ty * &tz) * &tr(&[x, w]);
        sum = sum - &(&tz * &tw) * &tr(&[x, y]);
        sum.scale(&Rational::new(1.into(), 2.into()))
    }
}

fn single(i: i32) -> TracePolynomial {
    TracePolynomial::var(TraceVariable::single(i as u32))
}

fn pair(i: i32, j: i32) -> TracePolynomial {
    TracePolynomial::var(TraceVariable::pair(i as u32, j as u32))
}

fn run_end(w: &[i32], start: usize) -> usize {
    let mut end = start + 1;
    while end < w.len() && w[end] == w[start] {
        end += 1;
    }
    end
}

fn cyclically_reduce(mut w: Vec<i32>) -> Vec<i32> {
    let (mut lo, mut hi) = (0, w.len());
    while hi - lo >= 2 && w[lo] == -w[hi - 1] {
        lo += 1;
        hi -= 1;
    }
    w.truncate(hi);
    w.drain(..lo);
    w
}

/// Canonical representative of `{conjugates of w} ∪ {conjugates of w^-1}`:
/// fewest inverse letters first, then the lexicographically least rotation.
pub(crate) fn canonical_key(letters: &[i32]) -> Vec<i32> {
    let w = cyclically_reduce(free_reduce_letters(letters));
    let inv = invert_letters(&w);
    let neg = |v: &[i32]| v.iter().filter(|&&l| l < 0).count();
    let a = min_rotation(&w);
    let b = min_rotation(&inv);
    if (neg(&b), &b) < (neg(&a), &a) {
        b
    } else {
        a
    }
}

/// A formal linear combination of words with trace-polynomial coefficients.
/// The empty word stands for the identity matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixExpr {
    rank: u32,
    terms: BTreeMap<FreeWord, TracePolynomial>,
}

impl MatrixExpr {
    pub fn zero(rank: u32) -> Self {
        MatrixExpr {
            rank,
            terms: BTreeMap::new(),
        }
    }

    pub fn identity(rank: u32) -> Self {
        MatrixExpr::scalar(TracePolynomial::one(), rank)
    }

    pub fn scalar(c: TracePolynomial, rank: u32) -> Self {
        MatrixExpr::from_word(c, FreeWord::empty(rank))
    }

    pub fn word(w: FreeWord) -> Self {
        MatrixExpr::from_word(TracePolynomial::one(), w)
    }

    pub fn from_word(c: TracePolynomial, w: FreeWord) -> Self {
        let mut e = MatrixExpr::zero(w.rank());
        e.add_term(w.free_reduce(), c);
        e
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&FreeWord, &TracePolynomial)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, w: &FreeWord) -> TracePolynomial {
        self.terms.get(w).cloned().unwrap_or_default()
    }

    fn add_term(&mut self, w: FreeWord, c: TracePolynomial) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(w).or_default();
        *entry = &*entry + &c;
        if entry.is_zero() {
            self.terms.retain(|_, c| !c.is_zero());
        }
    }

    pub fn add(&self, other: &MatrixExpr) -> MatrixExpr {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &MatrixExpr) -> MatrixExpr {
        self.add(&other.scale(&TracePolynomial::from_int(-1)))
    }

    pub fn scale(&self, c: &TracePolynomial) -> MatrixExpr {
        let mut out = MatrixExpr::zero(self.rank);
        for (w, a) in &self.terms {
            out.add_term(w.clone(), a * c);
        }
        out
    }

    /// Bilinear product: words concatenate (and freely reduce), coefficients multiply.
    pub fn mul(&self, other: &MatrixExpr) -> Result<MatrixExpr, WordError> {
        if self.rank != other.rank {
            return Err(WordError::RankMismatch(self.rank, other.rank));
        }
        let mut out = MatrixExpr::zero(self.rank);
        for (u, a) in &self.terms {
            for (v, b) in &other.terms {
                out.add_term(u.concat(v)?, a * b);
            }
        }
        Ok(out)
    }

    /// `Σ c_W tr(W)`.
    pub fn trace(&self) -> TracePolynomial {
        self.terms
            .iter()
            .fold(TracePolynomial::zero(), |acc, (w, c)| {
                acc + c * &reduce_trace(w)
            })
    }
}

pub fn expr_mul(a: &MatrixExpr, b: &MatrixExpr) -> Result<MatrixExpr, WordError> {
    a.mul(b)
}

pub fn trace_of_expr(e: &MatrixExpr) -> TracePolynomial {
    e.trace()
}

/// The traceless part `Z_i = X_i - tr(X_i)/2 · 1`.
pub fn traceless(i: u32, rank: u32) -> Result<MatrixExpr, WordError> {
    if i == 0 {
        return Err(WordError::ZeroIndex);
    }
    let x = FreeWord::generator(i, rank)?;
    let half_trace =
        TracePolynomial::var(TraceVariable::single(i)).scale(&Rational::new((-1).into(), 2.into()));
    Ok(MatrixExpr::word(x).add(&MatrixExpr::scalar(half_trace, rank)))
}

/// The standard polynomial `Σ_{σ ∈ S3} sign(σ) A_σ(1) A_σ(2) A_σ(3)`.
pub fn s3(a: &MatrixExpr, b: &MatrixExpr, c: &MatrixExpr) -> Result<MatrixExpr, WordError> {
    let args = [a, b, c];
    const PERMS: [([usize; 3], i64); 6] = [
        ([0, 1, 2], 1),
        ([1, 2, 0], 1),
        ([2, 0, 1], 1),
        ([1, 0, 2], -1),
        ([0, 2, 1], -1),
        ([2, 1, 0], -1),
    ];
    let mut out = MatrixExpr::zero(a.rank());
    for (p, sign) in PERMS {
        let prod = args[p[0]].mul(args[p[1]])?.mul(args[p[2]])?;
        out = out.add(&prod.scale(&TracePolynomial::from_int(sign)));
    }
    Ok(out)
}
