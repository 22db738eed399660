//! Generators and defining relations of the coordinate ring of a character variety.
//!
//! For the free group `F_r` the ring is generated by `t{S}` for `|S| <= 3` and
//! the relations come in two families built from the traceless parts
//! `Z_i = X_i - tr(X_i)/2`. A finitely presented group adds, for each relator
//! `R`, the relations `tr(R γ_j) - tr(γ_j)` with `γ_0 = 1` and `γ_j = X_j`.

use std::fmt;

use log::{debug, warn};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::poly::{Monomial, Rational, TracePolynomial, TraceVariable};
use crate::traces::{reduce_trace, s3, trace_of_expr, traceless, MatrixExpr};
use crate::words::{FreeWord, WordError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RelationError {
    #[error("rank must be at least 1")]
    ZeroRank,
    #[error("max_factors must be at least 1")]
    ZeroFactors,
    #[error(transparent)]
    Word(#[from] WordError),
}

/// A finite presentation `<X_1, ..., X_r | R_1, ..., R_s>`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupPresentation {
    rank: u32,
    relators: Vec<FreeWord>,
}

impl GroupPresentation {
    /// Relators are freely reduced and lifted to rank `rank`; relators that
    /// reduce to the empty word are dropped.
    pub fn new(rank: u32, relators: Vec<FreeWord>) -> Result<Self, RelationError> {
        if rank == 0 {
            return Err(RelationError::ZeroRank);
        }
        let mut kept = Vec::with_capacity(relators.len());
        for (i, r) in relators.into_iter().enumerate() {
            let r = r.with_rank(rank)?.free_reduce();
            if r.is_empty() {
                warn!(
                    "relator {} is trivial after free reduction, dropping it",
                    i + 1
                );
                continue;
            }
            kept.push(r);
        }
        Ok(GroupPresentation {
            rank,
            relators: kept,
        })
    }

    pub fn free(rank: u32) -> Result<Self, RelationError> {
        GroupPresentation::new(rank, Vec::new())
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }

    pub fn relators(&self) -> &[FreeWord] {
        &self.relators
    }
}

impl fmt::Display for GroupPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gens: Vec<String> = (1..=self.rank).map(|i| format!("X{i}")).collect();
        let rels: Vec<String> = self.relators.iter().map(|r| r.to_string()).collect();
        write!(f, "<{} | {}>", gens.join(", "), rels.join(", "))
    }
}

/// Which `(relator, j)` cut-out relations vanished identically.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CutoutReport {
    pub considered: usize,
    pub zero: Vec<(usize, usize)>,
}

/// Generators and relations of the coordinate ring.
#[derive(Debug, Clone, PartialEq)]
pub struct CharVarietyPresentation {
    pub rank: u32,
    pub generators: Vec<TraceVariable>,
    pub free_relations: Vec<TracePolynomial>,
    pub cutout_relations: Vec<TracePolynomial>,
    pub report: CutoutReport,
}

impl CharVarietyPresentation {
    /// Free relations followed by cut-out relations.
    pub fn all_relations(&self) -> Vec<TracePolynomial> {
        self.free_relations
            .iter()
            .chain(&self.cutout_relations)
            .cloned()
            .collect()
    }
}

/// `t{i}`, then `t{i,j}`, then `t{i,j,k}`, each block in lexicographic order.
pub fn generators(r: u32) -> Result<Vec<TraceVariable>, RelationError> {
    if r == 0 {
        return Err(RelationError::ZeroRank);
    }
    let mut out: Vec<TraceVariable> = (1..=r).map(TraceVariable::single).collect();
    out.extend(pairs(r).into_iter().map(|[i, j]| TraceVariable::pair(i, j)));
    out.extend(
        triples(r)
            .into_iter()
            .map(|[i, j, k]| TraceVariable::triple(i, j, k)),
    );
    Ok(out)
}

/// The word `X_{i_1} X_{i_2} ...` whose trace is the variable.
pub fn variable_word(v: &TraceVariable, rank: u32) -> Result<FreeWord, WordError> {
    FreeWord::new(v.indices().iter().map(|&i| i as i32).collect(), rank)
}

fn pairs(r: u32) -> Vec<[u32; 2]> {
    let mut out = Vec::new();
    for i in 1..=r {
        for j in i + 1..=r {
            out.push([i, j]);
        }
    }
    out
}

fn triples(r: u32) -> Vec<[u32; 3]> {
    let mut out = Vec::new();
    for i in 1..=r {
        for j in i + 1..=r {
            for k in j + 1..=r {
                out.push([i, j, k]);
            }
        }
    }
    out
}

fn quadruples(r: u32) -> Vec<[u32; 4]> {
    let mut out = Vec::new();
    for t in triples(r) {
        for l in t[2] + 1..=r {
            out.push([t[0], t[1], t[2], l]);
        }
    }
    out
}

/// Cached traces of products of traceless parts.
struct ZTraces {
    z: Vec<MatrixExpr>,
}

impl ZTraces {
    fn new(r: u32) -> Self {
        let z = (1..=r)
            .map(|i| traceless(i, r).expect("index within rank"))
            .collect();
        ZTraces { z }
    }

    fn z(&self, i: u32) -> &MatrixExpr {
        &self.z[i as usize - 1]
    }

    /// `tr(Z_i Z_j)`.
    fn pair(&self, i: u32, j: u32) -> TracePolynomial {
        trace_of_expr(&self.z(i).mul(self.z(j)).expect("same rank"))
    }

    /// `tr(s3(Z_i, Z_j, Z_k))`.
    fn triple(&self, t: [u32; 3]) -> TracePolynomial {
        trace_of_expr(&s3(self.z(t[0]), self.z(t[1]), self.z(t[2])).expect("same rank"))
    }
}

fn det3(m: &[[TracePolynomial; 3]; 3]) -> TracePolynomial {
    let minor =
        |a: usize, b: usize, c: usize, d: usize| &(&m[1][a] * &m[2][b]) - &(&m[1][c] * &m[2][d]);
    &(&(&m[0][0] * &minor(1, 2, 2, 1)) - &(&m[0][1] * &minor(0, 2, 2, 0)))
        + &(&m[0][2] * &minor(0, 1, 1, 0))
}

fn type1_raw(
    zt: &ZTraces,
    s3_traces: &[TracePolynomial],
    triples: &[[u32; 3]],
    a: usize,
    b: usize,
) -> TracePolynomial {
    let (ti, tj) = (triples[a], triples[b]);
    let m: [[TracePolynomial; 3]; 3] =
        std::array::from_fn(|row| std::array::from_fn(|col| zt.pair(ti[row], tj[col])));
    &(&s3_traces[a] * &s3_traces[b]) + &det3(&m).scale(&Rational::from_integer(18.into()))
}

/// One relation per unordered pair of (possibly equal) triples `i1<i2<i3`,
/// `j1<j2<j3`: `tr s3(Z_I) tr s3(Z_J) + 18 det[tr(Z_{I_a} Z_{J_b})]`.
pub fn type1_relations(r: u32) -> Vec<TracePolynomial> {
    if r < 3 {
        return Vec::new();
    }
    let zt = ZTraces::new(r);
    let ts = triples(r);
    let s3_traces: Vec<TracePolynomial> = ts.par_iter().map(|&t| zt.triple(t)).collect();
    let index_pairs: Vec<(usize, usize)> = (0..ts.len())
        .flat_map(|a| (a..ts.len()).map(move |b| (a, b)))
        .collect();
    index_pairs
        .par_iter()
        .map(|&(a, b)| {
            type1_raw(&zt, &s3_traces, &ts, a, b)
                .primitive_part()
                .expect("type 1 relations are nonzero")
        })
        .collect()
}

/// One relation per `i` and quadruple `p0<p1<p2<p3`:
/// `Σ_k (-1)^k tr(Z_i Z_{p_k}) tr s3(Z_p without p_k)`.
pub fn type2_relations(r: u32) -> Vec<TracePolynomial> {
    if r < 4 {
        return Vec::new();
    }
    let zt = ZTraces::new(r);
    let jobs: Vec<(u32, [u32; 4])> = (1..=r)
        .flat_map(|i| quadruples(r).into_iter().map(move |p| (i, p)))
        .collect();
    jobs.par_iter()
        .map(|&(i, p)| {
            let mut acc = TracePolynomial::zero();
            for k in 0..4 {
                let rest: Vec<u32> = (0..4).filter(|&l| l != k).map(|l| p[l]).collect();
                let term = &zt.pair(i, p[k]) * &zt.triple([rest[0], rest[1], rest[2]]);
                acc = if k % 2 == 0 { acc + term } else { acc - term };
            }
            acc.primitive_part().expect("type 2 relations are nonzero")
        })
        .collect()
}

/// Type 1 relations followed by type 2 relations.
pub fn free_relations(r: u32) -> Vec<TracePolynomial> {
    let mut out = type1_relations(r);
    out.extend(type2_relations(r));
    out
}

/// Number of free relations, `(C(r,3)^2 + C(r,3))/2 + r C(r,4)`.
pub fn free_relation_count(r: u32) -> u64 {
    let r = r as u64;
    let c3 = binomial(r, 3);
    (c3 * c3 + c3) / 2 + r * binomial(r, 4)
}

/// Number of generators, `r(r^2+5)/6`.
pub fn generator_count(r: u32) -> u64 {
    let r = r as u64;
    r * (r * r + 5) / 6
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Cut-out relations `tr(R γ_j) - tr(γ_j)`, `j = 0..=r`, with the
/// identically zero ones removed.
pub fn cutout_relations(pres: &GroupPresentation) -> Vec<TracePolynomial> {
    cutout_relations_with_report(pres).0
}

pub fn cutout_relations_with_report(
    pres: &GroupPresentation,
) -> (Vec<TracePolynomial>, CutoutReport) {
    let r = pres.rank();
    let jobs: Vec<(usize, usize)> = (0..pres.relators().len())
        .flat_map(|i| (0..=r as usize).map(move |j| (i, j)))
        .collect();
    let raw: Vec<TracePolynomial> = jobs
        .par_iter()
        .map(|&(i, j)| {
            let gamma = if j == 0 {
                FreeWord::empty(r)
            } else {
                FreeWord::generator(j as u32, r).expect("index within rank")
            };
            let word = pres.relators()[i].concat(&gamma).expect("same rank");
            reduce_trace(&word) - reduce_trace(&gamma)
        })
        .collect();
    let mut report = CutoutReport {
        considered: jobs.len(),
        zero: Vec::new(),
    };
    let mut out = Vec::new();
    for (&(i, j), p) in jobs.iter().zip(raw) {
        match p.primitive_part() {
            Ok(q) => out.push(q),
            Err(_) => {
                debug!(
                    "cut-out relation for relator {} and j={} is identically zero",
                    i + 1,
                    j
                );
                report.zero.push((i, j));
            }
        }
    }
    if !report.zero.is_empty() {
        warn!(
            "{} of {} cut-out relations vanished identically and were omitted",
            report.zero.len(),
            report.considered
        );
    }
    (out, report)
}

pub fn full_presentation(pres: &GroupPresentation) -> CharVarietyPresentation {
    let r = pres.rank();
    let (cutout, report) = cutout_relations_with_report(pres);
    CharVarietyPresentation {
        rank: r,
        generators: generators(r).expect("presentation rank is positive"),
        free_relations: free_relations(r),
        cutout_relations: cutout,
        report,
    }
}

/// Products of at most `max_factors` generators whose degree vector vanishes
/// mod 2, omitting those divisible by a smaller product already returned.
/// Ordered by number of factors, then lexicographically by generator position.
pub fn psl2_generators(r: u32, max_factors: u32) -> Result<Vec<Monomial>, RelationError> {
    if max_factors == 0 {
        return Err(RelationError::ZeroFactors);
    }
    let gens = generators(r)?;
    let parity: Vec<u64> = gens
        .iter()
        .map(|v| v.indices().iter().fold(0u64, |m, &i| m ^ (1 << (i - 1))))
        .collect();
    let mut out: Vec<Monomial> = Vec::new();
    let mut current: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..max_factors {
        let mut next = Vec::new();
        for ms in &current {
            let start = ms.last().copied().unwrap_or(0);
            for g in start..gens.len() {
                let mut m = ms.clone();
                m.push(g);
                next.push(m);
            }
        }
        let mut found = Vec::new();
        for ms in &next {
            if ms.iter().fold(0u64, |acc, &g| acc ^ parity[g]) != 0 {
                continue;
            }
            let mono = Monomial::from_pairs(ms.iter().map(|&g| (gens[g], 1)));
            if !out.iter().any(|m| m.divides(&mono)) {
                found.push(mono);
            }
        }
        out.extend(found);
        current = next;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> TracePolynomial {
        s.parse().unwrap()
    }

    #[test]
    fn generating_sets() {
        let g2: Vec<String> = generators(2)
            .unwrap()
            .iter()
            .map(|v| v.to_string())
            .collect();
        assert_eq!(g2, ["t{1}", "t{2}", "t{1,2}"]);
        assert_eq!(generators(3).unwrap().len(), 7);
        assert_eq!(generators(4).unwrap().len(), 14);
        assert_eq!(generators(0), Err(RelationError::ZeroRank));
    }

    #[test]
    fn counts() {
        assert_eq!(free_relation_count(3), 1);
        assert_eq!(free_relation_count(4), 14);
        assert_eq!(free_relation_count(5), 80);
        assert!(type1_relations(2).is_empty());
        assert!(type2_relations(3).is_empty());
        assert_eq!(type2_relations(5).len(), 25);
    }

    #[test]
    fn rank_three_relation_has_expected_scalar() {
        let zt = ZTraces::new(3);
        let ts = triples(3);
        let s = vec![zt.triple(ts[0])];
        let raw = type1_raw(&zt, &s, &ts, 0, 0);
        let pp = raw.primitive_part().unwrap();
        assert_eq!(raw, pp.scale(&Rational::from_integer(36.into())));
    }

    #[test]
    fn type1_is_symmetric() {
        let zt = ZTraces::new(4);
        let ts = triples(4);
        let s: Vec<_> = ts.iter().map(|&x| zt.triple(x)).collect();
        for a in 0..ts.len() {
            for b in 0..ts.len() {
                assert_eq!(type1_raw(&zt, &s, &ts, a, b), type1_raw(&zt, &s, &ts, b, a));
            }
        }
    }

    #[test]
    fn cutout_examples() {
        let pres =
            GroupPresentation::new(2, vec![FreeWord::new(vec![1, 2, 1, 2], 2).unwrap()]).unwrap();
        let got = cutout_relations(&pres);
        let want = [
            t("t{1,2}^2 - 4"),
            t("t{1}*t{1,2}^2 - t{2}*t{1,2} - 2*t{1}"),
            t("t{2}*t{1,2}^2 - t{1}*t{1,2} - 2*t{2}"),
        ];
        assert_eq!(got.len(), 3);
        for w in &want {
            assert!(got.contains(w), "missing {w}");
        }

        let a = GroupPresentation::new(1, vec![FreeWord::new(vec![1], 1).unwrap()]).unwrap();
        let got = cutout_relations(&a);
        assert!(got.contains(&t("t{1} - 2")));
        assert!(got.contains(&t("t{1}^2 - t{1} - 2")));

        assert!(cutout_relations(&GroupPresentation::free(1).unwrap()).is_empty());
    }

    #[test]
    fn zero_cutouts_are_reported() {
        // a a^-1 is dropped; for the commutator, [a,b] b = a b a^-1 is conjugate to b.
        let pres = GroupPresentation::new(
            2,
            vec![
                FreeWord::new(vec![1, -1], 2).unwrap(),
                FreeWord::new(vec![1, 2, -1, -2], 2).unwrap(),
            ],
        )
        .unwrap();
        assert_eq!(pres.relators().len(), 1);
        let (rels, report) = cutout_relations_with_report(&pres);
        assert_eq!(report.considered, 3);
        assert_eq!(report.zero, vec![(0, 2)]);
        assert_eq!(rels.len(), 2);
    }

    #[test]
    fn psl2_examples() {
        let m = |s: &str| {
            Monomial::from_pairs(s.split('*').map(|v| {
                (
                    TraceVariable::new(
                        &v.chars()
                            .map(|c| c.to_digit(10).unwrap())
                            .collect::<Vec<_>>(),
                    )
                    .unwrap(),
                    1,
                )
            }))
        };
        let got = psl2_generators(2, 3).unwrap();
        let want = [m("1*1"), m("2*2"), m("12*12"), m("1*2*12")];
        assert_eq!(got.len(), 4);
        for w in &want {
            assert!(got.contains(w));
        }
        assert_eq!(psl2_generators(1, 2).unwrap(), vec![m("1*1")]);
        let r3 = psl2_generators(3, 2).unwrap();
        assert_eq!(r3.len(), 7);
        assert!(r3.iter().all(|x| x.degree() == 2 && x.factors().len() == 1));
        assert_eq!(psl2_generators(2, 0), Err(RelationError::ZeroFactors));
    }
}
