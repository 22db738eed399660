//! Floating-point checks: random SL(2,C) tuples, word and polynomial
//! evaluation, relation vanishing and the Jacobian independence test.

use std::collections::HashMap;
use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::poly::{PolyError, TracePolynomial, TraceVariable};
use crate::relations::{generators, variable_word, GroupPresentation};
use crate::words::FreeWord;

/// Finite-difference step for the Jacobian.
pub const JACOBIAN_STEP: f64 = 1e-6;
const MAX_RESAMPLES: usize = 10;
const MIN_ENTRY: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericError {
    #[error("word of rank {word} evaluated at a point of rank {point}")]
    RankMismatch { word: u32, point: usize },
    #[error("no usable parameter point after {0} resamples")]
    Parametrization(usize),
    #[error("jacobian check needs rank at least 2, got {0}")]
    RankTooSmall(u32),
    #[error("could not find a representation of {presentation} (last residual {residual:e})")]
    Sampling { presentation: String, residual: f64 },
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// `[[a, b], [c, d]]` with `ad - bc = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SL2Matrix {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl SL2Matrix {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        SL2Matrix { a, b, c, d }
    }

    pub fn identity() -> Self {
        let (o, z) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
        SL2Matrix::new(o, z, z, o)
    }

    pub fn det(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    pub fn is_unimodular(&self, tol: f64) -> bool {
        (self.det() - 1.0).norm() <= tol
    }

    pub fn trace(&self) -> Complex64 {
        self.a + self.d
    }

    /// The adjugate, which is the inverse when `det = 1`.
    pub fn inverse(&self) -> Self {
        SL2Matrix::new(self.d, -self.b, -self.c, self.a)
    }

    pub fn mul(&self, o: &SL2Matrix) -> Self {
        SL2Matrix::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }

    fn entries(&self) -> [Complex64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    fn from_entries(e: &[Complex64]) -> Self {
        SL2Matrix::new(e[0], e[1], e[2], e[3])
    }
}

impl fmt::Display for SL2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

/// A tuple `(ρ(X_1), ..., ρ(X_r))`.
#[derive(Debug, Clone, PartialEq)]
pub struct RepresentationPoint {
    pub matrices: Vec<SL2Matrix>,
    pub seed: u64,
}

impl RepresentationPoint {
    pub fn new(matrices: Vec<SL2Matrix>, seed: u64) -> Self {
        RepresentationPoint { matrices, seed }
    }

    pub fn rank(&self) -> usize {
        self.matrices.len()
    }

    /// `r` independent draws of [`random_sl2`] from a generator seeded with `seed`.
    pub fn random(rank: u32, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let matrices = (0..rank).map(|_| random_sl2(&mut rng)).collect();
        RepresentationPoint { matrices, seed }
    }

    fn letter(&self, l: i32) -> SL2Matrix {
        let m = self.matrices[l.unsigned_abs() as usize - 1];
        if l > 0 {
            m
        } else {
            m.inverse()
        }
    }
}

fn random_complex<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0))
}

/// `a, b, c` uniform in the box `[-1,1]^2`, `a` resampled until `|a| >= 0.1`,
/// and `d = (1 + bc)/a`.
pub fn random_sl2<R: Rng>(rng: &mut R) -> SL2Matrix {
    let a = loop {
        let a = random_complex(rng);
        if a.norm() >= MIN_ENTRY {
            break a;
        }
    };
    let b = random_complex(rng);
    let c = random_complex(rng);
    SL2Matrix::new(a, b, c, (1.0 + b * c) / a)
}

fn word_matrix(letters: &[i32], pt: &RepresentationPoint) -> SL2Matrix {
    letters
        .iter()
        .fold(SL2Matrix::identity(), |acc, &l| acc.mul(&pt.letter(l)))
}

/// Trace of the product of the matrices named by `w`.
pub fn eval_word(w: &FreeWord, pt: &RepresentationPoint) -> Result<Complex64, NumericError> {
    let too_big = w
        .letters()
        .iter()
        .any(|l| l.unsigned_abs() as usize > pt.rank());
    if too_big {
        return Err(NumericError::RankMismatch {
            word: w.rank(),
            point: pt.rank(),
        });
    }
    Ok(word_matrix(w.letters(), pt).trace())
}

/// Values of every `t{S}`, `|S| <= 3`, at the point.
pub fn assignment_of(pt: &RepresentationPoint) -> HashMap<TraceVariable, Complex64> {
    let r = pt.rank() as u32;
    if r == 0 {
        return HashMap::new();
    }
    generators(r)
        .expect("positive rank")
        .into_iter()
        .map(|v| {
            let w = variable_word(&v, r).expect("variable within rank");
            (v, word_matrix(w.letters(), pt).trace())
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VanishingFailure {
    pub polynomial: usize,
    pub seed: u64,
    pub value: f64,
    pub scale: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VanishingReport {
    pub polynomials: usize,
    pub trials: usize,
    pub tolerance: f64,
    pub failures: Vec<VanishingFailure>,
}

impl VanishingReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

impl fmt::Display for VanishingReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for x in &self.failures {
            writeln!(
                f,
                "polynomial {} seed {} |value| {:e}",
                x.polynomial, x.seed, x.value
            )?;
        }
        write!(
            f,
            "{} polynomials, {} trials, tolerance {:e}: {} failures",
            self.polynomials,
            self.trials,
            self.tolerance,
            self.failures.len()
        )
    }
}

/// Evaluates every polynomial at `trials` random rank-`rank` tuples, trial `i`
/// using seed `seed + i`. A value fails when
/// `|p| > tol * (1 + max |term|)`.
pub fn check_vanishing(
    polys: &[TracePolynomial],
    rank: u32,
    trials: usize,
    tol: f64,
    seed: u64,
) -> Result<VanishingReport, NumericError> {
    check_vanishing_with(polys, trials, tol, seed, |s| {
        Ok(RepresentationPoint::random(rank, s))
    })
}

/// Like [`check_vanishing`], drawing points from `sample`.
pub fn check_vanishing_with<F>(
    polys: &[TracePolynomial],
    trials: usize,
    tol: f64,
    seed: u64,
    sample: F,
) -> Result<VanishingReport, NumericError>
where
    F: Fn(u64) -> Result<RepresentationPoint, NumericError> + Sync,
{
    let per_trial: Vec<Result<Vec<VanishingFailure>, NumericError>> = (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let s = seed.wrapping_add(i);
            let asg = assignment_of(&sample(s)?);
            let mut out = Vec::new();
            for (k, p) in polys.iter().enumerate() {
                let value = p.evaluate(&asg)?.norm();
                let scale = p.max_term_magnitude(&asg)?;
                if value.is_nan() || value > tol * (1.0 + scale) {
                    out.push(VanishingFailure {
                        polynomial: k,
                        seed: s,
                        value,
                        scale,
                    });
                }
            }
            Ok(out)
        })
        .collect();
    let mut failures = Vec::new();
    for t in per_trial {
        failures.extend(t?);
    }
    failures.sort_by_key(|f| (f.polynomial, f.seed));
    Ok(VanishingReport {
        polynomials: polys.len(),
        trials,
        tolerance: tol,
        failures,
    })
}

/// A random point of `Hom(Γ, SL2)`: a random tuple pushed onto the solution
/// set of `det = 1`, `ρ(R) = 1` by damped Gauss-Newton steps of minimal norm.
pub fn sample_representation(
    pres: &GroupPresentation,
    seed: u64,
) -> Result<RepresentationPoint, NumericError> {
    let r = pres.rank();
    if pres.relators().is_empty() {
        return Ok(RepresentationPoint::random(r, seed));
    }
    let mut residual = f64::INFINITY;
    for attempt in 0..MAX_RESAMPLES as u64 {
        let start =
            RepresentationPoint::random(r, seed.wrapping_add(attempt.wrapping_mul(0x9e37_79b9)));
        let mut x: Vec<Complex64> = start.matrices.iter().flat_map(|m| m.entries()).collect();
        let mut fx = rep_residual(pres, &x);
        for _ in 0..200 {
            residual = norm(&fx);
            if residual < 1e-14 {
                break;
            }
            let jac = rep_jacobian(pres, &x);
            let rhs = DVector::from_iterator(fx.len(), fx.iter().map(|v| -v));
            let Ok(step) = jac.svd(true, true).solve(&rhs, 1e-12) else {
                break;
            };
            let mut t = 1.0;
            let mut improved = false;
            for _ in 0..30 {
                let trial: Vec<Complex64> =
                    x.iter().zip(step.iter()).map(|(a, s)| a + s * t).collect();
                let ft = rep_residual(pres, &trial);
                if norm(&ft) < residual {
                    x = trial;
                    fx = ft;
                    improved = true;
                    break;
                }
                t *= 0.5;
            }
            if !improved {
                break;
            }
        }
        residual = norm(&fx);
        if residual < 1e-12 {
            let matrices = x.chunks(4).map(SL2Matrix::from_entries).collect();
            return Ok(RepresentationPoint::new(matrices, seed));
        }
    }
    Err(NumericError::Sampling {
        presentation: pres.to_string(),
        residual,
    })
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn rep_point(x: &[Complex64]) -> RepresentationPoint {
    RepresentationPoint::new(x.chunks(4).map(SL2Matrix::from_entries).collect(), 0)
}

fn rep_residual(pres: &GroupPresentation, x: &[Complex64]) -> Vec<Complex64> {
    let pt = rep_point(x);
    let mut out: Vec<Complex64> = pt.matrices.iter().map(|m| m.det() - 1.0).collect();
    for rel in pres.relators() {
        let m = word_matrix(rel.letters(), &pt);
        out.extend([m.a - 1.0, m.b, m.c, m.d - 1.0]);
    }
    out
}

/// Exact derivative of the residual. Entries of `ρ(X^-1)` are the adjugate
/// entries, so every component is polynomial in `x`.
fn rep_jacobian(pres: &GroupPresentation, x: &[Complex64]) -> DMatrix<Complex64> {
    let pt = rep_point(x);
    let r = pt.rank();
    let rows = r + 4 * pres.relators().len();
    let mut jac = DMatrix::<Complex64>::zeros(rows, 4 * r);
    for (i, m) in pt.matrices.iter().enumerate() {
        // d(ad - bc) = (d, -c, -b, a)
        jac[(i, 4 * i)] = m.d;
        jac[(i, 4 * i + 1)] = -m.c;
        jac[(i, 4 * i + 2)] = -m.b;
        jac[(i, 4 * i + 3)] = m.a;
    }
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    for (k, rel) in pres.relators().iter().enumerate() {
        let letters = rel.letters();
        let mats: Vec<SL2Matrix> = letters.iter().map(|&l| pt.letter(l)).collect();
        let mut prefix = vec![SL2Matrix::identity()];
        for m in &mats {
            prefix.push(prefix.last().unwrap().mul(m));
        }
        let mut suffix = vec![SL2Matrix::identity(); mats.len() + 1];
        for p in (0..mats.len()).rev() {
            suffix[p] = mats[p].mul(&suffix[p + 1]);
        }
        for (p, &l) in letters.iter().enumerate() {
            let g = l.unsigned_abs() as usize - 1;
            for e in 0..4 {
                let mut unit = [zero; 4];
                if l > 0 {
                    unit[e] = one;
                } else {
                    // adj: a -> d, b -> -b, c -> -c, d -> a
                    let (pos, sign) = [(3, one), (1, -one), (2, -one), (0, one)][e];
                    unit[pos] = sign;
                }
                let dm = prefix[p]
                    .mul(&SL2Matrix::from_entries(&unit))
                    .mul(&suffix[p + 1]);
                let row = r + 4 * k;
                for (o, v) in dm.entries().into_iter().enumerate() {
                    jac[(row + o, 4 * g + e)] += v;
                }
            }
        }
    }
    jac
}

/// The parametrized tuple used by the Jacobian test.
fn parametrized_tuple(r: usize, p: &[Complex64]) -> Vec<SL2Matrix> {
    let one = Complex64::new(1.0, 0.0);
    let mut out = Vec::with_capacity(r);
    out.push(SL2Matrix::new(
        p[0],
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
        one / p[0],
    ));
    out.push(SL2Matrix::new(p[1], p[1] * p[2] - one, one, p[2]));
    for k in 2..r {
        let (a, b, d) = (p[3 * k - 3], p[3 * k - 2], p[3 * k - 1]);
        out.push(SL2Matrix::new(a, b, (a * d - one) / b, d));
    }
    out
}

/// `tr X_i`, then `tr X_1 X_i` for `i >= 2`, then `tr X_2 X_i` for `i >= 3`.
fn independence_functions(ms: &[SL2Matrix], duplicate_last: bool) -> Vec<Complex64> {
    let mut out: Vec<Complex64> = ms.iter().map(|m| m.trace()).collect();
    out.extend(ms[1..].iter().map(|m| ms[0].mul(m).trace()));
    out.extend(ms[2..].iter().map(|m| ms[1].mul(m).trace()));
    if duplicate_last {
        let n = out.len();
        out[n - 2] = out[n - 1];
    }
    out
}

fn jacobian_det(r: u32, seed: u64, duplicate_last: bool) -> Result<f64, NumericError> {
    if r < 2 {
        return Err(NumericError::RankTooSmall(r));
    }
    let r = r as usize;
    let n = 3 * r - 3;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut params = None;
    for _ in 0..MAX_RESAMPLES {
        let p: Vec<Complex64> = (0..n).map(|_| random_complex(&mut rng)).collect();
        let ok = p[0].norm() >= MIN_ENTRY && (2..r).all(|k| p[3 * k - 2].norm() >= MIN_ENTRY);
        if ok {
            params = Some(p);
            break;
        }
    }
    let p = params.ok_or(NumericError::Parametrization(MAX_RESAMPLES))?;
    let mut jac = DMatrix::<Complex64>::zeros(n, n);
    for col in 0..n {
        let (mut plus, mut minus) = (p.clone(), p.clone());
        plus[col] += JACOBIAN_STEP;
        minus[col] -= JACOBIAN_STEP;
        let fp = independence_functions(&parametrized_tuple(r, &plus), duplicate_last);
        let fm = independence_functions(&parametrized_tuple(r, &minus), duplicate_last);
        for row in 0..n {
            jac[(row, col)] = (fp[row] - fm[row]) / (2.0 * JACOBIAN_STEP);
        }
    }
    Ok(jac.determinant().norm())
}

/// `|det|` of the Jacobian of the `3r - 3` trace functions with respect to
/// the free entries of the parametrized tuple, at a random point.
pub fn jacobian_independence(r: u32, seed: u64) -> Result<f64, NumericError> {
    jacobian_det(r, seed, false)
}

/// The same determinant with the second-to-last function replaced by a copy of the last.
pub fn jacobian_duplicated_row(r: u32, seed: u64) -> Result<f64, NumericError> {
    jacobian_det(r, seed, true)
}
