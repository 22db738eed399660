//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

mod common;

use std::collections::HashMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use nalgebra::Matrix3;
use num_complex::Complex64;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

use charvar::cli::parse_snappy;
use charvar::groebner::{buchberger, normal_form, radical_equal, radical_member, PolynomialIdeal};
use charvar::numeric::{
    assignment_of, check_vanishing, check_vanishing_with, eval_word, jacobian_duplicated_row,
    jacobian_independence, sample_representation, RepresentationPoint,
};
use charvar::poly::{Monomial, MonomialOrder, Rational, TracePolynomial, TraceVariable};
use charvar::relations::{
    free_relation_count, free_relations, full_presentation, generator_count, generators,
    psl2_generators, type1_relations, GroupPresentation,
};
use charvar::traces::reduce_trace;
use charvar::words::FreeWord;

use common::*;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

struct Suite {
    failed: usize,
}

impl Suite {
    fn run(&mut self, id: u32, name: &str, budget: Duration, f: impl FnOnce() -> Check) {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let elapsed = start.elapsed();
        let result = match result {
            Ok(d) if elapsed > budget => Err(format!("{d}; over runtime budget")),
            r => r,
        };
        let (tag, detail) = match &result {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        println!(
            "{tag} criterion {id:>2} {name} [{:.2}s / {}s]: {detail}",
            elapsed.as_secs_f64(),
            budget.as_secs()
        );
        if result.is_err() {
            self.failed += 1;
        }
    }
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

fn trace_golden() -> Check {
    let got = reduce_trace(&word(&[1, 2, -3, 1], 3));
    let want: TracePolynomial = "t{3}*(t{1}*t{1,2} - t{2}) + t{2,3} - t{1}*t{1,2,3}"
        .parse()
        .unwrap();
    ensure(got == want, format!("got {got}"))?;
    Ok(got.to_string())
}

fn presentation_golden() -> Check {
    let cv = full_presentation(&one_relator(&[1, 2, 1, 2]));
    let want: Vec<TracePolynomial> = [
        "t{1,2}^2 - 4",
        "t{1}*t{1,2}^2 - t{2}*t{1,2} - 2*t{1}",
        "t{2}*t{1,2}^2 - t{1}*t{1,2} - 2*t{2}",
    ]
    .iter()
    .map(|s| {
        s.parse::<TracePolynomial>()
            .unwrap()
            .primitive_part()
            .unwrap()
    })
    .collect();
    ensure(cv.free_relations.is_empty(), "unexpected free relations")?;
    ensure(
        cv.cutout_relations.len() == want.len(),
        format!("{} cutout relations", cv.cutout_relations.len()),
    )?;
    for w in &want {
        ensure(cv.cutout_relations.contains(w), format!("missing {w}"))?;
    }
    Ok("three relations match".into())
}

/// Ratio `a / b` when it is the same for every term.
fn constant_ratio(a: &TracePolynomial, b: &TracePolynomial) -> Option<Rational> {
    let order = MonomialOrder::grevlex();
    let (ma, ca) = a.leading_term(&order)?;
    let (mb, cb) = b.leading_term(&order)?;
    if ma != mb || a.num_terms() != b.num_terms() {
        return None;
    }
    let r = ca / cb;
    a.terms()
        .all(|(m, c)| b.coefficient(m) * &r == *c)
        .then_some(r)
}

fn rank4_relations() -> Check {
    let ours = free_relations(4);
    ensure(ours.len() == 14, format!("{} relations", ours.len()))?;
    let fixture = rank4_fixture();
    ensure(fixture.len() == 14, "fixture does not hold 14 relations")?;
    let mut used = [false; 14];
    for (k, f) in fixture.iter().enumerate() {
        let pf = f.primitive_part().map_err(|e| e.to_string())?;
        let hit = ours.iter().enumerate().find_map(|(i, g)| {
            let r = constant_ratio(&pf, &g.primitive_part().ok()?)?;
            (!used[i] && r > Rational::from_integer(0.into())).then_some(i)
        });
        match hit {
            Some(i) => used[i] = true,
            None => return Err(format!("f{} has no match", k + 1)),
        }
    }
    ensure(used.iter().all(|u| *u), "bijection incomplete")?;
    Ok("14/14 matched".into())
}

fn goldman() -> Check {
    let rels = type1_relations(3);
    ensure(rels.len() == 1, format!("{} relations", rels.len()))?;
    let got = rels[0].primitive_part().map_err(|e| e.to_string())?;
    let p: TracePolynomial = "t{1}t{2,3} + t{2}t{1,3} + t{3}t{1,2} - t{1}t{2}t{3}"
        .parse()
        .unwrap();
    let q: TracePolynomial =
        "t{1}^2 + t{2}^2 + t{3}^2 + t{1,2}^2 + t{2,3}^2 + t{1,3}^2 - t{1}t{2}t{1,2} \
         - t{2}t{3}t{2,3} - t{1}t{3}t{1,3} + t{1,2}t{2,3}t{1,3} - 4"
            .parse()
            .unwrap();
    let t = TracePolynomial::var(TraceVariable::triple(1, 2, 3));
    let want = &(&t * &t) - &(&p * &t) + q;
    ensure(got == want, format!("got {got}"))?;
    Ok("t{1,2,3}^2 - P t{1,2,3} + Q".into())
}

fn counts() -> Check {
    for r in 1..=7u32 {
        let g = generators(r).map_err(|e| e.to_string())?.len() as u64;
        ensure(g == generator_count(r), format!("r={r}: {g} generators"))?;
        ensure(
            g * 6 == (r * (r * r + 5)) as u64,
            format!("r={r}: generator formula"),
        )?;
        let n = free_relations(r).len() as u64;
        ensure(n == free_relation_count(r), format!("r={r}: {n} relations"))?;
    }
    Ok(format!(
        "r=1..7, r=7 gives {} relations",
        free_relation_count(7)
    ))
}

fn figure_eight() -> Check {
    let order = MonomialOrder::grevlex();
    let raw = PolynomialIdeal::new(
        full_presentation(&one_relator(&FIGURE_EIGHT)).cutout_relations,
        order.clone(),
    );
    let stated = PolynomialIdeal::new(
        vec![
            xyz("y^2 - z - 2"),
            xyz("y^2 z - 2y^2 - z^2 + z + 1"),
            xyz("x - y"),
        ],
        order.clone(),
    );
    let equal = radical_equal(&raw, &stated).map_err(|e| e.to_string())?;
    if equal {
        return Ok("radical-equal".into());
    }
    let components = PolynomialIdeal::new(
        vec![
            xyz("(y^2 - z - 2)(y^2 z - 2y^2 - z^2 + z + 1)"),
            xyz("x - y"),
        ],
        order,
    );
    let union = radical_equal(&raw, &components).map_err(|e| e.to_string())?;
    Err(format!(
        "not radical-equal to the ideal generated by the three listed polynomials, whose zero set is \
         finite (z = 3, x = y, y^2 = 5); radical-equal to <(y^2-z-2)(y^2z-2y^2-z^2+z+1), x-y>: {union}"
    ))
}

fn whitehead() -> Check {
    let order = MonomialOrder::grevlex();
    let w = word(&WHITEHEAD, 2);
    let p123 =
        full_presentation(&GroupPresentation::new(2, vec![w.clone()]).unwrap()).cutout_relations;
    ensure(p123.len() == 3, format!("{} cutout relations", p123.len()))?;
    let p4 = reduce_trace(&word(&[1, 2], 2).concat(&w).unwrap()) - xyz("z");
    let mut all = p123.clone();
    all.push(p4.clone());
    let gb = buchberger(&PolynomialIdeal::new(all, order.clone())).map_err(|e| e.to_string())?;
    ensure(gb.len() == 1, format!("basis has {} elements", gb.len()))?;
    let target = xyz("(x^2 + y^2 + z^2 - x y z - 4)(-x y - 2z + x^2 z + y^2 z - x y z^2 + z^3)");
    let ratio =
        constant_ratio(&target, &gb.basis()[0]).ok_or("generator is not a multiple of P")?;
    let i1 = PolynomialIdeal::new(p123, order);
    let gb1 = buchberger(&i1).map_err(|e| e.to_string())?;
    ensure(!normal_form(&p4, &gb1).is_zero(), "P4 lies in I1")?;
    ensure(
        radical_member(&p4, &i1).map_err(|e| e.to_string())?,
        "P4 not in the radical of I1",
    )?;
    Ok(format!(
        "principal, P = {ratio} * generator; P4 in rad(I1) but not in I1"
    ))
}

fn whitehead_point() -> Check {
    let canonical = xyz("-x y - 2z + x^2 z + y^2 z - x y z^2 + z^3");
    let asg: HashMap<TraceVariable, Complex64> = [
        (TraceVariable::single(1), Complex64::new(2.0, 0.0)),
        (TraceVariable::single(2), Complex64::new(2.0, 0.0)),
        (TraceVariable::pair(1, 2), Complex64::new(1.0, 1.0)),
    ]
    .into_iter()
    .collect();
    let v = canonical.evaluate(&asg).map_err(|e| e.to_string())?.norm();
    ensure(v <= 1e-10, format!("|value| = {v:e}"))?;
    Ok(format!("|value| = {v:e}"))
}

fn weeks() -> Check {
    let parsed = parse_snappy(WEEKS_SNAPPY).map_err(|e| e.to_string())?;
    ensure(parsed.len() == 1, "expected one block")?;
    let pres = &parsed[0];
    ensure(pres.rank() == 2, "rank")?;
    let rels: Vec<&[i32]> = pres.relators().iter().map(|r| r.letters()).collect();
    ensure(
        rels == [
            &[1, 1, 2, 2, 1, 1, -2, 1, -2][..],
            &[1, 1, 2, 2, -1, 2, -1, 2, 2][..],
        ],
        format!("relators {rels:?}"),
    )?;
    let order = MonomialOrder::grevlex();
    let raw = PolynomialIdeal::new(full_presentation(pres).cutout_relations, order.clone());
    let six: Vec<TracePolynomial> = WEEKS_RELATIONS.iter().map(|s| xyz(s)).collect();
    let stated = PolynomialIdeal::new(six.clone(), order);
    ensure(
        radical_equal(&raw, &stated).map_err(|e| e.to_string())?,
        "not radical-equal",
    )?;

    let at = |x: Complex64, y: Complex64, z: Complex64| -> HashMap<TraceVariable, Complex64> {
        [
            (TraceVariable::single(1), x),
            (TraceVariable::single(2), y),
            (TraceVariable::pair(1, 2), z),
        ]
        .into_iter()
        .collect()
    };
    let two = Complex64::new(2.0, 0.0);
    for p in &six {
        let v = p.evaluate(&at(two, two, two)).map_err(|e| e.to_string())?;
        ensure(v == Complex64::new(0.0, 0.0), format!("(2,2,2) gives {v}"))?;
    }
    // Roots of t^3 - 2t^2 + 3t - 1 from the companion matrix.
    let companion = Matrix3::new(0.0, 0.0, 1.0, 1.0, 0.0, -3.0, 0.0, 1.0, 2.0);
    let roots = companion.complex_eigenvalues();
    for z in roots.iter().copied() {
        let z: Complex64 = z;
        let cubic = z * z * z - 2.0 * z * z + 3.0 * z - 1.0;
        ensure(cubic.norm() < 1e-12, "bad cubic root")?;
        let x = z * z - 2.0 * z + 2.0;
        for p in &six {
            let v = p.evaluate(&at(x, x, z)).map_err(|e| e.to_string())?.norm();
            ensure(v <= 1e-8, format!("root {z}: |value| = {v:e}"))?;
        }
    }
    Ok("radical-equal; (2,2,2) and the three cubic points satisfy all six".into())
}

fn vanishing() -> Check {
    let (trials, tol, seed) = (100, 1e-8, 20_240_101);
    let mut checked = 0;
    for r in 3..=5 {
        let rels = free_relations(r);
        let report = check_vanishing(&rels, r, trials, tol, seed).map_err(|e| e.to_string())?;
        ensure(report.passed(), format!("rank {r}: {report}"))?;
        checked += rels.len();
    }
    let mut groups = vec![one_relator(&FIGURE_EIGHT), one_relator(&WHITEHEAD)];
    groups.extend(parse_snappy(WEEKS_SNAPPY).map_err(|e| e.to_string())?);
    for g in &groups {
        let rels = full_presentation(g).cutout_relations;
        let report =
            check_vanishing_with(&rels, trials, tol, seed, |s| sample_representation(g, s))
                .map_err(|e| e.to_string())?;
        ensure(report.passed(), format!("{g}: {report}"))?;
        checked += rels.len();
    }
    Ok(format!("{checked} polynomials x {trials} points"))
}

fn jacobian() -> Check {
    let mut smallest = f64::INFINITY;
    let mut largest_control: f64 = 0.0;
    for r in 2..=6 {
        for seed in 0..5 {
            let d = jacobian_independence(r, seed).map_err(|e| e.to_string())?;
            ensure(d > 1e-6, format!("r={r} seed={seed}: |det| = {d:e}"))?;
            let c = jacobian_duplicated_row(r, seed).map_err(|e| e.to_string())?;
            ensure(
                c <= 1e-9,
                format!("control r={r} seed={seed}: |det| = {c:e}"),
            )?;
            smallest = smallest.min(d);
            largest_control = largest_control.max(c);
        }
    }
    Ok(format!(
        "min |det| = {smallest:e}, max control = {largest_control:e}"
    ))
}

fn psl2() -> Check {
    let got = psl2_generators(2, 3).map_err(|e| e.to_string())?;
    let (a, b, ab) = (
        TraceVariable::single(1),
        TraceVariable::single(2),
        TraceVariable::pair(1, 2),
    );
    let want = [
        Monomial::from_pairs([(a, 2)]),
        Monomial::from_pairs([(b, 2)]),
        Monomial::from_pairs([(ab, 2)]),
        Monomial::from_pairs([(a, 1), (b, 1), (ab, 1)]),
    ];
    ensure(
        got.len() == want.len() && want.iter().all(|m| got.contains(m)),
        format!("got {got:?}"),
    )?;
    Ok("{t{1}^2, t{2}^2, t{1,2}^2, t{1}t{2}t{1,2}}".into())
}

fn word_strategy() -> impl Strategy<Value = FreeWord> {
    (1..=4u32).prop_flat_map(|r| {
        let letter = (1..=r as i32, any::<bool>()).prop_map(|(i, inv)| if inv { -i } else { i });
        proptest::collection::vec(letter, 0..=10).prop_map(move |l| FreeWord::new(l, r).unwrap())
    })
}

fn small_poly() -> impl Strategy<Value = TracePolynomial> {
    let vars = [
        TraceVariable::single(1),
        TraceVariable::single(2),
        TraceVariable::pair(1, 2),
    ];
    let term =
        (0..=2u32, 0..=2u32, 0..=1u32, -4..=4i64, 1..=3i64).prop_map(move |(a, b, c, n, d)| {
            let m = Monomial::from_pairs(
                [(vars[0], a), (vars[1], b), (vars[2], c)]
                    .into_iter()
                    .filter(|p| p.1 > 0),
            );
            (m, Rational::new(n.into(), d.into()))
        });
    proptest::collection::vec(term, 0..=4).prop_map(TracePolynomial::from_terms)
}

fn gb_input() -> impl Strategy<Value = (Vec<TracePolynomial>, Vec<TracePolynomial>)> {
    let vars = [
        TraceVariable::single(1),
        TraceVariable::single(2),
        TraceVariable::pair(1, 2),
    ];
    let term = (0..=1u32, 0..=1u32, 0..=1u32, -3..=3i64).prop_map(move |(a, b, c, n)| {
        let m = Monomial::from_pairs(
            [(vars[0], a), (vars[1], b), (vars[2], c)]
                .into_iter()
                .filter(|p| p.1 > 0),
        );
        (m, Rational::from_integer(n.into()))
    });
    let poly = proptest::collection::vec(term, 1..=3).prop_map(TracePolynomial::from_terms);
    proptest::collection::vec(poly, 1..=3)
        .prop_flat_map(|gens| (Just(gens.clone()), Just(gens).prop_shuffle()))
}

fn fail<T: std::fmt::Debug>(name: &str, e: proptest::test_runner::TestError<T>) -> String {
    format!("{name}: {e}")
}

fn properties() -> Check {
    let cases = 1000;
    let runner = || {
        TestRunner::new(Config {
            cases,
            failure_persistence: None,
            ..Config::default()
        })
    };

    runner()
        .run(&(word_strategy(), any::<u64>()), |(w, seed)| {
            let pt = RepresentationPoint::random(w.rank(), seed);
            let direct = eval_word(&w, &pt).unwrap();
            let asg = assignment_of(&pt);
            let p = reduce_trace(&w);
            let symbolic = p.evaluate(&asg).unwrap();
            let scale = 1.0 + p.max_term_magnitude(&asg).unwrap().max(direct.norm());
            prop_assert!(
                (direct - symbolic).norm() <= 1e-8 * scale,
                "{w}: {direct} vs {symbolic}"
            );
            Ok(())
        })
        .map_err(|e| fail("oracle agreement", e))?;

    runner()
        .run(&(word_strategy(), 0..16usize), |(w, k)| {
            let w = w.free_reduce();
            let base = reduce_trace(&w);
            let k = if w.is_empty() { 0 } else { k % w.len() };
            prop_assert_eq!(&reduce_trace(&w.rotate(k)), &base);
            prop_assert_eq!(&reduce_trace(&w.invert()), &base);
            Ok(())
        })
        .map_err(|e| fail("cyclic/inverse invariance", e))?;

    runner()
        .run(&word_strategy(), |w| {
            let once = w.free_reduce();
            prop_assert!(once.is_freely_reduced());
            prop_assert_eq!(once.free_reduce(), once);
            Ok(())
        })
        .map_err(|e| fail("free_reduce idempotence", e))?;

    runner()
        .run(&gb_input(), |(gens, shuffled)| {
            let order = MonomialOrder::grevlex();
            let a = buchberger(&PolynomialIdeal::new(gens, order.clone()))
                .map_err(|e| TestCaseError::fail(e.to_string()))?;
            let b = buchberger(&PolynomialIdeal::new(shuffled, order))
                .map_err(|e| TestCaseError::fail(e.to_string()))?;
            prop_assert_eq!(a, b);
            Ok(())
        })
        .map_err(|e| fail("groebner permutation invariance", e))?;

    runner()
        .run(&(small_poly(), small_poly(), small_poly()), |(a, b, c)| {
            prop_assert_eq!(&a + &b, &b + &a);
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            let neg = a.scale(&Rational::from_integer((-1).into()));
            prop_assert!((&a + &neg).is_zero());
            prop_assert_eq!(&a * &TracePolynomial::one(), a.clone());
            prop_assert_eq!(&a + &TracePolynomial::zero(), a.clone());
            Ok(())
        })
        .map_err(|e| fail("ring axioms", e))?;

    Ok(format!("5 suites x {cases} cases"))
}

fn main() {
    let mut suite = Suite { failed: 0 };
    suite.run(1, "trace reduction golden", secs(1), trace_golden);
    suite.run(2, "presentation golden", secs(1), presentation_golden);
    suite.run(3, "rank-4 free relations", secs(30), rank4_relations);
    suite.run(4, "rank-3 relation", secs(5), goldman);
    suite.run(5, "counts", secs(300), counts);
    suite.run(6, "figure-eight knot", secs(120), figure_eight);
    suite.run(7, "Whitehead link", secs(600), whitehead);
    suite.run(
        8,
        "Whitehead discrete faithful point",
        secs(1),
        whitehead_point,
    );
    suite.run(9, "Weeks manifold", secs(600), weeks);
    suite.run(10, "numeric vanishing", secs(300), vanishing);
    suite.run(11, "Jacobian independence", secs(60), jacobian);
    suite.run(12, "PSL2 generators", secs(1), psl2);
    suite.run(13, "property suites", secs(3600), properties);
    println!("{} of 13 criteria failed", suite.failed);
    if suite.failed > 0 {
        std::process::exit(1);
    }
}
