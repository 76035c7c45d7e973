//! Randomized checks of the algebraic identities and of the involution test,
//! shared by the property tests and the acceptance run.

#![allow(dead_code)]

use crate::common::*;
use cartan::coframe::SymbolKind;
use cartan::dsl;
use cartan::forms::subsets;
use cartan::involution::{cartan_test, characters, find_integral_element, polar_equations, Flag};
use cartan::linalg;
use cartan::{DForm, IntegralElement, Manifold, NumForm, Point, Scalar, TangentVector};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const CASES: u32 = 128;

fn check<S: Strategy>(
    cases: u32,
    strategy: &S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    let config = Config {
        failure_persistence: None,
        ..Config::with_cases(cases)
    };
    TestRunner::new(config).run(strategy, test).map_err(|e| e.to_string())
}

/// Manifolds with nontrivial structure equations whose symbols all have
/// known differentials.
fn manifolds() -> Vec<Manifold> {
    vec![
        fixture("plane-curves").manifold,
        fixture("webs").manifold,
        dsl::parse(
            "manifold F { coordinates t; coframe w1 w2 g; const K; \
             d w1 = -g^w2; d w2 = g^w1; d g = K*w1^w2; }",
        )
        .unwrap()
        .manifold,
    ]
}

/// Symbols that coefficients may use.
fn coefficient_symbols(m: &Manifold) -> Vec<String> {
    m.symbols()
        .filter(|(_, k)| !matches!(k, SymbolKind::Free))
        .map(|(n, _)| n.to_string())
        .collect()
}

fn random_coefficient(rng: &mut ChaCha8Rng, syms: &[String]) -> Scalar {
    let mut c = Scalar::zero();
    for _ in 0..rng.gen_range(1..=3) {
        let mut t = Scalar::from(rng.gen_range(-4i64..=4));
        for _ in 0..rng.gen_range(0..=2) {
            if !syms.is_empty() {
                t = &t * &Scalar::symbol(&syms[rng.gen_range(0..syms.len())]);
            }
        }
        c = &c + &t;
    }
    c
}

fn random_form(rng: &mut ChaCha8Rng, m: &Manifold, degree: usize) -> DForm {
    let n = m.dim();
    let syms = coefficient_symbols(m);
    let all = subsets(n, degree);
    let terms: Vec<_> = (0..rng.gen_range(1..=4))
        .map(|_| (all[rng.gen_range(0..all.len())].clone(), random_coefficient(rng, &syms)))
        .collect();
    DForm::from_terms(degree, terms)
}

fn sign(k: usize) -> Scalar {
    Scalar::from(if k.is_multiple_of(2) { 1 } else { -1 })
}

pub fn d_squared_is_zero(cases: u32) -> Result<(), String> {
    check(cases, &(any::<u64>(), 0usize..3, 0usize..3), |(seed, which, degree)| {
        let m = &manifolds()[which];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_form(&mut rng, m, degree);
        let dd = m.d(&m.d(&f).unwrap()).unwrap();
        prop_assert!(dd.is_zero(), "d^2 {:?} = {:?}", f, dd);
        Ok(())
    })
}

pub fn wedge_is_graded_commutative(cases: u32) -> Result<(), String> {
    check(
        cases,
        &(any::<u64>(), 0usize..3, 0usize..3, 0usize..3),
        |(seed, which, k, l)| {
            let m = &manifolds()[which];
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_form(&mut rng, m, k);
            let b = random_form(&mut rng, m, l);
            prop_assert_eq!(a.wedge(&b), b.wedge(&a).scale(&sign(k * l)));
            Ok(())
        },
    )
}

pub fn d_obeys_leibniz(cases: u32) -> Result<(), String> {
    check(
        cases,
        &(any::<u64>(), 0usize..3, 0usize..3, 0usize..2),
        |(seed, which, k, l)| {
            let m = &manifolds()[which];
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_form(&mut rng, m, k);
            let b = random_form(&mut rng, m, l);
            let lhs = m.d(&a.wedge(&b)).unwrap();
            let rhs = m
                .d(&a)
                .unwrap()
                .wedge(&b)
                .add(&a.wedge(&m.d(&b).unwrap()).scale(&sign(k)))
                .unwrap();
            prop_assert_eq!(lhs, rhs);
            Ok(())
        },
    )
}

const FLAG_FIXTURES: [&str; 9] = [
    "harmonic",
    "webs",
    "immersion",
    "lagrangian-n3",
    "frobenius",
    "plane-curves",
    "trivial-1",
    "trivial-3",
    "trivial-5",
];

struct Element {
    sys: cartan::ExteriorSystem,
    point: Point,
    basis: Vec<TangentVector>,
    closure: Vec<NumForm>,
}

fn element(name: &str) -> Element {
    let doc = fixture(name);
    let sys = doc.system().unwrap().clone();
    let e = match doc.integral_element().unwrap() {
        Some(e) => e,
        None => {
            let a = find_integral_element(&sys, &doc.point(), doc.seed.unwrap_or(0)).unwrap();
            IntegralElement::from_chart(&sys, doc.point(), &a).unwrap()
        }
    };
    let closure = sys.closure_at(&e.point).unwrap();
    Element {
        sys,
        point: e.point,
        basis: e.basis,
        closure,
    }
}

fn small(rng: &mut ChaCha8Rng) -> BigRational {
    BigRational::from_integer(BigInt::from(rng.gen_range(-5i64..=5)))
}

/// A random basis of the same plane.
fn rebase(rng: &mut ChaCha8Rng, basis: &[TangentVector]) -> Vec<TangentVector> {
    let p = basis.len();
    loop {
        let g: Vec<Vec<BigRational>> = (0..p).map(|_| (0..p).map(|_| small(rng)).collect()).collect();
        if linalg::rank(&g) < p {
            continue;
        }
        let n = basis.first().map_or(0, TangentVector::dim);
        return g
            .iter()
            .map(|row| {
                row.iter()
                    .zip(basis)
                    .fold(TangentVector::zeros(n), |acc, (c, v)| acc.add_scaled(c, v))
            })
            .collect();
    }
}

fn vanishes_on(closure: &[NumForm], vs: &[TangentVector]) -> bool {
    closure.iter().filter(|f| f.degree() <= vs.len()).all(|f| {
        subsets(vs.len(), f.degree()).iter().all(|s| {
            let sub: Vec<TangentVector> = s.iter().map(|&i| vs[i].clone()).collect();
            f.eval_on(&sub).is_zero()
        })
    })
}

pub fn polar_ranks_increase_along_any_flag(cases: u32) -> Result<(), String> {
    check(cases, &(any::<u64>(), 0usize..FLAG_FIXTURES.len()), |(seed, which)| {
        let e = element(FLAG_FIXTURES[which]);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let vs = rebase(&mut rng, &e.basis);
        let flag = Flag::new(&e.closure, e.sys.dim(), vs);
        for w in flag.polar_ranks.windows(2) {
            prop_assert!(w[0] <= w[1], "{:?}", flag.polar_ranks);
        }
        let chars = characters(e.sys.dim(), e.sys.p(), &flag.polar_ranks).unwrap();
        prop_assert_eq!(chars.iter().sum::<i64>(), (e.sys.dim() - e.sys.p()) as i64);
        Ok(())
    })
}

pub fn characters_do_not_depend_on_the_basis(cases: u32) -> Result<(), String> {
    check(cases, &(any::<u64>(), 0usize..FLAG_FIXTURES.len()), |(seed, which)| {
        let name = FLAG_FIXTURES[which];
        let e = element(name);
        let reference = report(name);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let other = IntegralElement::new(e.point.clone(), rebase(&mut rng, &e.basis));
        let r = cartan_test(&e.sys, &e.point, Some(&other), seed).unwrap();
        prop_assert_eq!(&r.characters, &reference.characters, "{}", name);
        prop_assert_eq!(r.actual_dim, reference.actual_dim);
        prop_assert_eq!(r.characters.iter().sum::<i64>(), (r.dim - r.p) as i64);
        Ok(())
    })
}

pub fn polar_kernel_is_exactly_the_extending_vectors(cases: u32) -> Result<(), String> {
    check(
        cases,
        &(any::<u64>(), 0usize..FLAG_FIXTURES.len(), 0usize..3),
        |(seed, which, k)| {
            let e = element(FLAG_FIXTURES[which]);
            let n = e.sys.dim();
            let k = k.min(e.sys.p() - 1);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let ek: Vec<TangentVector> = rebase(&mut rng, &e.basis).into_iter().take(k).collect();
            let rows = polar_equations(&e.closure, n, &ek);
            let kernel = linalg::nullspace(&rows, n);
            // half the time a vector from the polar space, otherwise an arbitrary one
            let w: Vec<BigRational> = if rng.gen_bool(0.5) && !kernel.is_empty() {
                kernel.iter().fold(vec![BigRational::zero(); n], |acc, v| {
                    let c = small(&mut rng);
                    acc.iter().zip(v).map(|(a, b)| a + &c * b).collect()
                })
            } else {
                (0..n).map(|_| small(&mut rng)).collect()
            };
            let mut plane = ek.clone();
            plane.push(TangentVector(w.clone()));
            let m: Vec<Vec<BigRational>> = plane.iter().map(|v| v.0.clone()).collect();
            prop_assume!(linalg::rank(&m) == k + 1);
            let polar_zero = rows
                .iter()
                .all(|r| r.iter().zip(&w).map(|(a, b)| a * b).sum::<BigRational>().is_zero());
            prop_assert_eq!(polar_zero, vanishes_on(&e.closure, &plane));
            Ok(())
        },
    )
}

#[derive(Clone, Debug)]
enum Expr {
    Int(i64),
    Var(usize),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
}

const VARS: [&str; 3] = ["x", "y", "z"];

fn expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![(-6i64..=6).prop_map(Expr::Int), (0usize..3).prop_map(Expr::Var)];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Add(a.into(), b.into())),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Sub(a.into(), b.into())),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Mul(a.into(), b.into())),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Div(a.into(), b.into())),
            (inner, -2i32..=3).prop_map(|(a, k)| Expr::Pow(a.into(), k)),
        ]
    })
}

/// `None` when the expression divides by zero.
fn to_scalar(e: &Expr) -> Option<Scalar> {
    Some(match e {
        Expr::Int(n) => Scalar::from(*n),
        Expr::Var(i) => Scalar::symbol(VARS[*i]),
        Expr::Add(a, b) => &to_scalar(a)? + &to_scalar(b)?,
        Expr::Sub(a, b) => &to_scalar(a)? - &to_scalar(b)?,
        Expr::Mul(a, b) => &to_scalar(a)? * &to_scalar(b)?,
        Expr::Div(a, b) => to_scalar(a)?.checked_div(&to_scalar(b)?).ok()?,
        Expr::Pow(a, k) => to_scalar(a)?.pow(*k).ok()?,
    })
}

/// Direct evaluation in the rationals; `None` on division by zero.
fn eval(e: &Expr, at: &[BigRational; 3]) -> Option<BigRational> {
    Some(match e {
        Expr::Int(n) => BigRational::from_integer(BigInt::from(*n)),
        Expr::Var(i) => at[*i].clone(),
        Expr::Add(a, b) => eval(a, at)? + eval(b, at)?,
        Expr::Sub(a, b) => eval(a, at)? - eval(b, at)?,
        Expr::Mul(a, b) => eval(a, at)? * eval(b, at)?,
        Expr::Div(a, b) => {
            let d = eval(b, at)?;
            if d.is_zero() {
                return None;
            }
            eval(a, at)? / d
        }
        Expr::Pow(a, k) => {
            let base = eval(a, at)?;
            if *k < 0 && base.is_zero() {
                return None;
            }
            let mut r = BigRational::one();
            for _ in 0..k.unsigned_abs() {
                r *= &base;
            }
            if *k < 0 {
                r.recip()
            } else {
                r
            }
        }
    })
}

fn xyz() -> Manifold {
    dsl::parse("manifold E { coordinates x y z; }").unwrap().manifold
}

fn point() -> impl Strategy<Value = [BigRational; 3]> {
    proptest::array::uniform3((-40i64..=40, 1i64..=7).prop_map(|(n, d)| q(n, d)))
}

pub fn printing_and_reparsing_is_the_identity(cases: u32) -> Result<(), String> {
    check(cases, &expr(), |e| {
        let Some(s) = to_scalar(&e) else { return Ok(()) };
        let again = dsl::parse_scalar(&xyz(), &s.to_string()).unwrap();
        prop_assert_eq!(&again, &s);
        prop_assert_eq!(again.to_string(), s.to_string());
        Ok(())
    })
}

pub fn canonical_form_agrees_with_evaluation(cases: u32) -> Result<(), String> {
    check(cases, &(expr(), point()), |(e, at)| {
        let Some(s) = to_scalar(&e) else { return Ok(()) };
        let mut pt = Point::new();
        for (v, x) in VARS.iter().zip(&at) {
            pt.insert(v.to_string(), x.clone());
        }
        match (s.eval(&pt), eval(&e, &at)) {
            (Ok(a), Some(b)) => prop_assert_eq!(a, b),
            // a removable singularity of the expression is fine; the
            // canonical form may still be defined there
            (_, None) => {}
            (Err(err), Some(b)) => prop_assert!(false, "{} at {:?}: {} but direct value {}", s, at, err, b),
        }
        Ok(())
    })
}

pub fn zero_test_agrees_with_random_points(cases: u32) -> Result<(), String> {
    check(
        cases,
        &(expr(), expr(), proptest::collection::vec(point(), 4)),
        |(e, f, pts)| {
            let (Some(a), Some(b)) = (to_scalar(&e), to_scalar(&f)) else {
                return Ok(());
            };
            // (a + b)^2 - a^2 - 2ab - b^2 is identically zero
            let sum = &a + &b;
            let zero = &(&(&sum * &sum) - &(&a * &a)) - &(&(&Scalar::from(2) * &(&a * &b)) + &(&b * &b));
            prop_assert!(zero.is_zero(), "{}", zero);
            let diff = &a - &b;
            let mut values = Vec::new();
            for at in &pts {
                if let (Some(x), Some(y)) = (eval(&e, at), eval(&f, at)) {
                    values.push(x - y);
                }
            }
            if diff.is_zero() {
                prop_assert!(values.iter().all(Zero::is_zero));
            } else if values.len() == pts.len() {
                // a nonzero rational function vanishing at four random points is
                // possible but rare; require it not to vanish at all of them
                prop_assert!(values.iter().any(|v| !v.is_zero()), "{} vanishes at {:?}", diff, pts);
            }
            Ok(())
        },
    )
}

pub type Property = fn(u32) -> Result<(), String>;

pub const ALL: [(&str, Property); 9] = [
    ("d_squared_is_zero", d_squared_is_zero),
    ("wedge_is_graded_commutative", wedge_is_graded_commutative),
    ("d_obeys_leibniz", d_obeys_leibniz),
    (
        "polar_ranks_increase_along_any_flag",
        polar_ranks_increase_along_any_flag,
    ),
    (
        "characters_do_not_depend_on_the_basis",
        characters_do_not_depend_on_the_basis,
    ),
    (
        "polar_kernel_is_exactly_the_extending_vectors",
        polar_kernel_is_exactly_the_extending_vectors,
    ),
    (
        "printing_and_reparsing_is_the_identity",
        printing_and_reparsing_is_the_identity,
    ),
    (
        "canonical_form_agrees_with_evaluation",
        canonical_form_agrees_with_evaluation,
    ),
    (
        "zero_test_agrees_with_random_points",
        zero_test_agrees_with_random_points,
    ),
];
