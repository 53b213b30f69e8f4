#![allow(dead_code)]

use hodge_circle::dedekind::{dedekind_sum, eta, gen_dedekind_sum, p2};
use hodge_circle::equidist::lambda;
use hodge_circle::goettsche::HodgeDiamond;
use hodge_circle::real::{cis_frac, cis_turns, cx_abs, cx_powr, cx_zero};
use hodge_circle::series::{specialize, Coeff};
use hodge_circle::{Cx, IntQSeries, LaurentPoly, LaurentQSeries, MpFloat, Real, Q};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

pub type M = MpFloat;
pub const PREC: u32 = 128;

pub fn runner(cases: u32) -> TestRunner {
    TestRunner::new_with_rng(
        Config { cases, failure_persistence: None, ..Config::default() },
        TestRng::deterministic_rng(RngAlgorithm::ChaCha),
    )
}

pub fn int_series(len: usize) -> impl Strategy<Value = IntQSeries> {
    prop::collection::vec(-50i64..50, len).prop_map(|v| IntQSeries::from_i64s(&v))
}

pub fn triple() -> impl Strategy<Value = (IntQSeries, IntQSeries, IntQSeries)> {
    (1usize..12).prop_flat_map(|n| (int_series(n), int_series(n), int_series(n)))
}

pub fn unit_series() -> impl Strategy<Value = IntQSeries> {
    (prop::bool::ANY, prop::collection::vec(-20i64..20, 0..12)).prop_map(|(neg, mut v)| {
        v.insert(0, if neg { -1 } else { 1 });
        IntQSeries::from_i64s(&v)
    })
}

fn laurent() -> impl Strategy<Value = LaurentPoly> {
    prop::collection::vec(((-3i64..4, -3i64..4), -5i64..6), 0..4)
        .prop_map(|t| LaurentPoly::from_terms(t.into_iter().map(|(e, c)| (e, BigInt::from(c)))))
}

pub fn laurent_pair() -> impl Strategy<Value = (LaurentQSeries, LaurentQSeries)> {
    (1usize..8).prop_flat_map(|n| {
        (prop::collection::vec(laurent(), n), prop::collection::vec(laurent(), n))
            .prop_map(|(a, b)| (LaurentQSeries::new(a), LaurentQSeries::new(b)))
    })
}

pub fn coprime() -> impl Strategy<Value = (i64, i64)> {
    (1i64..300, 1i64..300).prop_filter("coprime", |(h, k)| h.gcd(k) == 1)
}

pub fn rational() -> impl Strategy<Value = Q> {
    (-200i64..200, 1i64..60).prop_map(|(a, b)| Q::new(a, b))
}

pub fn upper_half() -> impl Strategy<Value = (f64, f64)> {
    (-1.0f64..1.0, 0.3f64..2.0)
}

/// Matrices of SL2(Z) with c > 0.
pub fn sl2() -> impl Strategy<Value = [i64; 4]> {
    (1i64..12, -12i64..12, -5i64..6).prop_filter_map("unimodular", |(c, d, t)| {
        let e = d.extended_gcd(&c);
        if e.gcd != 1 {
            return None;
        }
        // a d - b c = 1 with a = x, b = -y from x d + y c = 1
        let (a, b) = (e.x + t * c, -e.y + t * d);
        Some([a, b, c, d])
    })
}

pub fn diamond() -> impl Strategy<Value = HodgeDiamond> {
    (0u64..5, 0u64..5, 0u64..25).prop_map(|(a, b, c)| HodgeDiamond::from_triple(a, b, c))
}

fn close(a: &Cx<M>, b: &Cx<M>, rel: f64) -> bool {
    let d = cx_abs(&a.sub_c(b)).to_f64();
    d <= rel * cx_abs(b).to_f64().max(1e-300)
}

fn tau(x: f64, y: f64) -> Cx<M> {
    Cx::new(M::from_f64_prec(x, PREC), M::from_f64_prec(y, PREC))
}

pub fn ring_axioms(a: &IntQSeries, b: &IntQSeries, c: &IntQSeries) -> Result<(), TestCaseError> {
    prop_assert_eq!(a.add(b), b.add(a));
    prop_assert_eq!(a.mul(b), b.mul(a));
    prop_assert_eq!(a.add(b).add(c), a.add(&b.add(c)));
    prop_assert_eq!(a.mul(b).mul(c), a.mul(&b.mul(c)));
    prop_assert_eq!(a.mul(&b.add(c)), a.mul(b).add(&a.mul(c)));
    let one = IntQSeries::int_one(a.trunc());
    prop_assert_eq!(a.mul(&one), a.clone());
    prop_assert!(a.add(&a.neg()).coeffs().iter().all(|x| x.is_zero()));
    Ok(())
}

pub fn inverse_involution(a: &IntQSeries) -> Result<(), TestCaseError> {
    let inv = a.inverse().unwrap();
    prop_assert_eq!(inv.inverse().unwrap(), a.clone());
    prop_assert_eq!(a.mul(&inv), IntQSeries::int_one(a.trunc()));
    Ok(())
}

pub fn specialize_homomorphism(a: &LaurentQSeries, b: &LaurentQSeries, (r1, l1, r2, l2): (i64, i64, i64, i64)) -> Result<(), TestCaseError> {
    let x: Cx<M> = cis_frac(r1, l1, PREC);
    let y: Cx<M> = cis_frac(r2, l2, PREC);
    let lhs = specialize(&a.mul(b), &x, &y, PREC);
    let rhs = specialize(a, &x, &y, PREC).mul(&specialize(b, &x, &y, PREC));
    for (u, v) in lhs.coeffs().iter().zip(rhs.coeffs()) {
        prop_assert!(cx_abs(&u.sub_c(v)).to_f64() < 1e-25);
    }
    Ok(())
}

pub fn eta_translation((x, y): (f64, f64)) -> Result<(), TestCaseError> {
    let t = tau(x, y);
    let lhs = eta(&tau(x + 1.0, y), PREC);
    let rhs = cis_frac::<M>(1, 24, PREC).mul_c(&eta(&t, PREC));
    prop_assert!(close(&lhs, &rhs, 1e-12));
    Ok(())
}

pub fn eta_inversion((x, y): (f64, f64)) -> Result<(), TestCaseError> {
    let t = tau(x, y);
    let inv = t.inv_c().unwrap();
    let lhs = eta(&Cx::new(-inv.re, -inv.im), PREC);
    let minus_i_t = Cx::new(t.im.clone(), -t.re.clone());
    let rhs = cx_powr(&minus_i_t, &M::from_frac(1, 2, PREC)).mul_c(&eta(&t, PREC));
    prop_assert!(close(&lhs, &rhs, 1e-12));
    Ok(())
}

/// eta(M tau) = e((a + d)/(24 c) - s(d, c)/2) (-i(c tau + d))^{1/2} eta(tau) for c > 0.
pub fn eta_general((x, y): (f64, f64), m: [i64; 4]) -> Result<(), TestCaseError> {
    let [a, b, c, d] = m;
    let t = tau(x, y);
    let ct_d = Cx::new(t.re.clone() * M::from_i64(c, PREC) + M::from_i64(d, PREC), t.im.clone() * M::from_i64(c, PREC));
    let at_b = Cx::new(t.re.clone() * M::from_i64(a, PREC) + M::from_i64(b, PREC), t.im.clone() * M::from_i64(a, PREC));
    let mt = at_b.mul_c(&ct_d.inv_c().unwrap());
    let turns = Q::new(a + d, 24 * c) - dedekind_sum(d.rem_euclid(c), c) / 2;
    let eps: Cx<M> = cis_turns(&BigRational::new((*turns.numer()).into(), (*turns.denom()).into()), PREC);
    let root = cx_powr(&Cx::new(ct_d.im.clone(), -ct_d.re.clone()), &M::from_frac(1, 2, PREC));
    let rhs = eps.mul_c(&root).mul_c(&eta(&t, PREC));
    prop_assert!(close(&eta(&mt, PREC), &rhs, 1e-12));
    Ok(())
}

/// eta against its q-expansion q^{1/24} sum_n c_n q^n, well inside the disc.
pub fn eta_series((x, y): (f64, f64)) -> Result<(), TestCaseError> {
    let y = y + 0.5;
    let t = tau(x, y);
    let s = hodge_circle::dedekind::eta_q_expansion(400);
    let two_pi = M::from_i64(2, PREC) * M::pi(PREC);
    let q = hodge_circle::real::cx_exp(&Cx::new(-(two_pi.clone() * t.im.clone()), two_pi.clone() * t.re.clone()));
    let mut acc = cx_zero::<M>();
    let mut qn = Cx::new(M::from_i64(1, PREC), M::zero());
    for c in s.coeffs() {
        acc = acc.add_c(&qn.mul_c(&Cx::new(M::from_bigint(c, PREC), M::zero())));
        qn = qn.mul_c(&q);
    }
    let q24 = hodge_circle::real::cx_exp(&Cx::new(-(two_pi.clone() * t.im.clone()) / M::from_i64(24, PREC), two_pi * t.re.clone() / M::from_i64(24, PREC)));
    prop_assert!(close(&eta(&t, PREC), &q24.mul_c(&acc), 1e-12));
    Ok(())
}

pub fn reciprocity((h, k): (i64, i64)) -> Result<(), TestCaseError> {
    let lhs = dedekind_sum(h, k) + dedekind_sum(k, h);
    let rhs = (Q::new(h, k) + Q::new(k, h) + Q::new(1, h * k)) / 12 - Q::new(1, 4);
    prop_assert_eq!(lhs, rhs);
    Ok(())
}

pub fn gen_sum_integrality((h, k): (i64, i64), r: i64, l: i64) -> Result<(), TestCaseError> {
    let s = gen_dedekind_sum(r, l, h, k) * Q::from_integer(12 * k * l);
    prop_assert!(s.is_integer(), "12 k l s = {}", s);
    Ok(())
}

pub fn p2_symmetry(x: Q, n: i64) -> Result<(), TestCaseError> {
    prop_assert_eq!(p2(x), p2(-x));
    prop_assert_eq!(p2(x + Q::from_integer(n)), p2(x));
    prop_assert!(p2(x) <= Q::new(1, 6) && p2(x) >= -Q::new(1, 12));
    Ok(())
}

pub fn lambda_symmetries(s: &HodgeDiamond, x: Q, y: Q) -> Result<(), TestCaseError> {
    prop_assert_eq!(lambda(s, x, y), lambda(s, -x, -y));
    prop_assert_eq!(lambda(s, x + Q::one(), y), lambda(s, x, y));
    prop_assert_eq!(lambda(s, x, y - Q::one()), lambda(s, x, y));
    let half = Q::new(1, 2);
    prop_assert_eq!(lambda(s, Q::zero(), Q::zero()) - lambda(s, half, half), Q::new(s.h10(), 2));
    Ok(())
}

/// Run every property once under a fixed seed; returns (name, passed).
pub fn run_all(cases: u32) -> Vec<(&'static str, bool)> {
    let mut out = Vec::new();
    let mut go = |name: &'static str, ok: bool| out.push((name, ok));
    go("ring axioms", runner(cases).run(&triple(), |(a, b, c)| ring_axioms(&a, &b, &c)).is_ok());
    go("inverse involution", runner(cases).run(&unit_series(), |a| inverse_involution(&a)).is_ok());
    let roots = (1i64..6, 1i64..6).prop_flat_map(|(l1, l2)| (0..l1, Just(l1), 0..l2, Just(l2)));
    go(
        "specialization homomorphism",
        runner(cases).run(&(laurent_pair(), roots), |((a, b), r)| specialize_homomorphism(&a, &b, r)).is_ok(),
    );
    go("eta translation", runner(cases).run(&upper_half(), eta_translation).is_ok());
    go("eta inversion", runner(cases).run(&upper_half(), eta_inversion).is_ok());
    go("eta general", runner(cases).run(&(upper_half(), sl2()), |(t, m)| eta_general(t, m)).is_ok());
    go("eta series", runner(cases).run(&upper_half(), eta_series).is_ok());
    go("dedekind reciprocity", runner(cases).run(&coprime(), reciprocity).is_ok());
    let rl = (1i64..13).prop_flat_map(|l| (0..l, Just(l)));
    go(
        "12kl integrality",
        runner(cases).run(&(coprime(), rl), |(hk, (r, l))| gen_sum_integrality(hk, r, l)).is_ok(),
    );
    go("P2 symmetry", runner(cases).run(&(rational(), -5i64..5), |(x, n)| p2_symmetry(x, n)).is_ok());
    go(
        "lambda symmetries",
        runner(cases).run(&(diamond(), rational(), rational()), |(s, x, y)| lambda_symmetries(&s, x, y)).is_ok(),
    );
    out
}
