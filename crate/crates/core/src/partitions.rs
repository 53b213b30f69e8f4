//! The partition function: pentagonal recurrence, Euler product, Rademacher's
//! convergent series, and |P(q)| near roots of unity.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::dedekind::{eta_abs, modinv};
use crate::error::{Error, Result};
use crate::real::{cis_frac, cx_zero, Cx, Real};
use crate::series::{Coeff, IntQSeries};

/// Exact values p(0), ..., p(N).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionTable {
    pub values: Vec<BigInt>,
}

impl PartitionTable {
    pub fn get(&self, n: usize) -> &BigInt {
        &self.values[n]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Generalized pentagonal numbers k(3k-1)/2 for k = 1, -1, 2, -2, ... up to n,
/// paired with the sign (-1)^(k+1).
fn pentagonals(n: usize) -> Vec<(usize, bool)> {
    let mut out = Vec::new();
    let mut k = 1usize;
    loop {
        let g1 = k * (3 * k - 1) / 2;
        if g1 > n {
            break;
        }
        let plus = k % 2 == 1;
        out.push((g1, plus));
        let g2 = k * (3 * k + 1) / 2;
        if g2 <= n {
            out.push((g2, plus));
        }
        k += 1;
    }
    out
}

/// p(n) for n <= N by Euler's pentagonal number recurrence.
pub fn p_recurrence(n: usize) -> PartitionTable {
    let pent = pentagonals(n);
    let mut values: Vec<BigInt> = Vec::with_capacity(n + 1);
    values.push(BigInt::one());
    for m in 1..=n {
        let mut acc = BigInt::zero();
        for &(g, plus) in &pent {
            if g > m {
                break;
            }
            if plus {
                acc += &values[m - g];
            } else {
                acc -= &values[m - g];
            }
        }
        values.push(acc);
    }
    PartitionTable { values }
}

/// p(n) for n <= N as the coefficients of the inverted Euler product.
pub fn p_euler_product(n: usize) -> PartitionTable {
    let mut prod = IntQSeries::int_one(n);
    for m in 1..=n {
        prod.mul_binomial_pow(&BigInt::one(), m, 1);
    }
    let inv = prod.inverse().expect("constant term is 1");
    PartitionTable { values: inv.into_coeffs() }
}

/// A failure of one of Ramanujan's congruences.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CongruenceViolation {
    pub modulus: u32,
    /// Argument m of p(m).
    pub argument: usize,
}

/// p(m) mod 385 for m <= n (385 = 5 * 7 * 11).
pub fn p_mod_385(n: usize) -> Vec<u32> {
    const M: i64 = 385;
    let pent = pentagonals(n);
    let mut v: Vec<i64> = Vec::with_capacity(n + 1);
    v.push(1);
    for m in 1..=n {
        let mut acc = 0i64;
        for &(g, plus) in &pent {
            if g > m {
                break;
            }
            if plus {
                acc += v[m - g];
            } else {
                acc -= v[m - g];
            }
        }
        v.push(acc.rem_euclid(M));
    }
    v.into_iter().map(|x| x as u32).collect()
}

/// Check p(5n+4) = 0 mod 5, p(7n+5) = 0 mod 7, p(11n+6) = 0 mod 11 for all n <= N.
pub fn check_ramanujan_congruences(n: usize) -> Vec<CongruenceViolation> {
    let residues = p_mod_385(11 * n + 6);
    let mut out = Vec::new();
    for (modulus, shift) in [(5u32, 4usize), (7, 5), (11, 6)] {
        for j in 0..=n {
            let m = modulus as usize * j + shift;
            if residues[m] % modulus != 0 {
                out.push(CongruenceViolation { modulus, argument: m });
            }
        }
    }
    out
}

/// Kronecker symbol (a/n).
pub fn kronecker(a: i64, n: i64) -> i32 {
    if n == 0 {
        return if a.abs() == 1 { 1 } else { 0 };
    }
    let mut a = a;
    let mut n = n;
    let mut sign = 1i32;
    if n < 0 {
        n = -n;
        if a < 0 {
            sign = -sign;
        }
    }
    let v = n.trailing_zeros();
    n >>= v;
    if v > 0 {
        if a % 2 == 0 {
            return 0;
        }
        if v % 2 == 1 && matches!(a.rem_euclid(8), 3 | 5) {
            sign = -sign;
        }
    }
    // Jacobi symbol (a/n) for odd positive n
    a = a.rem_euclid(n);
    while a != 0 {
        let t = a.trailing_zeros();
        a >>= t;
        if t % 2 == 1 && matches!(n % 8, 3 | 5) {
            sign = -sign;
        }
        if a % 4 == 3 && n % 4 == 3 {
            sign = -sign;
        }
        std::mem::swap(&mut a, &mut n);
        a %= n;
    }
    if n == 1 {
        sign
    } else {
        0
    }
}

/// The complex Kloosterman-type sum whose real part is A_k(n).
pub fn kloosterman_a_complex<R: Real>(k: u64, n: u64, prec: u32) -> Cx<R> {
    assert!(k >= 1);
    let m = 24 * k as i64;
    let target = (1 - 24 * n as i64).rem_euclid(m);
    let mut acc: Cx<R> = cx_zero();
    for d in 0..m {
        if (d as i128 * d as i128 % m as i128) as i64 != target {
            continue;
        }
        let chi = kronecker(12, d);
        if chi == 0 {
            continue;
        }
        let z: Cx<R> = cis_frac(d, 12 * k as i64, prec);
        acc = if chi > 0 { acc.add_c(&z) } else { acc.sub_c(&z) };
    }
    let scale = (R::from_i64(k as i64, prec) / R::from_i64(12, prec)).sqrt() / R::from_i64(2, prec);
    Cx::new(acc.re * scale.clone(), acc.im * scale)
}

/// A_k(n) of Rademacher's formula.
pub fn kloosterman_a<R: Real>(k: u64, n: u64, prec: u32) -> R {
    let z = kloosterman_a_complex::<R>(k, n, prec);
    debug_assert!(z.im.abs() < R::epsilon(prec / 2, prec) * (R::one() + z.re.abs()));
    z.re
}

/// I_{3/2}(x) = sqrt(2/(pi x)) (cosh x - sinh x / x).
pub fn bessel_i_three_halves<R: Real>(x: &R) -> R {
    let p = x.prec();
    let pre = (R::from_i64(2, p) / (R::pi(p) * x.clone())).sqrt();
    pre * (x.cosh() - x.sinh() / x.clone())
}

/// One summand of Rademacher's series.
#[derive(Clone, Debug)]
pub struct RademacherTerm<R> {
    pub k: u64,
    pub a_k: R,
    pub bessel_arg: R,
    pub term_value: R,
}

/// Partial sum of Rademacher's series with its rounding.
#[derive(Clone, Debug)]
pub struct RademacherResult<R> {
    pub value: R,
    pub rounded: BigInt,
    pub tail_bound: f64,
    pub terms: Vec<RademacherTerm<R>>,
}

/// Bits needed to round the partial sum to p(n): log2 p(n) plus headroom.
pub fn rademacher_bits(n: u64) -> u32 {
    let b = std::f64::consts::PI * (2.0 * n as f64 / 3.0).sqrt() / std::f64::consts::LN_2;
    b.ceil() as u32 + 64
}

/// Estimate of sum_{k > K} 2 pi (24n-1)^(-3/4) k^-1 I_{3/2}(pi sqrt(24n-1) / (6k)).
pub fn rademacher_tail_bound(n: u64, kmax: u64) -> f64 {
    let m = 24.0 * n as f64 - 1.0;
    let c = 2.0 * std::f64::consts::PI * m.powf(-0.75);
    let x = std::f64::consts::PI * m.sqrt() / 6.0;
    let i32f = |y: f64| -> f64 {
        if y < 1e-2 {
            // leading terms of the power series, avoids cancellation
            (2.0 / (std::f64::consts::PI * y)).sqrt() * (y * y / 3.0 + y.powi(4) / 30.0)
        } else {
            (2.0 / (std::f64::consts::PI * y)).sqrt() * (y.cosh() - y.sinh() / y)
        }
    };
    let upper = kmax + 20_000;
    let mut s = 0.0;
    for k in (kmax + 1)..=upper {
        s += c / k as f64 * i32f(x / k as f64);
    }
    // beyond `upper` the terms are c (x/k)^{3/2} / (3 sqrt(pi/2) k) up to a factor 1 + O(k^-2)
    let lead = c * (2.0 / std::f64::consts::PI).sqrt() * x.powf(1.5) / 3.0;
    s + lead * 1.01 * (2.0 / 3.0) * (upper as f64).powf(-1.5)
}

/// Rademacher's partial sum over k <= K and its nearest integer.
pub fn rademacher_p<R: Real>(n: u64, kmax: u64, prec: u32) -> Result<RademacherResult<R>> {
    if n == 0 || kmax == 0 {
        return Err(Error::Validation("n and K_max must be positive".into()));
    }
    let need = rademacher_bits(n);
    if prec < need {
        return Err(Error::Validation(format!("precision {prec} below the required {need} bits")));
    }
    let m = R::from_i64(24 * n as i64 - 1, prec);
    let pi = R::pi(prec);
    let c = R::from_i64(2, prec) * pi.clone() / m.powr(&R::from_frac(3, 4, prec));
    let x = pi * m.sqrt() / R::from_i64(6, prec);
    let terms: Vec<RademacherTerm<R>> = (1..=kmax)
        .into_par_iter()
        .map(|k| {
            let a_k = kloosterman_a::<R>(k, n, prec);
            let kr = R::from_i64(k as i64, prec);
            let arg = x.clone() / kr.clone();
            let term_value = c.clone() * a_k.clone() / kr * bessel_i_three_halves(&arg);
            RademacherTerm { k, a_k, bessel_arg: arg, term_value }
        })
        .collect();
    let mut value = R::from_i64(0, prec);
    for t in &terms {
        value = value + t.term_value.clone();
    }
    let tail_bound = rademacher_tail_bound(n, kmax);
    if tail_bound > 0.25 {
        return Err(Error::InsufficientPrecision { bound: tail_bound });
    }
    let rounded = value.round_bigint().ok_or_else(|| Error::ConvergenceFailure("non-finite sum".into()))?;
    Ok(RademacherResult { value, rounded, tail_bound, terms })
}

/// Hardy-Ramanujan leading asymptotic e^{pi sqrt(2n/3)} / (4 n sqrt 3).
pub fn hardy_ramanujan<R: Real>(n: u64, prec: u32) -> R {
    let nr = R::from_i64(n as i64, prec);
    let e = R::pi(prec) * (R::from_i64(2, prec) * nr.clone() / R::from_i64(3, prec)).sqrt();
    e.exp() / (R::from_i64(4, prec) * nr * R::from_i64(3, prec).sqrt())
}

/// Below this t the truncated product is replaced by the eta transformation.
pub const PRODUCT_CUTOFF_T: f64 = 0.05;

/// |P(zeta e^{-t})| with zeta = e^{2 pi i h/k}.
pub fn eval_p_near_root<R: Real>(h: i64, k: i64, t: &R, prec: u32) -> Result<R> {
    if k < 1 || h.gcd(&k) != 1 {
        return Err(Error::Validation(format!("need gcd(h, k) = 1 with k >= 1, got {h}/{k}")));
    }
    if *t <= R::zero() {
        return Err(Error::Validation("t must be positive".into()));
    }
    if t.to_f64() >= PRODUCT_CUTOFF_T {
        Ok(p_near_root_product(h, k, t, prec))
    } else {
        Ok(p_near_root_transformed(h, k, t, prec))
    }
}

/// Direct truncated product; the tail is dropped once |q|^n < 2^-(prec+16).
pub fn p_near_root_product<R: Real>(h: i64, k: i64, t: &R, prec: u32) -> R {
    let stop = R::epsilon(prec + 16, prec);
    let r = (-t.clone()).exp();
    let mut rn = R::one();
    let mut log_abs = R::from_i64(0, prec);
    let mut n = 0i64;
    loop {
        n += 1;
        rn = rn * r.clone();
        if rn < stop {
            break;
        }
        let z: Cx<R> = cis_frac(h * n, k, prec);
        let re = R::one() - rn.clone() * z.re;
        let im = -(rn.clone() * z.im);
        let mod2 = re.clone() * re + im.clone() * im;
        log_abs = log_abs - mod2.ln() / R::from_i64(2, prec);
    }
    log_abs.exp()
}

/// Same value through the eta transformation with c = k, d = -h.
pub fn p_near_root_transformed<R: Real>(h: i64, k: i64, t: &R, prec: u32) -> R {
    let two_pi = R::from_i64(2, prec) * R::pi(prec);
    let y = t.clone() / two_pi;
    // a(-h) - b k = 1, so a = -h^{-1} mod k
    let a = if k == 1 { 0 } else { (-modinv(h.rem_euclid(k), k)).rem_euclid(k) };
    let kr = R::from_i64(k, prec);
    let re = R::from_frac(a, k, prec);
    let im = R::one() / (kr.clone() * kr.clone() * y.clone());
    let eta_t = eta_abs(&Cx::new(re, im), prec);
    let q24 = (-(t.clone() / R::from_i64(24, prec))).exp();
    q24 * (kr * y).sqrt() / eta_t
}

/// P(e^{-t}) divided by the leading behaviour sqrt(-i tau) e^{pi i/(12 tau)} at zeta = 1.
pub fn p_asymptotic_ratio<R: Real>(t: &R, prec: u32) -> Result<R> {
    let p = eval_p_near_root(0, 1, t, prec)?;
    let two_pi = R::from_i64(2, prec) * R::pi(prec);
    let pi = R::pi(prec);
    let lead = (t.clone() / two_pi).sqrt() * (pi.clone() * pi / (R::from_i64(6, prec) * t.clone())).exp();
    Ok(p / lead)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::MpFloat;

    #[test]
    fn table_values() {
        let p = p_recurrence(80);
        for (n, v) in [(0usize, 1u64), (4, 5), (10, 42), (20, 627), (40, 37338), (80, 15796476)] {
            assert_eq!(p.values[n], BigInt::from(v), "p({n})");
        }
        assert_eq!(p_euler_product(4).values, [1, 1, 2, 3, 5].map(BigInt::from).to_vec());
    }

    #[test]
    fn recurrence_matches_product() {
        assert_eq!(p_recurrence(600), p_euler_product(600));
    }

    #[test]
    fn residues_mod_385_match_exact_values() {
        let exact = p_recurrence(300);
        let res = p_mod_385(300);
        for n in 0..=300 {
            assert_eq!(BigInt::from(res[n]), &exact.values[n] % BigInt::from(385));
        }
    }

    #[test]
    fn small_congruence_instances() {
        let p = p_recurrence(6);
        assert_eq!(&p.values[4] % 5, BigInt::zero());
        assert_eq!(&p.values[6] % 11, BigInt::zero());
        assert!(check_ramanujan_congruences(200).is_empty());
    }

    #[test]
    fn kronecker_twelve_is_the_mod_twelve_character() {
        for d in -100i64..100 {
            let expect = match d.rem_euclid(12) {
                1 | 11 => 1,
                5 | 7 => -1,
                _ => 0,
            };
            assert_eq!(kronecker(12, d), expect, "d = {d}");
        }
    }

    #[test]
    fn kronecker_matches_legendre_for_odd_primes() {
        for &p in &[3i64, 5, 7, 11, 13, 29] {
            for a in 0..p {
                let euler = (0..(p - 1) / 2).fold(1i64, |acc, _| acc * a % p);
                let leg = if a == 0 { 0 } else if euler == 1 { 1 } else { -1 };
                assert_eq!(kronecker(a, p) as i64, leg);
            }
        }
    }

    #[test]
    fn a1_is_one() {
        for n in 1..40 {
            let a = kloosterman_a::<MpFloat>(1, n, 128);
            assert!((a.to_f64() - 1.0).abs() < 1e-30);
        }
    }

    #[test]
    fn a2_by_direct_enumeration() {
        // d mod 48 with d^2 = -23 mod 48, weighted by the mod 12 character
        let mut s = num_complex::Complex::new(0.0f64, 0.0);
        for d in 0..48i64 {
            if (d * d - 25).rem_euclid(48) == 0 {
                let chi = match d % 12 {
                    1 | 11 => 1.0,
                    5 | 7 => -1.0,
                    _ => 0.0,
                };
                let ang = 2.0 * std::f64::consts::PI * d as f64 / 24.0;
                s += num_complex::Complex::new(ang.cos(), ang.sin()) * chi;
            }
        }
        let expect = 0.5 * (2.0f64 / 12.0).sqrt() * s.re;
        let got = kloosterman_a::<MpFloat>(2, 1, 128).to_f64();
        assert!((got - expect).abs() < 1e-14, "{got} vs {expect}");
    }

    #[test]
    fn kloosterman_sums_are_real() {
        for k in 1..=20 {
            for n in 1..=50 {
                let z = kloosterman_a_complex::<MpFloat>(k, n, 128);
                assert!(z.im.abs().to_f64() < 1e-30);
            }
        }
    }

    #[test]
    fn rademacher_examples() {
        let r = rademacher_p::<MpFloat>(10, 5, 192).unwrap();
        assert_eq!(r.rounded, BigInt::from(42));
        let r = rademacher_p::<MpFloat>(80, 18, 192).unwrap();
        assert_eq!(r.rounded, BigInt::from(15796476));
    }

    #[test]
    fn too_little_precision_is_rejected() {
        assert!(matches!(rademacher_p::<MpFloat>(400, 40, 64), Err(Error::Validation(_))));
    }

    #[test]
    fn tail_halves_when_cutoff_doubles() {
        for n in [1u64, 10, 50, 200] {
            for k in [10u64, 20, 40] {
                assert!(rademacher_tail_bound(n, 2 * k) < rademacher_tail_bound(n, k) / 2.0);
            }
        }
    }

    #[test]
    fn main_term_ratio_trends_to_one() {
        let p = p_recurrence(200);
        let mut prev = f64::INFINITY;
        for n in [50u64, 100, 200] {
            let hr = hardy_ramanujan::<MpFloat>(n, 128);
            let ratio = MpFloat::from_bigint(&p.values[n as usize], 128) / hr;
            let dev = (ratio.to_f64() - 1.0).abs();
            assert!(dev < prev, "n = {n}: {dev}");
            prev = dev;
        }
        // the k = 1 Rademacher term carries nearly all of p(100)
        let r = rademacher_p::<MpFloat>(100, 20, 192).unwrap();
        let main = r.terms[0].term_value.to_f64();
        let rel = (main - p.values[100].to_string().parse::<f64>().unwrap()) / main;
        assert!(rel.abs() < 1e-4, "{rel}");
        assert!(matches!(rademacher_p::<MpFloat>(100, 1, 192), Err(Error::InsufficientPrecision { .. })));
    }

    #[test]
    fn product_and_transformation_agree_in_the_overlap() {
        for &(h, k) in &[(0i64, 1i64), (1, 2), (1, 3), (1, 4), (2, 5)] {
            for &t in &[0.05f64, 0.1, 0.3] {
                let tr = MpFloat::from_f64_prec(t, 160);
                let a = p_near_root_product(h, k, &tr, 160).to_f64();
                let b = p_near_root_transformed(h, k, &tr, 160).to_f64();
                assert!((a / b - 1.0).abs() < 1e-12, "{h}/{k} t={t}: {a} {b}");
            }
        }
    }

    #[test]
    fn radial_limit_at_one() {
        let t = MpFloat::from_f64_prec(1e-5, 160);
        let r = p_asymptotic_ratio(&t, 160).unwrap().to_f64();
        assert!((r - 1.0).abs() < 1e-6);
        // at t = 1e-3 the ratio is e^{-t/24} up to exponentially small terms
        let t = MpFloat::from_f64_prec(1e-3, 160);
        let r = p_asymptotic_ratio(&t, 160).unwrap().to_f64();
        assert!((r - (-1e-3f64 / 24.0).exp()).abs() < 1e-12);
        assert!((r - 1.0).abs() < 5e-5);
    }
}
