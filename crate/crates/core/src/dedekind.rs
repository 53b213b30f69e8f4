//! Dedekind eta, generalized eta functions, sawtooth functions and Dedekind sums.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::real::{cis_frac, cx_abs, cx_exp, cx_one, cx_powr, cx_scale, Cx, Real};
use crate::series::{Coeff, ComplexQSeries, IntQSeries, QSeries, Q};

/// Inverse of a modulo m (m >= 1); panics when gcd(a, m) != 1.
pub fn modinv(a: i64, m: i64) -> i64 {
    if m == 1 {
        return 0;
    }
    let e = a.rem_euclid(m).extended_gcd(&m);
    assert_eq!(e.gcd, 1, "{a} is not invertible mod {m}");
    e.x.rem_euclid(m)
}

/// Fractional part {x}.
pub fn frac(x: Q) -> Q {
    x - x.floor()
}

/// P1(x) = {x} - 1/2.
pub fn p1(x: Q) -> Q {
    frac(x) - Q::new(1, 2)
}

/// P2(x) = {x}^2 - {x} + 1/6.
pub fn p2(x: Q) -> Q {
    let f = frac(x);
    f * f - f + Q::new(1, 6)
}

/// Sawtooth ((x)): P1(x) off the integers, 0 on them.
pub fn sawtooth(x: Q) -> Q {
    if x.is_integer() {
        Q::zero()
    } else {
        p1(x)
    }
}

pub fn p1_real<R: Real>(x: &R) -> R {
    x.clone() - x.floor() - R::from_frac(1, 2, x.prec())
}

pub fn p2_real<R: Real>(x: &R) -> R {
    let f = x.clone() - x.floor();
    f.clone() * f.clone() - f + R::from_frac(1, 6, x.prec())
}

/// Parameters (u, v, N) of a generalized eta function.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct EtaTriple {
    pub u: i64,
    pub v: i64,
    pub n: i64,
}

impl EtaTriple {
    pub fn new(u: i64, v: i64, n: i64) -> Self {
        assert!(n >= 1, "modulus must be positive");
        EtaTriple { u, v, n }
    }

    /// (u, v) reduced into [0, N).
    pub fn canonical(&self) -> Self {
        EtaTriple { u: self.u.rem_euclid(self.n), v: self.v.rem_euclid(self.n), n: self.n }
    }

    /// Power N1 = 12 N^2 / gcd(6, N) that makes the function modular on Gamma(N).
    pub fn modular_power(&self) -> i64 {
        12 * self.n * self.n / self.n.gcd(&6)
    }

    /// Leading exponent P2(u/N)/2 of the q-expansion.
    pub fn leading_exponent(&self) -> Q {
        p2(Q::new(self.u, self.n)) / 2
    }
}

/// alpha_N(u, v): (1 - zeta_N^{-v}) e^{pi i P1(v/N)} when u = 0, v != 0 mod N, else 1.
pub fn alpha_n<R: Real>(u: i64, v: i64, n: i64, prec: u32) -> Cx<R> {
    if u.rem_euclid(n) == 0 && v.rem_euclid(n) != 0 {
        let z: Cx<R> = cis_frac(-v, n, prec);
        let one_minus = cx_one::<R>().sub_c(&z);
        let ph = p1(Q::new(v, n)) / 2;
        one_minus.mul_c(&cis_frac(*ph.numer(), *ph.denom(), prec))
    } else {
        cx_one()
    }
}

/// prod_{n>=1} (1 - q^n) to order N; the recorded offset 1/24 makes this eta.
pub fn eta_q_expansion(n: usize) -> IntQSeries {
    let mut s = IntQSeries::int_one(n);
    for m in 1..=n {
        s.mul_binomial_pow(&BigInt::one(), m, 1);
    }
    s.with_offset(Q::new(1, 24))
}

/// q-expansion of eta_{(u,v,N)} in powers of q^{1/N}, to order q^{n_trunc}.
pub fn gen_eta_q_expansion<R: Real>(t: EtaTriple, n_trunc: usize, prec: u32) -> ComplexQSeries<R> {
    let t = t.canonical();
    let big_n = t.n as usize;
    let steps = n_trunc * big_n;
    let mut s: ComplexQSeries<R> = QSeries::one_from(&cx_one(), steps);
    let z: Cx<R> = cis_frac(t.v, t.n, prec);
    let zinv: Cx<R> = cis_frac(-t.v, t.n, prec);
    for m in 1..=steps {
        let mi = m as i64;
        if (mi - t.u).rem_euclid(t.n) == 0 {
            s.mul_binomial_pow(&z, m, 1);
        }
        if (mi + t.u).rem_euclid(t.n) == 0 {
            s.mul_binomial_pow(&zinv, m, 1);
        }
    }
    let a = alpha_n::<R>(t.u, t.v, t.n, prec);
    QSeries::with_grid(s.scale(&a).into_coeffs(), t.leading_exponent(), t.n)
}

/// Classical Dedekind sum s(h, k).
pub fn dedekind_sum(h: i64, k: i64) -> Q {
    gen_dedekind_sum(0, 1, h, k)
}

/// s_{(r,l)}(h, k) = sum_{lambda mod k} ((lambda/k)) ((h lambda/k + r/l)).
pub fn gen_dedekind_sum(r: i64, l: i64, h: i64, k: i64) -> Q {
    assert!(k >= 1 && l >= 1);
    let kl = (k as i128) * (l as i128);
    let mut num: i128 = 0;
    for lam in 1..k as i128 {
        let inner = ((h as i128) * lam * (l as i128) + (r as i128) * (k as i128)).rem_euclid(kl);
        if inner == 0 {
            continue;
        }
        num += (2 * lam - k as i128) * (2 * inner - kl);
    }
    // each product has denominator 2k * 2kl
    let den = 4 * (k as i128) * kl;
    let g = num.gcd(&den);
    Q::new((num / g) as i64, (den / g) as i64)
}

/// omega(h, k) for the one-variable specialization Z_S(zeta_l^r, 1):
/// exp(pi i/4 (2(chi - sigma) s(h,k) + 2(chi + sigma) s_{(r,l)}(h,k))).
pub fn omega<R: Real>(h: i64, k: i64, chi: i64, sigma: i64, r: i64, l: i64, prec: u32) -> Cx<R> {
    let turns = omega_turns(h, k, chi, sigma, r, l);
    cis_frac(*turns.numer(), *turns.denom(), prec)
}

/// Argument of [`omega`] in turns.
pub fn omega_turns(h: i64, k: i64, chi: i64, sigma: i64, r: i64, l: i64) -> Q {
    let s = dedekind_sum(h, k);
    let sr = gen_dedekind_sum(r, l, h, k);
    (s * Q::from_integer(2 * (chi - sigma)) + sr * Q::from_integer(2 * (chi + sigma))) / 8
}

/// Multiplier of eta under tau -> (h' tau' ...) used at the cusp h/k:
/// exp(pi i ((h - h')/(12k) - s(-h', k))).
pub fn eta_cusp_multiplier_turns(h: i64, k: i64, hp: i64) -> Q {
    (Q::new(h - hp, 12 * k) - dedekind_sum((-hp).rem_euclid(k), k)) / 2
}

fn eta_product<R: Real>(tau: &Cx<R>, prec: u32) -> Cx<R> {
    let two_pi_i = Cx::new(R::from_i64(0, prec), R::from_i64(2, prec) * R::pi(prec));
    let q = cx_exp(&two_pi_i.mul_c(tau));
    let stop = R::epsilon(prec + 16, prec);
    let mut qn = cx_one::<R>();
    let mut prod = cx_one::<R>();
    loop {
        qn = qn.mul_c(&q);
        if cx_abs(&qn) < stop {
            break;
        }
        prod = prod.mul_c(&cx_one::<R>().sub_c(&qn));
    }
    let q24 = cx_exp(&cx_scale(&two_pi_i.mul_c(tau), &R::from_frac(1, 24, prec)));
    q24.mul_c(&prod)
}

/// Dedekind eta at tau in the upper half plane.
///
/// Points close to the real axis are first moved into the fundamental domain
/// with T and S, tracking the multiplier.
pub fn eta<R: Real>(tau: &Cx<R>, prec: u32) -> Cx<R> {
    assert!(tau.im > R::zero(), "eta needs Im tau > 0");
    let mut factor = cx_one::<R>();
    let mut t = tau.clone();
    for _ in 0..10_000 {
        let n = t.re.round_bigint().expect("finite");
        let n64: i64 = n.try_into().expect("moderate real part");
        if n64 != 0 {
            // eta(t) = e(n/24) eta(t - n)
            factor = factor.mul_c(&cis_frac(n64, 24, prec));
            t = Cx::new(t.re.clone() - R::from_i64(n64, prec), t.im.clone());
        }
        let r2 = t.re.clone() * t.re.clone() + t.im.clone() * t.im.clone();
        if r2 >= R::from_frac(99, 100, prec) {
            return factor.mul_c(&eta_product(&t, prec));
        }
        // eta(t) = eta(-1/t) / sqrt(-i t)
        let minus_i_t = Cx::new(t.im.clone(), -t.re.clone());
        let root = cx_powr(&minus_i_t, &R::from_frac(1, 2, prec));
        factor = factor.mul_c(&root.inv_c().expect("nonzero"));
        t = Cx::new(-(t.re.clone() / r2.clone()), t.im.clone() / r2);
    }
    unreachable!("reduction to the fundamental domain terminates")
}

/// |eta(tau)|.
pub fn eta_abs<R: Real>(tau: &Cx<R>, prec: u32) -> R {
    cx_abs(&eta(tau, prec))
}

/// eta_{(u,v,N)}(tau) by its defining product.
pub fn gen_eta<R: Real>(t: EtaTriple, tau: &Cx<R>, prec: u32) -> Cx<R> {
    let t = t.canonical();
    let two_pi = R::from_i64(2, prec) * R::pi(prec);
    let big_n = R::from_i64(t.n, prec);
    // e^{2 pi i tau / N}
    let base = cx_exp(&Cx::new(-(two_pi.clone() * tau.im.clone()) / big_n.clone(), two_pi.clone() * tau.re.clone() / big_n));
    let zv: Cx<R> = cis_frac(t.v, t.n, prec);
    let zvi: Cx<R> = cis_frac(-t.v, t.n, prec);
    let stop = R::epsilon(prec + 16, prec);
    let mut prod = cx_one::<R>();
    let mut qm = cx_one::<R>();
    let mut m = 0i64;
    loop {
        m += 1;
        qm = qm.mul_c(&base);
        if cx_abs(&qm) < stop {
            break;
        }
        if (m - t.u).rem_euclid(t.n) == 0 {
            prod = prod.mul_c(&cx_one::<R>().sub_c(&zv.mul_c(&qm)));
        }
        if (m + t.u).rem_euclid(t.n) == 0 {
            prod = prod.mul_c(&cx_one::<R>().sub_c(&zvi.mul_c(&qm)));
        }
    }
    let lead = t.leading_exponent();
    let lead_r = R::from_frac(*lead.numer(), *lead.denom(), prec);
    // e^{pi i P2(u/N) tau} = e^{2 pi i (P2/2) tau}
    let pref = cx_exp(&Cx::new(
        -(two_pi.clone() * lead_r.clone() * tau.im.clone()),
        two_pi * lead_r * tau.re.clone(),
    ));
    alpha_n::<R>(t.u, t.v, t.n, prec).mul_c(&pref).mul_c(&prod)
}
