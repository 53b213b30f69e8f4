//! Exact formula for coefficients of Z_S at a pair of roots of unity.
//!
//! A specialization of Z_S is a product of a power of prod (1 - q^n) and
//! factors E_w = prod (1 - e(w) q^n)(1 - e(-w) q^n). Each such product has an
//! explicit transformation law at every cusp h/k, which is what the circle
//! method consumes.

use std::collections::{BTreeMap, HashMap};

use num_integer::Integer;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::dedekind::{dedekind_sum, eta_cusp_multiplier_turns, frac, gen_dedekind_sum, modinv, p2};
use crate::error::{Error, Result};
use crate::goettsche::HodgeDiamond;
use crate::real::{cis_frac, cx_abs, cx_exp, cx_one, cx_powr, cx_scale, cx_zero, Cx, Real};
use crate::series::{cx_powi, Coeff, ComplexQSeries, QSeries, Q};

fn qi(n: i64) -> Q {
    Q::from_integer(n)
}

fn q_to_real<R: Real>(x: Q, prec: u32) -> R {
    R::from_frac(*x.numer(), *x.denom(), prec)
}

fn cis_q<R: Real>(x: Q, prec: u32) -> Cx<R> {
    let f = frac(x);
    cis_frac(*f.numer(), *f.denom(), prec)
}

/// Z_S(e(r1/l1), e(r2/l2)) as prod(1 - q^n)^{e0} prod_w E_w^{p_w}, with 0 < w < 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorStructure {
    pub e0: i64,
    pub ews: Vec<(Q, i64)>,
}

impl FactorStructure {
    pub fn new(s: &HodgeDiamond, r1: i64, l1: i64, r2: i64, l2: i64) -> Self {
        let x = Q::new(r1, l1);
        let y = Q::new(r2, l2);
        let mut e0 = -s.h11();
        let mut map: BTreeMap<Q, i64> = BTreeMap::new();
        for (w, p) in [(x, s.h10()), (y, s.h10()), (x + y, -1), (x - y, -s.h20())] {
            if p == 0 {
                continue;
            }
            let w = frac(w);
            if w.is_zero() {
                e0 += 2 * p;
            } else {
                *map.entry(w).or_insert(0) += p;
            }
        }
        FactorStructure { e0, ews: map.into_iter().filter(|&(_, p)| p != 0).collect() }
    }

    /// Weight G: Z transforms with z^{-G}.
    pub fn weight(&self) -> Q {
        Q::new(self.e0, 2)
    }

    /// -(e0 + 2 sum p), equal to chi(S).
    pub fn chi(&self) -> i64 {
        -(self.e0 + 2 * self.ews.iter().map(|&(_, p)| p).sum::<i64>())
    }

    /// Leading exponent of the transformed product at a cusp with denominator k.
    pub fn cusp_order(&self, k: i64) -> Q {
        let mut h = Q::new(self.e0, 24);
        for &(w, p) in &self.ews {
            h += p2(w * qi(k)) * Q::new(p, 2);
        }
        h
    }

    /// Direct evaluation at tau by the defining product.
    pub fn eval<R: Real>(&self, tau: &Cx<R>, prec: u32) -> Cx<R> {
        let two_pi = R::from_i64(2, prec) * R::pi(prec);
        let q = cx_exp(&Cx::new(-(two_pi.clone() * tau.im.clone()), two_pi * tau.re.clone()));
        let roots: Vec<(Cx<R>, Cx<R>, i64)> = self
            .ews
            .iter()
            .map(|&(w, p)| (cis_q(w, prec), cis_q(-w, prec), p))
            .collect();
        let stop = R::epsilon(prec + 16, prec);
        let one = cx_one::<R>();
        let mut acc = cx_one::<R>();
        let mut qn = cx_one::<R>();
        loop {
            qn = qn.mul_c(&q);
            if cx_abs(&qn) < stop {
                break;
            }
            acc = acc.mul_c(&cx_powi(&one.sub_c(&qn), self.e0));
            for (a, b, p) in &roots {
                let f = one.sub_c(&a.mul_c(&qn)).mul_c(&one.sub_c(&b.mul_c(&qn)));
                acc = acc.mul_c(&cx_powi(&f, *p));
            }
        }
        acc
    }
}

/// Number of the form 2^a prod sin(pi x)^{e_x} e(t), kept exactly.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CuspConstant {
    pub two_pow: i64,
    /// Arguments normalized to 0 < x <= 1/2.
    pub sines: BTreeMap<Q, i64>,
    /// Phase in turns, reduced to [0, 1).
    pub turns: Q,
}

impl CuspConstant {
    pub fn one() -> Self {
        CuspConstant { two_pow: 0, sines: BTreeMap::new(), turns: Q::zero() }
    }

    pub fn phase(t: Q) -> Self {
        CuspConstant { two_pow: 0, sines: BTreeMap::new(), turns: frac(t) }
    }

    /// (2 sin(pi x))^p for x not an integer.
    pub fn two_sine(x: Q, p: i64) -> Self {
        let mut x = frac(x);
        assert!(!x.is_zero(), "sin(pi x) vanishes");
        let mut turns = Q::zero();
        if x > Q::new(1, 2) {
            x = Q::one() - x;
        }
        // sin(pi x) < 0 never occurs after frac, so no sign bookkeeping
        let mut sines = BTreeMap::new();
        sines.insert(x, p);
        turns += Q::zero();
        CuspConstant { two_pow: p, sines, turns }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut sines = self.sines.clone();
        for (&x, &e) in &o.sines {
            *sines.entry(x).or_insert(0) += e;
        }
        sines.retain(|_, e| *e != 0);
        CuspConstant { two_pow: self.two_pow + o.two_pow, sines, turns: frac(self.turns + o.turns) }
    }

    pub fn inv(&self) -> Self {
        CuspConstant {
            two_pow: -self.two_pow,
            sines: self.sines.iter().map(|(&x, &e)| (x, -e)).collect(),
            turns: frac(-self.turns),
        }
    }

    pub fn pow(&self, p: i64) -> Self {
        CuspConstant {
            two_pow: self.two_pow * p,
            sines: self.sines.iter().map(|(&x, &e)| (x, e * p)).filter(|&(_, e)| e != 0).collect(),
            turns: frac(self.turns * qi(p)),
        }
    }

    pub fn eval<R: Real>(&self, prec: u32) -> Cx<R> {
        let pi = R::pi(prec);
        let mut m = R::from_i64(2, prec).powr(&R::from_i64(self.two_pow, prec));
        for (&x, &e) in &self.sines {
            let s = (pi.clone() * q_to_real::<R>(x, prec)).sin();
            m = m * s.powr(&R::from_i64(e, prec));
        }
        cx_scale(&cis_q(self.turns, prec), &m)
    }
}

/// One factor (1 - e(phase) q'^ex)^power of the transformed product.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZFactor {
    pub ex: Q,
    pub phase: Q,
    pub power: i64,
}

/// Z((iz + h)/k) = constant z^{zpow} exp(-(2 pi/k)(chi z/24 + H/z)) Z*((i/z + h')/k).
#[derive(Clone, Debug, PartialEq)]
pub struct CuspTransform {
    pub h: i64,
    pub k: i64,
    pub hp: i64,
    pub constant: CuspConstant,
    pub zpow: Q,
    pub chi: i64,
    pub cusp_order: Q,
    /// (f, B, p) per E_w: factors (j + f, B) for j >= 0 (j >= 1 when f = 0) and (j - f, -B) for j >= 1.
    families: Vec<(Q, Q, i64)>,
    e0: i64,
}

impl CuspTransform {
    pub fn new(fs: &FactorStructure, h: i64, k: i64, hp: i64) -> Self {
        assert!(k >= 1 && (h * hp + 1).rem_euclid(k) == 0, "h h' = -1 mod k");
        let ep = eta_cusp_multiplier_turns(h, k, hp);
        let hpk = Q::new(hp, k);
        let mut c = CuspConstant::one();
        let mut turns = Q::zero();
        let mut order = Q::zero();
        let e0 = fs.e0;
        if e0 != 0 {
            turns += qi(e0) * (Q::new(-h, 24 * k) + ep + Q::new(1, 24) * hpk);
            order += Q::new(e0, 24);
        }
        let mut families = Vec::new();
        for &(w, p) in &fs.ews {
            let a = w * qi(k);
            let b = -w * qi(hp);
            let pq = qi(p);
            // -eps^2 e(B/2) / (2 sin(pi w) e(h/(12k)))
            turns += pq * (Q::new(1, 2) + ep * 2 + b / 2 - Q::new(h, 12 * k));
            c = c.mul(&CuspConstant::two_sine(w, -p));
            let lead = Q::new(1, 12) + a / 2;
            turns += lead * hpk * pq;
            order += pq * (a * a / 2 + lead);
            let mut n = 1i64;
            loop {
                let ex = qi(n - 1) - a;
                if ex > Q::zero() {
                    break;
                }
                if ex < Q::zero() {
                    turns += pq * (Q::new(1, 2) - b) + ex * hpk * pq;
                    order += ex * pq;
                } else {
                    // 1 - e(t) = 2 sin(pi t) e(t/2 - 1/4) for 0 < t < 1
                    let t = frac(-b);
                    c = c.mul(&CuspConstant::two_sine(t, p));
                    turns += pq * (t / 2 - Q::new(1, 4));
                }
                n += 1;
            }
            families.push((frac(a), frac(b), p));
        }
        CuspTransform {
            h,
            k,
            hp,
            constant: c.mul(&CuspConstant::phase(turns)),
            zpow: Q::new(-e0, 2),
            chi: fs.chi(),
            cusp_order: order,
            families,
            e0,
        }
    }

    /// Factors of Z* with exponent at most `bound`.
    pub fn factors(&self, bound: Q) -> Vec<ZFactor> {
        let mut out = Vec::new();
        if self.e0 != 0 {
            let mut n = 1;
            while qi(n) <= bound {
                out.push(ZFactor { ex: qi(n), phase: Q::zero(), power: self.e0 });
                n += 1;
            }
        }
        for &(f, b, p) in &self.families {
            let mut j = if f.is_zero() { 1 } else { 0 };
            while qi(j) + f <= bound {
                out.push(ZFactor { ex: qi(j) + f, phase: b, power: p });
                j += 1;
            }
            let mut j = 1;
            while qi(j) - f <= bound {
                out.push(ZFactor { ex: qi(j) - f, phase: -b, power: p });
                j += 1;
            }
        }
        out
    }

    /// Z* at tau' by its product.
    pub fn eval_star<R: Real>(&self, taup: &Cx<R>, prec: u32) -> Cx<R> {
        let two_pi = R::from_i64(2, prec) * R::pi(prec);
        let cut = R::from_i64(prec as i64 + 16, prec) * R::from_f64_prec(std::f64::consts::LN_2, prec)
            / (two_pi.clone() * taup.im.clone());
        let bound = Q::from_integer(cut.to_f64().ceil() as i64 + 1);
        let one = cx_one::<R>();
        let mut acc = cx_one::<R>();
        for f in self.factors(bound) {
            let x = q_to_real::<R>(f.ex, prec);
            let qe = cx_exp(&Cx::new(
                -(two_pi.clone() * taup.im.clone() * x.clone()),
                two_pi.clone() * taup.re.clone() * x,
            ));
            let term = one.sub_c(&cis_q::<R>(f.phase, prec).mul_c(&qe));
            acc = acc.mul_c(&cx_powi(&term, f.power));
        }
        acc
    }

    /// Right hand side of the transformation law at z, Re z > 0.
    pub fn eval_transformed<R: Real>(&self, z: &Cx<R>, prec: u32) -> Cx<R> {
        let two_pi = R::from_i64(2, prec) * R::pi(prec);
        let k = R::from_i64(self.k, prec);
        let zinv = z.inv_c().expect("z nonzero");
        let taup = Cx::new(
            (zinv.im.clone() * R::from_i64(-1, prec) + R::from_i64(self.hp, prec)) / k.clone(),
            zinv.re.clone() / k.clone(),
        );
        let chi24 = R::from_frac(self.chi, 24, prec);
        let hq = q_to_real::<R>(self.cusp_order, prec);
        let expo = cx_scale(&z.clone(), &chi24).add_c(&cx_scale(&zinv, &hq));
        let expo = cx_scale(&expo, &(-(two_pi / k)));
        self.constant
            .eval::<R>(prec)
            .mul_c(&cx_powr(z, &q_to_real::<R>(self.zpow, prec)))
            .mul_c(&cx_exp(&expo))
            .mul_c(&self.eval_star(&taup, prec))
    }
}

/// -(chi - sigma)/4.
pub fn weight_g(s: &HodgeDiamond) -> Q {
    Q::new(-(s.chi() - s.sigma()), 4)
}

/// Cusp order H for denominators k = iota2 mod lcm(l1, l2).
pub fn cusp_order_h(s: &HodgeDiamond, r1: i64, l1: i64, r2: i64, l2: i64, iota2: i64) -> Q {
    let k = qi(iota2);
    let (x, y) = (Q::new(r1, l1), Q::new(r2, l2));
    let h10 = qi(s.h10());
    let h20 = qi(s.h20());
    (h10 * (p2(k * x) + p2(k * y)) - p2(k * (x + y)) - h20 * p2(k * (x - y)) - qi(s.h11()) / 12) / 2
}

/// Multiplier omega(h, k) in turns: -e0 s(h,k)/2 - sum_w p_w s_w(h,k).
pub fn omega_general_turns(fs: &FactorStructure, h: i64, k: i64) -> Q {
    let mut t = -Q::new(fs.e0, 2) * dedekind_sum(h, k);
    for &(w, p) in &fs.ews {
        t -= qi(p) * gen_dedekind_sum(*w.numer(), *w.denom(), h, k);
    }
    frac(t)
}

/// alpha = prod_w alpha_l(0, r_w)^{-p_w} = prod_w (2 sin(pi w))^{-p_w}.
pub fn alpha_constant(fs: &FactorStructure) -> CuspConstant {
    let mut c = CuspConstant::one();
    for &(w, p) in &fs.ews {
        c = c.mul(&CuspConstant::two_sine(w, -p));
    }
    c
}

/// Everything the truncated exact formula needs for one specialization.
#[derive(Clone, Debug)]
pub struct ExactContext {
    pub surface: HodgeDiamond,
    pub r1: i64,
    pub l1: i64,
    pub r2: i64,
    pub l2: i64,
    pub l: i64,
    pub fs: FactorStructure,
    pub chi: i64,
    pub sigma: i64,
    pub g: Q,
    pub alpha: CuspConstant,
    /// alpha' keyed by (h mod L, k mod L, h' mod L).
    pub alpha_prime: HashMap<(i64, i64, i64), CuspConstant>,
}

/// h' with h h' = -1: least residue mod kL when gcd(h, L) = 1, else mod k.
pub fn h_prime(h: i64, k: i64, l: i64) -> i64 {
    if k == 1 {
        return if h.gcd(&l) == 1 && l > 1 { (-modinv(h.rem_euclid(l), l)).rem_euclid(l) } else { 0 };
    }
    let base = (-modinv(h.rem_euclid(k), k)).rem_euclid(k);
    if h.gcd(&l) != 1 {
        return base;
    }
    // solve x = base mod k and h x = -1 mod L
    let target = (-modinv(h.rem_euclid(l), l)).rem_euclid(l);
    let mut x = base;
    while x < k * l {
        if x.rem_euclid(l) == target {
            return x;
        }
        x += k;
    }
    base
}

impl ExactContext {
    pub fn new(s: &HodgeDiamond, r1: i64, l1: i64, r2: i64, l2: i64) -> Result<Self> {
        if l1 < 1 || l2 < 1 {
            return Err(Error::Validation("moduli must be positive".into()));
        }
        let (chi, sigma) = (s.chi(), s.sigma());
        if chi < 0 || chi < sigma {
            return Err(Error::HypothesisViolation { chi, sigma });
        }
        let fs = FactorStructure::new(s, r1, l1, r2, l2);
        let l = l1.lcm(&l2);
        let mut ctx = ExactContext {
            surface: *s,
            r1,
            l1,
            r2,
            l2,
            l,
            g: fs.weight(),
            alpha: alpha_constant(&fs),
            fs,
            chi,
            sigma,
            alpha_prime: HashMap::new(),
        };
        for k in 1..=(2 * l * l + l) {
            for h in 0..k {
                if h.gcd(&k) != 1 {
                    continue;
                }
                let hp = h_prime(h, k, l);
                let key = ctx.class_key(h, k, hp);
                if !ctx.alpha_prime.contains_key(&key) {
                    let v = ctx.alpha_prime_direct(h, k, hp);
                    ctx.alpha_prime.insert(key, v);
                }
            }
        }
        Ok(ctx)
    }

    pub fn class_key(&self, h: i64, k: i64, hp: i64) -> (i64, i64, i64) {
        (h.rem_euclid(self.l), k.rem_euclid(self.l), hp.rem_euclid(self.l))
    }

    pub fn transform(&self, h: i64, k: i64, hp: i64) -> CuspTransform {
        CuspTransform::new(&self.fs, h, k, hp)
    }

    pub fn omega_turns(&self, h: i64, k: i64) -> Q {
        omega_general_turns(&self.fs, h, k)
    }

    /// K / (alpha omega) computed from the transform at h/k.
    pub fn alpha_prime_direct(&self, h: i64, k: i64, hp: i64) -> CuspConstant {
        let t = self.transform(h, k, hp);
        t.constant.mul(&self.alpha.inv()).mul(&CuspConstant::phase(-self.omega_turns(h, k)))
    }

    pub fn alpha_prime_of(&self, h: i64, k: i64, hp: i64) -> CuspConstant {
        match self.alpha_prime.get(&self.class_key(h, k, hp)) {
            Some(c) => c.clone(),
            None => self.alpha_prime_direct(h, k, hp),
        }
    }

    /// H as a function of k mod L.
    pub fn cusp_order(&self, iota2: i64) -> Q {
        self.fs.cusp_order(iota2.rem_euclid(self.l))
    }

    /// Representative (h, k, h') with the given h' mod L and k mod L, if the class occurs.
    fn representative(&self, rho: i64, iota2: i64) -> Option<(i64, i64, i64)> {
        let l = self.l;
        let mut k = if iota2.rem_euclid(l) == 0 { l } else { iota2.rem_euclid(l) };
        while k <= 2 * l * l + l {
            for h in 0..k {
                if h.gcd(&k) == 1 {
                    let hp = (-modinv(h.rem_euclid(k), k)).rem_euclid(k);
                    for t in 0..l {
                        let hpt = hp + t * k;
                        if hpt.rem_euclid(l) == rho.rem_euclid(l) {
                            return Some((h, k, hpt));
                        }
                    }
                }
            }
            k += l;
        }
        None
    }

    /// Coefficients a_j of Z* = sum a_j q'^{j/L} for 0 <= j <= j_max, at cusps
    /// with h' = rho and k = iota2 mod L.
    pub fn zstar_coeffs<R: Real>(&self, rho: i64, iota2: i64, j_max: usize, prec: u32) -> Option<ComplexQSeries<R>> {
        let (h, k, hp) = self.representative(rho, iota2)?;
        let t = self.transform(h, k, hp);
        let bound = Q::new(j_max as i64, self.l);
        let mut s = QSeries::with_grid(
            {
                let mut v = vec![cx_zero::<R>(); j_max + 1];
                v[0] = cx_one();
                v
            },
            Q::zero(),
            self.l,
        );
        for f in t.factors(bound) {
            let step = f.ex * qi(self.l);
            assert!(step.is_integer());
            s.mul_binomial_pow(&cis_q::<R>(f.phase, prec), step.to_integer() as usize, f.power);
        }
        Some(s)
    }
}

/// Modified Bessel function I_v(x) by its power series; x >= 0.
pub fn bessel_i<R: Real>(v: Q, x: &R, prec: u32) -> R {
    let v = if v.is_integer() && v < Q::zero() { -v } else { v };
    let vr = q_to_real::<R>(v, prec);
    let half = x.clone() / R::from_i64(2, prec);
    if x.is_zero() {
        return if v.is_zero() { R::from_i64(1, prec) } else { R::from_i64(0, prec) };
    }
    let mut term = half.powr(&vr) / (vr.clone() + R::from_i64(1, prec)).gamma();
    let h2 = half.clone() * half;
    let eps = R::epsilon(prec + 8, prec);
    let mut sum = term.clone();
    let mut m = 0i64;
    loop {
        m += 1;
        term = term * h2.clone() / (R::from_i64(m, prec) * (R::from_i64(m, prec) + vr.clone()));
        sum = sum + term.clone();
        if term.abs() <= eps.clone() * sum.abs() && R::from_i64(m, prec) > x.clone() {
            break;
        }
    }
    sum
}

/// A1^{(G-1)/2} A2^{(1-G)/2} I_{1-G}(2 sqrt(A1 A2)), continued analytically in A1.
pub fn i_star<R: Real>(a1: &R, a2: &R, g: Q, prec: u32) -> R {
    let v = Q::one() - g;
    let vr = q_to_real::<R>(v, prec);
    let one = R::from_i64(1, prec);
    // sum_m A1^m A2^{m+v} / (m! Gamma(m+v+1))
    let m0 = if v.is_integer() && v < Q::zero() { (-v).to_integer() } else { 0 };
    let mut fact = one.clone();
    for i in 1..=m0 {
        fact = fact * R::from_i64(i, prec);
    }
    let mut a1p = one.clone();
    for _ in 0..m0 {
        a1p = a1p * a1.clone();
    }
    let e = R::from_i64(m0, prec) + vr.clone();
    let mut term = a1p * a2.powr(&e) / (fact * (e.clone() + one.clone()).gamma());
    let prod = a1.clone() * a2.clone();
    let eps = R::epsilon(prec + 8, prec);
    let mut sum = term.clone();
    let mut m = m0;
    let mut peak = sum.abs();
    loop {
        m += 1;
        term = term * prod.clone() / (R::from_i64(m, prec) * (R::from_i64(m, prec) + vr.clone()));
        sum = sum + term.clone();
        let a = term.abs();
        if a > peak {
            peak = a.clone();
        }
        if a <= eps.clone() * peak.clone() && R::from_i64(m * m, prec) > prod.abs() {
            break;
        }
    }
    sum
}

/// Generalized Kloosterman sum over 0 <= h < k, gcd(h, k) = 1, h = iota1 mod L:
/// sum omega(h,k) e(-n h/k) e(h' j/(kL)).
pub fn kloosterman_b<R: Real>(ctx: &ExactContext, k: i64, j: i64, iota1: i64, n: i64, prec: u32) -> Cx<R> {
    let mut acc = cx_zero::<R>();
    for h in 0..k {
        if h.gcd(&k) != 1 || (h - iota1).rem_euclid(ctx.l) != 0 {
            continue;
        }
        let hp = h_prime(h, k, ctx.l);
        let t = ctx.omega_turns(h, k) - Q::new(n * h, k) + Q::new(hp * j, k * ctx.l);
        acc = acc.add_c(&cis_q(t, prec));
    }
    acc
}

/// One summand of the truncated exact formula.
#[derive(Clone, Debug)]
pub struct XiTerm<R> {
    pub iota1: i64,
    pub iota2: i64,
    pub rho: i64,
    pub j: i64,
    pub k: i64,
    pub value: Cx<R>,
}

/// Output of [`xi_truncated`].
#[derive(Clone, Debug)]
pub struct XiResult<R> {
    pub value: Cx<R>,
    pub terms: Vec<XiTerm<R>>,
}

/// Truncation of the exact formula for xi_S(r1, l1, r2, l2; n) at k <= N.
pub fn xi_truncated<R: Real>(ctx: &ExactContext, n: i64, big_n: i64, prec: u32) -> Result<XiResult<R>> {
    if n < 1 || big_n < 1 {
        return Err(Error::Validation("n and N must be positive".into()));
    }
    let l = ctx.l;
    // Z* coefficients per (h' mod L, k mod L)
    let mut zstar: HashMap<(i64, i64), Vec<Cx<R>>> = HashMap::new();
    for iota2 in 0..l {
        let hq = ctx.cusp_order(iota2);
        if hq >= Q::zero() {
            continue;
        }
        let jmax = (-hq * qi(l)).ceil().to_integer() - 1;
        for rho in 0..l {
            if let Some(s) = ctx.zstar_coeffs::<R>(rho, iota2, jmax.max(0) as usize, prec) {
                zstar.insert((rho, iota2), s.into_coeffs());
            }
        }
    }
    let two_pi = R::from_i64(2, prec) * R::pi(prec);
    let a1 = two_pi.clone() * R::from_i64(n, prec) - R::pi(prec) * R::from_frac(ctx.chi, 12, prec);
    let alpha = ctx.alpha.eval::<R>(prec);
    let per_k: Vec<Vec<XiTerm<R>>> = (1..=big_n)
        .into_par_iter()
        .map(|k| -> Result<Vec<XiTerm<R>>> {
            let iota2 = k.rem_euclid(l);
            let hq = ctx.cusp_order(iota2);
            if hq >= Q::zero() {
                return Ok(Vec::new());
            }
            let jcount = (-hq * qi(l)).ceil().to_integer().max(1);
            let kr = R::from_i64(k, prec);
            let kpow = kr.powr(&q_to_real::<R>(-ctx.g, prec));
            // class sums of omega e(-nh/k) e(h'j/(kL)) alpha'
            let mut classes: BTreeMap<(i64, i64, i64), Cx<R>> = BTreeMap::new();
            for h in 0..k {
                if h.gcd(&k) != 1 {
                    continue;
                }
                let hp = h_prime(h, k, l);
                let ap = ctx.alpha_prime_of(h, k, hp).eval::<R>(prec);
                let base = ctx.omega_turns(h, k) - Q::new(n * h, k);
                for j in 0..jcount {
                    let t = base + Q::new(hp * j, k * l);
                    let v = cis_q::<R>(t, prec).mul_c(&ap);
                    let e = classes.entry((h.rem_euclid(l), hp.rem_euclid(l), j)).or_insert_with(cx_zero);
                    *e = e.add_c(&v);
                }
            }
            let mut out = Vec::new();
            for ((iota1, rho, j), b) in classes {
                let a = &zstar[&(rho, iota2)][j as usize];
                let bracket = hq + Q::new(j, l);
                if bracket >= Q::zero() {
                    return Err(Error::NonpositiveCuspWeight { j });
                }
                let a2 = -(two_pi.clone() * q_to_real::<R>(bracket, prec)) / (kr.clone() * kr.clone());
                let istar = i_star(&a1, &a2, ctx.g, prec);
                let scal = two_pi.clone() * kpow.clone() * istar;
                let value = cx_scale(&alpha.mul_c(a).mul_c(&b), &scal);
                out.push(XiTerm { iota1, iota2, rho, j, k, value });
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut terms: Vec<XiTerm<R>> = per_k.into_iter().flatten().collect();
    terms.sort_by_key(|t| (t.iota1, t.iota2, t.rho, t.j, t.k));
    let mut value = cx_zero::<R>();
    for t in &terms {
        value = value.add_c(&t.value);
    }
    Ok(XiResult { value, terms })
}

/// Z(tau) / (omega alpha z^{-G} exp(...) Z*(tau')) at tau = (iz + h)/k: the
/// numerically pinned alpha'.
pub fn pinned_alpha_prime<R: Real>(ctx: &ExactContext, h: i64, k: i64, z: &Cx<R>, prec: u32) -> Cx<R> {
    let hp = h_prime(h, k, ctx.l);
    let lhs = z_at_cusp(ctx, h, k, z, prec);
    let t = ctx.transform(h, k, hp);
    let rest = t.eval_transformed(z, prec);
    let kconst = t.constant.eval::<R>(prec);
    let without_k = rest.mul_c(&kconst.inv_c().expect("nonzero"));
    let om = cis_q::<R>(ctx.omega_turns(h, k), prec);
    let al = ctx.alpha.eval::<R>(prec);
    lhs.mul_c(&without_k.mul_c(&om).mul_c(&al).inv_c().expect("nonzero"))
}

/// Z at tau = (iz + h)/k by the product.
pub fn z_at_cusp<R: Real>(ctx: &ExactContext, h: i64, k: i64, z: &Cx<R>, prec: u32) -> Cx<R> {
    let kr = R::from_i64(k, prec);
    let tau = Cx::new((R::from_i64(h, prec) - z.im.clone()) / kr.clone(), z.re.clone() / kr);
    ctx.fs.eval(&tau, prec)
}

/// Both sides of the transformation law at (h, k, z) using the tabulated alpha'.
pub fn transformation_sides<R: Real>(ctx: &ExactContext, h: i64, k: i64, z: &Cx<R>, alpha_prime: &Cx<R>, prec: u32) -> (Cx<R>, Cx<R>) {
    let hp = h_prime(h, k, ctx.l);
    let t = ctx.transform(h, k, hp);
    let without_k = t.eval_transformed(z, prec).mul_c(&t.constant.eval::<R>(prec).inv_c().expect("nonzero"));
    let om = cis_q::<R>(ctx.omega_turns(h, k), prec);
    let al = ctx.alpha.eval::<R>(prec);
    (z_at_cusp(ctx, h, k, z, prec), without_k.mul_c(&om).mul_c(&al).mul_c(alpha_prime))
}
