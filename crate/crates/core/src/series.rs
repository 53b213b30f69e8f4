//! Truncated q-series with exact or high-precision coefficients.
//!
//! A [`QSeries`] stores dense coefficients `c_0..c_N` of
//! `q^offset * sum_i c_i q^(i / grid)`. The offset and grid are exact, so
//! fractional exponents such as `q^(1/24)` are never rounded.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::real::{cx_one, cx_zero, Cx, Real};

/// Small exact rational used for exponents.
pub type Q = Ratio<i64>;

/// Coefficient ring for [`QSeries`].
pub trait Coeff: Clone + PartialEq + fmt::Debug + Send + Sync {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero_c(&self) -> bool;
    fn add_c(&self, o: &Self) -> Self;
    fn sub_c(&self, o: &Self) -> Self;
    fn mul_c(&self, o: &Self) -> Self;
    fn neg_c(&self) -> Self;
    /// Multiplicative inverse, when it exists in the ring.
    fn inv_c(&self) -> Option<Self>;
}

impl Coeff for BigInt {
    fn zero_like(&self) -> Self {
        BigInt::zero()
    }
    fn one_like(&self) -> Self {
        BigInt::one()
    }
    fn is_zero_c(&self) -> bool {
        self.is_zero()
    }
    fn add_c(&self, o: &Self) -> Self {
        self + o
    }
    fn sub_c(&self, o: &Self) -> Self {
        self - o
    }
    fn mul_c(&self, o: &Self) -> Self {
        self * o
    }
    fn neg_c(&self) -> Self {
        -self
    }
    fn inv_c(&self) -> Option<Self> {
        if self.abs().is_one() {
            Some(self.clone())
        } else {
            None
        }
    }
}

impl Coeff for BigRational {
    fn zero_like(&self) -> Self {
        BigRational::zero()
    }
    fn one_like(&self) -> Self {
        BigRational::one()
    }
    fn is_zero_c(&self) -> bool {
        self.is_zero()
    }
    fn add_c(&self, o: &Self) -> Self {
        self + o
    }
    fn sub_c(&self, o: &Self) -> Self {
        self - o
    }
    fn mul_c(&self, o: &Self) -> Self {
        self * o
    }
    fn neg_c(&self) -> Self {
        -self
    }
    fn inv_c(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(self.recip())
        }
    }
}

impl<R: Real> Coeff for Complex<R> {
    fn zero_like(&self) -> Self {
        cx_zero()
    }
    fn one_like(&self) -> Self {
        cx_one()
    }
    fn is_zero_c(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn add_c(&self, o: &Self) -> Self {
        Complex::new(self.re.clone() + o.re.clone(), self.im.clone() + o.im.clone())
    }
    fn sub_c(&self, o: &Self) -> Self {
        Complex::new(self.re.clone() - o.re.clone(), self.im.clone() - o.im.clone())
    }
    fn mul_c(&self, o: &Self) -> Self {
        let re = self.re.clone() * o.re.clone() - self.im.clone() * o.im.clone();
        let im = self.re.clone() * o.im.clone() + self.im.clone() * o.re.clone();
        Complex::new(re, im)
    }
    fn neg_c(&self) -> Self {
        Complex::new(-self.re.clone(), -self.im.clone())
    }
    fn inv_c(&self) -> Option<Self> {
        if self.is_zero_c() {
            return None;
        }
        let d = self.re.clone() * self.re.clone() + self.im.clone() * self.im.clone();
        Some(Complex::new(self.re.clone() / d.clone(), -(self.im.clone() / d)))
    }
}

/// Integer Laurent polynomial in x, y. Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct LaurentPoly {
    terms: BTreeMap<(i64, i64), BigInt>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly::default()
    }

    pub fn one() -> Self {
        Self::monomial(0, 0, BigInt::one())
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Self::monomial(0, 0, c.into())
    }

    pub fn monomial(a: i64, b: i64, c: impl Into<BigInt>) -> Self {
        let c = c.into();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((a, b), c);
        }
        LaurentPoly { terms }
    }

    pub fn from_terms<I: IntoIterator<Item = ((i64, i64), BigInt)>>(it: I) -> Self {
        let mut p = LaurentPoly::zero();
        for ((a, b), c) in it {
            p.add_term(a, b, &c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, a: i64, b: i64) -> BigInt {
        self.terms.get(&(a, b)).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(i64, i64), &BigInt)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, a: i64, b: i64, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry((a, b)).or_default();
        *e += c;
        if e.is_zero() {
            self.terms.remove(&(a, b));
        }
    }

    /// Multiply by c * x^a * y^b.
    pub fn shift(&self, a: i64, b: i64, c: &BigInt) -> Self {
        if c.is_zero() {
            return LaurentPoly::zero();
        }
        LaurentPoly {
            terms: self.terms.iter().map(|(&(s, t), v)| ((s + a, t + b), v * c)).collect(),
        }
    }

    /// self += c * x^a y^b * other
    pub fn add_shifted(&mut self, other: &LaurentPoly, a: i64, b: i64, c: &BigInt) {
        for (&(s, t), v) in &other.terms {
            self.add_term(s + a, t + b, &(v * c));
        }
    }

    /// Exchange x and y.
    pub fn swap_xy(&self) -> Self {
        LaurentPoly { terms: self.terms.iter().map(|(&(a, b), c)| ((b, a), c.clone())).collect() }
    }

    /// Substitute (x, y) -> (1/x, 1/y).
    pub fn invert_xy(&self) -> Self {
        LaurentPoly { terms: self.terms.iter().map(|(&(a, b), c)| ((-a, -b), c.clone())).collect() }
    }

    /// Sum of all coefficients, i.e. the value at x = y = 1.
    pub fn at_one(&self) -> BigInt {
        self.terms.values().sum()
    }

    /// Evaluate at arbitrary nonzero complex (x, y).
    pub fn eval<R: Real>(&self, x: &Cx<R>, y: &Cx<R>, prec: u32) -> Cx<R> {
        let mut acc: Cx<R> = cx_zero();
        for (&(a, b), c) in &self.terms {
            let m = cx_powi(x, a).mul_c(&cx_powi(y, b));
            let cr = R::from_bigint(c, prec);
            acc = acc.add_c(&Complex::new(m.re * cr.clone(), m.im * cr));
        }
        acc
    }

    fn as_unit(&self) -> Option<((i64, i64), BigInt)> {
        if self.terms.len() != 1 {
            return None;
        }
        let (&k, v) = self.terms.iter().next().unwrap();
        if v.abs().is_one() {
            Some((k, v.clone()))
        } else {
            None
        }
    }
}

/// Integer power of a complex number by repeated squaring.
pub fn cx_powi<R: Real>(z: &Cx<R>, e: i64) -> Cx<R> {
    let mut base = if e < 0 { z.inv_c().expect("nonzero base") } else { z.clone() };
    let mut n = e.unsigned_abs();
    let mut acc: Cx<R> = cx_one();
    while n > 0 {
        if n & 1 == 1 {
            acc = acc.mul_c(&base);
        }
        base = base.mul_c(&base);
        n >>= 1;
    }
    acc
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&(a, b), c) in &self.terms {
            let neg = c.is_negative();
            if !first {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            } else if neg {
                write!(f, "-")?;
            }
            first = false;
            let mag = c.abs();
            let unit = mag.is_one();
            if !unit || (a == 0 && b == 0) {
                write!(f, "{}", mag)?;
            }
            let mut mono = String::new();
            for (v, e) in [("x", a), ("y", b)] {
                if e != 0 {
                    if !mono.is_empty() || !unit {
                        mono.push('*');
                    }
                    mono.push_str(v);
                    if e != 1 {
                        mono.push_str(&format!("^{}", e));
                    }
                }
            }
            write!(f, "{}", mono)?;
        }
        Ok(())
    }
}

impl Add for LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: LaurentPoly) -> LaurentPoly {
        self.add_c(&rhs)
    }
}

impl Sub for LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: LaurentPoly) -> LaurentPoly {
        self.sub_c(&rhs)
    }
}

impl Mul for LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: LaurentPoly) -> LaurentPoly {
        self.mul_c(&rhs)
    }
}

impl Neg for LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        self.neg_c()
    }
}

impl Coeff for LaurentPoly {
    fn zero_like(&self) -> Self {
        LaurentPoly::zero()
    }
    fn one_like(&self) -> Self {
        LaurentPoly::one()
    }
    fn is_zero_c(&self) -> bool {
        self.terms.is_empty()
    }
    fn add_c(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (&(a, b), c) in &o.terms {
            r.add_term(a, b, c);
        }
        r
    }
    fn sub_c(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (&(a, b), c) in &o.terms {
            r.add_term(a, b, &-c);
        }
        r
    }
    fn mul_c(&self, o: &Self) -> Self {
        let mut r = LaurentPoly::zero();
        for (&(a, b), c) in &self.terms {
            r.add_shifted(o, a, b, c);
        }
        r
    }
    fn neg_c(&self) -> Self {
        LaurentPoly { terms: self.terms.iter().map(|(k, v)| (*k, -v)).collect() }
    }
    fn inv_c(&self) -> Option<Self> {
        self.as_unit().map(|((a, b), c)| LaurentPoly::monomial(-a, -b, c))
    }
}

/// Dense truncated series `q^offset * sum_{i=0}^{N} c_i q^(i/grid)`.
#[derive(Clone, Debug, PartialEq)]
pub struct QSeries<C> {
    coeffs: Vec<C>,
    offset: Q,
    grid: i64,
}

impl<C: Coeff> QSeries<C> {
    /// Series with integral exponent grid and zero offset.
    pub fn new(coeffs: Vec<C>) -> Self {
        Self::with_grid(coeffs, Q::zero(), 1)
    }

    pub fn with_grid(coeffs: Vec<C>, offset: Q, grid: i64) -> Self {
        assert!(!coeffs.is_empty(), "a series keeps at least its constant term");
        assert!(grid >= 1);
        QSeries { coeffs, offset, grid }
    }

    /// The multiplicative identity to the given truncation, built from a sample coefficient.
    pub fn one_from(sample: &C, trunc: usize) -> Self {
        let mut coeffs = vec![sample.zero_like(); trunc + 1];
        coeffs[0] = sample.one_like();
        Self::new(coeffs)
    }

    pub fn zero_from(sample: &C, trunc: usize) -> Self {
        Self::new(vec![sample.zero_like(); trunc + 1])
    }

    /// Truncation order in grid steps.
    pub fn trunc(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn offset(&self) -> Q {
        self.offset
    }

    pub fn grid(&self) -> i64 {
        self.grid
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<C> {
        self.coeffs
    }

    pub fn coeff(&self, i: usize) -> &C {
        &self.coeffs[i]
    }

    /// Exponent of the coefficient at index i.
    pub fn exponent(&self, i: usize) -> Q {
        self.offset + Q::new(i as i64, self.grid)
    }

    pub fn with_offset(mut self, offset: Q) -> Self {
        self.offset = offset;
        self
    }

    pub fn truncated(&self, n: usize) -> Self {
        let n = n.min(self.trunc());
        QSeries { coeffs: self.coeffs[..=n].to_vec(), offset: self.offset, grid: self.grid }
    }

    fn check_compat(&self, o: &Self) {
        assert_eq!(self.grid, o.grid, "series on different exponent grids");
    }

    pub fn add(&self, o: &Self) -> Self {
        self.check_compat(o);
        assert_eq!(self.offset, o.offset, "adding series with different offsets");
        let n = self.trunc().min(o.trunc());
        let coeffs = (0..=n).map(|i| self.coeffs[i].add_c(&o.coeffs[i])).collect();
        QSeries { coeffs, offset: self.offset, grid: self.grid }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        QSeries {
            coeffs: self.coeffs.iter().map(|c| c.neg_c()).collect(),
            offset: self.offset,
            grid: self.grid,
        }
    }

    pub fn scale(&self, s: &C) -> Self {
        QSeries {
            coeffs: self.coeffs.iter().map(|c| c.mul_c(s)).collect(),
            offset: self.offset,
            grid: self.grid,
        }
    }

    /// Cauchy product truncated to the smaller truncation order.
    pub fn mul(&self, o: &Self) -> Self {
        self.check_compat(o);
        let n = self.trunc().min(o.trunc());
        let zero = self.coeffs[0].zero_like();
        let mut out = vec![zero; n + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(n + 1) {
            if a.is_zero_c() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate().take(n + 1 - i) {
                if b.is_zero_c() {
                    continue;
                }
                out[i + j] = out[i + j].add_c(&a.mul_c(b));
            }
        }
        QSeries { coeffs: out, offset: self.offset + o.offset, grid: self.grid }
    }

    /// Multiplicative inverse; requires a unit constant term.
    pub fn inverse(&self) -> Result<Self> {
        let inv0 = self.coeffs[0].inv_c().ok_or(Error::NonUnitConstantTerm)?;
        let n = self.trunc();
        let mut out: Vec<C> = Vec::with_capacity(n + 1);
        out.push(inv0.clone());
        for m in 1..=n {
            let mut acc = self.coeffs[0].zero_like();
            for i in 1..=m {
                let a = &self.coeffs[i];
                if a.is_zero_c() {
                    continue;
                }
                acc = acc.add_c(&a.mul_c(&out[m - i]));
            }
            out.push(acc.mul_c(&inv0).neg_c());
        }
        Ok(QSeries { coeffs: out, offset: -self.offset, grid: self.grid })
    }

    /// Integer power; negative exponents go through [`QSeries::inverse`].
    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.inverse()? } else { self.clone() };
        let mut acc = QSeries::one_from(&self.coeffs[0], self.trunc());
        acc.grid = self.grid;
        let mut b = base;
        let mut k = e.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&b);
            }
            k >>= 1;
            if k > 0 {
                b = b.mul(&b);
            }
        }
        Ok(acc)
    }

    /// In place multiplication by `(1 - c q^(step/grid))^e`.
    ///
    /// Each unit of e costs one linear pass, so this is the cheap way to
    /// accumulate infinite products one factor at a time.
    pub fn mul_binomial_pow(&mut self, c: &C, step: usize, e: i64) {
        assert!(step >= 1);
        let n = self.trunc();
        if step > n || e == 0 {
            return;
        }
        for _ in 0..e.unsigned_abs() {
            if e > 0 {
                for i in (step..=n).rev() {
                    let t = c.mul_c(&self.coeffs[i - step]);
                    self.coeffs[i] = self.coeffs[i].sub_c(&t);
                }
            } else {
                for i in step..=n {
                    let t = c.mul_c(&self.coeffs[i - step]);
                    self.coeffs[i] = self.coeffs[i].add_c(&t);
                }
            }
        }
    }

    /// Coefficientwise map into another ring; offset and grid are kept.
    pub fn map<D: Coeff, F: Fn(&C) -> D>(&self, f: F) -> QSeries<D> {
        QSeries { coeffs: self.coeffs.iter().map(f).collect(), offset: self.offset, grid: self.grid }
    }

    /// Substitute q -> q^d, refining nothing: the grid stays and indices scale.
    pub fn dilate(&self, d: usize, trunc: usize) -> Self {
        let zero = self.coeffs[0].zero_like();
        let mut out = vec![zero; trunc + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            if i * d > trunc {
                break;
            }
            out[i * d] = c.clone();
        }
        QSeries { coeffs: out, offset: self.offset * Q::from_integer(d as i64), grid: self.grid }
    }
}

/// Series with Laurent polynomial coefficients in x, y.
pub type LaurentQSeries = QSeries<LaurentPoly>;
/// Series with integer coefficients.
pub type IntQSeries = QSeries<BigInt>;
/// Series with complex coefficients over the scalar `R`.
pub type ComplexQSeries<R> = QSeries<Cx<R>>;

impl LaurentQSeries {
    pub fn laurent_one(trunc: usize) -> Self {
        QSeries::one_from(&LaurentPoly::one(), trunc)
    }
}

impl IntQSeries {
    pub fn int_one(trunc: usize) -> Self {
        QSeries::one_from(&BigInt::one(), trunc)
    }

    pub fn from_i64s(v: &[i64]) -> Self {
        QSeries::new(v.iter().map(|&x| BigInt::from(x)).collect())
    }
}

/// Expansion of `(1 - x^a y^b q^m)^e` to order q^N.
pub fn product_factor_pow(a: i64, b: i64, m: usize, e: i64, n: usize) -> LaurentQSeries {
    assert!(m >= 1, "q-exponent of a product factor must be positive");
    let mut s = LaurentQSeries::laurent_one(n);
    s.mul_binomial_pow(&LaurentPoly::monomial(a, b, 1), m, e);
    s
}

/// Evaluate every Laurent coefficient at (x0, y0); the exponent offset is kept.
pub fn specialize<R: Real>(s: &LaurentQSeries, x0: &Cx<R>, y0: &Cx<R>, prec: u32) -> ComplexQSeries<R> {
    assert!(prec >= 53, "specialization needs at least double precision");
    // powers are shared between coefficients, so cache them once
    let (mut amin, mut amax, mut bmin, mut bmax) = (0i64, 0i64, 0i64, 0i64);
    for p in s.coeffs() {
        for (&(a, b), _) in p.terms() {
            amin = amin.min(a);
            amax = amax.max(a);
            bmin = bmin.min(b);
            bmax = bmax.max(b);
        }
    }
    let xs = power_table(x0, amin, amax);
    let ys = power_table(y0, bmin, bmax);
    s.map(|p| {
        let mut acc: Cx<R> = cx_zero();
        for (&(a, b), c) in p.terms() {
            let m = xs[(a - amin) as usize].mul_c(&ys[(b - bmin) as usize]);
            let cr = R::from_bigint(c, prec);
            acc = acc.add_c(&Complex::new(m.re * cr.clone(), m.im * cr));
        }
        acc
    })
}

fn power_table<R: Real>(z: &Cx<R>, lo: i64, hi: i64) -> Vec<Cx<R>> {
    let mut out = Vec::with_capacity((hi - lo + 1) as usize);
    let mut cur = cx_powi(z, lo);
    for _ in lo..=hi {
        out.push(cur.clone());
        cur = cur.mul_c(z);
    }
    out
}
