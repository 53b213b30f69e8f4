//! Scalar abstraction for the numeric side of the crate.
//!
//! Everything that is not exact integer/rational arithmetic is written against
//! [`Real`], which is implemented for the primitive floats (through
//! `num_traits::Float`) and for [`MpFloat`], an MPFR-backed multi-precision
//! float. Values of `MpFloat` carry their own precision; binary operations
//! round to the larger precision of the two operands, so constants built at
//! precision 1 (zero, one) never degrade a computation.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Rem, Sub};

use num_bigint::{BigInt, Sign};
use num_complex::Complex;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Float, FloatConst, FromPrimitive, Num, One, ToPrimitive, Zero};
use rug::float::Round;
use rug::ops::Pow;

/// Real scalar with the transcendental functions the numeric modules need.
///
/// `prec` arguments are in bits; primitive floats ignore them.
pub trait Real:
    Clone + fmt::Debug + fmt::Display + PartialOrd + Num + Neg<Output = Self> + Send + Sync
{
    fn from_f64_prec(v: f64, prec: u32) -> Self;
    fn from_bigint(n: &BigInt, prec: u32) -> Self;
    fn pi(prec: u32) -> Self;
    /// Working precision of this value in bits.
    fn prec(&self) -> u32;

    fn sqrt(&self) -> Self;
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn sinh(&self) -> Self;
    fn cosh(&self) -> Self;
    fn powr(&self, e: &Self) -> Self;
    fn abs(&self) -> Self;
    fn floor(&self) -> Self;
    fn gamma(&self) -> Self;
    fn to_f64(&self) -> f64;
    /// Nearest integer, ties away from zero. `None` for non-finite values.
    fn round_bigint(&self) -> Option<BigInt>;

    fn from_i64(v: i64, prec: u32) -> Self {
        Self::from_bigint(&BigInt::from(v), prec)
    }

    fn from_ratio(r: &BigRational, prec: u32) -> Self {
        Self::from_bigint(r.numer(), prec) / Self::from_bigint(r.denom(), prec)
    }

    fn from_frac(num: i64, den: i64, prec: u32) -> Self {
        Self::from_i64(num, prec) / Self::from_i64(den, prec)
    }

    /// 2^-bits at the given precision.
    fn epsilon(bits: u32, prec: u32) -> Self {
        let two = Self::from_i64(2, prec);
        two.powr(&Self::from_i64(-(bits as i64), prec))
    }

    fn is_finite_val(&self) -> bool {
        self.to_f64().is_finite() || self.prec() > 64
    }
}

impl<T> Real for T
where
    T: Float + FloatConst + FromPrimitive + fmt::Debug + fmt::Display + Send + Sync,
{
    fn from_f64_prec(v: f64, _prec: u32) -> Self {
        T::from_f64(v).expect("f64 representable")
    }
    fn from_bigint(n: &BigInt, _prec: u32) -> Self {
        T::from_f64(n.to_f64().unwrap_or(f64::NAN)).unwrap_or_else(T::nan)
    }
    fn from_ratio(r: &BigRational, _prec: u32) -> Self {
        T::from_f64(r.to_f64().unwrap_or(f64::NAN)).unwrap_or_else(T::nan)
    }
    fn pi(_prec: u32) -> Self {
        T::PI()
    }
    fn prec(&self) -> u32 {
        // mantissa bits incl. the implicit one
        if std::mem::size_of::<T>() == 4 {
            24
        } else {
            53
        }
    }
    fn sqrt(&self) -> Self {
        Float::sqrt(*self)
    }
    fn exp(&self) -> Self {
        Float::exp(*self)
    }
    fn ln(&self) -> Self {
        Float::ln(*self)
    }
    fn sin(&self) -> Self {
        Float::sin(*self)
    }
    fn cos(&self) -> Self {
        Float::cos(*self)
    }
    fn sinh(&self) -> Self {
        Float::sinh(*self)
    }
    fn cosh(&self) -> Self {
        Float::cosh(*self)
    }
    fn powr(&self, e: &Self) -> Self {
        Float::powf(*self, *e)
    }
    fn abs(&self) -> Self {
        Float::abs(*self)
    }
    fn floor(&self) -> Self {
        Float::floor(*self)
    }
    fn gamma(&self) -> Self {
        T::from_f64(lanczos_gamma(self.to_f64().unwrap_or(f64::NAN))).unwrap_or_else(T::nan)
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn round_bigint(&self) -> Option<BigInt> {
        if !Float::is_finite(*self) {
            return None;
        }
        BigInt::from_f64(Float::round(*self).to_f64().unwrap())
    }
}

// Lanczos approximation (g = 7, n = 9), ~15 digits for the f64 path.
fn lanczos_gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const C: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        std::f64::consts::PI / ((std::f64::consts::PI * x).sin() * lanczos_gamma(1.0 - x))
    } else {
        let x = x - 1.0;
        let mut a = C[0];
        let t = x + G + 0.5;
        for (i, c) in C.iter().enumerate().skip(1) {
            a += c / (x + i as f64);
        }
        (2.0 * std::f64::consts::PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
    }
}

/// MPFR float with per-value precision.
#[derive(Clone)]
pub struct MpFloat(pub rug::Float);

impl MpFloat {
    pub fn inner(&self) -> &rug::Float {
        &self.0
    }

    fn lift<F: FnOnce(&rug::Float) -> rug::Float>(&self, f: F) -> Self {
        MpFloat(f(&self.0))
    }

    fn bin_prec(a: &MpFloat, b: &MpFloat) -> u32 {
        a.0.prec().max(b.0.prec())
    }

    /// Decimal rendering with `digits` significant digits.
    pub fn to_decimal(&self, digits: usize) -> String {
        self.0.to_string_radix(10, Some(digits))
    }
}

fn bigint_to_rug(n: &BigInt) -> rug::Integer {
    let (sign, digits) = n.to_u32_digits();
    let mut i = rug::Integer::from_digits(&digits, rug::integer::Order::Lsf);
    if sign == Sign::Minus {
        i = -i;
    }
    i
}

fn rug_to_bigint(i: &rug::Integer) -> BigInt {
    let digits: Vec<u32> = i.to_digits(rug::integer::Order::Lsf);
    let mag = BigInt::from_slice(Sign::Plus, &digits);
    if *i < 0 {
        -mag
    } else {
        mag
    }
}

impl fmt::Debug for MpFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MpFloat({})", self.0.to_string_radix(10, Some(30)))
    }
}

impl fmt::Display for MpFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = ((self.0.prec() as f64) * std::f64::consts::LOG10_2).floor() as usize;
        write!(f, "{}", self.0.to_string_radix(10, Some(digits.max(2))))
    }
}

impl PartialEq for MpFloat {
    fn eq(&self, other: &Self) -> bool {
        self.0 == other.0
    }
}

impl PartialOrd for MpFloat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.partial_cmp(&other.0)
    }
}

macro_rules! mp_binop {
    ($tr:ident, $method:ident, $op:tt) => {
        impl $tr for MpFloat {
            type Output = MpFloat;
            fn $method(self, rhs: MpFloat) -> MpFloat {
                let p = MpFloat::bin_prec(&self, &rhs);
                MpFloat(rug::Float::with_val(p, &self.0 $op &rhs.0))
            }
        }
        impl<'a> $tr<&'a MpFloat> for &'a MpFloat {
            type Output = MpFloat;
            fn $method(self, rhs: &'a MpFloat) -> MpFloat {
                let p = MpFloat::bin_prec(self, rhs);
                MpFloat(rug::Float::with_val(p, &self.0 $op &rhs.0))
            }
        }
    };
}

mp_binop!(Add, add, +);
mp_binop!(Sub, sub, -);
mp_binop!(Mul, mul, *);
mp_binop!(Div, div, /);

impl Rem for MpFloat {
    type Output = MpFloat;
    fn rem(self, rhs: MpFloat) -> MpFloat {
        let p = MpFloat::bin_prec(&self, &rhs);
        let q = rug::Float::with_val(p, &self.0 / &rhs.0).trunc();
        MpFloat(rug::Float::with_val(p, &self.0 - &(q * &rhs.0)))
    }
}

impl Neg for MpFloat {
    type Output = MpFloat;
    fn neg(self) -> MpFloat {
        MpFloat(-self.0)
    }
}

impl Zero for MpFloat {
    fn zero() -> Self {
        MpFloat(rug::Float::with_val(1, 0))
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

impl One for MpFloat {
    fn one() -> Self {
        MpFloat(rug::Float::with_val(1, 1))
    }
}

impl Num for MpFloat {
    type FromStrRadixErr = String;
    fn from_str_radix(s: &str, radix: u32) -> Result<Self, String> {
        let parsed = rug::Float::parse_radix(s, radix as i32).map_err(|e| e.to_string())?;
        Ok(MpFloat(rug::Float::with_val(128, parsed)))
    }
}

impl Real for MpFloat {
    fn from_f64_prec(v: f64, prec: u32) -> Self {
        MpFloat(rug::Float::with_val(prec, v))
    }
    fn from_bigint(n: &BigInt, prec: u32) -> Self {
        MpFloat(rug::Float::with_val(prec, bigint_to_rug(n)))
    }
    fn from_i64(v: i64, prec: u32) -> Self {
        MpFloat(rug::Float::with_val(prec, v))
    }
    fn from_ratio(r: &BigRational, prec: u32) -> Self {
        let n = rug::Float::with_val(prec + 16, bigint_to_rug(r.numer()));
        let d = rug::Float::with_val(prec + 16, bigint_to_rug(r.denom()));
        MpFloat(rug::Float::with_val(prec, n / d))
    }
    fn pi(prec: u32) -> Self {
        MpFloat(rug::Float::with_val(prec, rug::float::Constant::Pi))
    }
    fn prec(&self) -> u32 {
        self.0.prec()
    }
    fn sqrt(&self) -> Self {
        self.lift(|x| x.clone().sqrt())
    }
    fn exp(&self) -> Self {
        self.lift(|x| x.clone().exp())
    }
    fn ln(&self) -> Self {
        self.lift(|x| x.clone().ln())
    }
    fn sin(&self) -> Self {
        self.lift(|x| x.clone().sin())
    }
    fn cos(&self) -> Self {
        self.lift(|x| x.clone().cos())
    }
    fn sinh(&self) -> Self {
        self.lift(|x| x.clone().sinh())
    }
    fn cosh(&self) -> Self {
        self.lift(|x| x.clone().cosh())
    }
    fn powr(&self, e: &Self) -> Self {
        let p = MpFloat::bin_prec(self, e);
        MpFloat(rug::Float::with_val(p, (&self.0).pow(&e.0)))
    }
    fn abs(&self) -> Self {
        self.lift(|x| x.clone().abs())
    }
    fn floor(&self) -> Self {
        self.lift(|x| x.clone().floor())
    }
    fn gamma(&self) -> Self {
        self.lift(|x| x.clone().gamma())
    }
    fn to_f64(&self) -> f64 {
        self.0.to_f64_round(Round::Nearest)
    }
    fn round_bigint(&self) -> Option<BigInt> {
        let r = self.0.clone().round();
        r.to_integer().map(|i| rug_to_bigint(&i))
    }
}

/// Complex scalar over a [`Real`].
pub type Cx<R> = Complex<R>;

pub fn cx<R: Real>(re: R, im: R) -> Cx<R> {
    Complex::new(re, im)
}

pub fn cx_zero<R: Real>() -> Cx<R> {
    Complex::new(R::zero(), R::zero())
}

pub fn cx_one<R: Real>() -> Cx<R> {
    Complex::new(R::one(), R::zero())
}

pub fn cx_real<R: Real>(x: R) -> Cx<R> {
    Complex::new(x, R::zero())
}

pub fn cx_abs<R: Real>(z: &Cx<R>) -> R {
    (z.re.clone() * z.re.clone() + z.im.clone() * z.im.clone()).sqrt()
}

pub fn cx_scale<R: Real>(z: &Cx<R>, s: &R) -> Cx<R> {
    Complex::new(z.re.clone() * s.clone(), z.im.clone() * s.clone())
}

pub fn cx_exp<R: Real>(z: &Cx<R>) -> Cx<R> {
    let m = z.re.exp();
    Complex::new(m.clone() * z.im.cos(), m * z.im.sin())
}

/// Principal logarithm.
pub fn cx_ln<R: Real>(z: &Cx<R>) -> Cx<R> {
    Complex::new(cx_abs(z).ln(), atan2(&z.im, &z.re))
}

/// Principal power z^e for real e.
pub fn cx_powr<R: Real>(z: &Cx<R>, e: &R) -> Cx<R> {
    let l = cx_ln(z);
    cx_exp(&cx_scale(&l, e))
}

/// atan2 built from the primitives of [`Real`]; quadrant-correct.
pub fn atan2<R: Real>(y: &R, x: &R) -> R {
    let p = y.prec().max(x.prec());
    let pi = R::pi(p);
    let zero = R::zero();
    if x.is_zero() && y.is_zero() {
        return R::from_i64(0, p);
    }
    let half = R::from_frac(1, 2, p);
    if x.clone().abs() >= y.clone().abs() {
        let base = atan(&(y.clone() / x.clone()));
        if *x > zero {
            base
        } else if *y >= zero {
            base + pi
        } else {
            base - pi
        }
    } else {
        let base = atan(&(x.clone() / y.clone()));
        if *y > zero {
            pi * half - base
        } else {
            -(pi * half) - base
        }
    }
}

/// atan on |t| <= 1 via argument halving and the Taylor series.
fn atan<R: Real>(t: &R) -> R {
    let p = t.prec();
    let one = R::from_i64(1, p);
    // atan(t) = 2 atan(t / (1 + sqrt(1 + t^2))), applied until |t| is small
    let mut x = t.clone();
    let mut doublings = 0u32;
    let small = R::from_frac(1, 16, p);
    while x.clone().abs() > small {
        x = x.clone() / (one.clone() + (one.clone() + x.clone() * x.clone()).sqrt());
        doublings += 1;
    }
    let x2 = x.clone() * x.clone();
    let mut term = x.clone();
    let mut sum = x.clone();
    let eps = R::epsilon(p + 8, p);
    let mut k = 1i64;
    loop {
        term = -(term * x2.clone());
        let add = term.clone() / R::from_i64(2 * k + 1, p);
        sum = sum + add.clone();
        if add.abs() < eps {
            break;
        }
        k += 1;
    }
    sum * R::from_i64(1i64 << doublings, p)
}

/// e^{2 pi i r} for an exact rational number of turns; reduces mod 1 first.
pub fn cis_turns<R: Real>(r: &BigRational, prec: u32) -> Cx<R> {
    let frac = r - BigRational::from_integer(r.numer().div_floor(r.denom()));
    let angle = R::from_i64(2, prec) * R::pi(prec) * R::from_ratio(&frac, prec);
    Complex::new(angle.cos(), angle.sin())
}

/// e^{2 pi i num/den} with small integers.
pub fn cis_frac<R: Real>(num: i64, den: i64, prec: u32) -> Cx<R> {
    cis_turns(&BigRational::new(BigInt::from(num), BigInt::from(den)), prec)
}

/// e^{i theta} for a real angle.
pub fn cis<R: Real>(theta: &R) -> Cx<R> {
    Complex::new(theta.cos(), theta.sin())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mp_arithmetic_keeps_the_larger_precision() {
        let a = MpFloat::from_i64(1, 200) / MpFloat::from_i64(3, 200);
        let b = MpFloat::one() + a.clone();
        assert_eq!(b.prec(), 200);
        let expected = MpFloat::from_i64(4, 200) / MpFloat::from_i64(3, 200);
        assert!((b - expected).abs() < MpFloat::epsilon(195, 200));
    }

    #[test]
    fn atan2_quadrants() {
        for &(y, x) in &[(1.0f64, 1.0), (1.0, -1.0), (-1.0, -1.0), (-1.0, 1.0), (2.0, 0.1), (-3.0, 0.0)] {
            let got = atan2(&MpFloat::from_f64_prec(y, 128), &MpFloat::from_f64_prec(x, 128));
            assert!((got.to_f64() - f64::atan2(y, x)).abs() < 1e-14, "{y} {x}");
        }
    }

    #[test]
    fn gamma_f64_matches_factorial() {
        assert!((Real::gamma(&5.0f64) - 24.0).abs() < 1e-10);
        assert!((Real::gamma(&0.5f64) - std::f64::consts::PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn bigint_round_trip() {
        let n: BigInt = "123456789012345678901234567890".parse().unwrap();
        let f = MpFloat::from_bigint(&n, 256);
        assert_eq!(f.round_bigint().unwrap(), n);
        let neg = -n.clone();
        assert_eq!(MpFloat::from_bigint(&neg, 256).round_bigint().unwrap(), neg);
    }

    #[test]
    fn cis_turns_reduces_exactly() {
        let r = BigRational::new(BigInt::from(10_000_001), BigInt::from(4));
        let z: Cx<MpFloat> = cis_turns(&r, 128);
        assert!((z.re.to_f64()).abs() < 1e-30);
        assert!((z.im.to_f64() - 1.0).abs() < 1e-30);
    }
}
