//! p(n) as a trace of a weak Maass form over CM points of discriminant 1 - 24n.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::real::{cx_abs, cx_exp, cx_zero, Cx, Real};
use crate::series::{Coeff, IntQSeries, QSeries, Q};

/// Binary quadratic form a x^2 + b x y + c y^2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bqf {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl Bqf {
    pub fn new(a: i64, b: i64, c: i64) -> Self {
        Bqf { a, b, c }
    }

    pub fn disc(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    /// Q(p x + q y, r x + s y).
    pub fn act(&self, m: [i64; 4]) -> Bqf {
        let [p, q, r, s] = m;
        let Bqf { a, b, c } = *self;
        Bqf {
            a: a * p * p + b * p * r + c * r * r,
            b: 2 * a * p * q + b * (p * s + q * r) + 2 * c * r * s,
            c: a * q * q + b * q * s + c * s * s,
        }
    }

    pub fn in_qn_normalization(&self) -> bool {
        self.a > 0 && self.a % 6 == 0 && self.b.rem_euclid(12) == 1
    }

    /// Root (-b + i sqrt(|D|))/(2a) in the upper half plane.
    pub fn cm_point<R: Real>(&self, prec: u32) -> Cx<R> {
        let two_a = R::from_i64(2 * self.a, prec);
        let s = R::from_i64(-self.disc(), prec).sqrt();
        Cx::new(R::from_i64(-self.b, prec) / two_a.clone(), s / two_a)
    }
}

/// Primitive reduced positive definite forms of discriminant d < 0.
pub fn reduced_forms(d: i64) -> Vec<Bqf> {
    assert!(d < 0);
    let mut out = Vec::new();
    let mut a = 1i64;
    while 3 * a * a <= -d {
        for b in (-a + 1)..=a {
            if (b * b - d) % (4 * a) != 0 {
                continue;
            }
            let c = (b * b - d) / (4 * a);
            if c < a || (c == a && b < 0) {
                continue;
            }
            if a.gcd(&b).gcd(&c) != 1 {
                continue;
            }
            out.push(Bqf::new(a, b, c));
        }
        a += 1;
    }
    out
}

pub fn class_number(d: i64) -> usize {
    reduced_forms(d).len()
}

/// Representatives of Gamma_0(6) \ SL_2(Z), one per point of P^1(Z/6).
pub fn gamma0_6_coset_reps() -> Vec<[i64; 4]> {
    let mut reps = Vec::new();
    let mut seen: Vec<Vec<(i64, i64)>> = Vec::new();
    for p in 0..6i64 {
        for r in 0..6i64 {
            if p.gcd(&r).gcd(&6) != 1 {
                continue;
            }
            let mut pts = vec![(p, r), ((5 * p) % 6, (5 * r) % 6)];
            pts.sort();
            if seen.contains(&pts) {
                continue;
            }
            seen.push(pts);
            reps.push(lift(p, r));
        }
    }
    reps
}

fn lift(p: i64, r: i64) -> [i64; 4] {
    for pp in (p..p + 60).step_by(6) {
        for rr in (r..r + 60).step_by(6) {
            if pp.gcd(&rr) != 1 {
                continue;
            }
            for s in -60..60i64 {
                if rr == 0 {
                    if pp * s == 1 {
                        return [pp, 0, 0, s];
                    }
                } else if (pp * s - 1) % rr == 0 {
                    return [pp, (pp * s - 1) / rr, rr, s];
                }
            }
        }
    }
    unreachable!("every primitive residue pair lifts")
}

/// Q_n: one form with 6 | a and b = 1 mod 12 per class of discriminant 1 - 24n.
pub fn enumerate_qn(n: u64) -> Result<Vec<Bqf>> {
    if n == 0 {
        return Err(Error::Validation("n must be positive".into()));
    }
    let d = 1 - 24 * n as i64;
    let reps = gamma0_6_coset_reps();
    let mut out = Vec::new();
    for f in reduced_forms(d) {
        let hits: Vec<Bqf> = reps.iter().map(|&m| f.act(m)).filter(|g| g.in_qn_normalization()).collect();
        if hits.len() != 1 {
            return Err(Error::DomainError(format!("form {f:?} has {} normalized images", hits.len())));
        }
        out.push(hits[0]);
    }
    Ok(out)
}

fn sigma1(n: usize) -> u64 {
    (1..=n).filter(|d| n % d == 0).map(|d| d as u64).sum()
}

/// E_2 = 1 - 24 sum sigma_1(n) q^n.
pub fn e2_expansion(n: usize) -> IntQSeries {
    let mut v = vec![BigInt::one()];
    for m in 1..=n {
        v.push(BigInt::from(-24) * BigInt::from(sigma1(m)));
    }
    QSeries::new(v)
}

/// Coefficients of F = (E2(t) - 2E2(2t) - 3E2(3t) + 6E2(6t)) / (2 eta(t)^2 eta(2t)^2 eta(3t)^2 eta(6t)^2),
/// exponents -1 .. n_trunc - 1.
pub fn f_expansion(n_trunc: usize) -> IntQSeries {
    let m = n_trunc;
    let e2 = e2_expansion(m);
    let mut num = e2.clone();
    for (d, w) in [(2usize, -2i64), (3, -3), (6, 6)] {
        num = num.add(&e2.dilate(d, m).scale(&BigInt::from(w)));
    }
    let num = num.map(|c| {
        debug_assert!(c.is_even());
        c / 2
    });
    let mut den = IntQSeries::int_one(m);
    for d in [1usize, 2, 3, 6] {
        for k in 1..=m / d {
            den.mul_binomial_pow(&BigInt::one(), d * k, 2);
        }
    }
    let inv = den.inverse().expect("constant term 1");
    num.mul(&inv).with_offset(Q::from_integer(-1))
}

/// The weak Maass form sum c(m) (-m - 1/(2 pi y)) q^m at tau from the expansion of F.
pub fn p_maass_eval<R: Real>(tau: &Cx<R>, f: &IntQSeries, prec: u32) -> Result<Cx<R>> {
    let zero = R::from_i64(0, prec);
    if tau.im <= zero {
        return Err(Error::DomainError("Im tau must be positive".into()));
    }
    let two_pi = R::from_i64(2, prec) * R::pi(prec);
    let y = tau.im.clone();
    let q = cx_exp(&Cx::new(-(two_pi.clone() * y.clone()), two_pi.clone() * tau.re.clone()));
    let corr = R::from_i64(1, prec) / (two_pi * y);
    let offset = f.offset().to_integer();
    let mut qm = crate::series::cx_powi(&q, offset);
    let mut sum = cx_zero::<R>();
    let mut last = zero.clone();
    for (i, c) in f.coeffs().iter().enumerate() {
        let m = offset + i as i64;
        let w = -(R::from_i64(m, prec)) - corr.clone();
        let t = qm.clone();
        let scale = R::from_bigint(c, prec) * w;
        let term = Cx::new(t.re * scale.clone(), t.im * scale);
        last = cx_abs(&term);
        sum = sum.add_c(&term);
        qm = qm.mul_c(&q);
    }
    let tol = R::epsilon(prec / 2, prec) * (cx_abs(&sum) + R::from_i64(1, prec));
    if last > tol {
        return Err(Error::ConvergenceFailure(format!("tail term {} at Im tau = {}", last.to_f64(), tau.im.to_f64())));
    }
    Ok(sum)
}

/// The Gamma_0(6)-translate of tau with the largest imaginary part among small lower rows.
pub fn best_point<R: Real>(tau: &Cx<R>, prec: u32) -> Cx<R> {
    let mut best = tau.clone();
    let bound = (1.0 / tau.im.to_f64()) as i64 + 12;
    let re = tau.re.to_f64();
    for c in (6..=bound).step_by(6) {
        let centre = (-(c as f64) * re) as i64;
        for d in centre - 3..=centre + 3 {
            if c.gcd(&d) != 1 {
                continue;
            }
            let a = (-c..=c).find(|a| (a * d - 1).rem_euclid(c) == 0).expect("d invertible mod c");
            let b = (a * d - 1) / c;
            let t = mobius(tau, [a, b, c, d], prec);
            if t.im > best.im {
                best = t;
            }
        }
    }
    best
}

/// (a tau + b)/(c tau + d).
pub fn mobius<R: Real>(tau: &Cx<R>, m: [i64; 4], prec: u32) -> Cx<R> {
    let [a, b, c, d] = m;
    let r = |x: i64| Cx::new(R::from_i64(x, prec), R::from_i64(0, prec));
    let num = r(a).mul_c(tau).add_c(&r(b));
    let den = r(c).mul_c(tau).add_c(&r(d));
    num.mul_c(&den.inv_c().expect("nonzero"))
}

/// Number of F coefficients needed at height y.
pub fn terms_for_height(y: f64, prec: u32) -> usize {
    let base = prec as f64 * std::f64::consts::LN_2 / (2.0 * std::f64::consts::PI * y);
    (2.0 * base) as usize + 100
}

#[derive(Clone, Debug)]
pub struct TraceResult<R> {
    pub forms: Vec<Bqf>,
    pub values: Vec<Cx<R>>,
    pub trace: Cx<R>,
    /// Tr(n)/(24n - 1).
    pub partition_value: R,
}

/// Sum of the Maass form over the CM points of Q_n.
pub fn trace<R: Real>(n: u64, prec: u32) -> Result<TraceResult<R>> {
    let forms = enumerate_qn(n)?;
    let points: Vec<Cx<R>> = forms.iter().map(|f| best_point(&f.cm_point::<R>(prec), prec)).collect();
    let ymin = points.iter().map(|p| p.im.to_f64()).fold(f64::INFINITY, f64::min);
    let f = f_expansion(terms_for_height(ymin, prec));
    let values: Vec<Cx<R>> = points.par_iter().map(|p| p_maass_eval(p, &f, prec)).collect::<Result<Vec<_>>>()?;
    let mut tr = cx_zero::<R>();
    for v in &values {
        tr = tr.add_c(v);
    }
    let scale = R::from_i64(24 * n as i64 - 1, prec);
    if tr.im.abs().to_f64() > 1e-6 {
        return Err(Error::ConvergenceFailure(format!("trace has imaginary part {}", tr.im.to_f64())));
    }
    let partition_value = tr.re.clone() / scale;
    Ok(TraceResult { forms, values, trace: tr, partition_value })
}
