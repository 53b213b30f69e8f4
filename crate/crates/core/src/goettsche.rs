//! Hodge numbers of Hilbert schemes of points on a surface from its Hodge diamond.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::{cis_frac, cx_zero, Cx, Real};
use crate::series::{specialize, Coeff, ComplexQSeries, IntQSeries, LaurentPoly, LaurentQSeries, QSeries};

/// Hodge numbers h^{s,t} of a smooth projective surface, 0 <= s, t <= 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HodgeDiamond {
    pub h: [[u64; 3]; 3],
}

impl HodgeDiamond {
    /// Diamond determined by (h^{1,0}, h^{2,0}, h^{1,1}) through Hodge symmetry and Serre duality.
    pub fn from_triple(h10: u64, h20: u64, h11: u64) -> Self {
        HodgeDiamond { h: [[1, h10, h20], [h10, h11, h10], [h20, h10, 1]] }
    }

    /// Validates h^{0,0} = 1, Hodge symmetry and Serre duality.
    pub fn new(h: [[u64; 3]; 3]) -> Result<Self> {
        if h[0][0] != 1 {
            return Err(Error::Validation("h^{0,0} must be 1".into()));
        }
        for s in 0..3 {
            for t in 0..3 {
                if h[s][t] != h[t][s] {
                    return Err(Error::Validation(format!("h^{{{s},{t}}} != h^{{{t},{s}}}")));
                }
                if h[s][t] != h[2 - s][2 - t] {
                    return Err(Error::Validation(format!("Serre duality fails at ({s},{t})")));
                }
            }
        }
        Ok(HodgeDiamond { h })
    }

    pub fn cp2() -> Self {
        Self::from_triple(0, 0, 1)
    }

    pub fn k3() -> Self {
        Self::from_triple(0, 1, 20)
    }

    pub fn abelian() -> Self {
        Self::from_triple(2, 1, 4)
    }

    pub fn enriques() -> Self {
        Self::from_triple(0, 0, 10)
    }

    pub fn h10(&self) -> i64 {
        self.h[1][0] as i64
    }

    pub fn h20(&self) -> i64 {
        self.h[2][0] as i64
    }

    pub fn h11(&self) -> i64 {
        self.h[1][1] as i64
    }

    pub fn chi(&self) -> i64 {
        let mut c = 0i64;
        for s in 0..3 {
            for t in 0..3 {
                let sign = if (s + t) % 2 == 0 { 1 } else { -1 };
                c += sign * self.h[s][t] as i64;
            }
        }
        c
    }

    pub fn sigma(&self) -> i64 {
        2 + 2 * self.h20() - self.h11()
    }
}

/// (chi, sigma) from (h^{1,0}, h^{2,0}, h^{1,1}).
pub fn derive_chi_sigma(h10: i64, h20: i64, h11: i64) -> (i64, i64) {
    (2 - 4 * h10 + 2 * h20 + h11, 2 + 2 * h20 - h11)
}

/// The series sum_n sum_{s,t} (-1)^{s+t} h^{s,t}(Hilb^n S) x^{s-n} y^{t-n} q^n.
#[derive(Clone, Debug, PartialEq)]
pub struct HilbertHodgeTable {
    pub surface: HodgeDiamond,
    pub series: LaurentQSeries,
}

impl HilbertHodgeTable {
    pub fn trunc(&self) -> usize {
        self.series.trunc()
    }

    pub fn entry(&self, n: usize) -> Result<&LaurentPoly> {
        if n > self.trunc() {
            return Err(Error::TruncationExceeded { n, trunc: self.trunc() });
        }
        Ok(self.series.coeff(n))
    }

    /// h^{s,t}(Hilb^n S) for 0 <= s, t <= 2n.
    pub fn hodge_numbers(&self, n: usize) -> Result<Vec<Vec<BigInt>>> {
        let e = self.entry(n)?;
        let d = 2 * n + 1;
        let mut out = vec![vec![BigInt::zero(); d]; d];
        for (&(a, b), c) in e.terms() {
            let s = (a + n as i64) as usize;
            let t = (b + n as i64) as usize;
            out[s][t] = if (s + t) % 2 == 0 { c.clone() } else { -c };
        }
        Ok(out)
    }
}

/// Multiply a Laurent series by an integer series.
fn mul_int_series(a: &LaurentQSeries, b: &IntQSeries) -> LaurentQSeries {
    let n = a.trunc().min(b.trunc());
    let mut out = vec![LaurentPoly::zero(); n + 1];
    for (i, c) in b.coeffs().iter().enumerate().take(n + 1) {
        if c.is_zero() {
            continue;
        }
        for j in 0..=(n - i) {
            out[i + j].add_shifted(a.coeff(j), 0, 0, c);
        }
    }
    QSeries::new(out)
}

/// Exact expansion of the product side to order q^N: factors with s + t odd in the
/// numerator, s + t even in the denominator, each to the power h^{s,t}.
pub fn goettsche_expand(s: &HodgeDiamond, n: usize) -> HilbertHodgeTable {
    let mut w = LaurentQSeries::laurent_one(n);
    for m in 1..=n {
        for a in 0..3usize {
            for b in 0..3usize {
                if a == 1 && b == 1 {
                    continue;
                }
                let h = s.h[a][b] as i64;
                if h == 0 {
                    continue;
                }
                let e = if (a + b) % 2 == 1 { h } else { -h };
                w.mul_binomial_pow(&LaurentPoly::monomial(a as i64 - 1, b as i64 - 1, 1), m, e);
            }
        }
    }
    // the x^0 y^0 factor is a pure q-series, handled with integer arithmetic
    let mut pure = IntQSeries::int_one(n);
    for m in 1..=n {
        pure.mul_binomial_pow(&BigInt::one(), m, -(s.h11()));
    }
    HilbertHodgeTable { surface: *s, series: mul_int_series(&w, &pure) }
}

/// x^{-d/2} y^{-d/2} sum h^{s,t} (-x)^s (-y)^t.
pub fn hodge_polynomial(h: &[Vec<BigInt>], d: usize) -> Result<LaurentPoly> {
    if d % 2 == 1 {
        return Err(Error::OddDimension(d));
    }
    let half = (d / 2) as i64;
    let mut p = LaurentPoly::zero();
    for (s, row) in h.iter().enumerate() {
        for (t, c) in row.iter().enumerate() {
            let signed = if (s + t) % 2 == 0 { c.clone() } else { -c };
            p.add_term(s as i64 - half, t as i64 - half, &signed);
        }
    }
    Ok(p)
}

/// sum_n chi_Hodge(Hilb^n S) q^n to order N.
pub fn z_series(s: &HodgeDiamond, n: usize) -> LaurentQSeries {
    goettsche_expand(s, n).series
}

/// Signed sum of h^{s+n,t+n}(Hilb^n S) over t = r1 mod l1 and s = r2 mod l2.
///
/// Here s is the exponent of x and t the exponent of y in the table entry.
pub fn gamma_direct(table: &HilbertHodgeTable, r1: i64, l1: i64, r2: i64, l2: i64, n: usize) -> Result<BigInt> {
    if l1 < 1 || l2 < 1 {
        return Err(Error::Validation("moduli must be positive".into()));
    }
    let e = table.entry(n)?;
    let mut acc = BigInt::zero();
    for (&(a, b), c) in e.terms() {
        if (b - r1).rem_euclid(l1) == 0 && (a - r2).rem_euclid(l2) == 0 {
            acc += c;
        }
    }
    Ok(acc)
}

/// Z_S at x = e(xa/xb), y = e(ya/yb) with exact phases.
pub fn specialize_at_roots<R: Real>(
    table: &HilbertHodgeTable,
    x: (i64, i64),
    y: (i64, i64),
    prec: u32,
) -> ComplexQSeries<R> {
    let x0: Cx<R> = cis_frac(x.0, x.1, prec);
    let y0: Cx<R> = cis_frac(y.0, y.1, prec);
    specialize(&table.series, &x0, &y0, prec)
}

/// Coefficients xi_S(r1, l1, r2, l2; n) of Z_S(zeta_{l1}^{r1}, zeta_{l2}^{r2}).
pub fn xi_exact<R: Real>(table: &HilbertHodgeTable, r1: i64, l1: i64, r2: i64, l2: i64, prec: u32) -> ComplexQSeries<R> {
    specialize_at_roots(table, (r1, l1), (r2, l2), prec)
}

/// All C_S(r1, l1, r2, l2) for r1 mod l1, r2 mod l2 by averaging specializations;
/// result indexed [r1][r2].
pub fn c_via_roots_all<R: Real>(table: &HilbertHodgeTable, l1: i64, l2: i64, prec: u32) -> Vec<Vec<ComplexQSeries<R>>> {
    let n = table.trunc();
    let mut specs = Vec::new();
    for j1 in 0..l1 {
        for j2 in 0..l2 {
            // x carries the l2 root, y the l1 root
            specs.push(((j1, j2), specialize_at_roots::<R>(table, (j2, l2), (j1, l1), prec)));
        }
    }
    let norm = R::from_i64(l1 * l2, prec);
    let mut out = Vec::new();
    for r1 in 0..l1 {
        let mut row = Vec::new();
        for r2 in 0..l2 {
            let mut coeffs = vec![cx_zero::<R>(); n + 1];
            for ((j1, j2), sp) in &specs {
                let w: Cx<R> = cis_frac(-(j2 * r2 * l1 + j1 * r1 * l2), l1 * l2, prec);
                for (i, c) in coeffs.iter_mut().enumerate() {
                    *c = c.add_c(&sp.coeff(i).mul_c(&w));
                }
            }
            let coeffs = coeffs
                .into_iter()
                .map(|c| Cx::new(c.re / norm.clone(), c.im / norm.clone()))
                .collect();
            row.push(QSeries::new(coeffs));
        }
        out.push(row);
    }
    out
}

/// C_S(r1, l1, r2, l2; q) by the root-of-unity average.
pub fn c_via_roots<R: Real>(table: &HilbertHodgeTable, r1: i64, l1: i64, r2: i64, l2: i64, prec: u32) -> ComplexQSeries<R> {
    c_via_roots_all(table, l1, l2, prec)[r1.rem_euclid(l1) as usize][r2.rem_euclid(l2) as usize].clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::MpFloat;

    fn surfaces() -> Vec<HodgeDiamond> {
        vec![HodgeDiamond::cp2(), HodgeDiamond::k3(), HodgeDiamond::abelian(), HodgeDiamond::enriques()]
    }

    #[test]
    fn chi_sigma_examples() {
        assert_eq!(derive_chi_sigma(0, 0, 1), (3, 1));
        assert_eq!(derive_chi_sigma(0, 1, 20), (24, -16));
        assert_eq!(derive_chi_sigma(2, 1, 4), (0, 0));
        for s in surfaces() {
            assert_eq!((s.chi(), s.sigma()), derive_chi_sigma(s.h10(), s.h20(), s.h11()));
        }
        // Betti numbers of CP2 are 1, 0, 1, 0, 1
        assert_eq!(HodgeDiamond::cp2().chi(), 3);
    }

    #[test]
    fn diamond_validation() {
        assert!(HodgeDiamond::new(HodgeDiamond::k3().h).is_ok());
        let mut bad = HodgeDiamond::k3().h;
        bad[0][1] = 3;
        assert!(HodgeDiamond::new(bad).is_err());
    }

    #[test]
    fn first_coefficients() {
        let t = goettsche_expand(&HodgeDiamond::cp2(), 4);
        assert_eq!(t.entry(0).unwrap(), &LaurentPoly::one());
        let expect = LaurentPoly::from_terms(vec![
            ((-1, -1), BigInt::one()),
            ((0, 0), BigInt::one()),
            ((1, 1), BigInt::one()),
        ]);
        assert_eq!(t.entry(1).unwrap(), &expect);
        assert!(matches!(t.entry(5), Err(Error::TruncationExceeded { .. })));
    }

    #[test]
    fn n_equals_one_recovers_the_surface() {
        for s in surfaces() {
            let t = goettsche_expand(&s, 1);
            let h = t.hodge_numbers(1).unwrap();
            for a in 0..3 {
                for b in 0..3 {
                    assert_eq!(h[a][b], BigInt::from(s.h[a][b]));
                }
            }
        }
    }

    #[test]
    fn specialization_at_cube_root_and_minus_one() {
        let t = goettsche_expand(&HodgeDiamond::cp2(), 5);
        let s = xi_exact::<MpFloat>(&t, 1, 3, 1, 2, 128);
        for (i, want) in [1.0, 2.0, 4.0, 7.0, 12.0, 20.0].iter().enumerate() {
            assert!((s.coeff(i).re.to_f64() - want).abs() < 1e-30);
            assert!(s.coeff(i).im.to_f64().abs() < 1e-30);
        }
    }

    #[test]
    fn k3_euler_characteristics() {
        let t = goettsche_expand(&HodgeDiamond::k3(), 4);
        let at_one: Vec<BigInt> = t.series.coeffs().iter().map(|p| p.at_one()).collect();
        // prod (1-q^n)^{-24}
        let mut e = IntQSeries::int_one(4);
        for m in 1..=4 {
            e.mul_binomial_pow(&BigInt::one(), m, -24);
        }
        assert_eq!(at_one, e.coeffs().to_vec());
        assert_eq!(at_one[2], BigInt::from(324));
    }

    #[test]
    fn hodge_polynomial_matches_table() {
        assert_eq!(hodge_polynomial(&[vec![BigInt::one()]], 0).unwrap(), LaurentPoly::one());
        assert_eq!(hodge_polynomial(&[vec![BigInt::one()]], 1), Err(Error::OddDimension(1)));
        for s in surfaces() {
            let t = goettsche_expand(&s, 5);
            for n in 0..=5 {
                let h = t.hodge_numbers(n).unwrap();
                assert_eq!(&hodge_polynomial(&h, 2 * n).unwrap(), t.entry(n).unwrap());
            }
        }
    }

    #[test]
    fn table_symmetries() {
        for s in surfaces() {
            let t = goettsche_expand(&s, 10);
            for n in 0..=10 {
                let e = t.entry(n).unwrap();
                assert_eq!(&e.swap_xy(), e);
                assert_eq!(&e.invert_xy(), e);
            }
        }
    }

    #[test]
    fn euler_series_nonnegative_without_odd_cohomology() {
        for s in [HodgeDiamond::cp2(), HodgeDiamond::k3(), HodgeDiamond::enriques()] {
            let t = goettsche_expand(&s, 15);
            assert!(t.series.coeffs().iter().all(|p| p.at_one() >= BigInt::zero()));
        }
    }

    #[test]
    fn full_range_gamma_is_a_single_hodge_number() {
        let t = goettsche_expand(&HodgeDiamond::k3(), 3);
        for n in 1..=3usize {
            let h = t.hodge_numbers(n).unwrap();
            let m = 2 * n as i64 + 1;
            for s in 0..=2 * n {
                for tt in 0..=2 * n {
                    let g = gamma_direct(&t, tt as i64 - n as i64, m, s as i64 - n as i64, m, n).unwrap();
                    let sign = if (s + tt) % 2 == 0 { 1 } else { -1 };
                    assert_eq!(g, &h[s][tt] * sign);
                }
            }
        }
    }

    #[test]
    fn gamma_partitions_the_total() {
        let t = goettsche_expand(&HodgeDiamond::abelian(), 6);
        for n in 0..=6 {
            let mut sum = BigInt::zero();
            for r1 in 0..3 {
                for r2 in 0..4 {
                    sum += gamma_direct(&t, r1, 3, r2, 4, n).unwrap();
                }
            }
            assert_eq!(sum, t.entry(n).unwrap().at_one());
        }
    }

    #[test]
    fn cp2_zero_rows() {
        let t = goettsche_expand(&HodgeDiamond::cp2(), 12);
        for n in 1..=12 {
            assert!(gamma_direct(&t, 0, 2, 1, 4, n).unwrap().is_zero());
        }
    }

    #[test]
    fn roots_of_unity_average_matches_direct_sum() {
        let t = goettsche_expand(&HodgeDiamond::cp2(), 20);
        for l1 in 1..=4 {
            for l2 in 1..=4 {
                let all = c_via_roots_all::<MpFloat>(&t, l1, l2, 128);
                for r1 in 0..l1 {
                    for r2 in 0..l2 {
                        for n in 0..=20 {
                            let g = gamma_direct(&t, r1, l1, r2, l2, n).unwrap();
                            let c = all[r1 as usize][r2 as usize].coeff(n);
                            let gf = MpFloat::from_bigint(&g, 128);
                            let err = (c.re.clone() - gf.clone()).abs().to_f64() + c.im.abs().to_f64();
                            assert!(err <= 1e-15 * (1.0 + gf.abs().to_f64()), "{l1} {l2} {r1} {r2} {n}");
                        }
                    }
                }
            }
        }
        let k3 = goettsche_expand(&HodgeDiamond::k3(), 20);
        let c = c_via_roots::<MpFloat>(&k3, 1, 2, 0, 1, 128);
        for n in 0..=20 {
            let g = gamma_direct(&k3, 1, 2, 0, 1, n).unwrap();
            let diff = c.coeff(n).re.clone() - MpFloat::from_bigint(&g, 128);
            assert!(diff.abs().to_f64() < 1e-8);
        }
    }
}
