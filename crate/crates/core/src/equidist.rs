//! When do signed Hodge numbers of Hilb^n(S) spread evenly over residue classes?

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::dedekind::p2;
use crate::error::{Error, Result};
use crate::goettsche::{gamma_direct, HilbertHodgeTable, HodgeDiamond};
use crate::series::Q;

/// Lambda(x, y) = h10 (P2(x) + P2(y)) - h00 P2(x + y) - h20 P2(x - y).
pub fn lambda(s: &HodgeDiamond, x: Q, y: Q) -> Q {
    Q::from_integer(s.h10()) * (p2(x) + p2(y)) - Q::from_integer(s.h[0][0] as i64) * p2(x + y)
        - Q::from_integer(s.h20()) * p2(x - y)
}

/// Lambda(j1/l1, j2/l2) for all residue pairs.
#[derive(Clone, Debug, PartialEq)]
pub struct LambdaProfile {
    pub values: BTreeMap<(i64, i64), Q>,
}

pub fn lambda_profile(s: &HodgeDiamond, l1: i64, l2: i64) -> LambdaProfile {
    let mut values = BTreeMap::new();
    for j1 in 0..l1 {
        for j2 in 0..l2 {
            values.insert((j1, j2), lambda(s, Q::new(j1, l1), Q::new(j2, l2)));
        }
    }
    LambdaProfile { values }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EquidistVerdict {
    pub equidistributed: bool,
    /// Every case of the theorem whose conditions hold.
    pub cases: Vec<u8>,
    /// Residue set of the first matching case.
    pub residues: BTreeSet<(i64, i64)>,
    pub lambda_min_witness: Option<(i64, i64)>,
    /// Set when case 7's stated test and the k-scaled minimum of the proof disagree.
    pub case7_criteria_disagree: bool,
}

impl EquidistVerdict {
    pub fn case_label(&self) -> String {
        match self.cases.first() {
            Some(c) => c.to_string(),
            None => "none".into(),
        }
    }
}

fn all_pairs(l1: i64, l2: i64) -> BTreeSet<(i64, i64)> {
    (0..l1).flat_map(|a| (0..l2).map(move |b| (a, b))).collect()
}

fn pairs_mod(l1: i64, l2: i64, m: i64) -> BTreeSet<(i64, i64)> {
    all_pairs(l1, l2).into_iter().filter(|&(a, b)| (a - b).rem_euclid(m) == 0).collect()
}

/// Lambda(0,0) < min over k of Lambda(k j/l)/k^2, for every nonzero j.
fn case7_scaled(s: &HodgeDiamond, l1: i64, l2: i64) -> bool {
    let base = lambda(s, Q::zero(), Q::zero());
    let l = l1.lcm(&l2);
    for j1 in 0..l1 {
        for j2 in 0..l2 {
            if j1 == 0 && j2 == 0 {
                continue;
            }
            let mut m: Option<Q> = None;
            for k in 1..=l {
                if (k * j1) % l1 == 0 && (k * j2) % l2 == 0 {
                    continue;
                }
                let v = lambda(s, Q::new(k * j1, l1), Q::new(k * j2, l2)) / Q::from_integer(k * k);
                m = Some(match m {
                    Some(x) if x <= v => x,
                    _ => v,
                });
            }
            if let Some(m) = m {
                if base >= m {
                    return false;
                }
            }
        }
    }
    true
}

/// Verdict of the equidistribution theorem, every case evaluated as stated.
pub fn classify(s: &HodgeDiamond, l1: i64, l2: i64) -> Result<EquidistVerdict> {
    if l1 < 1 || l2 < 1 {
        return Err(Error::Validation("moduli must be positive".into()));
    }
    let (chi, sigma) = (s.chi(), s.sigma());
    if chi < sigma {
        return Err(Error::HypothesisViolation { chi, sigma });
    }
    let (h10, h20) = (s.h10(), s.h20());
    let g = l1.gcd(&l2);
    let min_l = l1.min(l2);
    let zero: BTreeSet<(i64, i64)> = [(0, 0)].into_iter().collect();
    let mut matches: Vec<(u8, BTreeSet<(i64, i64)>)> = Vec::new();
    if h10 == 0 && h20 == 0 {
        matches.push((1, pairs_mod(l1, l2, g)));
    }
    if h10 == 0 && h20 > 0 {
        matches.push((2, pairs_mod(l1, l2, g.gcd(&2))));
    }
    if chi + sigma == 0 && chi != 0 && min_l == 1 {
        matches.push((3, zero.clone()));
    }
    if chi + sigma == 0 && chi == 0 && min_l == 1 {
        matches.push((4, BTreeSet::new()));
    }
    if chi != 0 && l1 == 1 && l2 == 1 {
        matches.push((5, zero));
    }
    if chi == 0 && l1 == 1 && l2 == 1 {
        matches.push((6, BTreeSet::new()));
    }
    let profile = lambda_profile(s, l1, l2);
    let base = profile.values[&(0, 0)];
    let witness = profile
        .values
        .iter()
        .filter(|(&j, _)| j != (0, 0))
        .min_by(|a, b| a.1.cmp(b.1).then(a.0.cmp(b.0)))
        .map(|(&j, _)| j);
    let stated = profile.values.iter().all(|(&j, &v)| j == (0, 0) || base < v);
    let mut disagree = false;
    if h10 > 0 && chi + sigma > 0 {
        if stated {
            matches.push((7, all_pairs(l1, l2)));
        }
        disagree = stated != case7_scaled(s, l1, l2);
    }
    let equidistributed = !matches.is_empty();
    Ok(EquidistVerdict {
        equidistributed,
        cases: matches.iter().map(|(c, _)| *c).collect(),
        residues: matches.into_iter().next().map(|(_, r)| r).unwrap_or_default(),
        lambda_min_witness: witness,
        case7_criteria_disagree: disagree,
    })
}

/// gamma_S(r1, l1, r2, l2; n) over the sum of all residue pairs.
pub fn theta(table: &HilbertHodgeTable, r1: i64, l1: i64, r2: i64, l2: i64, n: usize) -> Result<BigRational> {
    let mut total = BigInt::zero();
    for j1 in 0..l1 {
        for j2 in 0..l2 {
            total += gamma_direct(table, j1, l1, j2, l2, n)?;
        }
    }
    if total.is_zero() {
        return Err(Error::ZeroDenominator(n));
    }
    Ok(BigRational::new(gamma_direct(table, r1, l1, r2, l2, n)?, total))
}

/// Decimal expansion truncated toward zero.
pub fn truncate_decimal(q: &BigRational, places: usize) -> String {
    let scale = BigInt::from(10u32).pow(places as u32);
    let scaled = (q.abs() * BigRational::from_integer(scale.clone())).to_integer();
    let (int, frac) = scaled.div_rem(&scale);
    let sign = if q.is_negative() && !scaled.is_zero() { "-" } else { "" };
    if places == 0 {
        return format!("{sign}{int}");
    }
    format!("{sign}{int}.{:0>width$}", frac.to_string(), width = places)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ThetaRow {
    pub r1: i64,
    pub r2: i64,
    pub values: Vec<Option<BigRational>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceReport {
    pub l1: i64,
    pub l2: i64,
    pub n_list: Vec<usize>,
    pub rows: Vec<ThetaRow>,
    /// max over the residue set of |Theta - 1/|R||, per n.
    pub max_deviation: Vec<Option<BigRational>>,
}

pub fn convergence_report(table: &HilbertHodgeTable, l1: i64, l2: i64, n_list: &[usize]) -> Result<ConvergenceReport> {
    let verdict = classify(&table.surface, l1, l2)?;
    let mut rows = Vec::new();
    for r1 in 0..l1 {
        for r2 in 0..l2 {
            let mut values = Vec::new();
            for &n in n_list {
                values.push(match theta(table, r1, l1, r2, l2, n) {
                    Ok(v) => Some(v),
                    Err(Error::ZeroDenominator(_)) => None,
                    Err(e) => return Err(e),
                });
            }
            rows.push(ThetaRow { r1, r2, values });
        }
    }
    let mut max_deviation = Vec::new();
    for i in 0..n_list.len() {
        if verdict.residues.is_empty() {
            max_deviation.push(None);
            continue;
        }
        let uniform = BigRational::new(BigInt::from(1), BigInt::from(verdict.residues.len()));
        let mut m: Option<BigRational> = None;
        for row in &rows {
            if !verdict.residues.contains(&(row.r1, row.r2)) {
                continue;
            }
            if let Some(v) = &row.values[i] {
                let d = (v - &uniform).abs();
                m = Some(match m {
                    Some(x) if x >= d => x,
                    _ => d,
                });
            }
        }
        max_deviation.push(m);
    }
    Ok(ConvergenceReport { l1, l2, n_list: n_list.to_vec(), rows, max_deviation })
}
