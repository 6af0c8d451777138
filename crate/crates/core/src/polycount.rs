//! Exact integer polynomials for point counts of orbits and pieces.
//!
//! Ratios of products `∏(1 - t^{-2i})` are computed in the auxiliary
//! variable `u = t^{-2}` and converted to `t` once at the end.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::combinatorics::{
    add_parts, b_stat, enumerate_bipartitions, is_b2_dist, is_b_dist, is_c_dist, is_special,
    multiplicity, preceq, Bipartition,
};
use crate::maps::{collapse, collapse_special, fiber, phi_c, CollapseKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("{0} is not in the sub-poset required for this count")]
    Membership(Bipartition),
    #[error("division leaves a nonzero remainder")]
    Inexact,
}

/// Dense coefficient vector, index = exponent, no trailing zeros.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
struct Dense(Vec<i64>);

impl Dense {
    fn trimmed(mut v: Vec<i64>) -> Self {
        while v.last() == Some(&0) {
            v.pop();
        }
        Dense(v)
    }

    fn add(&self, o: &Self) -> Self {
        let len = self.0.len().max(o.0.len());
        Dense::trimmed(
            (0..len)
                .map(|i| self.0.get(i).unwrap_or(&0) + o.0.get(i).unwrap_or(&0))
                .collect(),
        )
    }

    fn neg(&self) -> Self {
        Dense(self.0.iter().map(|c| -c).collect())
    }

    fn mul(&self, o: &Self) -> Self {
        if self.0.is_empty() || o.0.is_empty() {
            return Dense::default();
        }
        let mut out = vec![0i64; self.0.len() + o.0.len() - 1];
        for (i, &a) in self.0.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in o.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Dense::trimmed(out)
    }

    /// Long division by a divisor with leading coefficient ±1.
    fn div_exact(&self, d: &Self) -> Result<Self, PolyError> {
        let lead = *d.0.last().expect("division by zero polynomial");
        assert!(lead == 1 || lead == -1, "divisor must be monic up to sign");
        if self.0.len() < d.0.len() {
            return if self.0.is_empty() {
                Ok(Dense::default())
            } else {
                Err(PolyError::Inexact)
            };
        }
        let mut rem = self.0.clone();
        let dl = d.0.len();
        let mut quot = vec![0i64; rem.len() - dl + 1];
        for k in (0..quot.len()).rev() {
            let c = rem[k + dl - 1] * lead;
            quot[k] = c;
            if c != 0 {
                for (j, &dj) in d.0.iter().enumerate() {
                    rem[k + j] -= c * dj;
                }
            }
        }
        if rem.iter().any(|&r| r != 0) {
            return Err(PolyError::Inexact);
        }
        Ok(Dense::trimmed(quot))
    }
}

/// Integer polynomial in `t`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct IntPolynomial(Dense);

/// Integer polynomial in the auxiliary variable `u = t^{-2}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct AuxPolynomialU(Dense);

macro_rules! poly_common {
    ($t:ident, $var:expr) => {
        impl $t {
            pub fn zero() -> Self {
                $t(Dense::default())
            }

            pub fn one() -> Self {
                $t(Dense(vec![1]))
            }

            pub fn monomial(exp: u32, coeff: i64) -> Self {
                let mut v = vec![0; exp as usize + 1];
                v[exp as usize] = coeff;
                $t(Dense::trimmed(v))
            }

            pub fn from_terms(terms: &[(u32, i64)]) -> Self {
                terms
                    .iter()
                    .fold(Self::zero(), |acc, &(e, c)| acc + Self::monomial(e, c))
            }

            pub fn is_zero(&self) -> bool {
                self.0 .0.is_empty()
            }

            pub fn degree(&self) -> Option<u32> {
                self.0 .0.len().checked_sub(1).map(|d| d as u32)
            }

            pub fn leading_coefficient(&self) -> i64 {
                self.0 .0.last().copied().unwrap_or(0)
            }

            pub fn coefficient(&self, exp: u32) -> i64 {
                self.0 .0.get(exp as usize).copied().unwrap_or(0)
            }

            /// Nonzero terms in increasing exponent order.
            pub fn terms(&self) -> Vec<(u32, i64)> {
                self.0
                     .0
                    .iter()
                    .enumerate()
                    .filter(|(_, &c)| c != 0)
                    .map(|(e, &c)| (e as u32, c))
                    .collect()
            }

            pub fn evaluate(&self, q: i64) -> BigInt {
                self.0
                     .0
                    .iter()
                    .rev()
                    .fold(BigInt::from(0), |acc, &c| acc * q + c)
            }
        }

        impl Add for $t {
            type Output = $t;
            fn add(self, o: $t) -> $t {
                $t(self.0.add(&o.0))
            }
        }

        impl Sub for $t {
            type Output = $t;
            fn sub(self, o: $t) -> $t {
                $t(self.0.add(&o.0.neg()))
            }
        }

        impl Neg for $t {
            type Output = $t;
            fn neg(self) -> $t {
                $t(self.0.neg())
            }
        }

        impl Mul for $t {
            type Output = $t;
            fn mul(self, o: $t) -> $t {
                $t(self.0.mul(&o.0))
            }
        }

        impl std::iter::Sum for $t {
            fn sum<I: Iterator<Item = $t>>(iter: I) -> $t {
                iter.fold($t::zero(), |a, b| a + b)
            }
        }

        impl fmt::Display for $t {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                let terms = self.terms();
                if terms.is_empty() {
                    return write!(f, "0");
                }
                for (k, &(e, c)) in terms.iter().rev().enumerate() {
                    let sign = if c < 0 { "-" } else { "+" };
                    if k == 0 {
                        if c < 0 {
                            write!(f, "-")?;
                        }
                    } else {
                        write!(f, " {sign} ")?;
                    }
                    let a = c.unsigned_abs();
                    match (e, a) {
                        (0, _) => write!(f, "{a}")?,
                        (1, 1) => write!(f, "{}", $var)?,
                        (1, _) => write!(f, "{a}{}", $var)?,
                        (_, 1) => write!(f, "{}^{e}", $var)?,
                        _ => write!(f, "{a}{}^{e}", $var)?,
                    }
                }
                Ok(())
            }
        }

        impl Serialize for $t {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                struct Coeffs<'a>(&'a $t);
                impl Serialize for Coeffs<'_> {
                    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                        let terms = self.0.terms();
                        let mut m = s.serialize_map(Some(terms.len()))?;
                        for (e, c) in terms.iter().rev() {
                            m.serialize_entry(&e.to_string(), c)?;
                        }
                        m.end()
                    }
                }
                let mut m = s.serialize_map(Some(1))?;
                m.serialize_entry("coeffs", &Coeffs(self))?;
                m.end()
            }
        }
    };
}

poly_common!(IntPolynomial, "t");
poly_common!(AuxPolynomialU, "u");

impl AuxPolynomialU {
    pub fn div_exact(&self, d: &AuxPolynomialU) -> Result<AuxPolynomialU, PolyError> {
        Ok(AuxPolynomialU(self.0.div_exact(&d.0)?))
    }

    /// Reads `t^top · self(t^{-2})` as a polynomial in `t`.
    pub fn to_t(&self, top: u32) -> IntPolynomial {
        let mut out = IntPolynomial::zero();
        for (k, c) in self.terms() {
            assert!(2 * k <= top, "u^{k} overshoots t^{top}");
            out = out + IntPolynomial::monomial(top - 2 * k, c);
        }
        out
    }
}

/// `∏_{i=1}^k (1 - u^i)`.
pub fn poincare_product(k: u32) -> AuxPolynomialU {
    (1..=k).fold(AuxPolynomialU::one(), |acc, i| {
        acc * (AuxPolynomialU::one() - AuxPolynomialU::monomial(i, 1))
    })
}

fn sum_partition(bp: &Bipartition) -> crate::combinatorics::Partition {
    add_parts(&bp.mu, &bp.nu).expect("bipartition components add to a partition")
}

/// Values `a` realised as `μ_i+ν_i` at a drop of μ and as `μ_j+ν_j` at a drop of ν.
pub fn j_set(bp: &Bipartition) -> BTreeSet<u32> {
    let len = bp.mu.len().max(bp.nu.len());
    let (mu, nu) = (&bp.mu, &bp.nu);
    let mu_drops: BTreeSet<u32> = (1..=len)
        .filter(|&i| mu.get(i + 1) < mu.get(i))
        .map(|i| mu.get(i) + nu.get(i))
        .collect();
    let nu_drops: BTreeSet<u32> = (1..=len)
        .filter(|&j| j == 1 || nu.get(j - 1) > nu.get(j))
        .map(|j| mu.get(j) + nu.get(j))
        .filter(|&a| a > 0)
        .collect();
    mu_drops.intersection(&nu_drops).copied().collect()
}

fn ratio(n: u32, b: u32, denominator: AuxPolynomialU) -> Result<IntPolynomial, PolyError> {
    let top = 2 * (n * n - b);
    Ok(poincare_product(n).div_exact(&denominator)?.to_t(top))
}

/// Point count of the exotic orbit labelled by `bp`.
pub fn exotic_point_poly(bp: &Bipartition) -> IntPolynomial {
    let sum = sum_partition(bp);
    let j = j_set(bp);
    let denominator = sum
        .distinct_parts()
        .into_iter()
        .map(|a| {
            let m = multiplicity(&sum, a) as u32;
            poincare_product(if j.contains(&a) { m - 1 } else { m })
        })
        .fold(AuxPolynomialU::one(), |acc, f| acc * f);
    ratio(bp.weight(), b_stat(bp), denominator)
        .unwrap_or_else(|_| panic!("point-count quotient for {bp} is not exact"))
}

/// Point count of the type-C nilpotent orbit with label `bp`.
pub fn type_c_point_poly(bp: &Bipartition) -> Result<IntPolynomial, PolyError> {
    if !is_c_dist(bp) {
        return Err(PolyError::Membership(bp.clone()));
    }
    let l = phi_c(bp);
    let denominator = l
        .distinct_parts()
        .into_iter()
        .map(|a| poincare_product(multiplicity(&l, a) as u32 / 2))
        .fold(AuxPolynomialU::one(), |acc, f| acc * f);
    ratio(bp.weight(), b_stat(bp), denominator)
}

/// Point count of the type-B orbit with label `bp`, as a sum over its B-fiber.
pub fn type_b_point_poly(bp: &Bipartition) -> Result<IntPolynomial, PolyError> {
    piece_poly(PieceKind::B, bp)
}

/// Kinds of unions of exotic orbits that have point-count polynomials.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PieceKind {
    B,
    C,
    Special,
    Tilde,
    E,
    ScriptE,
}

impl PieceKind {
    pub fn collapse_kind(self) -> Option<CollapseKind> {
        match self {
            PieceKind::B => Some(CollapseKind::B),
            PieceKind::C => Some(CollapseKind::C),
            PieceKind::Special => Some(CollapseKind::Special),
            PieceKind::Tilde => Some(CollapseKind::Tilde),
            PieceKind::E | PieceKind::ScriptE => None,
        }
    }
}

/// Labels whose exotic orbits make up the piece of the given kind at `target`.
pub fn piece_members(kind: PieceKind, target: &Bipartition) -> Result<Vec<Bipartition>, PolyError> {
    let n = target.weight();
    let bad = || PolyError::Membership(target.clone());
    match kind.collapse_kind() {
        Some(ck) => fiber(ck, target, n).map_err(|_| bad()),
        None => {
            if kind == PieceKind::ScriptE && !is_b2_dist(target) {
                return Err(bad());
            }
            Ok(enumerate_bipartitions(n)
                .into_iter()
                .filter(|bp| preceq(bp, target).expect("equal weights"))
                .collect())
        }
    }
}

pub fn piece_poly(kind: PieceKind, target: &Bipartition) -> Result<IntPolynomial, PolyError> {
    Ok(piece_members(kind, target)?
        .iter()
        .map(exotic_point_poly)
        .sum())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityFailure {
    pub identity: String,
    pub label: Bipartition,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityReport {
    pub n: u32,
    pub checks: usize,
    pub failures: Vec<IdentityFailure>,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn verify_identities(n: u32) -> IdentityReport {
    verify_identities_with(n, exotic_point_poly)
}

/// Runs every identity with `exotic` standing in for the exotic orbit counts.
pub fn verify_identities_with(n: u32, exotic: impl Fn(&Bipartition) -> IntPolynomial) -> IdentityReport {
    let all = enumerate_bipartitions(n);
    let table: BTreeMap<usize, IntPolynomial> =
        all.iter().enumerate().map(|(i, bp)| (i, exotic(bp))).collect();
    let p = |bp: &Bipartition| -> &IntPolynomial {
        &table[&all.iter().position(|x| x == bp).expect("label of weight n")]
    };
    let fiber_sum = |kind: CollapseKind, target: &Bipartition| -> IntPolynomial {
        all.iter()
            .filter(|bp| &collapse(kind, bp) == target)
            .map(|bp| p(bp).clone())
            .sum()
    };
    let mut report = IdentityReport { n, checks: 0, failures: Vec::new() };
    let mut check = |ok: bool, identity: &str, label: &Bipartition, detail: String| {
        report.checks += 1;
        if !ok {
            report.failures.push(IdentityFailure {
                identity: identity.to_string(),
                label: label.clone(),
                detail,
            });
        }
    };
    let top_degree = |bp: &Bipartition| 2 * (n * n - b_stat(bp));
    let degree_ok = |poly: &IntPolynomial, bp: &Bipartition| {
        poly.degree() == Some(top_degree(bp))
            && poly.leading_coefficient() == 1
            && poly.terms().iter().all(|(e, _)| e % 2 == 0)
    };

    for bp in &all {
        let pb = p(bp);
        check(degree_ok(pb, bp), "exotic-degree", bp, format!("{pb}"));
        if is_c_dist(bp) {
            let explicit = type_c_point_poly(bp).expect("C-distinguished");
            let summed = fiber_sum(CollapseKind::C, bp);
            check(degree_ok(&explicit, bp), "typeC-degree", bp, format!("{explicit}"));
            check(
                summed == explicit,
                "C-piece-sum",
                bp,
                format!("fiber sum {summed} vs explicit {explicit}"),
            );
        }
        if is_b_dist(bp) {
            let pb_b = fiber_sum(CollapseKind::B, bp);
            check(degree_ok(&pb_b, bp), "typeB-degree", bp, format!("{pb_b}"));
        }
        if is_special(bp) {
            let via_b: IntPolynomial = all
                .iter()
                .filter(|r| is_b_dist(r) && &collapse_special(r) == bp)
                .map(|r| fiber_sum(CollapseKind::B, r))
                .sum();
            let via_all: IntPolynomial = all
                .iter()
                .filter(|r| &collapse_special(r) == bp)
                .map(|r| p(r).clone())
                .sum();
            let via_c: IntPolynomial = all
                .iter()
                .filter(|r| is_c_dist(r) && &collapse_special(r) == bp)
                .map(|r| type_c_point_poly(r).expect("C-distinguished"))
                .sum();
            check(
                via_b == via_all && via_all == via_c,
                "special-piece-sums",
                bp,
                format!("B side {via_b}, exotic {via_all}, C side {via_c}"),
            );
        }
    }
    let total: IntPolynomial = all.iter().map(|bp| p(bp).clone()).sum();
    let total_c: IntPolynomial = all
        .iter()
        .filter(|bp| is_c_dist(bp))
        .map(|bp| type_c_point_poly(bp).expect("C-distinguished"))
        .sum();
    let cone = IntPolynomial::monomial(2 * n * n, 1);
    let empty = Bipartition::default();
    check(
        total == total_c && total_c == cone,
        "total-count",
        all.first().unwrap_or(&empty),
        format!("exotic total {total}, type-C total {total_c}"),
    );
    report
}
