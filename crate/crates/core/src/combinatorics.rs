//! Compositions, partitions and bipartitions, with interleaved dominance.
//!
//! Every sequence is stored in canonical form (trailing zeros stripped), so
//! derived equality and hashing agree with the "eventually zero" reading.
//! Position arguments to the accessors below are 1-based.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CombError {
    #[error("incomparable weights {left} and {right}")]
    WeightMismatch { left: u32, right: u32 },
    #[error("{0:?} is not a quasi-partition")]
    NotQuasiPartition(Vec<u32>),
    #[error("{0:?} is not weakly decreasing")]
    NotPartition(Vec<u32>),
}

fn strip(mut v: Vec<u32>) -> Vec<u32> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

/// Finite sequence of nonnegative integers followed by an implicit zero tail.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Composition {
    parts: Vec<u32>,
}

impl Composition {
    pub fn new(parts: Vec<u32>) -> Self {
        Composition { parts: strip(parts) }
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    /// 1-based access; zero past the end.
    pub fn get(&self, i: usize) -> u32 {
        if i == 0 {
            return 0;
        }
        self.parts.get(i - 1).copied().unwrap_or(0)
    }

    pub fn weight(&self) -> u32 {
        self.parts.iter().sum()
    }

    pub fn is_partition(&self) -> bool {
        self.parts.windows(2).all(|w| w[0] >= w[1])
    }

    pub fn is_quasi_partition(&self) -> bool {
        self.parts.windows(3).all(|w| w[0] >= w[2])
    }

    /// Running sums of the parts (one per stored part).
    pub fn prefix_sums(&self) -> Vec<u32> {
        self.parts
            .iter()
            .scan(0u32, |acc, &p| {
                *acc += p;
                Some(*acc)
            })
            .collect()
    }
}

/// Weakly decreasing sequence of positive integers.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Partition {
    parts: Vec<u32>,
}

impl Partition {
    pub fn new(parts: Vec<u32>) -> Result<Self, CombError> {
        let parts = strip(parts);
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(CombError::NotPartition(parts));
        }
        Ok(Partition { parts })
    }

    /// Sorts the input into weakly decreasing order first.
    pub fn from_unsorted(mut parts: Vec<u32>) -> Self {
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition { parts: strip(parts) }
    }

    pub fn empty() -> Self {
        Partition { parts: Vec::new() }
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    /// Number of nonzero parts.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// 1-based access; zero past the end.
    pub fn get(&self, i: usize) -> u32 {
        if i == 0 {
            return 0;
        }
        self.parts.get(i - 1).copied().unwrap_or(0)
    }

    pub fn weight(&self) -> u32 {
        self.parts.iter().sum()
    }

    pub fn largest(&self) -> u32 {
        self.get(1)
    }

    pub fn as_composition(&self) -> Composition {
        Composition::new(self.parts.clone())
    }

    /// Distinct parts in decreasing order.
    pub fn distinct_parts(&self) -> Vec<u32> {
        let mut d = self.parts.clone();
        d.dedup();
        d
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
        write!(f, "({})", s.join(","))
    }
}

/// Ordered pair of partitions.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Bipartition {
    pub mu: Partition,
    pub nu: Partition,
}

impl Bipartition {
    pub fn new(mu: Partition, nu: Partition) -> Self {
        Bipartition { mu, nu }
    }

    /// Convenience constructor from raw part lists.
    pub fn from_parts(mu: &[u32], nu: &[u32]) -> Result<Self, CombError> {
        Ok(Bipartition {
            mu: Partition::new(mu.to_vec())?,
            nu: Partition::new(nu.to_vec())?,
        })
    }

    pub fn weight(&self) -> u32 {
        self.mu.weight() + self.nu.weight()
    }

    /// Compares interleaved compositions lexicographically (zero padded).
    pub fn interleave_cmp(&self, other: &Self) -> Ordering {
        let a = interleave(self);
        let b = interleave(other);
        let len = a.parts().len().max(b.parts().len());
        (1..=len)
            .map(|i| a.get(i).cmp(&b.get(i)))
            .find(|o| *o != Ordering::Equal)
            .unwrap_or(Ordering::Equal)
    }
}

impl fmt::Display for Bipartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |p: &Partition| {
            p.parts()
                .iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        write!(f, "({};{})", join(&self.mu), join(&self.nu))
    }
}

/// Value of `k(λ)`: the empty partition gets `Infinity`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeadMultiplicity {
    Finite(usize),
    Infinity,
}

pub fn dominance_leq(a: &Composition, b: &Composition) -> Result<bool, CombError> {
    let (wa, wb) = (a.weight(), b.weight());
    if wa != wb {
        return Err(CombError::WeightMismatch { left: wa, right: wb });
    }
    let len = a.parts().len().max(b.parts().len());
    let (mut sa, mut sb) = (0u32, 0u32);
    for i in 1..=len {
        sa += a.get(i);
        sb += b.get(i);
        if sa > sb {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn interleave(bp: &Bipartition) -> Composition {
    let len = bp.mu.len().max(bp.nu.len());
    let mut out = Vec::with_capacity(2 * len);
    for i in 1..=len {
        out.push(bp.mu.get(i));
        out.push(bp.nu.get(i));
    }
    Composition::new(out)
}

pub fn from_quasi_partition(c: &Composition) -> Result<Bipartition, CombError> {
    let p = c.parts();
    if p.windows(3).any(|w| w[0] < w[2]) {
        return Err(CombError::NotQuasiPartition(p.to_vec()));
    }
    let mu: Vec<u32> = p.iter().step_by(2).copied().collect();
    let nu: Vec<u32> = p.iter().skip(1).step_by(2).copied().collect();
    Ok(Bipartition {
        mu: Partition::new(mu).expect("odd positions of a quasi-partition decrease"),
        nu: Partition::new(nu).expect("even positions of a quasi-partition decrease"),
    })
}

pub fn bipartition_leq(a: &Bipartition, b: &Bipartition) -> Result<bool, CombError> {
    dominance_leq(&interleave(a), &interleave(b))
}

pub fn b_stat(bp: &Bipartition) -> u32 {
    interleave(bp)
        .parts()
        .iter()
        .enumerate()
        .map(|(k, &p)| k as u32 * p)
        .sum()
}

pub fn add_parts(a: &Partition, b: &Partition) -> Result<Partition, CombError> {
    let len = a.len().max(b.len());
    Partition::new((1..=len).map(|i| a.get(i) + b.get(i)).collect())
}

pub fn duplicate(l: &Partition) -> Partition {
    Partition {
        parts: l.parts().iter().flat_map(|&p| [p, p]).collect(),
    }
}

pub fn multiplicity(l: &Partition, a: u32) -> usize {
    l.parts().iter().filter(|&&p| p == a).count()
}

pub fn head_multiplicity(l: &Partition) -> HeadMultiplicity {
    match l.parts().first() {
        None => HeadMultiplicity::Infinity,
        Some(&top) => HeadMultiplicity::Finite(multiplicity(l, top)),
    }
}

/// All partitions of `n`, in decreasing lexicographic order.
pub fn enumerate_partitions(n: u32) -> Vec<Partition> {
    fn rec(rem: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if rem == 0 {
            out.push(Partition { parts: cur.clone() });
            return;
        }
        for p in (1..=max.min(rem)).rev() {
            cur.push(p);
            rec(rem - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

/// All bipartitions of `n`, sorted by interleaved composition, descending.
pub fn enumerate_bipartitions(n: u32) -> Vec<Bipartition> {
    let mut out = Vec::new();
    for k in 0..=n {
        let firsts = enumerate_partitions(k);
        let seconds = enumerate_partitions(n - k);
        for mu in &firsts {
            for nu in &seconds {
                out.push(Bipartition::new(mu.clone(), nu.clone()));
            }
        }
    }
    sort_descending(&mut out);
    out
}

pub fn sort_descending(v: &mut [Bipartition]) {
    v.sort_by(|a, b| b.interleave_cmp(a));
}

fn support(bp: &Bipartition) -> usize {
    bp.mu.len().max(bp.nu.len()) + 1
}

/// μ_i ≥ ν_i − 2 and ν_i ≥ μ_{i+1} for all i.
pub fn is_b_dist(bp: &Bipartition) -> bool {
    (1..=support(bp)).all(|i| {
        let (m, v, m1) = (bp.mu.get(i) as i64, bp.nu.get(i) as i64, bp.mu.get(i + 1) as i64);
        m >= v - 2 && v >= m1
    })
}

/// μ_i ≥ ν_i − 1 and ν_i ≥ μ_{i+1} − 1 for all i.
pub fn is_c_dist(bp: &Bipartition) -> bool {
    (1..=support(bp)).all(|i| {
        let (m, v, m1) = (bp.mu.get(i) as i64, bp.nu.get(i) as i64, bp.mu.get(i + 1) as i64);
        m >= v - 1 && v >= m1 - 1
    })
}

/// μ_i ≥ ν_i − 1 and ν_i ≥ μ_{i+1} for all i.
pub fn is_special(bp: &Bipartition) -> bool {
    (1..=support(bp)).all(|i| {
        let (m, v, m1) = (bp.mu.get(i) as i64, bp.nu.get(i) as i64, bp.mu.get(i + 1) as i64);
        m >= v - 1 && v >= m1
    })
}

/// μ_i ≥ ν_i − 2 for all i.
pub fn is_b2_dist(bp: &Bipartition) -> bool {
    (1..=support(bp)).all(|i| bp.mu.get(i) as i64 >= bp.nu.get(i) as i64 - 2)
}

/// Every odd part has even multiplicity.
pub fn is_p2n_c(l: &Partition) -> bool {
    l.distinct_parts()
        .iter()
        .all(|&a| a % 2 == 0 || multiplicity(l, a) % 2 == 0)
}

/// Every even part has even multiplicity.
pub fn is_p2n1_b(l: &Partition) -> bool {
    l.distinct_parts()
        .iter()
        .all(|&a| a % 2 == 1 || multiplicity(l, a) % 2 == 0)
}

/// `a ⪯ b`: `a ≤ b` with equal termwise sums.
pub fn preceq(a: &Bipartition, b: &Bipartition) -> Result<bool, CombError> {
    let leq = bipartition_leq(a, b)?;
    let sa = add_parts(&a.mu, &a.nu)?;
    let sb = add_parts(&b.mu, &b.nu)?;
    let result = leq && sa == sb;
    if sa == sb {
        let len = a.mu.len().max(b.mu.len());
        let componentwise = (1..=len).all(|i| a.mu.get(i) <= b.mu.get(i));
        assert_eq!(
            result, componentwise,
            "two characterizations of {a} ⪯ {b} disagree"
        );
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bp(mu: &[u32], nu: &[u32]) -> Bipartition {
        Bipartition::from_parts(mu, nu).unwrap()
    }

    fn comp(p: &[u32]) -> Composition {
        Composition::new(p.to_vec())
    }

    #[test]
    fn dominance_examples() {
        assert!(dominance_leq(&comp(&[1, 1, 1, 1]), &comp(&[2, 1, 1])).unwrap());
        assert!(dominance_leq(&comp(&[2, 1, 1]), &comp(&[2, 1, 1])).unwrap());
        assert!(!dominance_leq(&comp(&[2, 1, 1]), &comp(&[1, 1, 1, 1])).unwrap());
        assert!(matches!(
            dominance_leq(&comp(&[2]), &comp(&[1])),
            Err(CombError::WeightMismatch { .. })
        ));
    }

    #[test]
    fn interleave_and_back() {
        assert_eq!(interleave(&bp(&[1], &[1, 1])), comp(&[1, 1, 0, 1]));
        assert_eq!(interleave(&bp(&[], &[])), comp(&[]));
        assert_eq!(interleave(&bp(&[2], &[])), comp(&[2]));
        assert_eq!(from_quasi_partition(&comp(&[1, 1, 0, 1])).unwrap(), bp(&[1], &[1, 1]));
        assert_eq!(from_quasi_partition(&comp(&[2, 2])).unwrap(), bp(&[2], &[2]));
        assert_eq!(from_quasi_partition(&comp(&[1, 2])).unwrap(), bp(&[1], &[2]));
        assert!(from_quasi_partition(&comp(&[0, 1, 2])).is_err());
    }

    #[test]
    fn order_examples() {
        assert!(bipartition_leq(&bp(&[], &[2, 1]), &bp(&[1], &[1, 1])).unwrap());
        assert!(bipartition_leq(&bp(&[1, 1, 1], &[]), &bp(&[1], &[1, 1])).unwrap());
        assert!(!bipartition_leq(&bp(&[1], &[1, 1]), &bp(&[], &[2, 1])).unwrap());
    }

    #[test]
    fn statistics() {
        assert_eq!(b_stat(&bp(&[4], &[])), 0);
        assert_eq!(b_stat(&bp(&[1], &[1, 1])), 4);
        assert_eq!(b_stat(&bp(&[], &[1, 1, 1])), 9);
        let p = |v: &[u32]| Partition::new(v.to_vec()).unwrap();
        assert_eq!(add_parts(&p(&[2, 1]), &p(&[2, 1])).unwrap(), p(&[4, 2]));
        assert_eq!(add_parts(&p(&[1]), &p(&[1, 1])).unwrap(), p(&[2, 1]));
        assert_eq!(add_parts(&p(&[3, 1]), &p(&[])).unwrap(), p(&[3, 1]));
        assert_eq!(duplicate(&p(&[2, 1])), p(&[2, 2, 1, 1]));
        assert_eq!(duplicate(&p(&[])), p(&[]));
        assert_eq!(duplicate(&p(&[3])), p(&[3, 3]));
        assert_eq!(multiplicity(&p(&[2, 2, 1, 1, 1]), 1), 3);
        assert_eq!(multiplicity(&p(&[2, 2]), 3), 0);
        assert_eq!(multiplicity(&p(&[4]), 4), 1);
        assert_eq!(head_multiplicity(&p(&[4, 4, 2])), HeadMultiplicity::Finite(2));
        assert_eq!(head_multiplicity(&p(&[])), HeadMultiplicity::Infinity);
        assert_eq!(head_multiplicity(&p(&[1, 1, 1])), HeadMultiplicity::Finite(3));
    }

    #[test]
    fn enumeration_sizes() {
        assert_eq!(enumerate_bipartitions(0), vec![bp(&[], &[])]);
        assert_eq!(enumerate_bipartitions(2).len(), 5);
        assert_eq!(enumerate_partitions(4).len(), 5);
        // p(0..=8) convolved with itself
        let p = [1usize, 1, 2, 3, 5, 7, 11, 15, 22];
        for n in 0..=8 {
            let expect: usize = (0..=n).map(|k| p[k] * p[n - k]).sum();
            assert_eq!(enumerate_bipartitions(n as u32).len(), expect);
        }
        let two = enumerate_bipartitions(2);
        assert_eq!(two[0], bp(&[2], &[]));
        assert_eq!(two[4], bp(&[], &[1, 1]));
    }

    #[test]
    fn predicates() {
        assert!(!is_c_dist(&bp(&[], &[2])));
        assert!(is_special(&bp(&[1], &[1, 1])));
        assert!(is_b2_dist(&bp(&[], &[2])));
        assert!(!is_b2_dist(&bp(&[], &[3])));
        let p = |v: &[u32]| Partition::new(v.to_vec()).unwrap();
        assert!(is_p2n_c(&p(&[2, 1, 1])));
        assert!(!is_p2n_c(&p(&[3, 1])));
        assert!(is_p2n1_b(&p(&[2, 2, 1])));
        assert!(!is_p2n1_b(&p(&[2, 1, 1, 1])));
    }

    #[test]
    fn preceq_examples() {
        assert!(preceq(&bp(&[1], &[2]), &bp(&[2], &[1])).unwrap());
        let a = bp(&[2, 1], &[1]);
        assert!(preceq(&a, &a).unwrap());
        // Sums agree at (2,1) and interleaves (0,2,0,1) ≤ (1,1,0,1).
        assert!(preceq(&bp(&[], &[2, 1]), &bp(&[1], &[1, 1])).unwrap());
        assert!(!preceq(&bp(&[1, 1, 1], &[]), &bp(&[1], &[1, 1])).unwrap());
    }

    #[test]
    fn exhaustive_invariants_small() {
        for n in 0..=8 {
            let all = enumerate_bipartitions(n);
            for b in &all {
                let c = interleave(b);
                assert!(c.parts().windows(3).all(|w| w[0] >= w[2]));
                assert_eq!(&from_quasi_partition(&c).unwrap(), b);
                let direct: u32 = c.parts().iter().enumerate().map(|(k, p)| k as u32 * p).sum();
                assert_eq!(b_stat(b), direct);
                assert_eq!(is_special(b), is_b_dist(b) && is_c_dist(b));
            }
        }
    }
}
