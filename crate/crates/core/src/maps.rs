//! Maps between bipartitions and partitions, collapses onto the
//! distinguished sub-posets, Hesselink index data and the dimension
//! bookkeeping for λ-filtrations.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::combinatorics::{
    add_parts, b_stat, duplicate, enumerate_bipartitions, from_quasi_partition, is_b2_dist,
    is_b_dist, is_c_dist, is_p2n1_b, is_p2n_c, is_special, Bipartition, CombError, Composition,
    Partition,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MapError {
    #[error("{0} is not in the required partition class")]
    BadPartition(Partition),
    #[error("{0} is not in the required sub-poset")]
    BadBipartition(Bipartition),
    #[error("classification data ({lambda}, {chi}) matched {matches} bipartitions")]
    Malformed {
        lambda: Partition,
        chi: HesselinkIndex,
        matches: usize,
    },
    #[error(transparent)]
    Comb(#[from] CombError),
}

/// Part value → nonnegative integer.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize)]
#[serde(transparent)]
pub struct HesselinkIndex(pub BTreeMap<u32, u32>);

impl HesselinkIndex {
    fn assign(&mut self, part: u32, value: u32) {
        if let Some(&old) = self.0.get(&part) {
            assert_eq!(old, value, "conflicting Hesselink values at part {part}");
        }
        self.0.insert(part, value);
    }

    pub fn get(&self, part: u32) -> Option<u32> {
        self.0.get(&part).copied()
    }

    pub fn from_pairs(pairs: &[(u32, u32)]) -> Self {
        HesselinkIndex(pairs.iter().copied().collect())
    }
}

impl fmt::Display for HesselinkIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.0.iter().map(|(k, v)| format!("{k}->{v}")).collect();
        write!(f, "{{{}}}", items.join(", "))
    }
}

/// Which collapse (and hence which kind of piece) is meant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CollapseKind {
    B,
    C,
    Special,
    Tilde,
}

/// Positions `i` (0-based) with `seq[i] < seq[i+1]`; panics if two overlap.
fn replacement_sites(seq: &[i64]) -> Vec<usize> {
    let sites: Vec<usize> = (0..seq.len().saturating_sub(1))
        .filter(|&i| seq[i] < seq[i + 1])
        .collect();
    for w in sites.windows(2) {
        assert!(w[1] > w[0] + 1, "overlapping replacements at {} in {seq:?}", w[0]);
    }
    sites
}

fn support(bp: &Bipartition) -> usize {
    bp.mu.len().max(bp.nu.len())
}

fn into_partition(values: Vec<i64>) -> Partition {
    assert!(values.iter().all(|&v| v >= 0), "negative part in {values:?}");
    Partition::new(values.into_iter().map(|v| v as u32).collect())
        .expect("replacement pass produced a partition")
}

/// Φ^C together with the Hesselink index read off the same pass.
fn phi_c_with_index(bp: &Bipartition) -> (Partition, HesselinkIndex) {
    let m = support(bp);
    let mut seq = Vec::with_capacity(2 * m + 1);
    for i in 1..=m + 1 {
        seq.push(2 * bp.mu.get(i) as i64);
        seq.push(2 * bp.nu.get(i) as i64);
    }
    let sites = replacement_sites(&seq);
    let mut chi = HesselinkIndex::default();
    let mut out = seq.clone();
    for &i in &sites {
        let (s2, t2) = (seq[i], seq[i + 1]);
        let avg = (s2 + t2) / 2;
        out[i] = avg;
        out[i + 1] = avg;
        chi.assign(avg as u32, (s2 / 2) as u32);
    }
    for (i, &v) in seq.iter().enumerate() {
        let replaced = sites.iter().any(|&s| s == i || s + 1 == i);
        if !replaced && v > 0 {
            chi.assign(v as u32, (v / 2) as u32);
        }
    }
    (into_partition(out), chi)
}

pub fn phi_c(bp: &Bipartition) -> Partition {
    phi_c_with_index(bp).0
}

pub fn hesselink_c(bp: &Bipartition) -> HesselinkIndex {
    phi_c_with_index(bp).1
}

pub fn hat_phi_c(l: &Partition) -> Result<Bipartition, MapError> {
    if !is_p2n_c(l) {
        return Err(MapError::BadPartition(l.clone()));
    }
    let p = l.parts();
    let mut out = Vec::with_capacity(p.len());
    let mut i = 0;
    while i < p.len() {
        if p[i] % 2 == 0 {
            out.push(p[i] / 2);
            i += 1;
        } else {
            let k = p[i] / 2;
            let run = p[i..].iter().take_while(|&&x| x == p[i]).count();
            for j in 0..run {
                out.push(if j % 2 == 0 { k } else { k + 1 });
            }
            i += run;
        }
    }
    Ok(from_quasi_partition(&Composition::new(out))?)
}

pub fn collapse_c(bp: &Bipartition) -> Bipartition {
    hat_phi_c(&phi_c(bp)).expect("Φ^C lands in the type-C partitions")
}

pub fn phi_b(bp: &Bipartition) -> Partition {
    let m = support(bp);
    // Window of length 2m+3 ends on an odd position; beyond it the sequence
    // continues as aligned (-1, 1) pairs, which become zeros.
    let len = 2 * m + 3;
    let seq: Vec<i64> = (1..=len)
        .map(|k| {
            if k % 2 == 1 {
                2 * bp.mu.get(k.div_ceil(2)) as i64 + 1
            } else {
                2 * bp.nu.get(k / 2) as i64 - 1
            }
        })
        .collect();
    let sites = replacement_sites(&seq);
    let mut out = seq.clone();
    for &i in &sites {
        let avg = (seq[i] + seq[i + 1]) / 2;
        out[i] = avg;
        out[i + 1] = avg;
    }
    assert_eq!(
        &out[2 * m + 1..],
        &[0, 0],
        "tail of the Φ^B window did not vanish"
    );
    into_partition(out)
}

pub fn hat_phi_b(l: &Partition) -> Result<Bipartition, MapError> {
    if !is_p2n1_b(l) {
        return Err(MapError::BadPartition(l.clone()));
    }
    let p = l.parts();
    let mut out: Vec<u32> = Vec::with_capacity(p.len());
    let mut i = 0;
    while i < p.len() {
        let pos = i + 1;
        if p[i] % 2 == 1 {
            // (λ_i + (-1)^i) / 2
            out.push(if pos % 2 == 0 { (p[i] + 1) / 2 } else { (p[i] - 1) / 2 });
            i += 1;
        } else {
            let k = p[i] / 2;
            let run = p[i..].iter().take_while(|&&x| x == p[i]).count();
            for j in 0..run {
                out.push(if pos % 2 == 0 {
                    k
                } else if j % 2 == 0 {
                    k - 1
                } else {
                    k + 1
                });
            }
            i += run;
        }
    }
    // The zero tail starts at an even position since ℓ(λ) is odd.
    debug_assert!(p.len() % 2 == 1);
    Ok(from_quasi_partition(&Composition::new(out))?)
}

pub fn collapse_b(bp: &Bipartition) -> Bipartition {
    hat_phi_b(&phi_b(bp)).expect("Φ^B lands in the type-B partitions")
}

pub fn collapse_special(bp: &Bipartition) -> Bipartition {
    collapse_b(&collapse_c(bp))
}

pub fn collapse_tilde(bp: &Bipartition) -> Bipartition {
    let m = support(bp);
    let mut mu: Vec<u32> = (1..=m).map(|i| bp.mu.get(i)).collect();
    let mut nu: Vec<u32> = (1..=m).map(|i| bp.nu.get(i)).collect();
    for i in 0..m {
        let (r, s) = (mu[i], nu[i]);
        if r + 2 < s {
            let sum = r + s;
            mu[i] = sum.div_ceil(2) - 1;
            nu[i] = sum / 2 + 1;
        }
    }
    Bipartition::new(
        Partition::new(mu).expect("collapse keeps the first component decreasing"),
        Partition::new(nu).expect("collapse keeps the second component decreasing"),
    )
}

pub fn collapse(kind: CollapseKind, bp: &Bipartition) -> Bipartition {
    match kind {
        CollapseKind::B => collapse_b(bp),
        CollapseKind::C => collapse_c(bp),
        CollapseKind::Special => collapse_special(bp),
        CollapseKind::Tilde => collapse_tilde(bp),
    }
}

pub fn in_subposet(kind: CollapseKind, bp: &Bipartition) -> bool {
    match kind {
        CollapseKind::B => is_b_dist(bp),
        CollapseKind::C => is_c_dist(bp),
        CollapseKind::Special => is_special(bp),
        CollapseKind::Tilde => is_b2_dist(bp),
    }
}

/// `duplicate(μ+ν)` with 1 added to part number 2ℓ(ν)+1.
pub fn phi_b2(bp: &Bipartition) -> Partition {
    let sum = add_parts(&bp.mu, &bp.nu).expect("bipartition components add to a partition");
    let mut parts = duplicate(&sum).parts().to_vec();
    let pos = 2 * bp.nu.len();
    if parts.len() <= pos {
        parts.resize(pos + 1, 0);
    }
    parts[pos] += 1;
    Partition::new(parts).expect("Φ^{B,2} is a partition")
}

pub fn hesselink_b2(bp: &Bipartition) -> Result<HesselinkIndex, MapError> {
    if !is_b2_dist(bp) {
        return Err(MapError::BadBipartition(bp.clone()));
    }
    let l = bp.nu.len();
    let mut chi = HesselinkIndex::default();
    let head = bp.mu.get(l + 1) + 1;
    chi.assign(head, head);
    for i in 1..=support(bp) {
        let part = bp.mu.get(i) + bp.nu.get(i);
        if part > 0 {
            chi.assign(part, if i <= l { bp.mu.get(i) + 1 } else { bp.mu.get(i) });
        }
    }
    let domain: Vec<u32> = chi.0.keys().rev().copied().collect();
    assert_eq!(domain, phi_b2(bp).distinct_parts(), "χ̃ domain mismatch for {bp}");
    Ok(chi)
}

/// Unique bipartition with the given Jordan type and Hesselink index under Φ^C.
pub fn invert_jordan_c(l: &Partition, chi: &HesselinkIndex) -> Result<Bipartition, MapError> {
    let n = l.weight() / 2;
    let matches: Vec<Bipartition> = enumerate_bipartitions(n)
        .into_iter()
        .filter(|bp| {
            let (lam, idx) = phi_c_with_index(bp);
            &lam == l && &idx == chi
        })
        .collect();
    single_match(l, chi, matches)
}

/// Unique bipartition in 𝒬^{B,2} with the given Φ^{B,2} and χ̃.
pub fn invert_jordan_b2(l: &Partition, chi: &HesselinkIndex) -> Result<Bipartition, MapError> {
    let n = l.weight().saturating_sub(1) / 2;
    let matches: Vec<Bipartition> = enumerate_bipartitions(n)
        .into_iter()
        .filter(|bp| {
            is_b2_dist(bp) && &phi_b2(bp) == l && hesselink_b2(bp).as_ref() == Ok(chi)
        })
        .collect();
    single_match(l, chi, matches)
}

fn single_match(
    l: &Partition,
    chi: &HesselinkIndex,
    mut matches: Vec<Bipartition>,
) -> Result<Bipartition, MapError> {
    if matches.len() == 1 {
        Ok(matches.pop().unwrap())
    } else {
        Err(MapError::Malformed {
            lambda: l.clone(),
            chi: chi.clone(),
            matches: matches.len(),
        })
    }
}

/// All bipartitions of `n` whose collapse of the given kind is `target`.
pub fn fiber(kind: CollapseKind, target: &Bipartition, n: u32) -> Result<Vec<Bipartition>, MapError> {
    if !in_subposet(kind, target) || target.weight() != n {
        return Err(MapError::BadBipartition(target.clone()));
    }
    Ok(enumerate_bipartitions(n)
        .into_iter()
        .filter(|bp| &collapse(kind, bp) == target)
        .collect())
}

/// Ambient dimension of V for a type-C (even weight) or type-B (odd weight) λ.
pub fn ambient_dim(l: &Partition) -> u32 {
    let w = l.weight();
    w - w % 2
}

/// `dim V_{≥a}` of a λ-filtration.
pub fn lambda_filtration_dim(l: &Partition, a: i64) -> u32 {
    if a >= 1 {
        l.parts()
            .iter()
            .map(|&p| {
                let d = p as i64 - a;
                if d > 0 {
                    ((d + 1) / 2) as u32
                } else {
                    0
                }
            })
            .sum()
    } else {
        ambient_dim(l) - lambda_filtration_dim(l, 1 - a)
    }
}

/// Jacobson–Morozov weight multiplicities for Jordan type λ.
pub fn grading_dims(l: &Partition) -> BTreeMap<i64, u32> {
    let mut d = BTreeMap::new();
    for &m in l.parts() {
        let m = m as i64;
        for j in 0..m {
            *d.entry(m - 1 - 2 * j).or_insert(0) += 1;
        }
    }
    d
}

fn choose2(x: u64) -> u64 {
    x * x.saturating_sub(1) / 2
}

/// Dimension of the part of degree ≥ `min_deg` in S²W (`sym`) or Λ²W,
/// where W is graded by `d`.
fn graded_square_dim(d: &BTreeMap<i64, u32>, sym: bool, min_deg: i64) -> u64 {
    let entries: Vec<(i64, u64)> = d.iter().map(|(&a, &m)| (a, m as u64)).collect();
    let mut total = 0;
    for (x, &(a, da)) in entries.iter().enumerate() {
        if 2 * a >= min_deg {
            total += if sym { choose2(da + 1) } else { choose2(da) };
        }
        for &(b, db) in &entries[x + 1..] {
            if a + b >= min_deg {
                total += da * db;
            }
        }
    }
    total
}

fn dim_at(d: &BTreeMap<i64, u32>, a: i64) -> u64 {
    d.get(&a).copied().unwrap_or(0) as u64
}

/// Closed forms for `dim S_{≥2}` and `dim sp_{≥2}` as sums over weights.
fn closed_form_ge2(d: &BTreeMap<i64, u32>) -> (u64, u64) {
    let top = d.keys().next_back().copied().unwrap_or(0);
    let mut s = 0;
    let mut sp = 0;
    for a in 1..=top {
        s += choose2(dim_at(d, a));
        sp += choose2(dim_at(d, a) + 1);
    }
    for a in 2..=top {
        for b in (1 - a)..=(a - 2) {
            let cross = dim_at(d, a) * dim_at(d, b);
            s += cross;
            sp += cross;
        }
    }
    (s, sp)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResolutionReport {
    pub label: Bipartition,
    pub lambda: Partition,
    pub flag_dim: u64,
    pub vector_term: u64,
    pub s_ge2: u64,
    pub sp_ge2: u64,
    pub total: u64,
    pub orbit_dim_from_grading: u64,
    pub expected: u64,
    pub passed: bool,
}

/// Checks the dimension count of the resolution attached to a distinguished label.
pub fn resolution_dim_check(bp: &Bipartition, kind: CollapseKind) -> Result<ResolutionReport, MapError> {
    let n = bp.weight() as u64;
    let expected = 2 * (n * n - b_stat(bp) as u64);
    let (lambda, v_grading, lie_grading, min_weight, sym_lie) = match kind {
        CollapseKind::C if is_c_dist(bp) => {
            let l = phi_c(bp);
            let d = grading_dims(&l);
            (l, d.clone(), d, 1, true)
        }
        CollapseKind::B if is_b_dist(bp) => {
            let l = phi_b(bp);
            let big = grading_dims(&l);
            let mut d = big.clone();
            *d.get_mut(&0).expect("odd-size λ has a zero weight") -= 1;
            (l, d, big, 2, false)
        }
        _ => return Err(MapError::BadBipartition(bp.clone())),
    };
    let flag_dim = graded_square_dim(&v_grading, true, 1);
    let vector_term: u64 = v_grading
        .iter()
        .filter(|(&a, _)| a >= min_weight)
        .map(|(_, &m)| m as u64)
        .sum();
    assert_eq!(
        vector_term,
        lambda_filtration_dim(&lambda, min_weight) as u64,
        "weight count disagrees with the λ-filtration dimension"
    );
    let (s_ge2, sp_ge2) = closed_form_ge2(&v_grading);
    assert_eq!(s_ge2, graded_square_dim(&v_grading, false, 2));
    assert_eq!(sp_ge2, graded_square_dim(&v_grading, true, 2));
    let total = flag_dim + vector_term + s_ge2;
    // dim g_{≥1} + dim g_{≥2} for the ambient classical Lie algebra.
    let orbit_dim_from_grading = graded_square_dim(&lie_grading, sym_lie, 1)
        + graded_square_dim(&lie_grading, sym_lie, 2);
    let mut passed = total == expected && orbit_dim_from_grading == expected;
    if kind == CollapseKind::C {
        passed &= sp_ge2 == vector_term + s_ge2;
    }
    Ok(ResolutionReport {
        label: bp.clone(),
        lambda,
        flag_dim,
        vector_term,
        s_ge2,
        sp_ge2,
        total,
        orbit_dim_from_grading,
        expected,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::{bipartition_leq, dominance_leq, enumerate_partitions, preceq};

    fn bp(mu: &[u32], nu: &[u32]) -> Bipartition {
        Bipartition::from_parts(mu, nu).unwrap()
    }
    fn p(v: &[u32]) -> Partition {
        Partition::new(v.to_vec()).unwrap()
    }

    #[test]
    fn phi_c_examples() {
        assert_eq!(phi_c(&bp(&[1], &[1])), p(&[2, 2]));
        assert_eq!(phi_c(&bp(&[], &[2])), p(&[2, 2]));
        assert_eq!(phi_c(&bp(&[1, 1], &[])), p(&[2, 1, 1]));
        assert_eq!(hat_phi_c(&p(&[2, 2])).unwrap(), bp(&[1], &[1]));
        assert_eq!(hat_phi_c(&p(&[2, 1, 1])).unwrap(), bp(&[1, 1], &[]));
        assert_eq!(hat_phi_c(&p(&[1, 1, 1, 1])).unwrap(), bp(&[], &[1, 1]));
        assert!(hat_phi_c(&p(&[3, 1])).is_err());
        assert_eq!(collapse_c(&bp(&[], &[2])), bp(&[1], &[1]));
        assert_eq!(collapse_c(&bp(&[1], &[1])), bp(&[1], &[1]));
        assert!(is_c_dist(&bp(&[1], &[1, 1])));
        assert_eq!(collapse_c(&bp(&[1], &[1, 1])), bp(&[1], &[1, 1]));
    }

    #[test]
    fn phi_b_examples() {
        assert_eq!(phi_b(&bp(&[1], &[1])), p(&[3, 1, 1]));
        assert_eq!(phi_b(&bp(&[], &[2])), p(&[2, 2, 1]));
        assert_eq!(phi_b(&bp(&[1, 1], &[])), p(&[3, 1, 1]));
        assert_eq!(phi_b(&bp(&[1], &[1, 1])), p(&[3, 1, 1, 1, 1]));
        assert_eq!(hat_phi_b(&p(&[3, 1, 1])).unwrap(), bp(&[1], &[1]));
        assert_eq!(hat_phi_b(&p(&[2, 2, 1])).unwrap(), bp(&[], &[2]));
        assert_eq!(hat_phi_b(&p(&[1, 1, 1, 1, 1])).unwrap(), bp(&[], &[1, 1]));
        assert!(hat_phi_b(&p(&[2, 1, 1, 1])).is_err());
    }

    #[test]
    fn collapse_examples() {
        assert_eq!(collapse_special(&bp(&[], &[3])), bp(&[1], &[2]));
        assert_eq!(collapse_special(&bp(&[], &[2, 1])), bp(&[1], &[1, 1]));
        assert_eq!(collapse_special(&bp(&[1, 1, 1], &[])), bp(&[1], &[1, 1]));
        assert_eq!(collapse_tilde(&bp(&[], &[3])), bp(&[1], &[2]));
    }

    #[test]
    fn phi_b2_examples() {
        assert_eq!(phi_b2(&bp(&[2], &[])), p(&[3, 2]));
        assert_eq!(phi_b2(&bp(&[1], &[1])), p(&[2, 2, 1]));
        assert_eq!(phi_b2(&bp(&[1, 1], &[])), p(&[2, 1, 1, 1]));
        assert_eq!(phi_b2(&bp(&[], &[2])), p(&[2, 2, 1]));
        assert_eq!(phi_b2(&bp(&[], &[1, 1])), p(&[1, 1, 1, 1, 1]));
    }

    #[test]
    fn hesselink_examples() {
        let h = HesselinkIndex::from_pairs;
        assert_eq!(hesselink_c(&bp(&[], &[2])), h(&[(2, 0)]));
        assert_eq!(hesselink_c(&bp(&[1], &[1])), h(&[(2, 1)]));
        assert_eq!(hesselink_c(&bp(&[2], &[])), h(&[(4, 2)]));
        assert_eq!(hesselink_b2(&bp(&[1], &[1])).unwrap(), h(&[(1, 1), (2, 2)]));
        assert_eq!(hesselink_b2(&bp(&[2], &[])).unwrap(), h(&[(3, 3), (2, 2)]));
        assert_eq!(hesselink_b2(&bp(&[], &[1, 1])).unwrap(), h(&[(1, 1)]));
        assert!(hesselink_b2(&bp(&[], &[3])).is_err());
        assert_eq!(invert_jordan_c(&p(&[2, 2]), &h(&[(2, 1)])).unwrap(), bp(&[1], &[1]));
        assert_eq!(invert_jordan_c(&p(&[2, 2]), &h(&[(2, 0)])).unwrap(), bp(&[], &[2]));
        assert_eq!(
            invert_jordan_b2(&p(&[2, 2, 1]), &h(&[(1, 1), (2, 2)])).unwrap(),
            bp(&[1], &[1])
        );
        assert!(invert_jordan_c(&p(&[2, 2]), &h(&[(2, 2)])).is_err());
    }

    #[test]
    fn hesselink_values_bounded() {
        for n in 0..=6 {
            for b in enumerate_bipartitions(n) {
                for (&m, &c) in &hesselink_c(&b).0 {
                    assert!(2 * c <= m);
                }
                assert_eq!(hesselink_c(&b).0.keys().rev().copied().collect::<Vec<_>>(), phi_c(&b).distinct_parts());
            }
        }
    }

    #[test]
    fn fiber_examples() {
        let t = bp(&[1], &[1, 1]);
        let mut f = fiber(CollapseKind::B, &t, 3).unwrap();
        f.sort_by(|a, b| b.interleave_cmp(a));
        assert_eq!(f, vec![t.clone(), bp(&[1, 1, 1], &[])]);
        let f = fiber(CollapseKind::C, &t, 3).unwrap();
        assert_eq!(f.len(), 2);
        assert!(f.contains(&bp(&[], &[2, 1])));
        let f = fiber(CollapseKind::Special, &t, 3).unwrap();
        assert_eq!(f.len(), 3);
        assert!(fiber(CollapseKind::C, &bp(&[], &[2]), 2).is_err());
    }

    #[test]
    fn filtration_dims() {
        assert_eq!(lambda_filtration_dim(&p(&[4]), 3), 1);
        assert_eq!(lambda_filtration_dim(&p(&[4]), 4), 0);
        assert_eq!(lambda_filtration_dim(&p(&[4]), 7), 0);
        assert_eq!(lambda_filtration_dim(&p(&[4]), -3), 4);
        let g = grading_dims(&p(&[4]));
        assert_eq!(g, [(3, 1), (1, 1), (-1, 1), (-3, 1)].into_iter().collect());
    }

    #[test]
    fn resolution_examples() {
        let r = resolution_dim_check(&bp(&[2], &[]), CollapseKind::C).unwrap();
        assert_eq!((r.flag_dim, r.vector_term, r.s_ge2, r.total), (4, 2, 2, 8));
        assert!(r.passed);
        let r = resolution_dim_check(&bp(&[1], &[1, 1]), CollapseKind::B).unwrap();
        assert_eq!(r.lambda, p(&[3, 1, 1, 1, 1]));
        assert_eq!(r.total, 10);
        assert!(r.passed);
        assert!(resolution_dim_check(&bp(&[], &[2]), CollapseKind::C).is_err());
    }

    /// Explicit descriptions of the collapses as pairwise replacements, used
    /// as an independent oracle for the Φ̂∘Φ definitions.
    fn pairwise(bp: &Bipartition, first: fn(u32, u32) -> Option<(u32, u32)>, second: fn(u32, u32) -> Option<(u32, u32)>) -> Bipartition {
        let m = bp.mu.len().max(bp.nu.len()) + 1;
        let mut seq: Vec<u32> = (1..=m).flat_map(|i| [bp.mu.get(i), bp.nu.get(i)]).collect();
        let orig = seq.clone();
        for k in 0..seq.len() - 1 {
            let rule = if k % 2 == 0 { first } else { second };
            if let Some((a, b)) = rule(orig[k], orig[k + 1]) {
                seq[k] = a;
                seq[k + 1] = b;
            }
        }
        from_quasi_partition(&Composition::new(seq)).unwrap()
    }

    #[test]
    fn collapses_match_pairwise_rules() {
        for n in 0..=8 {
            for b in enumerate_bipartitions(n) {
                let c = pairwise(
                    &b,
                    |r, s| (r + 1 < s).then(|| ((r + s) / 2, (r + s).div_ceil(2))),
                    |s, r| (s + 1 < r).then(|| ((s + r) / 2, (s + r).div_ceil(2))),
                );
                assert_eq!(collapse_c(&b), c, "C collapse of {b}");
                let bb = pairwise(
                    &b,
                    |r, s| (r + 2 < s).then(|| ((r + s).div_ceil(2) - 1, (r + s) / 2 + 1)),
                    |s, r| (s < r).then(|| ((s + r).div_ceil(2), (s + r) / 2)),
                );
                assert_eq!(collapse_b(&b), bb, "B collapse of {b}");
                let sp = pairwise(
                    &b,
                    |r, s| (r + 1 < s).then(|| ((r + s) / 2, (r + s).div_ceil(2))),
                    |s, r| (s < r).then(|| ((s + r).div_ceil(2), (s + r) / 2)),
                );
                assert_eq!(collapse_special(&b), sp, "special collapse of {b}");
            }
        }
    }

    #[test]
    fn order_preserving_and_round_trips_small() {
        for n in 0..=5 {
            let all = enumerate_bipartitions(n);
            for a in &all {
                for b in &all {
                    if bipartition_leq(a, b).unwrap() {
                        assert!(dominance_leq(&phi_c(a).as_composition(), &phi_c(b).as_composition()).unwrap());
                        assert!(dominance_leq(&phi_b(a).as_composition(), &phi_b(b).as_composition()).unwrap());
                    }
                }
            }
            for l in enumerate_partitions(2 * n).into_iter().filter(is_p2n_c) {
                assert_eq!(phi_c(&hat_phi_c(&l).unwrap()), l);
            }
            for l in enumerate_partitions(2 * n + 1).into_iter().filter(is_p2n1_b) {
                assert_eq!(phi_b(&hat_phi_b(&l).unwrap()), l);
            }
            for b in &all {
                assert!(preceq(b, &collapse_tilde(b)).unwrap());
            }
        }
    }
}
