//! Brute-force checks of the combinatorial invariants, shared by the
//! property tests and the acceptance suite.

#![allow(dead_code)]

use nilcone::combinatorics::*;
use nilcone::maps::*;

/// Prefix-sum dominance for integer sequences that may go negative,
/// compared over a common window.
fn seq_leq(a: &[i64], b: &[i64]) -> bool {
    let len = a.len().max(b.len());
    let (mut sa, mut sb) = (0i64, 0i64);
    for i in 0..len {
        sa += a.get(i).copied().unwrap_or(0);
        sb += b.get(i).copied().unwrap_or(0);
        if sa > sb {
            return false;
        }
    }
    true
}

fn parts_i64(l: &Partition) -> Vec<i64> {
    l.parts().iter().map(|&p| p as i64).collect()
}

/// (2ρ₁, 2σ₁, 2ρ₂, …) over `len` pairs.
fn doubled(bp: &Bipartition, len: usize) -> Vec<i64> {
    (1..=len).flat_map(|i| [2 * bp.mu.get(i) as i64, 2 * bp.nu.get(i) as i64]).collect()
}

/// (2ρ₁+1, 2σ₁−1, 2ρ₂+1, …) over `len` pairs.
fn shifted(bp: &Bipartition, len: usize) -> Vec<i64> {
    (1..=len)
        .flat_map(|i| [2 * bp.mu.get(i) as i64 + 1, 2 * bp.nu.get(i) as i64 - 1])
        .collect()
}

fn part_leq(a: &Partition, b: &Partition) -> bool {
    dominance_leq(&a.as_composition(), &b.as_composition()).expect("equal weights")
}

pub fn leq(a: &Bipartition, b: &Bipartition) -> bool {
    bipartition_leq(a, b).expect("equal weights")
}

/// Minimum of `set ∩ {τ : bp ≤ τ}` by brute search, if it exists.
pub fn brute_min<'a>(bp: &Bipartition, set: &'a [Bipartition]) -> Option<&'a Bipartition> {
    let above: Vec<&Bipartition> = set.iter().filter(|t| leq(bp, t)).collect();
    above.iter().copied().find(|m| above.iter().all(|t| leq(m, t)))
}

/// Failures of the partition and bipartition invariants at size n.
pub fn combinatorics_failures(n: u32) -> Vec<String> {
    let mut f = Vec::new();
    let parts = enumerate_partitions(n);
    for a in &parts {
        if !part_leq(a, a) {
            f.push(format!("dominance not reflexive at {a}"));
        }
        for b in &parts {
            if a != b && part_leq(a, b) && part_leq(b, a) {
                f.push(format!("dominance not antisymmetric at {a}, {b}"));
            }
            for c in &parts {
                if part_leq(a, b) && part_leq(b, c) && !part_leq(a, c) {
                    f.push(format!("dominance not transitive at {a}, {b}, {c}"));
                }
            }
        }
    }
    let all = enumerate_bipartitions(n);
    let mut seen = std::collections::HashSet::new();
    for bp in &all {
        if !seen.insert(bp.clone()) || bp.weight() != n {
            f.push(format!("enumeration repeats or misweights {bp}"));
        }
        let c = interleave(bp);
        if !c.is_quasi_partition() {
            f.push(format!("interleave of {bp} is not a quasi-partition"));
        }
        if from_quasi_partition(&c).ok().as_ref() != Some(bp) {
            f.push(format!("interleave round trip fails at {bp}"));
        }
        if is_special(bp) != (is_b_dist(bp) && is_c_dist(bp)) {
            f.push(format!("special ≠ B ∩ C at {bp}"));
        }
        let direct: u32 = c.parts().iter().enumerate().map(|(k, &p)| k as u32 * p).sum();
        if b_stat(bp) != direct {
            f.push(format!("b statistic mismatch at {bp}"));
        }
        for other in &all {
            let via_order = preceq(bp, other).expect("equal weights");
            let same_sum = add_parts(&bp.mu, &bp.nu).ok() == add_parts(&other.mu, &other.nu).ok();
            let componentwise = same_sum && (1..=n as usize + 1).all(|i| bp.mu.get(i) <= other.mu.get(i));
            if via_order != componentwise {
                f.push(format!("two readings of ⪯ disagree at {bp}, {other}"));
            }
        }
    }
    // |𝒬ₙ| = Σ_k p(k) p(n−k)
    let count: usize = (0..=n)
        .map(|k| enumerate_partitions(k).len() * enumerate_partitions(n - k).len())
        .sum();
    if all.len() != count {
        f.push(format!("|Q_{n}| = {}, expected {count}", all.len()));
    }
    f
}

/// Failures of the map and collapse invariants at size n.
pub fn maps_failures(n: u32) -> Vec<String> {
    let mut f = Vec::new();
    let all = enumerate_bipartitions(n);
    let c_set: Vec<Bipartition> = all.iter().filter(|b| is_c_dist(b)).cloned().collect();
    let b_set: Vec<Bipartition> = all.iter().filter(|b| is_b_dist(b)).cloned().collect();
    let s_set: Vec<Bipartition> = all.iter().filter(|b| is_special(b)).cloned().collect();
    let t_set: Vec<Bipartition> = all.iter().filter(|b| is_b2_dist(b)).cloned().collect();
    let p2n = enumerate_partitions(2 * n);
    let p2n1 = enumerate_partitions(2 * n + 1);
    let pc: Vec<&Partition> = p2n.iter().filter(|l| is_p2n_c(l)).collect();
    let pb: Vec<&Partition> = p2n1.iter().filter(|l| is_p2n1_b(l)).collect();
    let window = n as usize + 2;

    for a in &all {
        let (ca, ba) = (phi_c(a), phi_b(a));
        if !is_p2n_c(&ca) || !is_p2n1_b(&ba) {
            f.push(format!("Φ image outside its target at {a}"));
        }
        for b in &all {
            if leq(a, b) && (!part_leq(&ca, &phi_c(b)) || !part_leq(&ba, &phi_b(b))) {
                f.push(format!("Φ not order preserving at {a} ≤ {b}"));
            }
        }
        for l in &p2n {
            let lhs = seq_leq(&doubled(a, window), &parts_i64(l));
            if lhs != part_leq(&ca, l) {
                f.push(format!("Φ^C upper-bound property fails at {a}, {l}"));
            }
        }
        for l in &p2n1 {
            let lhs = seq_leq(&shifted(a, window), &parts_i64(l));
            if lhs != part_leq(&ba, l) {
                f.push(format!("Φ^B upper-bound property fails at {a}, {l}"));
            }
        }
        for (name, col, set, member) in [
            ("C", collapse_c(a), &c_set, is_c_dist(a)),
            ("B", collapse_b(a), &b_set, is_b_dist(a)),
            ("special", collapse_special(a), &s_set, is_special(a)),
            ("tilde", collapse_tilde(a), &t_set, is_b2_dist(a)),
        ] {
            if !leq(a, &col) || ((&col == a) != member) {
                f.push(format!("{name} collapse of {a} is {col}: not above, or fixed-point rule fails"));
            }
            if brute_min(a, set) != Some(&col) {
                f.push(format!("{name} collapse of {a} is not the searched minimum"));
            }
        }
        if collapse_special(a) != collapse_b(&collapse_c(a)) {
            f.push(format!("special collapse ≠ B∘C at {a}"));
        }
        let t = collapse_tilde(a);
        if !preceq(a, &t).expect("equal weights") {
            f.push(format!("{a} ⪯ its tilde collapse fails"));
        }
        if collapse_b(&t) != collapse_b(a) || collapse_c(&t) != collapse_c(a) {
            f.push(format!("tilde collapse changes the B or C collapse at {a}"));
        }
        let chi = hesselink_c(a);
        if chi.0.keys().rev().copied().collect::<Vec<_>>() != ca.distinct_parts()
            || chi.0.iter().any(|(&m, &v)| 2 * v > m)
        {
            f.push(format!("Hesselink index of {a} has the wrong domain or range"));
        }
        if invert_jordan_c(&ca, &chi).ok().as_ref() != Some(a) {
            f.push(format!("Jordan data does not recover {a}"));
        }
    }
    for (name, phi, hat, set, target) in [
        ("C", phi_c as fn(&Bipartition) -> Partition, hat_phi_c as fn(&Partition) -> Result<Bipartition, MapError>, &c_set, &pc),
        ("B", phi_b, hat_phi_b, &b_set, &pb),
    ] {
        for l in target.iter() {
            match hat(l) {
                Ok(bp) if &phi(&bp) == *l && set.contains(&bp) => {}
                _ => f.push(format!("Φ^{name} ∘ Φ̂^{name} fails at {l}")),
            }
        }
        let mut images: Vec<Partition> = set.iter().map(phi).collect();
        images.sort();
        images.dedup();
        if images.len() != set.len() || images.len() != target.len() {
            f.push(format!("Φ^{name} is not a bijection onto its distinguished target"));
        }
        for a in set.iter() {
            for b in set.iter() {
                if leq(a, b) != part_leq(&phi(a), &phi(b)) {
                    f.push(format!("Φ^{name} is not an order isomorphism at {a}, {b}"));
                }
            }
        }
    }
    let mut keys = std::collections::HashSet::new();
    for bp in &t_set {
        let chi = hesselink_b2(bp).expect("label in Q^{B,2}");
        if !keys.insert((phi_b2(bp), chi.clone())) {
            f.push(format!("(Φ^{{B,2}}, χ̃) repeats at {bp}"));
        }
        if invert_jordan_b2(&phi_b2(bp), &chi).ok().as_ref() != Some(bp) {
            f.push(format!("(Φ^{{B,2}}, χ̃) does not recover {bp}"));
        }
    }
    f
}
