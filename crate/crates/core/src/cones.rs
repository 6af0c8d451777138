//! Finite-field censuses of the exotic, symplectic and odd orthogonal
//! nilpotent cones, the maps Ψ and Ψ̃ between them, and the recursive
//! construction of adapted λ-filtrations.
//!
//! Matrices and vectors use 0-based indices. In dimension 2n the form pairs
//! index `i` with `2n-1-i`; in the odd-dimensional characteristic-2 space
//! index 0 is `e₀` and index `i ≥ 1` is `e_i`.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::combinatorics::{
    add_parts, duplicate, enumerate_bipartitions, is_b2_dist, is_b_dist, is_c_dist, is_special,
    multiplicity, preceq, Bipartition, Partition,
};
use crate::finitefield::{
    in_o_odd, in_o_v, in_o_vtilde, in_sp, jordan_type, Field, FieldError, FormContext, Gf2Matrix,
    MatrixFq, Subspace,
};
use crate::maps::{
    collapse_b, collapse_c, collapse_special, collapse_tilde, hesselink_b2, hesselink_c,
    lambda_filtration_dim, phi_b, phi_b2, phi_c, HesselinkIndex,
};
use crate::polycount::{
    exotic_point_poly, piece_poly, type_b_point_poly, type_c_point_poly, IntPolynomial, PieceKind,
};

/// Largest enumeration a census runs without an explicit override.
pub const BUDGET: u128 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConeError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("cone {cone} is not available over F{q}")]
    Unsupported { cone: Cone, q: u32 },
    #[error("rank n = {0} is outside the supported range")]
    Rank(u32),
    #[error("census would enumerate {points} points, above the limit of {limit}")]
    Budget { points: u128, limit: u128 },
    #[error("no orbit label for Jordan type {lambda} with index {index}")]
    Unclassified { lambda: Partition, index: HesselinkIndex },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("postcondition failed: {0}")]
    Postcondition(String),
}

/// Which enumeration a census runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Cone {
    /// Pairs (v, x) with x nilpotent in 𝔬(V), characteristic 2.
    Exotic,
    /// Nilpotent 𝔰𝔭(V), characteristic 2.
    Sp2,
    /// Nilpotent 𝔬(Ṽ), characteristic 2, parametrized through Ψ̃.
    O2,
    /// Nilpotent 𝔰𝔭₂ₙ, odd characteristic.
    SpOdd,
    /// Nilpotent 𝔬₂ₙ₊₁, odd characteristic.
    OOdd,
}

impl Cone {
    pub const ALL: [Cone; 5] = [Cone::Exotic, Cone::Sp2, Cone::O2, Cone::SpOdd, Cone::OOdd];

    pub fn name(self) -> &'static str {
        match self {
            Cone::Exotic => "exotic",
            Cone::Sp2 => "sp2",
            Cone::O2 => "o2",
            Cone::SpOdd => "spodd",
            Cone::OOdd => "oodd",
        }
    }

    pub fn needs_char_two(self) -> bool {
        matches!(self, Cone::Exotic | Cone::Sp2 | Cone::O2)
    }

    pub fn tag(self) -> ConeTag {
        match self {
            Cone::Exotic => ConeTag::Exotic,
            Cone::Sp2 => ConeTag::C2,
            Cone::O2 => ConeTag::B2,
            Cone::SpOdd => ConeTag::COdd,
            Cone::OOdd => ConeTag::BOdd,
        }
    }
}

impl fmt::Display for Cone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Cone {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Cone::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown cone {s}"))
    }
}

/// Label sets: 𝒬ₙ for exotic and C2, 𝒬ₙ^{B,2} for B2, 𝒬ₙ^C and 𝒬ₙ^B in odd characteristic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ConeTag {
    #[serde(rename = "exotic")]
    Exotic,
    #[serde(rename = "C2")]
    C2,
    #[serde(rename = "B2")]
    B2,
    #[serde(rename = "C-odd")]
    COdd,
    #[serde(rename = "B-odd")]
    BOdd,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct OrbitLabel {
    pub tag: ConeTag,
    pub bp: Bipartition,
}

/// A point (v, x) of the exotic nilpotent cone.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExoticPoint {
    pub v: Vec<u8>,
    pub x: MatrixFq,
}

impl ExoticPoint {
    pub fn zero(field: Field, n: usize) -> Self {
        ExoticPoint { v: vec![0; 2 * n], x: MatrixFq::zeros(field, 2 * n, 2 * n) }
    }

    pub fn is_valid(&self, ctx: &FormContext) -> bool {
        self.v.len() == ctx.dim && in_o_v(ctx, &self.x) && self.x.is_nilpotent()
    }
}

fn need_char_two(field: Field) -> Result<(), ConeError> {
    if field.is_char_two() {
        Ok(())
    } else {
        Err(FieldError::NeedsCharTwo.into())
    }
}

/// The section `s(v)` with `(i,j)` entry `a_i a_{2n+1-j}`.
pub fn s_section(field: Field, v: &[u8]) -> Result<MatrixFq, ConeError> {
    need_char_two(field)?;
    let d = v.len();
    let mut m = MatrixFq::zeros(field, d, d);
    for i in 0..d {
        for j in 0..d {
            m.set(i, j, field.mul(v[i], v[d - 1 - j]));
        }
    }
    Ok(m)
}

/// Square roots of the skew-diagonal entries.
pub fn pi(x: &MatrixFq) -> Result<Vec<u8>, ConeError> {
    need_char_two(x.field)?;
    let d = x.rows;
    (0..d)
        .map(|i| x.field.frobenius_sqrt(x.get(i, d - 1 - i)).map_err(ConeError::from))
        .collect()
}

/// Ψ(v, x) = s(v) + x.
pub fn psi(p: &ExoticPoint) -> Result<MatrixFq, ConeError> {
    Ok(s_section(p.x.field, &p.v)?.add(&p.x))
}

/// Ψ̃(v, x) = δ(v) + i(x) on e₀ ⊕ V.
pub fn psi_tilde(p: &ExoticPoint) -> Result<MatrixFq, ConeError> {
    let f = p.x.field;
    need_char_two(f)?;
    let d = p.v.len();
    let mut y = MatrixFq::zeros(f, d + 1, d + 1);
    write_psi_tilde(&p.v, &p.x, &mut y);
    Ok(y)
}

fn write_psi_tilde(v: &[u8], x: &MatrixFq, y: &mut MatrixFq) {
    let d = v.len();
    y.data.fill(0);
    for i in 1..=d {
        y.set(0, i, v[d - i]);
    }
    for i in 0..d {
        for j in 0..d {
            y.set(i + 1, j + 1, x.get(i, j));
        }
    }
}

fn write_psi(v: &[u8], x: &MatrixFq, y: &mut MatrixFq) {
    let f = x.field;
    let d = v.len();
    for i in 0..d {
        for j in 0..d {
            y.set(i, j, f.add(x.get(i, j), f.mul(v[i], v[d - 1 - j])));
        }
    }
}

/// Basis of a Lie algebra as sparse matrices; element `k` of the
/// enumeration has coordinates given by the base-q digits of `k`.
struct LieBasis {
    field: Field,
    dim: usize,
    elems: Vec<Vec<(usize, u8)>>,
}

impl LieBasis {
    /// Characteristic 2: one coordinate per entry on or above the skew
    /// diagonal, mirrored below it. `skew` keeps the skew-diagonal entries (𝔰𝔭)
    /// or drops them (𝔬(V)).
    fn char_two(field: Field, n: usize, skew: bool) -> Self {
        let d = 2 * n;
        let mut elems = Vec::new();
        for i in 0..d {
            for j in 0..d {
                if i + j < d - 1 {
                    elems.push(vec![(i * d + j, 1), ((d - 1 - j) * d + d - 1 - i, 1)]);
                } else if i + j == d - 1 && skew {
                    elems.push(vec![(i * d + j, 1)]);
                }
            }
        }
        LieBasis { field, dim: d, elems }
    }

    /// Solutions of `Mᵀ G + G M = 0` for the context's Gram matrix.
    fn from_form(ctx: &FormContext) -> Self {
        let f = ctx.field;
        let d = ctx.dim;
        let g = &ctx.gram;
        let mut a = MatrixFq::zeros(f, d * d, d * d);
        for i in 0..d {
            for j in 0..d {
                let row = i * d + j;
                for k in 0..d {
                    // (Mᵀ G)_{ij} = Σ_k M_{ki} G_{kj};  (G M)_{ij} = Σ_k G_{ik} M_{kj}
                    let c1 = k * d + i;
                    a.set(row, c1, f.add(a.get(row, c1), g.get(k, j)));
                    let c2 = k * d + j;
                    a.set(row, c2, f.add(a.get(row, c2), g.get(i, k)));
                }
            }
        }
        let elems = a
            .kernel_basis()
            .into_iter()
            .map(|v| v.into_iter().enumerate().filter(|&(_, c)| c != 0).collect())
            .collect();
        LieBasis { field: f, dim: d, elems }
    }

    fn len(&self) -> usize {
        self.elems.len()
    }

    fn size(&self) -> u128 {
        (self.field.q() as u128).pow(self.len() as u32)
    }

    fn write(&self, index: u64, out: &mut MatrixFq) {
        let f = self.field;
        let q = f.q() as u64;
        out.data.fill(0);
        let mut rest = index;
        for b in &self.elems {
            let c = (rest % q) as u8;
            rest /= q;
            if c != 0 {
                for &(k, val) in b {
                    out.data[k] = f.add(out.data[k], f.mul(c, val));
                }
            }
        }
    }

    fn element(&self, index: u64) -> MatrixFq {
        let mut m = MatrixFq::zeros(self.field, self.dim, self.dim);
        self.write(index, &mut m);
        m
    }
}

fn write_vector(field: Field, index: u64, v: &mut [u8]) {
    let q = field.q() as u64;
    let mut rest = index;
    for c in v.iter_mut() {
        *c = (rest % q) as u8;
        rest /= q;
    }
}

/// Product scratch space for nilpotency tests.
struct Scratch {
    a: MatrixFq,
    b: MatrixFq,
}

impl Scratch {
    fn new(field: Field, d: usize) -> Self {
        Scratch { a: MatrixFq::zeros(field, d, d), b: MatrixFq::zeros(field, d, d) }
    }

    fn nilpotent(&mut self, m: &MatrixFq) -> bool {
        if m.field.q() == 2 {
            return Gf2Matrix::from_matrix(m).is_nilpotent();
        }
        self.a.data.copy_from_slice(&m.data);
        let mut e = 1;
        while e < m.rows {
            self.a.mul_into(&self.a, &mut self.b);
            std::mem::swap(&mut self.a, &mut self.b);
            e *= 2;
        }
        self.a.is_zero()
    }
}

fn nilpotent_type(m: &MatrixFq) -> Result<Partition, FieldError> {
    if m.field.q() == 2 {
        Gf2Matrix::from_matrix(m).jordan_type()
    } else {
        jordan_type(m)
    }
}

/// `m^0, …, m^{top}`, with `m^{top} = 0` for a nilpotent of largest block `top`.
fn powers(m: &MatrixFq, top: u32) -> Vec<MatrixFq> {
    let mut out = vec![MatrixFq::identity(m.field, m.rows)];
    for k in 1..=top as usize {
        out.push(out[k - 1].mul(m));
    }
    out
}

fn power_vec(pw: &[MatrixFq], k: usize, w: &[u8]) -> Vec<u8> {
    match pw.get(k) {
        Some(p) => p.mul_vec(w),
        None => vec![0; w.len()],
    }
}

/// χ(m) = min{ j ≥ 0 : ⟨y^{2j+1} w, w⟩ = 0 for all w ∈ ker y^m }.
///
/// For y ∈ 𝔰𝔭 in characteristic 2, ⟨y^a u, w⟩ = ⟨y^a w, u⟩, so the cross terms of
/// ⟨y^a(u+w), u+w⟩ cancel and w ↦ ⟨y^a w, w⟩ is additive (and scales by c²).
/// Vanishing on a kernel basis is therefore enough.
fn chi_sp(ctx: &FormContext, pw: &[MatrixFq], m: u32) -> Option<u32> {
    let ker = pw[m as usize].kernel_basis();
    (0..=m).find(|&j| {
        let a = 2 * j as usize + 1;
        ker.iter().all(|w| ctx.form(&power_vec(pw, a, w), w) == 0)
    })
}

/// χ̃(m) = min{ j ≥ 0 : Q̃(y^j w) = 0 for all w ∈ ker y^m }, via Q̃ on a basis
/// and the polar form on basis pairs.
fn chi_tilde(ctx: &FormContext, pw: &[MatrixFq], m: u32) -> Option<u32> {
    let ker = pw[m as usize].kernel_basis();
    (0..=m).find(|&j| {
        let imgs: Vec<Vec<u8>> = ker.iter().map(|w| power_vec(pw, j as usize, w)).collect();
        imgs.iter().all(|u| ctx.quad(u) == 0)
            && imgs
                .iter()
                .enumerate()
                .all(|(k, u)| imgs[k + 1..].iter().all(|w| ctx.form(u, w) == 0))
    })
}

fn index_data(
    ctx: &FormContext,
    y: &MatrixFq,
    chi: fn(&FormContext, &[MatrixFq], u32) -> Option<u32>,
) -> Result<(Partition, HesselinkIndex), ConeError> {
    let lambda = nilpotent_type(y)?;
    let pw = powers(y, lambda.largest());
    let mut index = HesselinkIndex::default();
    for m in lambda.distinct_parts() {
        let j = chi(ctx, &pw, m).ok_or_else(|| {
            ConeError::Postcondition(format!("Hesselink minimum for part {m} exceeds {m}"))
        })?;
        index.0.insert(m, j);
    }
    Ok((lambda, index))
}

type IndexKey = (Partition, HesselinkIndex);

/// Lookup tables from classification data to orbit labels for one rank.
pub struct Classifier {
    n: u32,
    all: Vec<Bipartition>,
    by_c: HashMap<IndexKey, usize>,
    b2: Vec<Bipartition>,
    by_b2: HashMap<IndexKey, usize>,
    c_dist: Vec<Bipartition>,
    by_c_type: HashMap<Partition, usize>,
    b_dist: Vec<Bipartition>,
    by_b_type: HashMap<Partition, usize>,
}

fn build_table<K: std::hash::Hash + Eq + fmt::Debug>(
    labels: &[Bipartition],
    key: impl Fn(&Bipartition) -> K,
) -> HashMap<K, usize> {
    let mut table = HashMap::new();
    for (i, bp) in labels.iter().enumerate() {
        let k = key(bp);
        assert!(!table.contains_key(&k), "two labels share classification data {k:?}");
        table.insert(k, i);
    }
    table
}

impl Classifier {
    pub fn new(n: u32) -> Self {
        let all = enumerate_bipartitions(n);
        let b2: Vec<Bipartition> = all.iter().filter(|b| is_b2_dist(b)).cloned().collect();
        let c_dist: Vec<Bipartition> = all.iter().filter(|b| is_c_dist(b)).cloned().collect();
        let b_dist: Vec<Bipartition> = all.iter().filter(|b| is_b_dist(b)).cloned().collect();
        Classifier {
            n,
            by_c: build_table(&all, |b| (phi_c(b), hesselink_c(b))),
            by_b2: build_table(&b2, |b| (phi_b2(b), hesselink_b2(b).expect("label in 𝒬^{B,2}"))),
            by_c_type: build_table(&c_dist, phi_c),
            by_b_type: build_table(&b_dist, phi_b),
            all,
            b2,
            c_dist,
            b_dist,
        }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Labels for a cone, sorted by interleaved composition, descending.
    pub fn labels(&self, tag: ConeTag) -> &[Bipartition] {
        match tag {
            ConeTag::Exotic | ConeTag::C2 => &self.all,
            ConeTag::B2 => &self.b2,
            ConeTag::COdd => &self.c_dist,
            ConeTag::BOdd => &self.b_dist,
        }
    }

    fn sp_char2_index(&self, ctx: &FormContext, y: &MatrixFq) -> Result<usize, ConeError> {
        let key = index_data(ctx, y, chi_sp)?;
        self.by_c.get(&key).copied().ok_or(ConeError::Unclassified { lambda: key.0, index: key.1 })
    }

    fn o_char2_index(&self, ctx: &FormContext, y: &MatrixFq) -> Result<usize, ConeError> {
        let key = index_data(ctx, y, chi_tilde)?;
        self.by_b2.get(&key).copied().ok_or(ConeError::Unclassified { lambda: key.0, index: key.1 })
    }

    fn type_index(table: &HashMap<Partition, usize>, y: &MatrixFq) -> Result<usize, ConeError> {
        let lambda = nilpotent_type(y)?;
        table.get(&lambda).copied().ok_or(ConeError::Unclassified {
            lambda,
            index: HesselinkIndex::default(),
        })
    }

    /// Orbit of a nilpotent y ∈ 𝔰𝔭(V), characteristic 2, via (Jordan type, χ).
    pub fn classify_sp_char2(&self, ctx: &FormContext, y: &MatrixFq) -> Result<OrbitLabel, ConeError> {
        need_char_two(ctx.field)?;
        let i = self.sp_char2_index(ctx, y)?;
        Ok(OrbitLabel { tag: ConeTag::C2, bp: self.all[i].clone() })
    }

    /// Orbit of a nilpotent y ∈ 𝔬(Ṽ), characteristic 2, via (Jordan type, χ̃).
    pub fn classify_o_char2(&self, ctx: &FormContext, y: &MatrixFq) -> Result<OrbitLabel, ConeError> {
        need_char_two(ctx.field)?;
        let i = self.o_char2_index(ctx, y)?;
        Ok(OrbitLabel { tag: ConeTag::B2, bp: self.b2[i].clone() })
    }

    /// Exotic orbit of (v, x), read off from the orbit of Ψ(v, x), with the
    /// check that x has Jordan type (μ+ν) ∪ (μ+ν).
    pub fn classify_exotic_char2(&self, ctx: &FormContext, p: &ExoticPoint) -> Result<OrbitLabel, ConeError> {
        let y = psi(p)?;
        let bp = self.all[self.sp_char2_index(ctx, &y)?].clone();
        check_kato(&bp, &nilpotent_type(&p.x)?)?;
        Ok(OrbitLabel { tag: ConeTag::Exotic, bp })
    }

    pub fn classify_sp_odd(&self, y: &MatrixFq) -> Result<OrbitLabel, ConeError> {
        if y.field.is_char_two() {
            return Err(ConeError::Precondition("odd characteristic required".into()));
        }
        let i = Self::type_index(&self.by_c_type, y)?;
        Ok(OrbitLabel { tag: ConeTag::COdd, bp: self.c_dist[i].clone() })
    }

    pub fn classify_o_odd(&self, y: &MatrixFq) -> Result<OrbitLabel, ConeError> {
        if y.field.is_char_two() {
            return Err(ConeError::Precondition("odd characteristic required".into()));
        }
        let i = Self::type_index(&self.by_b_type, y)?;
        Ok(OrbitLabel { tag: ConeTag::BOdd, bp: self.b_dist[i].clone() })
    }
}

fn check_kato(bp: &Bipartition, x_type: &Partition) -> Result<(), ConeError> {
    let want = duplicate(&add_parts(&bp.mu, &bp.nu).expect("partition sum"));
    if &want == x_type {
        Ok(())
    } else {
        Err(ConeError::Postcondition(format!(
            "label {bp} needs x of type {want}, found {x_type}"
        )))
    }
}

/// Vectors `x^{j-1} w` for w in a basis of ker x^j, for j = 1..=dim+1.
fn jordan_min_data(x: &MatrixFq) -> Vec<Vec<Vec<u8>>> {
    let d = x.rows;
    let pw = powers(x, d as u32 + 1);
    (1..=d + 1)
        .map(|j| {
            pw[j].kernel_basis().iter().map(|w| pw[j - 1].mul_vec(w)).collect()
        })
        .collect()
}

fn jordan_min(ctx: &FormContext, data: &[Vec<Vec<u8>>], v: &[u8]) -> Option<u32> {
    data.iter()
        .position(|imgs| imgs.iter().all(|u| ctx.form(v, u) == 0))
        .map(|p| p as u32 + 1)
}

/// min{ j ≥ 1 : ⟨v, x^{j-1}(ker x^j)⟩ = 0 }.
pub fn jordan_minimum(ctx: &FormContext, p: &ExoticPoint) -> Option<u32> {
    jordan_min(ctx, &jordan_min_data(&p.x), &p.v)
}

/// The value `ρ_{ℓ(σ)+1} + 1` that the minimum above takes on the orbit of (ρ;σ).
pub fn jordan_minimum_expected(bp: &Bipartition) -> u32 {
    bp.mu.get(bp.nu.len() + 1) + 1
}

/// Conditions cutting out 𝔼_{μ;ν} (or Ψ̃⁻¹(𝓔_{μ;ν})) over a fixed x.
///
/// For targets in 𝒬^{B,2}, μ_i + 2 ≥ ν_i, so ⟨x^{μ_i+1}u, x^{μ_i+1}w⟩ vanishes on
/// ker x^{μ_i+ν_i}; this makes u ↦ Q(x^{μ_i+1}u)^{1/2} linear there, and both
/// conditions may be tested on a kernel basis.
pub struct BundleConditions {
    ctx: FormContext,
    /// (x^{μ_i} u, required value of ⟨v, x^{μ_i} u⟩)
    checks: Vec<(Vec<u8>, u8)>,
}

impl BundleConditions {
    /// `None` when x has the wrong Jordan type (condition (a) fails).
    pub fn new(
        ctx: &FormContext,
        x: &MatrixFq,
        target: &Bipartition,
        affine: bool,
    ) -> Result<Option<Self>, ConeError> {
        if affine {
            need_char_two(ctx.field)?;
            if !is_b2_dist(target) {
                return Err(ConeError::Precondition(format!("{target} is not in 𝒬^{{B,2}}")));
            }
        }
        let sum = add_parts(&target.mu, &target.nu).expect("partition sum");
        if nilpotent_type(x)? != duplicate(&sum) {
            return Ok(None);
        }
        let f = ctx.field;
        let pw = powers(x, 2 * target.weight() + 2);
        let mut checks = Vec::new();
        for i in 1..=sum.len() {
            let (mu_i, nu_i) = (target.mu.get(i) as usize, target.nu.get(i) as usize);
            for u in pw[mu_i + nu_i].kernel_basis() {
                let w = power_vec(&pw, mu_i, &u);
                let rhs = if affine {
                    f.frobenius_sqrt(ctx.quad(&power_vec(&pw, mu_i + 1, &u)))?
                } else {
                    0
                };
                checks.push((w, rhs));
            }
        }
        Ok(Some(BundleConditions { ctx: ctx.clone(), checks }))
    }

    pub fn holds(&self, v: &[u8]) -> bool {
        self.checks.iter().all(|(w, rhs)| self.ctx.form(v, w) == *rhs)
    }
}

/// Membership of (v, x) in 𝔼_{μ;ν}.
pub fn e_membership(ctx: &FormContext, p: &ExoticPoint, target: &Bipartition) -> Result<bool, ConeError> {
    Ok(BundleConditions::new(ctx, &p.x, target, false)?.is_some_and(|c| c.holds(&p.v)))
}

/// Membership of (v, x) in Ψ̃⁻¹(𝓔_{μ;ν}), target in 𝒬^{B,2}.
pub fn script_e_membership(
    ctx: &FormContext,
    p: &ExoticPoint,
    target: &Bipartition,
) -> Result<bool, ConeError> {
    Ok(BundleConditions::new(ctx, &p.x, target, true)?.is_some_and(|c| c.holds(&p.v)))
}

/// Kind of line in a census report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum LineKind {
    #[serde(rename = "orbit")]
    Orbit,
    #[serde(rename = "jordan")]
    Jordan,
    #[serde(rename = "pieceC")]
    PieceC,
    #[serde(rename = "pieceB")]
    PieceB,
    #[serde(rename = "special")]
    Special,
    #[serde(rename = "tilde")]
    Tilde,
}

impl LineKind {
    pub fn name(self) -> &'static str {
        match self {
            LineKind::Orbit => "orbit",
            LineKind::Jordan => "jordan",
            LineKind::PieceC => "pieceC",
            LineKind::PieceB => "pieceB",
            LineKind::Special => "special",
            LineKind::Tilde => "tilde",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CensusLine {
    pub kind: LineKind,
    pub label: Bipartition,
    pub jordan_type: Option<Partition>,
    pub tally: u64,
    pub expected: u64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CensusReport {
    pub cone: Cone,
    pub n: u32,
    pub q: u32,
    pub enumerated: u64,
    pub points: u64,
    pub expected_points: u64,
    pub lines: Vec<CensusLine>,
    pub violation_count: u64,
    pub violations: Vec<String>,
    pub passed: bool,
}

impl CensusReport {
    pub fn failures(&self) -> impl Iterator<Item = &CensusLine> {
        self.lines.iter().filter(|l| !l.pass)
    }

    pub fn lines_of(&self, kind: LineKind) -> impl Iterator<Item = &CensusLine> {
        self.lines.iter().filter(move |l| l.kind == kind)
    }

    pub fn tally(&self, kind: LineKind, label: &Bipartition) -> Option<u64> {
        self.lines_of(kind).find(|l| &l.label == label).map(|l| l.tally)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("kind,label_mu,label_nu,jordan_type,tally,expected,pass\n");
        for l in &self.lines {
            let jt = l.jordan_type.as_ref().map(|j| j.to_string()).unwrap_or_default();
            s.push_str(&format!(
                "{},\"{}\",\"{}\",\"{}\",{},{},{}\n",
                l.kind.name(),
                l.label.mu,
                l.label.nu,
                jt,
                l.tally,
                l.expected,
                l.pass
            ));
        }
        s
    }
}

const VIOLATION_SAMPLES: usize = 16;

#[derive(Clone, Default)]
struct Tally {
    enumerated: u64,
    points: u64,
    orbit: Vec<u64>,
    jordan: BTreeMap<Partition, u64>,
    violations: BTreeSet<String>,
    violation_count: u64,
}

impl Tally {
    fn new(labels: usize) -> Self {
        Tally { orbit: vec![0; labels], ..Default::default() }
    }

    fn violate(&mut self, msg: String) {
        self.violation_count += 1;
        self.violations.insert(msg);
        while self.violations.len() > VIOLATION_SAMPLES {
            self.violations.pop_last();
        }
    }

    fn merge(mut self, o: Tally) -> Tally {
        self.enumerated += o.enumerated;
        self.points += o.points;
        for (a, b) in self.orbit.iter_mut().zip(&o.orbit) {
            *a += b;
        }
        for (k, c) in o.jordan {
            *self.jordan.entry(k).or_insert(0) += c;
        }
        self.violation_count += o.violation_count;
        self.violations.extend(o.violations);
        while self.violations.len() > VIOLATION_SAMPLES {
            self.violations.pop_last();
        }
        self
    }
}

const BLOCK: u64 = 256;

/// Splits `0..count` into contiguous blocks, tallies each independently and sums.
fn parallel_tally<F>(count: u64, labels: usize, work: F) -> Tally
where
    F: Fn(Range<u64>, &mut Tally) + Sync,
{
    let blocks = count.div_ceil(BLOCK);
    (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut t = Tally::new(labels);
            work(b * BLOCK..((b + 1) * BLOCK).min(count), &mut t);
            t
        })
        .reduce(|| Tally::new(labels), Tally::merge)
}

fn pow_u128(q: u32, e: u32) -> u128 {
    (q as u128).checked_pow(e).unwrap_or(u128::MAX)
}

/// Number of matrices (or pairs) a census enumerates: q^{2n²+n} for every cone.
pub fn census_size(n: u32, q: u32) -> u128 {
    pow_u128(q, 2 * n * n + n)
}

fn eval_u64(p: &IntPolynomial, q: u32) -> u64 {
    u64::try_from(p.evaluate(q as i64)).expect("point count fits in u64")
}

fn setup(cone: Cone, n: u32, q: u32, override_budget: bool) -> Result<Field, ConeError> {
    let field = Field::new(q)?;
    if cone.needs_char_two() != field.is_char_two() {
        return Err(ConeError::Unsupported { cone, q });
    }
    if n == 0 || n > 16 {
        return Err(ConeError::Rank(n));
    }
    let size = census_size(n, q);
    if size > u64::MAX as u128 || (size > BUDGET && !override_budget) {
        return Err(ConeError::Budget { points: size, limit: BUDGET });
    }
    Ok(field)
}

/// Enumerates every point of a cone over 𝔽_q, classifies it, and compares
/// orbit and piece tallies with the point-count polynomials.
pub fn run_census(cone: Cone, n: u32, q: u32, override_budget: bool) -> Result<CensusReport, ConeError> {
    let field = setup(cone, n, q, override_budget)?;
    let cls = Classifier::new(n);
    let nn = n as usize;
    let tally = match cone {
        Cone::Exotic => exotic_tally(field, nn, &cls),
        Cone::Sp2 => sp2_tally(field, nn, &cls),
        Cone::O2 => o2_tally(field, nn, &cls),
        Cone::SpOdd => odd_tally(&FormContext::symplectic(field, nn), &cls, ConeTag::COdd),
        Cone::OOdd => odd_tally(&FormContext::orthogonal(field, nn), &cls, ConeTag::BOdd),
    };
    Ok(assemble(cone, n, q, &cls, tally))
}

fn exotic_tally(field: Field, n: usize, cls: &Classifier) -> Tally {
    let ctx = FormContext::symplectic(field, n);
    let tctx = FormContext::tilde(field, n).expect("characteristic 2");
    let basis = LieBasis::char_two(field, n, false);
    let qv = (field.q() as u64).pow(2 * n as u32);
    let labels = cls.labels(ConeTag::Exotic);
    parallel_tally(basis.size() as u64, labels.len(), |range, t| {
        let mut x = MatrixFq::zeros(field, 2 * n, 2 * n);
        let mut y = x.clone();
        let mut yt = MatrixFq::zeros(field, 2 * n + 1, 2 * n + 1);
        let mut v = vec![0u8; 2 * n];
        let mut scratch = Scratch::new(field, 2 * n);
        for xi in range {
            basis.write(xi, &mut x);
            t.enumerated += qv;
            if !scratch.nilpotent(&x) {
                continue;
            }
            let x_type = nilpotent_type(&x).expect("nilpotent");
            let min_data = jordan_min_data(&x);
            for vi in 0..qv {
                write_vector(field, vi, &mut v);
                write_psi(&v, &x, &mut y);
                t.points += 1;
                let idx = match cls.sp_char2_index(&ctx, &y) {
                    Ok(i) => i,
                    Err(e) => {
                        t.violate(format!("unclassified point: {e}"));
                        continue;
                    }
                };
                t.orbit[idx] += 1;
                let bp = &labels[idx];
                *t.jordan.entry(phi_c(bp)).or_insert(0) += 1;
                if let Err(e) = check_kato(bp, &x_type) {
                    t.violate(e.to_string());
                }
                let found = jordan_min(&ctx, &min_data, &v);
                if found != Some(jordan_minimum_expected(bp)) {
                    t.violate(format!("jordan minimum {found:?} on orbit {bp}"));
                }
                write_psi_tilde(&v, &x, &mut yt);
                let yt_type = nilpotent_type(&yt);
                if yt_type.as_ref() != Ok(&phi_b2(bp)) || !in_o_vtilde(&tctx, &yt) {
                    t.violate(format!("Ψ̃ image of orbit {bp} has type {yt_type:?}"));
                }
            }
        }
    })
}

fn sp2_tally(field: Field, n: usize, cls: &Classifier) -> Tally {
    let ctx = FormContext::symplectic(field, n);
    let basis = LieBasis::char_two(field, n, true);
    let labels = cls.labels(ConeTag::C2);
    parallel_tally(basis.size() as u64, labels.len(), |range, t| {
        let mut y = MatrixFq::zeros(field, 2 * n, 2 * n);
        let mut scratch = Scratch::new(field, 2 * n);
        for i in range {
            basis.write(i, &mut y);
            t.enumerated += 1;
            if !scratch.nilpotent(&y) {
                continue;
            }
            t.points += 1;
            match cls.sp_char2_index(&ctx, &y) {
                Ok(idx) => {
                    t.orbit[idx] += 1;
                    *t.jordan.entry(phi_c(&labels[idx])).or_insert(0) += 1;
                }
                Err(e) => t.violate(format!("unclassified point: {e}")),
            }
        }
    })
}

fn o2_tally(field: Field, n: usize, cls: &Classifier) -> Tally {
    let tctx = FormContext::tilde(field, n).expect("characteristic 2");
    let basis = LieBasis::char_two(field, n, false);
    let qv = (field.q() as u64).pow(2 * n as u32);
    let labels = cls.labels(ConeTag::B2);
    parallel_tally(basis.size() as u64, labels.len(), |range, t| {
        let mut x = MatrixFq::zeros(field, 2 * n, 2 * n);
        let mut y = MatrixFq::zeros(field, 2 * n + 1, 2 * n + 1);
        let mut v = vec![0u8; 2 * n];
        let mut sx = Scratch::new(field, 2 * n);
        let mut sy = Scratch::new(field, 2 * n + 1);
        for xi in range {
            basis.write(xi, &mut x);
            let x_nil = sx.nilpotent(&x);
            for vi in 0..qv {
                write_vector(field, vi, &mut v);
                write_psi_tilde(&v, &x, &mut y);
                t.enumerated += 1;
                let y_nil = sy.nilpotent(&y);
                if y_nil != x_nil {
                    t.violate(format!("Ψ̃ nilpotency {y_nil} differs from x nilpotency {x_nil}"));
                }
                if !y_nil {
                    continue;
                }
                t.points += 1;
                match cls.o_char2_index(&tctx, &y) {
                    Ok(idx) => {
                        t.orbit[idx] += 1;
                        *t.jordan.entry(phi_b2(&labels[idx])).or_insert(0) += 1;
                    }
                    Err(e) => t.violate(format!("unclassified point: {e}")),
                }
            }
        }
    })
}

fn odd_tally(ctx: &FormContext, cls: &Classifier, tag: ConeTag) -> Tally {
    let field = ctx.field;
    let basis = LieBasis::from_form(ctx);
    let d = ctx.dim;
    let labels = cls.labels(tag);
    parallel_tally(basis.size() as u64, labels.len(), |range, t| {
        let mut y = MatrixFq::zeros(field, d, d);
        let mut scratch = Scratch::new(field, d);
        for i in range {
            basis.write(i, &mut y);
            t.enumerated += 1;
            if !scratch.nilpotent(&y) {
                continue;
            }
            t.points += 1;
            let table = if tag == ConeTag::COdd { &cls.by_c_type } else { &cls.by_b_type };
            match Classifier::type_index(table, &y) {
                Ok(idx) => {
                    t.orbit[idx] += 1;
                    *t.jordan.entry(nilpotent_type(&y).expect("nilpotent")).or_insert(0) += 1;
                }
                Err(e) => t.violate(format!("Jordan type outside the expected class: {e}")),
            }
        }
    })
}

/// Sums orbit tallies over the fibres of a collapse.
fn group_lines(
    kind: LineKind,
    labels: &[Bipartition],
    counts: &[u64],
    targets: &[Bipartition],
    collapse: impl Fn(&Bipartition) -> Bipartition,
    expected: impl Fn(&Bipartition) -> IntPolynomial,
    q: u32,
) -> Vec<CensusLine> {
    let mut sums: HashMap<Bipartition, u64> = HashMap::new();
    for (bp, &c) in labels.iter().zip(counts) {
        *sums.entry(collapse(bp)).or_insert(0) += c;
    }
    targets
        .iter()
        .map(|tg| {
            let tally = sums.get(tg).copied().unwrap_or(0);
            let expected = eval_u64(&expected(tg), q);
            CensusLine {
                kind,
                label: tg.clone(),
                jordan_type: None,
                tally,
                expected,
                pass: tally == expected,
            }
        })
        .collect()
}

fn assemble(cone: Cone, n: u32, q: u32, cls: &Classifier, t: Tally) -> CensusReport {
    let tag = cone.tag();
    let labels = cls.labels(tag);
    let all = cls.labels(ConeTag::Exotic);
    let orbit_poly = |bp: &Bipartition| -> IntPolynomial {
        match cone {
            Cone::Exotic | Cone::Sp2 => exotic_point_poly(bp),
            Cone::O2 => piece_poly(PieceKind::Tilde, bp).expect("label in 𝒬^{B,2}"),
            Cone::SpOdd => type_c_point_poly(bp).expect("label in 𝒬^C"),
            Cone::OOdd => type_b_point_poly(bp).expect("label in 𝒬^B"),
        }
    };
    let mut lines: Vec<CensusLine> = labels
        .iter()
        .zip(&t.orbit)
        .map(|(bp, &tally)| {
            let expected = eval_u64(&orbit_poly(bp), q);
            let jordan_type = match cone {
                Cone::Exotic | Cone::Sp2 | Cone::SpOdd => phi_c(bp),
                Cone::O2 => phi_b2(bp),
                Cone::OOdd => phi_b(bp),
            };
            CensusLine {
                kind: LineKind::Orbit,
                label: bp.clone(),
                jordan_type: Some(jordan_type),
                tally,
                expected,
                pass: tally == expected,
            }
        })
        .collect();
    let c_dist = cls.labels(ConeTag::COdd);
    let b_dist = cls.labels(ConeTag::BOdd);
    let special: Vec<Bipartition> = all.iter().filter(|b| is_special(b)).cloned().collect();
    let b2 = cls.labels(ConeTag::B2);
    let typec = |bp: &Bipartition| type_c_point_poly(bp).expect("label in 𝒬^C");
    let typeb = |bp: &Bipartition| type_b_point_poly(bp).expect("label in 𝒬^B");
    let specialp = |bp: &Bipartition| piece_poly(PieceKind::Special, bp).expect("special label");
    let tildep = |bp: &Bipartition| piece_poly(PieceKind::Tilde, bp).expect("label in 𝒬^{B,2}");
    if matches!(cone, Cone::Exotic | Cone::Sp2) {
        // Jordan type alone determines the type-C piece
        for bp in c_dist {
            let lambda = phi_c(bp);
            let tally = t.jordan.get(&lambda).copied().unwrap_or(0);
            let expected = eval_u64(&typec(bp), q);
            lines.push(CensusLine {
                kind: LineKind::Jordan,
                label: bp.clone(),
                jordan_type: Some(lambda),
                tally,
                expected,
                pass: tally == expected,
            });
        }
    }
    match cone {
        Cone::Exotic => {
            lines.extend(group_lines(LineKind::PieceC, labels, &t.orbit, c_dist, collapse_c, typec, q));
            lines.extend(group_lines(LineKind::PieceB, labels, &t.orbit, b_dist, collapse_b, typeb, q));
            lines.extend(group_lines(LineKind::Special, labels, &t.orbit, &special, collapse_special, specialp, q));
            lines.extend(group_lines(LineKind::Tilde, labels, &t.orbit, b2, collapse_tilde, tildep, q));
        }
        Cone::Sp2 => {
            lines.extend(group_lines(LineKind::Special, labels, &t.orbit, &special, collapse_special, specialp, q));
            lines.extend(group_lines(LineKind::Tilde, labels, &t.orbit, b2, collapse_tilde, tildep, q));
        }
        Cone::O2 => {
            lines.extend(group_lines(LineKind::PieceB, labels, &t.orbit, b_dist, collapse_b, typeb, q));
            lines.extend(group_lines(LineKind::Special, labels, &t.orbit, &special, collapse_special, specialp, q));
        }
        Cone::SpOdd | Cone::OOdd => {}
    }
    let expected_points = u64::try_from(pow_u128(q, 2 * n * n)).expect("fits");
    let summed: u64 = t.orbit.iter().sum();
    let mut violations: Vec<String> = t.violations.into_iter().collect();
    let mut violation_count = t.violation_count;
    if summed != t.points {
        violation_count += 1;
        violations.push(format!("orbit tallies sum to {summed}, not {}", t.points));
    }
    let passed = violation_count == 0 && t.points == expected_points && lines.iter().all(|l| l.pass);
    CensusReport {
        cone,
        n,
        q,
        enumerated: t.enumerated,
        points: t.points,
        expected_points,
        lines,
        violation_count,
        violations,
        passed,
    }
}

/// All points of 𝔑(𝔽_q) in enumeration order.
pub fn enumerate_exotic(field: Field, n: usize) -> Result<Vec<ExoticPoint>, ConeError> {
    need_char_two(field)?;
    let size = census_size(n as u32, field.q());
    if size > BUDGET {
        return Err(ConeError::Budget { points: size, limit: BUDGET });
    }
    let basis = LieBasis::char_two(field, n, false);
    let qv = (field.q() as u64).pow(2 * n as u32);
    let mut scratch = Scratch::new(field, 2 * n);
    let mut out = Vec::new();
    for xi in 0..basis.size() as u64 {
        let x = basis.element(xi);
        if !scratch.nilpotent(&x) {
            continue;
        }
        for vi in 0..qv {
            let mut v = vec![0; 2 * n];
            write_vector(field, vi, &mut v);
            out.push(ExoticPoint { v, x: x.clone() });
        }
    }
    Ok(out)
}

/// A uniformly random point of 𝔑(𝔽_q).
pub fn random_exotic(field: Field, n: usize, rng: &mut impl Rng) -> ExoticPoint {
    let basis = LieBasis::char_two(field, n, false);
    let mut scratch = Scratch::new(field, 2 * n);
    let q = field.q() as u8;
    loop {
        let mut x = MatrixFq::zeros(field, 2 * n, 2 * n);
        for b in &basis.elems {
            let c = rng.gen_range(0..q);
            for &(k, val) in b {
                x.data[k] = field.add(x.data[k], field.mul(c, val));
            }
        }
        if scratch.nilpotent(&x) {
            let v = (0..2 * n).map(|_| rng.gen_range(0..q)).collect();
            return ExoticPoint { v, x };
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BundleLine {
    /// "E" for the vector bundle, "scriptE" for the Ψ̃-side bundle.
    pub kind: String,
    pub label: Bipartition,
    pub count: u64,
    /// Σ over (ρ;σ) ⪯ (μ;ν) of orbit tallies (E) or the E count (scriptE).
    pub reference: u64,
    /// q^{2|μ|} · tally(∅; μ+ν) (E) or the polynomial sum (scriptE).
    pub expected: u64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BundleReport {
    pub n: u32,
    pub q: u32,
    pub points: u64,
    pub pointwise_mismatches: u64,
    pub lines: Vec<BundleLine>,
    pub passed: bool,
}

/// Counts 𝔼_{μ;ν} and Ψ̃⁻¹(𝓔_{μ;ν}) by their defining conditions over all
/// of 𝔑(𝔽_q), and compares with orbit tallies and with each other.
pub fn bundle_check(n: u32, q: u32) -> Result<BundleReport, ConeError> {
    let field = setup(Cone::Exotic, n, q, false)?;
    let nn = n as usize;
    let ctx = FormContext::symplectic(field, nn);
    let tctx = FormContext::tilde(field, nn)?;
    let cls = Classifier::new(n);
    let all = cls.labels(ConeTag::Exotic).to_vec();
    let b2 = cls.labels(ConeTag::B2).to_vec();
    let points = enumerate_exotic(field, nn)?;
    let mut orbit = vec![0u64; all.len()];
    let mut e_count = vec![0u64; all.len()];
    let mut se_count = vec![0u64; b2.len()];
    let mut mismatches = 0;
    let mut cache: Option<(MatrixFq, Vec<Option<BundleConditions>>, Vec<Option<BundleConditions>>)> = None;
    for p in &points {
        if cache.as_ref().map(|c| &c.0) != Some(&p.x) {
            let e = all
                .iter()
                .map(|t| BundleConditions::new(&ctx, &p.x, t, false))
                .collect::<Result<Vec<_>, _>>()?;
            let se = b2
                .iter()
                .map(|t| BundleConditions::new(&ctx, &p.x, t, true))
                .collect::<Result<Vec<_>, _>>()?;
            cache = Some((p.x.clone(), e, se));
        }
        let (_, e_conds, se_conds) = cache.as_ref().unwrap();
        let label = cls.classify_exotic_char2(&ctx, p)?.bp;
        let b2_label = cls.classify_o_char2(&tctx, &psi_tilde(p)?)?.bp;
        orbit[all.iter().position(|b| b == &label).unwrap()] += 1;
        for (k, t) in all.iter().enumerate() {
            let inside = e_conds[k].as_ref().is_some_and(|c| c.holds(&p.v));
            e_count[k] += inside as u64;
            if inside != preceq(&label, t).expect("equal weights") {
                mismatches += 1;
            }
        }
        for (k, t) in b2.iter().enumerate() {
            let inside = se_conds[k].as_ref().is_some_and(|c| c.holds(&p.v));
            se_count[k] += inside as u64;
            if inside != preceq(&b2_label, t).expect("equal weights") {
                mismatches += 1;
            }
        }
    }
    let tally_of = |bp: &Bipartition| orbit[all.iter().position(|b| b == bp).unwrap()];
    let mut lines = Vec::new();
    for (k, t) in all.iter().enumerate() {
        let reference: u64 = all
            .iter()
            .filter(|r| preceq(r, t).expect("equal weights"))
            .map(tally_of)
            .sum();
        let base = Bipartition::new(Partition::empty(), add_parts(&t.mu, &t.nu).expect("sum"));
        let expected = (q as u64).pow(2 * t.mu.weight()) * tally_of(&base);
        let count = e_count[k];
        lines.push(BundleLine {
            kind: "E".into(),
            label: t.clone(),
            count,
            reference,
            expected,
            pass: count == reference && count == expected,
        });
    }
    for (k, t) in b2.iter().enumerate() {
        let e = e_count[all.iter().position(|b| b == t).unwrap()];
        let expected = eval_u64(&piece_poly(PieceKind::E, t).expect("label"), q);
        let count = se_count[k];
        lines.push(BundleLine {
            kind: "scriptE".into(),
            label: t.clone(),
            count,
            reference: e,
            expected,
            pass: count == e && count == expected,
        });
    }
    let passed = mismatches == 0 && lines.iter().all(|l| l.pass);
    Ok(BundleReport { n, q, points: points.len() as u64, pointwise_mismatches: mismatches, lines, passed })
}

/// Which adaptedness condition a filtration satisfies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum FiltrationKind {
    B,
    C,
}

impl FromStr for FiltrationKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "B" | "b" => Ok(FiltrationKind::B),
            "C" | "c" => Ok(FiltrationKind::C),
            _ => Err(format!("unknown filtration kind {s}")),
        }
    }
}

/// A ℤ-filtration V_{≥a}, stored for |a| ≤ top; constant outside that window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Filtration {
    pub lambda: Partition,
    pub top: i64,
    levels: Vec<Subspace>,
}

impl Filtration {
    pub fn level(&self, a: i64) -> &Subspace {
        let a = a.clamp(-self.top, self.top);
        &self.levels[(a + self.top) as usize]
    }

    fn set(&mut self, a: i64, s: Subspace) {
        self.levels[(a + self.top) as usize] = s;
    }

    pub fn dims(&self) -> Vec<(i64, usize)> {
        (-self.top..=self.top).map(|a| (a, self.level(a).dim())).collect()
    }
}

/// Parts equal to λ₁ lowered by 2 (dropping zeros), re-sorted.
pub fn lambda_prime(l: &Partition) -> Partition {
    let top = l.largest();
    Partition::from_unsorted(
        l.parts()
            .iter()
            .map(|&p| if p == top { p - 2 } else { p })
            .filter(|&p| p > 0)
            .collect(),
    )
}

/// One recursion step on U/L with U = L^⊥: the lift of W^λ to U.
fn w_step(
    ctx: &FormContext,
    p: &ExoticPoint,
    lambda: &Partition,
    kind: FiltrationKind,
    l: &Subspace,
    u: &Subspace,
) -> Result<Subspace, ConeError> {
    let l1 = lambda.largest();
    if l1 < 2 {
        return Err(ConeError::Precondition(format!("largest part of {lambda} is below 2")));
    }
    if !u.contains(&p.v) {
        return Err(ConeError::Precondition("v is not in the current perpendicular".into()));
    }
    let mut w = l.sum(&u.image(&p.x.pow(l1 - 1)));
    let with_vector = match kind {
        FiltrationKind::C => l1 % 2 == 0,
        FiltrationKind::B => l1 % 2 == 1,
    };
    if with_vector {
        w = w.with_vector(&p.x.pow(l1 / 2 - 1).mul_vec(&p.v));
    }
    let k = multiplicity(lambda, l1);
    if w.dim() != l.dim() + k {
        return Err(ConeError::Postcondition(format!(
            "W for {lambda} has dimension {}, expected {k}",
            w.dim() - l.dim()
        )));
    }
    if !w.is_isotropic(ctx) {
        return Err(ConeError::Postcondition(format!("W for {lambda} is not isotropic")));
    }
    if !l.contains_subspace(&w.image(&p.x)) {
        return Err(ConeError::Postcondition(format!("W for {lambda} is not killed by x")));
    }
    Ok(w)
}

fn w_subspace(ctx: &FormContext, p: &ExoticPoint, lambda: &Partition, kind: FiltrationKind) -> Result<Subspace, ConeError> {
    let f = ctx.field;
    w_step(ctx, p, lambda, kind, &Subspace::zero(f, ctx.dim), &Subspace::full(f, ctx.dim))
}

/// W^λ_{(v,x)} for the type-C recursion.
pub fn w_subspace_c(ctx: &FormContext, p: &ExoticPoint, lambda: &Partition) -> Result<Subspace, ConeError> {
    w_subspace(ctx, p, lambda, FiltrationKind::C)
}

/// W^λ_{(v,x)} for the type-B recursion.
pub fn w_subspace_b(ctx: &FormContext, p: &ExoticPoint, lambda: &Partition) -> Result<Subspace, ConeError> {
    w_subspace(ctx, p, lambda, FiltrationKind::B)
}

/// Recursive construction for a given λ; returns the filtration and the
/// number of W steps taken. Postconditions are not checked here.
fn construct_filtration(
    ctx: &FormContext,
    p: &ExoticPoint,
    kind: FiltrationKind,
    lambda: &Partition,
) -> Result<(Filtration, usize), ConeError> {
    let f = ctx.field;
    let top = lambda.largest() as i64 + 1;
    let mut filt = Filtration {
        lambda: lambda.clone(),
        top,
        levels: vec![Subspace::zero(f, ctx.dim); (2 * top + 1) as usize],
    };
    let mut l = Subspace::zero(f, ctx.dim);
    let mut u = Subspace::full(f, ctx.dim);
    let mut lam = lambda.clone();
    let (mut lo, mut hi) = (-top, top);
    let mut steps = 0;
    loop {
        let l1 = lam.largest() as i64;
        let (upper, lower) = (l1.max(1), (1 - l1).min(0));
        for a in lo..=hi {
            if a >= upper {
                filt.set(a, l.clone());
            } else if a <= lower {
                filt.set(a, u.clone());
            }
        }
        if l1 <= 1 {
            break;
        }
        let w = w_step(ctx, p, &lam, kind, &l, &u)?;
        steps += 1;
        u = w.perp(ctx);
        l = w;
        lam = lambda_prime(&lam);
        (lo, hi) = (2 - l1, l1 - 1);
    }
    Ok((filt, steps))
}

/// Checks nesting, V_{≥1-a} = (V_{≥a})^⊥ and the prescribed dimensions.
pub fn check_lambda_filtration(ctx: &FormContext, filt: &Filtration) -> Result<(), String> {
    let t = filt.top;
    for a in -t..=t {
        let s = filt.level(a);
        if !s.contains_subspace(filt.level(a + 1)) {
            return Err(format!("V_≥{} is not contained in V_≥{a}", a + 1));
        }
        if &s.perp(ctx) != filt.level(1 - a) {
            return Err(format!("V_≥{} is not the perpendicular of V_≥{a}", 1 - a));
        }
        let want = lambda_filtration_dim(&filt.lambda, a) as usize;
        if s.dim() != want {
            return Err(format!("dim V_≥{a} = {}, expected {want}", s.dim()));
        }
    }
    Ok(())
}

/// v ∈ V_{≥1} (C) or V_{≥2} (B), and x V_{≥a} ⊆ V_{≥a+2} for all a.
pub fn is_adapted(p: &ExoticPoint, kind: FiltrationKind, filt: &Filtration) -> bool {
    let start = match kind {
        FiltrationKind::C => 1,
        FiltrationKind::B => 2,
    };
    filt.level(start).contains(&p.v)
        && (-filt.top..=filt.top).all(|a| filt.level(a + 2).contains_subspace(&filt.level(a).image(&p.x)))
}

/// The λ attached to a point: Φ^C or Φ^B of its exotic label.
pub fn filtration_lambda(bp: &Bipartition, kind: FiltrationKind) -> Partition {
    match kind {
        FiltrationKind::C => phi_c(bp),
        FiltrationKind::B => phi_b(bp),
    }
}

/// The unique adapted λ-filtration, with all postconditions checked.
pub fn build_filtration(
    ctx: &FormContext,
    cls: &Classifier,
    p: &ExoticPoint,
    kind: FiltrationKind,
) -> Result<Filtration, ConeError> {
    let label = cls.classify_exotic_char2(ctx, p)?.bp;
    let lambda = filtration_lambda(&label, kind);
    let (filt, _) = construct_filtration(ctx, p, kind, &lambda)?;
    check_lambda_filtration(ctx, &filt).map_err(ConeError::Postcondition)?;
    if !is_adapted(p, kind, &filt) {
        return Err(ConeError::Postcondition(format!("filtration for {label} is not adapted")));
    }
    Ok(filt)
}

/// Replaces a level V_{≥a} (a ≥ 1), together with the equal levels just
/// below it, by a nearby subspace; the mirrored levels V_{≥1-c} are reset to
/// its perpendicular. Returns (valid candidates, adapted candidates).
pub fn perturbation_check(
    ctx: &FormContext,
    p: &ExoticPoint,
    kind: FiltrationKind,
    filt: &Filtration,
    attempts: usize,
    rng: &mut impl Rng,
) -> (u64, u64) {
    let f = ctx.field;
    let q = f.q() as u8;
    let (mut valid, mut adapted) = (0, 0);
    for a in 1..=filt.top {
        let (above, s) = (filt.level(a + 1), filt.level(a));
        if s.dim() == above.dim() {
            continue;
        }
        let mut b = a - 1;
        while b > -filt.top && filt.level(b) == s {
            b -= 1;
        }
        let below = filt.level(b);
        if b < 0 || below == s {
            continue;
        }
        // s = above ⊕ span(extras)
        let mut base = above.clone();
        let mut extras = Vec::new();
        for b in s.basis() {
            if !base.contains(b) {
                base = base.with_vector(b);
                extras.push(b.clone());
            }
        }
        for _ in 0..attempts {
            let drop = rng.gen_range(0..extras.len());
            let fresh = loop {
                let mut w = vec![0u8; ctx.dim];
                for b in below.basis() {
                    let c = rng.gen_range(0..q);
                    for (x, y) in w.iter_mut().zip(b) {
                        *x = f.add(*x, f.mul(c, *y));
                    }
                }
                if !s.contains(&w) {
                    break w;
                }
            };
            let mut gens = above.basis().to_vec();
            gens.extend(extras.iter().enumerate().filter(|&(k, _)| k != drop).map(|(_, e)| e.clone()));
            gens.push(fresh);
            let moved = Subspace::span(f, ctx.dim, &gens);
            let mut cand = filt.clone();
            let perp = moved.perp(ctx);
            for c in b + 1..=a {
                cand.set(1 - c, perp.clone());
                cand.set(c, moved.clone());
            }
            if check_lambda_filtration(ctx, &cand).is_ok() {
                valid += 1;
                if is_adapted(p, kind, &cand) {
                    adapted += 1;
                }
            }
        }
    }
    (valid, adapted)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FiltrationReport {
    pub n: u32,
    pub q: u32,
    pub kind: FiltrationKind,
    pub sampled: bool,
    pub points: u64,
    pub w_checks: u64,
    pub perturbation_candidates: u64,
    pub perturbations_adapted: u64,
    pub failure_count: u64,
    pub failures: Vec<String>,
    pub passed: bool,
}

/// Builds and verifies the adapted filtration for every point of 𝔑(𝔽_q)
/// (or `sample` random points), with perturbation spot checks.
pub fn filtration_check(
    n: u32,
    q: u32,
    kind: FiltrationKind,
    sample: Option<u64>,
    seed: u64,
    perturb_attempts: usize,
) -> Result<FiltrationReport, ConeError> {
    let field = Field::new(q)?;
    need_char_two(field)?;
    if n == 0 || n > 16 {
        return Err(ConeError::Rank(n));
    }
    let nn = n as usize;
    let points = match sample {
        None => enumerate_exotic(field, nn)?,
        Some(k) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..k).map(|_| random_exotic(field, nn, &mut rng)).collect()
        }
    };
    let ctx = FormContext::symplectic(field, nn);
    let cls = Classifier::new(n);
    let results: Vec<(Result<usize, String>, u64, u64)> = points
        .par_iter()
        .enumerate()
        .map(|(i, p)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (i as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
            let built = cls
                .classify_exotic_char2(&ctx, p)
                .map(|l| filtration_lambda(&l.bp, kind))
                .and_then(|lambda| construct_filtration(&ctx, p, kind, &lambda))
                .map_err(|e| e.to_string());
            match built {
                Err(e) => (Err(e), 0, 0),
                Ok((filt, steps)) => {
                    if let Err(e) = check_lambda_filtration(&ctx, &filt) {
                        return (Err(e), 0, 0);
                    }
                    if !is_adapted(p, kind, &filt) {
                        return (Err("filtration is not adapted".into()), 0, 0);
                    }
                    let (valid, adapted) = perturbation_check(&ctx, p, kind, &filt, perturb_attempts, &mut rng);
                    (Ok(steps), valid, adapted)
                }
            }
        })
        .collect();
    let mut report = FiltrationReport {
        n,
        q,
        kind,
        sampled: sample.is_some(),
        points: points.len() as u64,
        w_checks: 0,
        perturbation_candidates: 0,
        perturbations_adapted: 0,
        failure_count: 0,
        failures: Vec::new(),
        passed: false,
    };
    for (i, (r, valid, adapted)) in results.into_iter().enumerate() {
        match r {
            Ok(steps) => report.w_checks += steps as u64,
            Err(e) => {
                report.failure_count += 1;
                if report.failures.len() < VIOLATION_SAMPLES {
                    report.failures.push(format!("point {i}: {e}"));
                }
            }
        }
        report.perturbation_candidates += valid;
        report.perturbations_adapted += adapted;
    }
    report.passed = report.failure_count == 0 && report.perturbations_adapted == 0;
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BijectionReport {
    pub map: String,
    pub n: u32,
    pub q: u32,
    pub domain: u64,
    pub image_distinct: u64,
    pub target: u64,
    /// Whether the target was found by enumerating raw matrices.
    pub target_enumerated: bool,
    pub image_in_target: bool,
    pub injective: bool,
    pub onto: bool,
    pub passed: bool,
}

/// Ψ on 𝔑(𝔽_q) against the nilpotent elements of 𝔰𝔭(V)(𝔽_q).
pub fn psi_bijection_check(n: u32, q: u32) -> Result<BijectionReport, ConeError> {
    let field = setup(Cone::Sp2, n, q, false)?;
    let nn = n as usize;
    let ctx = FormContext::symplectic(field, nn);
    let sp = LieBasis::char_two(field, nn, true);
    let qq = field.q() as u64;
    // coordinate of an 𝔰𝔭 element = its entries on and above the skew diagonal
    let coord = |y: &MatrixFq| -> u64 {
        sp.elems.iter().rev().fold(0u64, |acc, b| acc * qq + y.data[b[0].0] as u64)
    };
    let size = sp.size() as usize;
    let mut seen = vec![false; size];
    let (mut domain, mut distinct) = (0u64, 0u64);
    let (mut in_target, mut injective) = (true, true);
    let mut scratch = Scratch::new(field, 2 * nn);
    for p in enumerate_exotic(field, nn)? {
        domain += 1;
        let y = psi(&p)?;
        if !in_sp(&ctx, &y) || !scratch.nilpotent(&y) {
            in_target = false;
            continue;
        }
        let c = coord(&y) as usize;
        if seen[c] {
            injective = false;
        } else {
            seen[c] = true;
            distinct += 1;
        }
    }
    let mut target = 0;
    let mut onto = true;
    let mut y = MatrixFq::zeros(field, 2 * nn, 2 * nn);
    for i in 0..size as u64 {
        sp.write(i, &mut y);
        debug_assert_eq!(coord(&y), i);
        if scratch.nilpotent(&y) {
            target += 1;
            onto &= seen[i as usize];
        }
    }
    Ok(BijectionReport {
        map: "psi".into(),
        n,
        q,
        domain,
        image_distinct: distinct,
        target,
        target_enumerated: true,
        image_in_target: in_target,
        injective,
        onto,
        passed: in_target && injective && onto && distinct == target,
    })
}

/// Raw enumeration of (2n+1)² matrices with zero first column is used
/// when it has at most this many elements.
const RAW_LIMIT: u128 = 1 << 20;

/// Ψ̃ on 𝔑(𝔽_q) against the nilpotent elements of 𝔬(Ṽ)(𝔽_q).
pub fn psi_tilde_bijection_check(n: u32, q: u32) -> Result<BijectionReport, ConeError> {
    let field = setup(Cone::O2, n, q, false)?;
    let nn = n as usize;
    let d = 2 * nn + 1;
    let tctx = FormContext::tilde(field, nn)?;
    let mut image: HashSet<Vec<u8>> = HashSet::new();
    let (mut domain, mut in_target, mut injective) = (0u64, true, true);
    let mut scratch = Scratch::new(field, d);
    for p in enumerate_exotic(field, nn)? {
        domain += 1;
        let y = psi_tilde(&p)?;
        if !in_o_vtilde(&tctx, &y) || !scratch.nilpotent(&y) {
            in_target = false;
        }
        if !image.insert(y.data) {
            injective = false;
        }
    }
    let raw = pow_u128(q, (d * (d - 1)) as u32);
    let (target, enumerated, onto) = if raw <= RAW_LIMIT {
        let mut y = MatrixFq::zeros(field, d, d);
        let free: Vec<usize> = (0..d * d).filter(|k| k % d != 0).collect();
        let mut v = vec![0u8; free.len()];
        let (mut count, mut onto) = (0u64, true);
        for i in 0..raw as u64 {
            write_vector(field, i, &mut v);
            for (&k, &c) in free.iter().zip(&v) {
                y.data[k] = c;
            }
            if in_o_vtilde(&tctx, &y) && scratch.nilpotent(&y) {
                count += 1;
                onto &= image.contains(&y.data);
            }
        }
        (count, true, onto)
    } else {
        let target = u64::try_from(pow_u128(q, 2 * n * n)).expect("fits");
        (target, false, image.len() as u64 == target)
    };
    let distinct = image.len() as u64;
    Ok(BijectionReport {
        map: "psi_tilde".into(),
        n,
        q,
        domain,
        image_distinct: distinct,
        target,
        target_enumerated: enumerated,
        image_in_target: in_target,
        injective,
        onto,
        passed: in_target && injective && onto && distinct == target,
    })
}

/// Consistency of the odd-characteristic Lie algebra bases with the form.
pub fn lie_algebra_dim(ctx: &FormContext) -> usize {
    let b = LieBasis::from_form(ctx);
    debug_assert!(b.elems.iter().all(|e| {
        let mut m = MatrixFq::zeros(ctx.field, ctx.dim, ctx.dim);
        for &(k, c) in e {
            m.data[k] = c;
        }
        match ctx.kind {
            crate::finitefield::FormKind::Orthogonal => in_o_odd(ctx, &m),
            _ => in_sp(ctx, &m),
        }
    }));
    b.len()
}
