//! Linear algebra over small finite fields, with the fixed Gram matrices
//! used for the symplectic and orthogonal spaces.
//!
//! Elements of 𝔽_{p^s} are bytes `Σ c_i p^i` in the polynomial basis over
//! the fixed modulus. Indices are 0-based: the 1-based basis vector `e_i`
//! is index `i - 1`, and `e₀` of the odd-dimensional orthogonal space is
//! index 0.

use std::sync::OnceLock;

use thiserror::Error;

use crate::combinatorics::Partition;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("unsupported field size {0}")]
    Unsupported(u32),
    #[error("operation needs characteristic 2")]
    NeedsCharTwo,
    #[error("matrix is not nilpotent")]
    NotNilpotent,
    #[error("dimension mismatch: {0} vs {1}")]
    Dimension(usize, usize),
}

pub struct FieldData {
    q: u8,
    p: u8,
    s: u8,
    add: [u8; 256],
    mul: [u8; 256],
    neg: [u8; 16],
    inv: [u8; 16],
}

/// Handle to a statically allocated field table.
#[derive(Clone, Copy)]
pub struct Field(&'static FieldData);

impl std::fmt::Debug for Field {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "F{}", self.0.q)
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.0.q == other.0.q
    }
}
impl Eq for Field {}

/// Characteristic, degree and modulus coefficients (low to high, monic).
fn field_spec(q: u32) -> Option<(u8, u8, &'static [u8])> {
    Some(match q {
        2 => (2, 1, &[0, 1]),
        3 => (3, 1, &[0, 1]),
        5 => (5, 1, &[0, 1]),
        4 => (2, 2, &[1, 1, 1]),
        8 => (2, 3, &[1, 1, 0, 1]),
        16 => (2, 4, &[1, 1, 0, 0, 1]),
        9 => (3, 2, &[1, 0, 1]),
        _ => return None,
    })
}

fn build(q: u32) -> FieldData {
    let (p, s, modulus) = field_spec(q).expect("supported field");
    let digits = |mut e: u32| -> Vec<u32> {
        (0..s)
            .map(|_| {
                let d = e % p as u32;
                e /= p as u32;
                d
            })
            .collect()
    };
    let undigits = |d: &[u32]| -> u8 { d.iter().rev().fold(0u32, |acc, &c| acc * p as u32 + c) as u8 };
    let pm = p as u32;
    let mut add = [0u8; 256];
    let mut mul = [0u8; 256];
    for a in 0..q {
        for b in 0..q {
            let (da, db) = (digits(a), digits(b));
            let sum: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % pm).collect();
            add[(a << 4 | b) as usize] = undigits(&sum);
            // schoolbook product, then reduce by the monic modulus
            let mut prod = vec![0u32; 2 * s as usize];
            for (i, x) in da.iter().enumerate() {
                for (j, y) in db.iter().enumerate() {
                    prod[i + j] = (prod[i + j] + x * y) % pm;
                }
            }
            for k in (s as usize..prod.len()).rev() {
                let c = prod[k];
                if c != 0 {
                    for (j, &m) in modulus.iter().enumerate() {
                        let idx = k - s as usize + j;
                        prod[idx] = (prod[idx] + pm * pm - c * m as u32) % pm;
                    }
                }
            }
            mul[(a << 4 | b) as usize] = undigits(&prod[..s as usize]);
        }
    }
    let mut neg = [0u8; 16];
    let mut inv = [0u8; 16];
    for a in 0..q {
        for b in 0..q {
            if add[(a << 4 | b) as usize] == 0 {
                neg[a as usize] = b as u8;
            }
            if mul[(a << 4 | b) as usize] == 1 {
                inv[a as usize] = b as u8;
            }
        }
    }
    FieldData { q: q as u8, p, s, add, mul, neg, inv }
}

static FIELDS: [OnceLock<FieldData>; 17] = [const { OnceLock::new() }; 17];

impl Field {
    pub fn new(q: u32) -> Result<Field, FieldError> {
        if field_spec(q).is_none() {
            return Err(FieldError::Unsupported(q));
        }
        Ok(Field(FIELDS[q as usize].get_or_init(|| build(q))))
    }

    pub fn q(self) -> u32 {
        self.0.q as u32
    }

    pub fn characteristic(self) -> u32 {
        self.0.p as u32
    }

    pub fn degree(self) -> u32 {
        self.0.s as u32
    }

    pub fn is_char_two(self) -> bool {
        self.0.p == 2
    }

    pub fn is_prime(self) -> bool {
        self.0.s == 1
    }

    #[inline]
    pub fn add(self, a: u8, b: u8) -> u8 {
        self.0.add[(a << 4 | b) as usize]
    }

    #[inline]
    pub fn sub(self, a: u8, b: u8) -> u8 {
        self.add(a, self.0.neg[b as usize])
    }

    #[inline]
    pub fn mul(self, a: u8, b: u8) -> u8 {
        self.0.mul[(a << 4 | b) as usize]
    }

    #[inline]
    pub fn neg(self, a: u8) -> u8 {
        self.0.neg[a as usize]
    }

    pub fn inv(self, a: u8) -> Option<u8> {
        (a != 0).then(|| self.0.inv[a as usize])
    }

    pub fn pow(self, a: u8, e: u32) -> u8 {
        (0..e).fold(1, |acc, _| self.mul(acc, a))
    }

    /// The element `-1`.
    pub fn minus_one(self) -> u8 {
        self.neg(1)
    }

    /// The unique square root in characteristic 2: `a^{2^{s-1}}`.
    pub fn frobenius_sqrt(self, a: u8) -> Result<u8, FieldError> {
        if !self.is_char_two() {
            return Err(FieldError::NeedsCharTwo);
        }
        Ok(self.pow(a, 1 << (self.0.s - 1)))
    }

    pub fn elements(self) -> impl Iterator<Item = u8> {
        0..self.0.q
    }

    pub fn dot(self, a: &[u8], b: &[u8]) -> u8 {
        a.iter().zip(b).fold(0, |acc, (&x, &y)| self.add(acc, self.mul(x, y)))
    }
}

/// Dense matrix over a small field, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct MatrixFq {
    pub field: Field,
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<u8>,
}

impl std::fmt::Debug for MatrixFq {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "{:?} {}x{}", self.field, self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "{:?}", self.row(r))?;
        }
        Ok(())
    }
}

impl MatrixFq {
    pub fn zeros(field: Field, rows: usize, cols: usize) -> Self {
        MatrixFq { field, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(field: Field, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(field: Field, rows: &[Vec<u8>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend_from_slice(r);
        }
        MatrixFq { field, rows: rows.len(), cols, data }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u8 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u8) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[u8] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        let f = self.field;
        MatrixFq {
            field: f,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(&a, &b)| f.add(a, b)).collect(),
        }
    }

    pub fn scale(&self, c: u8) -> Self {
        let f = self.field;
        MatrixFq {
            field: f,
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&a| f.mul(c, a)).collect(),
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut out = Self::zeros(self.field, self.rows, o.cols);
        self.mul_into(o, &mut out);
        out
    }

    /// `out = self · o`; `out` must already have the right shape.
    pub fn mul_into(&self, o: &Self, out: &mut Self) {
        assert_eq!(self.cols, o.rows, "shape mismatch in product");
        let f = self.field;
        let (n, m, k) = (self.rows, o.cols, self.cols);
        if f.is_prime() {
            let p = f.characteristic();
            for i in 0..n {
                for j in 0..m {
                    let mut acc = 0u32;
                    for t in 0..k {
                        acc += self.data[i * k + t] as u32 * o.data[t * m + j] as u32;
                    }
                    out.data[i * m + j] = (acc % p) as u8;
                }
            }
        } else if f.is_char_two() {
            for i in 0..n {
                for j in 0..m {
                    let mut acc = 0u8;
                    for t in 0..k {
                        acc ^= f.mul(self.data[i * k + t], o.data[t * m + j]);
                    }
                    out.data[i * m + j] = acc;
                }
            }
        } else {
            for i in 0..n {
                for j in 0..m {
                    let mut acc = 0u8;
                    for t in 0..k {
                        acc = f.add(acc, f.mul(self.data[i * k + t], o.data[t * m + j]));
                    }
                    out.data[i * m + j] = acc;
                }
            }
        }
    }

    pub fn mul_vec(&self, v: &[u8]) -> Vec<u8> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows).map(|i| self.field.dot(self.row(i), v)).collect()
    }

    pub fn pow(&self, k: u32) -> Self {
        assert!(self.is_square());
        let mut acc = Self::identity(self.field, self.rows);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Reduced row echelon form in place; returns pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let f = self.field;
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(pr) = (r..self.rows).find(|&i| self.get(i, c) != 0) else {
                continue;
            };
            if pr != r {
                for j in 0..self.cols {
                    self.data.swap(pr * self.cols + j, r * self.cols + j);
                }
            }
            let inv = f.inv(self.get(r, c)).unwrap();
            for j in 0..self.cols {
                let v = f.mul(inv, self.get(r, j));
                self.set(r, j, v);
            }
            for i in 0..self.rows {
                let factor = self.get(i, c);
                if i != r && factor != 0 {
                    for j in 0..self.cols {
                        let v = f.sub(self.get(i, j), f.mul(factor, self.get(r, j)));
                        self.set(i, j, v);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    /// Basis of `{v : self·v = 0}`.
    pub fn kernel_basis(&self) -> Vec<Vec<u8>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let f = self.field;
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&fc| {
                let mut v = vec![0u8; self.cols];
                v[fc] = 1;
                for (r, &pc) in pivots.iter().enumerate() {
                    v[pc] = f.neg(m.get(r, fc));
                }
                v
            })
            .collect()
    }

    /// `self^{2^⌈log₂ dim⌉} = 0`, by repeated squaring.
    pub fn is_nilpotent(&self) -> bool {
        assert!(self.is_square());
        let mut cur = self.clone();
        let mut scratch = Self::zeros(self.field, self.rows, self.cols);
        let mut e = 1;
        while e < self.rows {
            cur.mul_into(&cur.clone(), &mut scratch);
            std::mem::swap(&mut cur, &mut scratch);
            e *= 2;
        }
        cur.is_zero()
    }

    /// Block-diagonal nilpotent with one Jordan block per part (superdiagonal ones).
    pub fn nilpotent_jordan(field: Field, l: &Partition) -> Self {
        let d = l.weight() as usize;
        let mut m = Self::zeros(field, d, d);
        let mut start = 0;
        for &b in l.parts() {
            for k in 0..b as usize - 1 {
                m.set(start + k, start + k + 1, 1);
            }
            start += b as usize;
        }
        m
    }
}

pub fn rank(m: &MatrixFq) -> usize {
    m.rank()
}

pub fn kernel_basis(m: &MatrixFq) -> Vec<Vec<u8>> {
    m.kernel_basis()
}

pub fn matrix_power(m: &MatrixFq, k: u32) -> MatrixFq {
    m.pow(k)
}

/// Jordan type from the ranks of successive powers.
pub fn jordan_type_from_ranks(ranks: &[usize]) -> Partition {
    // ranks[k] = rank(m^k), ranks[0] = dim, last entry 0
    let counts: Vec<usize> = ranks.windows(2).map(|w| w[0] - w[1]).collect();
    let mut parts = Vec::new();
    for (k, &c) in counts.iter().enumerate() {
        let next = counts.get(k + 1).copied().unwrap_or(0);
        for _ in 0..c - next {
            parts.push(k as u32 + 1);
        }
    }
    Partition::from_unsorted(parts)
}

pub fn jordan_type(m: &MatrixFq) -> Result<Partition, FieldError> {
    assert!(m.is_square());
    let mut ranks = vec![m.rows];
    let mut cur = MatrixFq::identity(m.field, m.rows);
    while *ranks.last().unwrap() > 0 {
        if ranks.len() > m.rows + 1 {
            return Err(FieldError::NotNilpotent);
        }
        cur = cur.mul(m);
        let r = cur.rank();
        if r == *ranks.last().unwrap() {
            return Err(FieldError::NotNilpotent);
        }
        ranks.push(r);
    }
    Ok(jordan_type_from_ranks(&ranks))
}

/// Bit-packed square matrix over 𝔽₂; row `i` is a `u64` with bit `j` = entry (i,j).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Gf2Matrix {
    pub n: usize,
    pub rows: Vec<u64>,
}

impl Gf2Matrix {
    pub fn zeros(n: usize) -> Self {
        assert!(n <= 64);
        Gf2Matrix { n, rows: vec![0; n] }
    }

    pub fn from_matrix(m: &MatrixFq) -> Self {
        assert!(m.field.q() == 2 && m.is_square());
        let mut g = Self::zeros(m.rows);
        for i in 0..m.rows {
            for j in 0..m.cols {
                if m.get(i, j) == 1 {
                    g.rows[i] |= 1 << j;
                }
            }
        }
        g
    }

    pub fn to_matrix(&self) -> MatrixFq {
        let mut m = MatrixFq::zeros(Field::new(2).unwrap(), self.n, self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                m.set(i, j, (self.rows[i] >> j & 1) as u8);
            }
        }
        m
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut out = Self::zeros(self.n);
        for (i, &r) in self.rows.iter().enumerate() {
            let mut bits = r;
            let mut acc = 0u64;
            while bits != 0 {
                let k = bits.trailing_zeros() as usize;
                acc ^= o.rows[k];
                bits &= bits - 1;
            }
            out.rows[i] = acc;
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(|&r| r == 0)
    }

    /// Rank by word-parallel elimination.
    pub fn rank(&self) -> usize {
        let mut rows = self.rows.clone();
        let mut rank = 0;
        for c in 0..self.n {
            let bit = 1u64 << c;
            let Some(p) = (rank..rows.len()).find(|&i| rows[i] & bit != 0) else {
                continue;
            };
            rows.swap(rank, p);
            let pivot = rows[rank];
            for (i, r) in rows.iter_mut().enumerate() {
                if i != rank && *r & bit != 0 {
                    *r ^= pivot;
                }
            }
            rank += 1;
        }
        rank
    }

    pub fn is_nilpotent(&self) -> bool {
        let mut cur = self.clone();
        let mut e = 1;
        while e < self.n {
            cur = cur.mul(&cur);
            e *= 2;
        }
        cur.is_zero()
    }

    pub fn jordan_type(&self) -> Result<Partition, FieldError> {
        let mut ranks = vec![self.n];
        let mut cur = self.clone();
        loop {
            let r = cur.rank();
            if r == *ranks.last().unwrap() {
                return Err(FieldError::NotNilpotent);
            }
            ranks.push(r);
            if r == 0 {
                break;
            }
            cur = cur.mul(self);
        }
        Ok(jordan_type_from_ranks(&ranks))
    }
}

/// Which bilinear (and quadratic) structure a space carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormKind {
    /// Dimension 2n, alternating form.
    Symplectic,
    /// Dimension 2n+1, split symmetric form (odd characteristic).
    Orthogonal,
    /// Dimension 2n+1 in characteristic 2: `e₀ ⊕ V` with `Q̃(a e₀ + v) = a² + Q(v)`.
    Tilde,
}

#[derive(Debug, Clone)]
pub struct FormContext {
    pub field: Field,
    pub kind: FormKind,
    pub n: usize,
    pub dim: usize,
    pub gram: MatrixFq,
}

impl FormContext {
    pub fn symplectic(field: Field, n: usize) -> Self {
        let dim = 2 * n;
        let mut gram = MatrixFq::zeros(field, dim, dim);
        for i in 0..dim {
            gram.set(i, dim - 1 - i, if i < n { 1 } else { field.minus_one() });
        }
        FormContext { field, kind: FormKind::Symplectic, n, dim, gram }
    }

    pub fn orthogonal(field: Field, n: usize) -> Self {
        let dim = 2 * n + 1;
        let mut gram = MatrixFq::zeros(field, dim, dim);
        for i in 0..dim {
            gram.set(i, dim - 1 - i, 1);
        }
        FormContext { field, kind: FormKind::Orthogonal, n, dim, gram }
    }

    pub fn tilde(field: Field, n: usize) -> Result<Self, FieldError> {
        if !field.is_char_two() {
            return Err(FieldError::NeedsCharTwo);
        }
        let dim = 2 * n + 1;
        let mut gram = MatrixFq::zeros(field, dim, dim);
        for i in 1..dim {
            gram.set(i, dim - i, 1);
        }
        Ok(FormContext { field, kind: FormKind::Tilde, n, dim, gram })
    }

    fn check(&self, v: &[u8]) -> Result<(), FieldError> {
        if v.len() != self.dim {
            return Err(FieldError::Dimension(v.len(), self.dim));
        }
        Ok(())
    }

    pub fn form_eval(&self, v: &[u8], w: &[u8]) -> Result<u8, FieldError> {
        self.check(v)?;
        self.check(w)?;
        Ok(self.form(v, w))
    }

    /// Unchecked `⟨v, w⟩`.
    #[inline]
    pub fn form(&self, v: &[u8], w: &[u8]) -> u8 {
        let f = self.field;
        let d = self.dim;
        // index paired with i by the Gram matrix; e₀ is in the radical on the tilde space
        let (lo, top) = match self.kind {
            FormKind::Tilde => (1, d),
            _ => (0, d - 1),
        };
        let mut acc = 0;
        for i in lo..d {
            let j = top - i;
            let g = self.gram.get(i, j);
            if g != 0 && v[i] != 0 {
                acc = f.add(acc, f.mul(f.mul(v[i], g), w[j]));
            }
        }
        acc
    }

    /// `Q(v) = Σ_{i≤n} a_i a_{2n+1-i}` on V, or `Q̃` on the tilde space.
    pub fn quad_eval(&self, v: &[u8]) -> Result<u8, FieldError> {
        self.check(v)?;
        if !self.field.is_char_two() {
            return Err(FieldError::NeedsCharTwo);
        }
        Ok(self.quad(v))
    }

    #[inline]
    pub fn quad(&self, v: &[u8]) -> u8 {
        let f = self.field;
        let (off, head) = match self.kind {
            FormKind::Tilde => (1, f.mul(v[0], v[0])),
            _ => (0, 0),
        };
        let d = 2 * self.n;
        (0..self.n).fold(head, |acc, i| f.add(acc, f.mul(v[off + i], v[off + d - 1 - i])))
    }

    pub fn basis_vector(&self, i: usize) -> Vec<u8> {
        let mut v = vec![0; self.dim];
        v[i] = 1;
        v
    }
}

/// `Mᵀ G + G M = 0`: the Lie algebra of the isometry group of the form.
fn preserves_form(ctx: &FormContext, m: &MatrixFq) -> bool {
    let a = m.transpose().mul(&ctx.gram);
    let b = ctx.gram.mul(m);
    a.add(&b).is_zero()
}

/// Alternating test for the bilinear form `(v, w) ↦ ⟨m v, w⟩` on the given index range.
fn alternating_on(ctx: &FormContext, m: &MatrixFq, range: std::ops::Range<usize>) -> bool {
    let f = ctx.field;
    let b = m.transpose().mul(&ctx.gram);
    range.clone().all(|i| {
        b.get(i, i) == 0 && range.clone().all(|j| f.add(b.get(i, j), b.get(j, i)) == 0)
    })
}

pub fn in_sp(ctx: &FormContext, m: &MatrixFq) -> bool {
    if ctx.kind != FormKind::Symplectic || m.rows != ctx.dim || !m.is_square() {
        return false;
    }
    if ctx.field.is_char_two() {
        let d = ctx.dim;
        (0..d).all(|i| (0..d).all(|j| m.get(i, j) == m.get(d - 1 - j, d - 1 - i)))
    } else {
        preserves_form(ctx, m)
    }
}

/// Characteristic 2 only: `⟨m v, v⟩ = 0` for all v.
pub fn in_o_v(ctx: &FormContext, m: &MatrixFq) -> bool {
    if !ctx.field.is_char_two() {
        return false;
    }
    let d = ctx.dim;
    in_sp(ctx, m) && (0..d).all(|i| m.get(i, d - 1 - i) == 0)
}

/// Characteristic 2: `m e₀ = 0` and `⟨m v, v⟩ = 0` for v in V.
pub fn in_o_vtilde(ctx: &FormContext, m: &MatrixFq) -> bool {
    if ctx.kind != FormKind::Tilde || m.rows != ctx.dim || !m.is_square() {
        return false;
    }
    (0..ctx.dim).all(|i| m.get(i, 0) == 0) && alternating_on(ctx, m, 1..ctx.dim)
}

/// Odd characteristic orthogonal Lie algebra.
pub fn in_o_odd(ctx: &FormContext, m: &MatrixFq) -> bool {
    ctx.kind == FormKind::Orthogonal && m.rows == ctx.dim && m.is_square() && preserves_form(ctx, m)
}

/// Form-theoretic version of `in_o_v`, used as a cross-check.
pub fn in_o_v_by_form(ctx: &FormContext, m: &MatrixFq) -> bool {
    alternating_on(ctx, m, 0..ctx.dim)
}

/// Subspace of `𝔽_q^dim` stored as a reduced row echelon basis.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Subspace {
    pub field: Field,
    pub ambient: usize,
    basis: Vec<Vec<u8>>,
}

impl Subspace {
    pub fn zero(field: Field, ambient: usize) -> Self {
        Subspace { field, ambient, basis: Vec::new() }
    }

    pub fn full(field: Field, ambient: usize) -> Self {
        let basis = (0..ambient)
            .map(|i| {
                let mut v = vec![0; ambient];
                v[i] = 1;
                v
            })
            .collect();
        Subspace { field, ambient, basis }
    }

    pub fn span(field: Field, ambient: usize, vectors: &[Vec<u8>]) -> Self {
        if vectors.is_empty() {
            return Self::zero(field, ambient);
        }
        let mut m = MatrixFq::from_rows(field, vectors);
        assert_eq!(m.cols, ambient);
        let r = m.rref().len();
        let basis = (0..r).map(|i| m.row(i).to_vec()).collect();
        Subspace { field, ambient, basis }
    }

    pub fn basis(&self) -> &[Vec<u8>] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn sum(&self, o: &Self) -> Self {
        let mut v = self.basis.clone();
        v.extend(o.basis.iter().cloned());
        Self::span(self.field, self.ambient, &v)
    }

    pub fn with_vector(&self, v: &[u8]) -> Self {
        let mut b = self.basis.clone();
        b.push(v.to_vec());
        Self::span(self.field, self.ambient, &b)
    }

    pub fn contains(&self, v: &[u8]) -> bool {
        self.with_vector(v).dim() == self.dim()
    }

    pub fn contains_subspace(&self, o: &Self) -> bool {
        self.sum(o).dim() == self.dim()
    }

    pub fn image(&self, m: &MatrixFq) -> Self {
        let imgs: Vec<Vec<u8>> = self.basis.iter().map(|b| m.mul_vec(b)).collect();
        Self::span(self.field, m.rows, &imgs)
    }

    /// Orthogonal complement for the context's form.
    pub fn perp(&self, ctx: &FormContext) -> Self {
        if self.basis.is_empty() {
            return Self::full(self.field, self.ambient);
        }
        let rows: Vec<Vec<u8>> = self.basis.iter().map(|b| ctx.gram.transpose().mul_vec(b)).collect();
        let m = MatrixFq::from_rows(self.field, &rows);
        Self::span(self.field, self.ambient, &m.kernel_basis())
    }

    pub fn is_isotropic(&self, ctx: &FormContext) -> bool {
        self.basis
            .iter()
            .all(|a| self.basis.iter().all(|b| ctx.form(a, b) == 0))
    }
}
