//! Square matrices over Q(√d) stored as `(A + B√d) / den` with integer matrices `A`, `B`.
//!
//! The representation is canonical: `den > 0`, the gcd of every numerator entry and `den` is 1,
//! and `B` is stored empty when it vanishes. Equality and hashing therefore decide equality of
//! the underlying matrices exactly, which is what word-ball deduplication relies on.

use std::fmt;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::quad::{embed_real, QuadRational};
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QuadMatrix {
    dim: usize,
    d: u32,
    den: BigInt,
    a: Vec<BigInt>,
    b: Vec<BigInt>,
}

impl fmt::Debug for QuadMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "QuadMatrix {}x{} (d = {}, den = {})", self.dim, self.dim, self.d, self.den)?;
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|j| {
                    let k = i * self.dim + j;
                    if self.b.is_empty() || self.b[k].is_zero() {
                        self.a[k].to_string()
                    } else {
                        format!("{}+{}√{}", self.a[k], self.b[k], self.d)
                    }
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl QuadMatrix {
    fn canonical(dim: usize, d: u32, mut a: Vec<BigInt>, mut b: Vec<BigInt>, mut den: BigInt) -> Self {
        debug_assert!(!den.is_zero());
        if b.iter().all(Zero::is_zero) {
            b.clear();
        }
        let mut g = den.clone();
        for x in a.iter().chain(b.iter()) {
            if g.is_one() {
                break;
            }
            if !x.is_zero() {
                g = g.gcd(x);
            }
        }
        if den.is_negative() {
            g = -g;
        }
        if !g.is_one() {
            for x in a.iter_mut().chain(b.iter_mut()) {
                *x /= &g;
            }
            den /= &g;
        }
        QuadMatrix { dim, d, den, a, b }
    }

    /// Canonicalize raw numerators over `den`; `b` may be empty for rational matrices.
    pub(crate) fn from_raw(dim: usize, d: u32, a: Vec<BigInt>, b: Vec<BigInt>, den: BigInt) -> Self {
        Self::canonical(dim, d, a, b, den)
    }

    pub fn identity(dim: usize, d: u32) -> Self {
        let mut a = vec![BigInt::zero(); dim * dim];
        for i in 0..dim {
            a[i * dim + i] = BigInt::one();
        }
        QuadMatrix { dim, d, den: BigInt::one(), a, b: Vec::new() }
    }

    pub fn zeros(dim: usize, d: u32) -> Self {
        QuadMatrix { dim, d, den: BigInt::one(), a: vec![BigInt::zero(); dim * dim], b: Vec::new() }
    }

    /// Build from row-major entries, bringing them to a common denominator.
    pub fn from_entries(dim: usize, d: u32, entries: &[QuadRational]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::Dimension { expected: dim * dim, got: entries.len() });
        }
        if let Some(bad) = entries.iter().find(|e| e.d() != d) {
            return Err(Error::FieldMismatch(d, bad.d()));
        }
        let mut den = BigInt::one();
        for e in entries {
            den = den.lcm(e.den());
        }
        let mut a = Vec::with_capacity(dim * dim);
        let mut b = Vec::with_capacity(dim * dim);
        for e in entries {
            let scale = &den / e.den();
            a.push(e.a() * &scale);
            b.push(e.b() * &scale);
        }
        Ok(Self::canonical(dim, d, a, b, den))
    }

    /// Integer matrix from row-major `i64` entries.
    pub fn from_ints(dim: usize, d: u32, entries: &[i64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::Dimension { expected: dim * dim, got: entries.len() });
        }
        let a = entries.iter().map(|&x| BigInt::from(x)).collect();
        Ok(Self::canonical(dim, d, a, Vec::new(), BigInt::one()))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn den(&self) -> &BigInt {
        &self.den
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_empty()
    }

    pub fn entry(&self, i: usize, j: usize) -> QuadRational {
        let k = i * self.dim + j;
        let b = if self.b.is_empty() { BigInt::zero() } else { self.b[k].clone() };
        QuadRational::normalized_unchecked(self.a[k].clone(), b, self.den.clone(), self.d)
    }

    pub fn entries(&self) -> Vec<QuadRational> {
        (0..self.dim * self.dim).map(|k| self.entry(k / self.dim, k % self.dim)).collect()
    }

    /// Numerator parts `(a_ij, b_ij)` of entry `(i, j)` over the shared denominator.
    pub(crate) fn numerator(&self, i: usize, j: usize) -> (&BigInt, Option<&BigInt>) {
        let k = i * self.dim + j;
        (&self.a[k], self.b.get(k))
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.dim, self.d)
    }

    pub fn transpose(&self) -> Self {
        let n = self.dim;
        let tr = |v: &Vec<BigInt>| {
            if v.is_empty() {
                return Vec::new();
            }
            let mut out = Vec::with_capacity(n * n);
            for i in 0..n {
                for j in 0..n {
                    out.push(v[j * n + i].clone());
                }
            }
            out
        };
        QuadMatrix { dim: n, d: self.d, den: self.den.clone(), a: tr(&self.a), b: tr(&self.b) }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in product");
        assert_eq!(self.d, rhs.d, "field mismatch in product");
        let n = self.dim;
        let d = BigInt::from(self.d);
        let mut a = vec![BigInt::zero(); n * n];
        let mut b = if self.b.is_empty() && rhs.b.is_empty() { Vec::new() } else { vec![BigInt::zero(); n * n] };
        for i in 0..n {
            for k in 0..n {
                let la = &self.a[i * n + k];
                let lb = self.b.get(i * n + k);
                let la_zero = la.is_zero();
                let lb_zero = lb.map_or(true, Zero::is_zero);
                if la_zero && lb_zero {
                    continue;
                }
                for j in 0..n {
                    let ra = &rhs.a[k * n + j];
                    let rb = rhs.b.get(k * n + j);
                    let idx = i * n + j;
                    if !la_zero && !ra.is_zero() {
                        a[idx] += la * ra;
                    }
                    if let Some(rb) = rb {
                        if !la_zero && !rb.is_zero() {
                            b[idx] += la * rb;
                        }
                    }
                    if let Some(lb) = lb {
                        if !lb_zero {
                            if !ra.is_zero() {
                                b[idx] += lb * ra;
                            }
                            if let Some(rb) = rb {
                                if !rb.is_zero() {
                                    a[idx] += &d * lb * rb;
                                }
                            }
                        }
                    }
                }
            }
        }
        Self::canonical(n, self.d, a, b, &self.den * &rhs.den)
    }

    pub fn add(&self, rhs: &Self) -> Self {
        self.lin_comb(rhs, false)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.lin_comb(rhs, true)
    }

    fn lin_comb(&self, rhs: &Self, negate: bool) -> Self {
        assert_eq!(self.dim, rhs.dim);
        assert_eq!(self.d, rhs.d);
        let n2 = self.dim * self.dim;
        let sign = if negate { -BigInt::one() } else { BigInt::one() };
        let a = (0..n2).map(|k| &self.a[k] * &rhs.den + &sign * &rhs.a[k] * &self.den).collect();
        let b = if self.b.is_empty() && rhs.b.is_empty() {
            Vec::new()
        } else {
            let zero = BigInt::zero();
            (0..n2)
                .map(|k| {
                    self.b.get(k).unwrap_or(&zero) * &rhs.den + &sign * rhs.b.get(k).unwrap_or(&zero) * &self.den
                })
                .collect()
        };
        Self::canonical(self.dim, self.d, a, b, &self.den * &rhs.den)
    }

    pub fn scale(&self, s: &QuadRational) -> Self {
        let entries: Vec<QuadRational> = self.entries().iter().map(|e| e * s).collect();
        Self::from_entries(self.dim, self.d, &entries).expect("same shape")
    }

    pub fn is_zero(&self) -> bool {
        self.a.iter().all(Zero::is_zero) && self.b.is_empty()
    }

    pub fn trace(&self) -> QuadRational {
        let mut t = QuadRational::zero(self.d);
        for i in 0..self.dim {
            t = &t + &self.entry(i, i);
        }
        t
    }

    /// Determinant by fraction-exact Gaussian elimination.
    pub fn det(&self) -> QuadRational {
        let n = self.dim;
        let mut m = self.entries();
        let mut det = QuadRational::one(self.d);
        for col in 0..n {
            let Some(piv) = (col..n).find(|&r| !m[r * n + col].is_zero()) else {
                return QuadRational::zero(self.d);
            };
            if piv != col {
                for j in 0..n {
                    m.swap(piv * n + j, col * n + j);
                }
                det = -det;
            }
            let p = m[col * n + col].clone();
            det = &det * &p;
            let pinv = p.inv().expect("nonzero pivot");
            for r in col + 1..n {
                if m[r * n + col].is_zero() {
                    continue;
                }
                let f = &m[r * n + col] * &pinv;
                for j in col..n {
                    let sub = &f * &m[col * n + j];
                    m[r * n + j] = &m[r * n + j] - &sub;
                }
            }
        }
        det
    }

    /// General inverse by Gauss–Jordan elimination.
    pub fn inverse(&self) -> Result<Self> {
        let n = self.dim;
        let mut m = self.entries();
        let mut inv = Self::identity(n, self.d).entries();
        for col in 0..n {
            let piv = (col..n).find(|&r| !m[r * n + col].is_zero()).ok_or(Error::Singular)?;
            if piv != col {
                for j in 0..n {
                    m.swap(piv * n + j, col * n + j);
                    inv.swap(piv * n + j, col * n + j);
                }
            }
            let pinv = m[col * n + col].inv().expect("nonzero pivot");
            for j in 0..n {
                m[col * n + j] = &m[col * n + j] * &pinv;
                inv[col * n + j] = &inv[col * n + j] * &pinv;
            }
            for r in 0..n {
                if r == col || m[r * n + col].is_zero() {
                    continue;
                }
                let f = m[r * n + col].clone();
                for j in 0..n {
                    let s1 = &f * &m[col * n + j];
                    m[r * n + j] = &m[r * n + j] - &s1;
                    let s2 = &f * &inv[col * n + j];
                    inv[r * n + j] = &inv[r * n + j] - &s2;
                }
            }
        }
        Self::from_entries(n, self.d, &inv)
    }

    /// Matrix of 2×2 minors (the second exterior power) in the basis `e_i ∧ e_j`, `i < j`,
    /// ordered lexicographically.
    pub fn exterior_square(&self) -> Self {
        let n = self.dim;
        let pairs = wedge_pairs(n);
        let m = pairs.len();
        let d = BigInt::from(self.d);
        let rational = self.b.is_empty();
        let mut a = Vec::with_capacity(m * m);
        let mut b = if rational { Vec::new() } else { Vec::with_capacity(m * m) };
        let get = |i: usize, j: usize| -> (&BigInt, Option<&BigInt>) { self.numerator(i, j) };
        for &(i, j) in &pairs {
            for &(k, l) in &pairs {
                if rational {
                    let v = get(i, k).0 * get(j, l).0 - get(i, l).0 * get(j, k).0;
                    a.push(v);
                } else {
                    let (x1, y1) = get(i, k);
                    let (x2, y2) = get(j, l);
                    let (x3, y3) = get(i, l);
                    let (x4, y4) = get(j, k);
                    let (y1, y2, y3, y4) = (y1.unwrap(), y2.unwrap(), y3.unwrap(), y4.unwrap());
                    let pa = x1 * x2 + &d * y1 * y2 - (x3 * x4 + &d * y3 * y4);
                    let pb = x1 * y2 + y1 * x2 - (x3 * y4 + y3 * x4);
                    a.push(pa);
                    b.push(pb);
                }
            }
        }
        Self::canonical(m, self.d, a, b, &self.den * &self.den)
    }

    /// Entry-wise double embedding, each entry with relative error below one machine epsilon.
    pub fn to_f64(&self) -> DMatrix<f64> {
        let n = self.dim;
        let zero = BigInt::zero();
        DMatrix::from_fn(n, n, |i, j| {
            let (a, b) = self.numerator(i, j);
            embed_real(a, b.unwrap_or(&zero), &self.den, self.d).value
        })
    }

    /// Approximate heap footprint, used for memory budgeting of word balls.
    pub fn approx_bytes(&self) -> usize {
        let words = |x: &BigInt| (x.bits() as usize).div_ceil(64).max(1) * 8 + 32;
        std::mem::size_of::<Self>()
            + self.a.iter().map(words).sum::<usize>()
            + self.b.iter().map(words).sum::<usize>()
            + words(&self.den)
    }
}

/// Index pairs `(i, j)` with `i < j` in lexicographic order.
pub fn wedge_pairs(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(n * (n.saturating_sub(1)) / 2);
    for i in 0..n {
        for j in i + 1..n {
            out.push((i, j));
        }
    }
    out
}
