use std::hash::{Hash, Hasher};
use std::sync::OnceLock;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_traits::Zero;

use super::gram::{partner, weight};
use crate::error::{Error, Result};
use crate::scalars::{embed_real, QuadMatrix};

/// Element of SO(Q) with exact entries; `gᵀJg = J` and `det g = 1` hold by construction.
pub struct GMatrix {
    n: usize,
    m: QuadMatrix,
    float: OnceLock<ScaledFloat>,
}

/// Float copy `2^shift · mat` of an exact matrix, with `mat` normalized to entries of order one so
/// that deep elements neither overflow nor underflow.
#[derive(Clone, Debug)]
pub struct ScaledFloat {
    pub mat: DMatrix<f64>,
    pub shift: i64,
}

impl ScaledFloat {
    pub fn of(m: &QuadMatrix) -> Self {
        let dim = m.dim();
        let root_bits = (m.d() as f64).log2() / 2.0;
        let mut top: i64 = i64::MIN;
        for i in 0..dim {
            for j in 0..dim {
                let (a, b) = m.numerator(i, j);
                if !a.is_zero() {
                    top = top.max(a.bits() as i64);
                }
                if let Some(b) = b.filter(|b| !b.is_zero()) {
                    top = top.max(b.bits() as i64 + root_bits.ceil() as i64);
                }
            }
        }
        if top == i64::MIN {
            return ScaledFloat { mat: DMatrix::zeros(dim, dim), shift: 0 };
        }
        let shift = top - m.den().bits() as i64;
        let zero = BigInt::zero();
        let mat = DMatrix::from_fn(dim, dim, |i, j| {
            let (a, b) = m.numerator(i, j);
            let b = b.unwrap_or(&zero);
            if shift >= 0 {
                embed_real(a, b, &(m.den() << shift as u64), m.d()).value
            } else {
                let s = (-shift) as u64;
                embed_real(&(a << s), &(b << s), m.den(), m.d()).value
            }
        });
        ScaledFloat { mat, shift }
    }

    /// Natural log of the scale factor.
    pub fn log_scale(&self) -> f64 {
        self.shift as f64 * std::f64::consts::LN_2
    }

    /// Plain double matrix; entries beyond the double range become infinite.
    pub fn to_plain(&self) -> DMatrix<f64> {
        let f = 2f64.powi(self.shift.clamp(-2000, 2000) as i32);
        &self.mat * f
    }
}

impl Clone for GMatrix {
    fn clone(&self) -> Self {
        GMatrix { n: self.n, m: self.m.clone(), float: self.float.clone() }
    }
}

impl PartialEq for GMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.m == other.m
    }
}

impl Eq for GMatrix {}

impl Hash for GMatrix {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.m.hash(state);
    }
}

impl std::fmt::Debug for GMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "GMatrix(n = {}) {:?}", self.n, self.m)
    }
}

impl GMatrix {
    /// Validate `m` against the Gram form of rank `n`; `label` names the matrix in errors.
    pub fn certify(n: usize, m: QuadMatrix, label: &str) -> Result<Self> {
        if n < 2 {
            return Err(Error::BadRank(n));
        }
        if m.dim() != n + 2 {
            return Err(Error::Dimension { expected: n + 2, got: m.dim() });
        }
        let g = GMatrix::from_trusted(n, m);
        if !g.inverse().m.mul(&g.m).is_identity() {
            return Err(Error::NotFormPreserving { label: label.to_string() });
        }
        let det = g.m.det();
        if !det.is_one() {
            return Err(Error::BadDeterminant { label: label.to_string(), det: format!("{det:?}") });
        }
        Ok(g)
    }

    /// Wrap a matrix known to lie in SO(Q), e.g. a product of certified elements.
    pub(crate) fn from_trusted(n: usize, m: QuadMatrix) -> Self {
        GMatrix { n, m, float: OnceLock::new() }
    }

    pub fn identity(n: usize, d: u32) -> Self {
        GMatrix::from_trusted(n, QuadMatrix::identity(n + 2, d))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> u32 {
        self.m.d()
    }

    pub fn exact(&self) -> &QuadMatrix {
        &self.m
    }

    pub fn into_exact(self) -> QuadMatrix {
        self.m
    }

    pub fn is_identity(&self) -> bool {
        self.m.is_identity()
    }

    /// Cached float copy.
    pub fn float(&self) -> &ScaledFloat {
        self.float.get_or_init(|| ScaledFloat::of(&self.m))
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.n, rhs.n, "rank mismatch in product");
        GMatrix::from_trusted(self.n, self.m.mul(&rhs.m))
    }

    /// `J⁻¹gᵀJ`, assembled entrywise: `inv[i][k] = g[π(k)][π(i)] · w_k / w_i`.
    pub fn inverse(&self) -> Self {
        GMatrix::from_trusted(self.n, form_adjoint(self.n, &self.m))
    }

    /// Exact check of `gᵀJg = J` and `det g = 1`.
    pub fn is_form_preserving(&self) -> bool {
        form_adjoint(self.n, &self.m).mul(&self.m).is_identity() && self.m.det().is_one()
    }

    /// Conjugate `c g c⁻¹` for `c` in SO(Q).
    pub fn conjugate_by(&self, c: &GMatrix) -> Self {
        c.mul(self).mul(&c.inverse())
    }

    pub fn approx_bytes(&self) -> usize {
        self.m.approx_bytes() + std::mem::size_of::<Self>()
    }
}

/// `J⁻¹MᵀJ` for the Gram form of rank `n`.
pub(crate) fn form_adjoint(n: usize, m: &QuadMatrix) -> QuadMatrix {
    let dim = n + 2;
    let rational = m.is_rational();
    let mut a = Vec::with_capacity(dim * dim);
    let mut b = if rational { Vec::new() } else { Vec::with_capacity(dim * dim) };
    for i in 0..dim {
        for k in 0..dim {
            // factor 2·w_k/w_i ∈ {1, 2, 4}, compensated by doubling the denominator
            let f = BigInt::from(2 * weight(n, k) / weight(n, i));
            let (x, y) = m.numerator(partner(n, k), partner(n, i));
            a.push(x * &f);
            if let Some(y) = y {
                b.push(y * &f);
            }
        }
    }
    QuadMatrix::from_raw(dim, m.d(), a, b, m.den() * 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liegroup::gram::gram_form;
    use crate::scalars::QuadRational;

    fn diag_torus(n: usize, p: i64, q: i64) -> QuadMatrix {
        // diag(p/q, 1, …, 1, q/p) lies in SO(Q)
        let dim = n + 2;
        let mut e = vec![QuadRational::zero(1); dim * dim];
        for i in 1..dim - 1 {
            e[i * dim + i] = QuadRational::one(1);
        }
        e[0] = QuadRational::from_i64s(p, 0, q, 1).unwrap();
        e[dim * dim - 1] = QuadRational::from_i64s(q, 0, p, 1).unwrap();
        QuadMatrix::from_entries(dim, 1, &e).unwrap()
    }

    #[test]
    fn torus_element_certifies_and_inverts() {
        let g = GMatrix::certify(3, diag_torus(3, 3, 2), "a").unwrap();
        let gi = g.inverse();
        assert!(g.mul(&gi).is_identity());
        assert_eq!(gi.exact(), &diag_torus(3, 2, 3));
    }

    #[test]
    fn inverse_formula_matches_gauss_jordan() {
        let g = GMatrix::certify(3, diag_torus(3, 5, 7), "a").unwrap();
        assert_eq!(g.inverse().exact(), &g.exact().inverse().unwrap());
    }

    #[test]
    fn non_preserving_matrix_is_rejected_by_name() {
        let mut e = vec![0i64; 25];
        for i in 0..5 {
            e[i * 5 + i] = 1;
        }
        e[2 * 5 + 2] = -1;
        e[0] = -1;
        // det = 1 but the middle sign flip together with x1 ↦ −x1 breaks Q
        let m = QuadMatrix::from_ints(5, 1, &e).unwrap();
        match GMatrix::certify(3, m, "bad") {
            Err(Error::NotFormPreserving { label }) => assert_eq!(label, "bad"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn determinant_minus_one_is_rejected() {
        let mut e = vec![0i64; 25];
        for i in 0..5 {
            e[i * 5 + i] = 1;
        }
        e[2 * 5 + 2] = -1;
        let m = QuadMatrix::from_ints(5, 1, &e).unwrap();
        assert!(matches!(GMatrix::certify(3, m, "r"), Err(Error::BadDeterminant { .. })));
    }

    #[test]
    fn form_adjoint_is_j_inverse_transpose_j() {
        let g = gram_form(4).unwrap();
        let xs: Vec<i64> = (0..36).map(|k| (k * 7 % 11) - 5).collect();
        let m = QuadMatrix::from_ints(6, 1, &xs).unwrap();
        let want = g.j.inverse().unwrap().mul(&m.transpose()).mul(&g.j);
        assert_eq!(form_adjoint(4, &m), want);
    }

    #[test]
    fn scaled_float_handles_huge_entries() {
        let big = BigInt::from(3).pow(2000);
        let m = QuadMatrix::from_raw(2, 1, vec![big.clone(), BigInt::from(1), BigInt::from(0), big], Vec::new(), 1.into());
        let f = ScaledFloat::of(&m);
        let ln = (f.mat[(0, 0)]).ln() + f.log_scale();
        assert!((ln - 2000.0 * 3f64.ln()).abs() < 1e-9);
    }
}
