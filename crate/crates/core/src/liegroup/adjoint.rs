//! Adjoint representation on `so(Q) = {X : XᵀJ + JX = 0}`.
//!
//! `X ∈ so(Q)` iff `JX` is antisymmetric, so the upper entries of `JX` are coordinates on
//! `so(Q)`; the basis is `X_ij = J⁻¹(E_ij − E_ji)` for `i < j` in lexicographic order. Under
//! conjugation `J(gXg⁻¹) = g⁻ᵀ(JX)g⁻¹`, hence `Ad(g)` is the exterior square of `g⁻ᵀ` in the
//! wedge basis.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::gmatrix::{GMatrix, ScaledFloat};
use super::gram::GramForm;
use crate::error::{Error, Result};
use crate::scalars::{wedge_pairs, QuadMatrix, QuadRational};

/// `dim so(n, 2) = (n+2)(n+1)/2`.
pub fn lie_algebra_dim(n: usize) -> usize {
    (n + 2) * (n + 1) / 2
}

pub fn lie_algebra_basis(form: &GramForm) -> Vec<QuadMatrix> {
    let dim = form.dim();
    let d = form.j.d();
    let j_inv = form.j.inverse().expect("nondegenerate form");
    wedge_pairs(dim)
        .into_iter()
        .map(|(i, k)| {
            let mut a = vec![BigInt::zero(); dim * dim];
            a[i * dim + k] = BigInt::one();
            a[k * dim + i] = -BigInt::one();
            j_inv.mul(&QuadMatrix::from_raw(dim, d, a, Vec::new(), BigInt::one()))
        })
        .collect()
}

/// Coordinates of `X ∈ so(Q)` in the basis of [`lie_algebra_basis`].
pub fn lie_coords(form: &GramForm, x: &QuadMatrix) -> Result<Vec<QuadRational>> {
    let jx = form.j.mul(x);
    if jx.add(&jx.transpose()).is_zero() {
        Ok(wedge_pairs(form.dim()).into_iter().map(|(i, k)| jx.entry(i, k)).collect())
    } else {
        Err(Error::Model("matrix is not in so(Q)".into()))
    }
}

/// Exact `Ad(g)`.
pub fn adjoint_exact(g: &GMatrix) -> QuadMatrix {
    g.inverse().exact().transpose().exterior_square()
}

/// `Ad(g)` in doubles.
pub fn adjoint(g: &GMatrix) -> DMatrix<f64> {
    adjoint_scaled(g).to_plain()
}

/// `Ad(g)` as a normalized float matrix with a power-of-two scale.
pub fn adjoint_scaled(g: &GMatrix) -> ScaledFloat {
    ScaledFloat::of(&adjoint_exact(g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liegroup::gram::gram_form;

    fn torus(n: usize, p: i64, q: i64) -> GMatrix {
        let dim = n + 2;
        let mut e = QuadMatrix::identity(dim, 1).entries();
        e[0] = QuadRational::from_i64s(p, 0, q, 1).unwrap();
        e[dim * dim - 1] = QuadRational::from_i64s(q, 0, p, 1).unwrap();
        GMatrix::certify(n, QuadMatrix::from_entries(dim, 1, &e).unwrap(), "t").unwrap()
    }

    #[test]
    fn dimension_count() {
        assert_eq!(lie_algebra_dim(3), 10);
        let f = gram_form(3).unwrap();
        assert_eq!(lie_algebra_basis(&f).len(), 10);
    }

    #[test]
    fn basis_lies_in_the_algebra() {
        let f = gram_form(4).unwrap();
        for (k, x) in lie_algebra_basis(&f).iter().enumerate() {
            let c = lie_coords(&f, x).unwrap();
            for (i, ci) in c.iter().enumerate() {
                assert_eq!(ci.is_one(), i == k);
                assert!(ci.is_one() || ci.is_zero());
            }
        }
    }

    #[test]
    fn identity_has_identity_adjoint() {
        let g = GMatrix::identity(3, 1);
        assert!(adjoint_exact(&g).is_identity());
    }

    #[test]
    fn adjoint_matches_conjugation() {
        let f = gram_form(3).unwrap();
        let g = torus(3, 3, 2);
        let ad = adjoint_exact(&g);
        let basis = lie_algebra_basis(&f);
        for (k, x) in basis.iter().enumerate() {
            let y = g.exact().mul(x).mul(g.inverse().exact());
            let c = lie_coords(&f, &y).unwrap();
            for (i, ci) in c.iter().enumerate() {
                assert_eq!(*ci, ad.entry(i, k));
            }
        }
    }
}
