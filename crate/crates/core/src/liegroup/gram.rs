use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalars::{QuadMatrix, QuadRational};

/// Partner index of coordinate `i` under `Q` (0-based): the hyperbolic cells pair
/// `x1 ↔ x_{n+2}` and `x2 ↔ x_{n+1}`, middle coordinates pair with themselves.
pub(crate) fn partner(n: usize, i: usize) -> usize {
    let dim = n + 2;
    if i < 2 || i >= dim - 2 {
        dim - 1 - i
    } else {
        i
    }
}

/// Twice the nonzero Gram entry in row `i`: 1 on the hyperbolic cells (entry ½), 2 on the middle
/// block (entry 1).
pub(crate) fn weight(n: usize, i: usize) -> u32 {
    if i < 2 || i >= n { 1 } else { 2 }
}

/// Gram matrices of `Q(x) = x1·x_{n+2} + x2·x_{n+1} + Σ_{i=3}^{n} x_i²` on R^{n+2} and of its
/// restriction `Q0` to `V = {x1 = x_{n+2}}` in the adapted basis
/// `(e1 + e_{n+2}, e2, …, e_{n+1})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GramForm {
    pub n: usize,
    pub j: QuadMatrix,
    pub j0: QuadMatrix,
}

impl GramForm {
    pub fn new(n: usize, d: u32) -> Result<Self> {
        if n < 2 {
            return Err(Error::BadRank(n));
        }
        Ok(GramForm { n, j: gram_matrix(n, d), j0: restricted_gram_matrix(n, d) })
    }

    pub fn dim(&self) -> usize {
        self.n + 2
    }

    /// `Q(x)` for an exact vector.
    pub fn eval(&self, x: &[QuadRational]) -> QuadRational {
        let dim = self.dim();
        let d = self.j.d();
        let mut acc = QuadRational::zero(d);
        for i in 0..dim {
            for k in 0..dim {
                let e = self.j.entry(i, k);
                if !e.is_zero() {
                    acc = &acc + &(&(&x[i] * &e) * &x[k]);
                }
            }
        }
        acc
    }
}

/// Shorthand for `GramForm::new(n, 1)`.
pub fn gram_form(n: usize) -> Result<GramForm> {
    GramForm::new(n, 1)
}

fn gram_matrix(n: usize, d: u32) -> QuadMatrix {
    let dim = n + 2;
    let mut a = vec![BigInt::zero(); dim * dim];
    for i in 0..dim {
        a[i * dim + partner(n, i)] = BigInt::from(weight(n, i));
    }
    QuadMatrix::from_raw(dim, d, a, Vec::new(), BigInt::from(2))
}

fn restricted_gram_matrix(n: usize, d: u32) -> QuadMatrix {
    // Q(y0 (e1 + e_{n+2}) + Σ y_i e_i) = y0² + y2·y_{n+1} + Σ_{3..n} y_i²
    let dim = n + 1;
    let mut a = vec![BigInt::zero(); dim * dim];
    a[0] = BigInt::from(2);
    for k in 1..dim {
        // V coordinate k is ambient coordinate k
        a[k * dim + partner(n, k)] = BigInt::from(weight(n, k));
    }
    QuadMatrix::from_raw(dim, d, a, Vec::new(), BigInt::from(2))
}

/// Columns `(e1 + e_{n+2}, e2, …, e_{n+1}, e1 − e_{n+2})`: the adapted basis of `V` followed by
/// the J-orthogonal complement line.
pub(crate) fn adapted_basis(n: usize, d: u32) -> QuadMatrix {
    let dim = n + 2;
    let mut a = vec![BigInt::zero(); dim * dim];
    a[0] = BigInt::one();
    a[(dim - 1) * dim] = BigInt::one();
    for k in 1..dim - 1 {
        a[k * dim + k] = BigInt::one();
    }
    a[dim - 1] = BigInt::one();
    a[(dim - 1) * dim + dim - 1] = -BigInt::one();
    QuadMatrix::from_raw(dim, d, a, Vec::new(), BigInt::one())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half() -> QuadRational {
        QuadRational::from_i64s(1, 0, 2, 1).unwrap()
    }

    #[test]
    fn n3_gram_has_half_cells_and_unit_middle() {
        let g = gram_form(3).unwrap();
        let j = &g.j;
        assert_eq!(j.dim(), 5);
        for (r, c) in [(0, 4), (4, 0), (1, 3), (3, 1)] {
            assert_eq!(j.entry(r, c), half());
        }
        assert!(j.entry(2, 2).is_one());
        let nonzero = (0..25).filter(|k| !j.entry(k / 5, k % 5).is_zero()).count();
        assert_eq!(nonzero, 5);
        assert_eq!(j.transpose(), *j);
    }

    #[test]
    fn n2_has_empty_middle_block() {
        let g = gram_form(2).unwrap();
        assert_eq!(g.j.dim(), 4);
        for i in 0..4 {
            assert!(g.j.entry(i, i).is_zero());
            assert_eq!(g.j.entry(i, 3 - i), half());
        }
    }

    #[test]
    fn rejects_small_rank() {
        assert!(matches!(gram_form(1), Err(Error::BadRank(1))));
    }

    #[test]
    fn quadratic_form_matches_definition() {
        let g = gram_form(4).unwrap();
        let xs: Vec<i64> = vec![3, -1, 2, 5, 7, -2];
        let x: Vec<QuadRational> = xs.iter().map(|&v| QuadRational::from_int(v.into(), 1)).collect();
        let want = xs[0] * xs[5] + xs[1] * xs[4] + xs[2] * xs[2] + xs[3] * xs[3];
        assert_eq!(g.eval(&x), QuadRational::from_int(want.into(), 1));
    }

    #[test]
    fn restricted_form_is_restriction_in_adapted_basis() {
        for n in 2..=5 {
            let g = gram_form(n).unwrap();
            let p = adapted_basis(n, 1);
            let pulled = p.transpose().mul(&g.j).mul(&p);
            for r in 0..=n {
                for c in 0..=n {
                    assert_eq!(pulled.entry(r, c), g.j0.entry(r, c), "n={n} ({r},{c})");
                }
            }
            // complement line is orthogonal to V and negative
            for r in 0..=n {
                assert!(pulled.entry(r, n + 1).is_zero());
            }
            assert_eq!(pulled.entry(n + 1, n + 1), QuadRational::from_int((-1).into(), 1));
        }
    }

    /// Signature of `Q0` by exact symmetric elimination (congruence to a diagonal form).
    fn signature(m: &QuadMatrix) -> (usize, usize) {
        let n = m.dim();
        let mut a = m.entries();
        let mut pos = 0;
        let mut neg = 0;
        let mut done = vec![false; n];
        for _ in 0..n {
            let piv = (0..n).find(|&i| !done[i] && !a[i * n + i].is_zero());
            let piv = match piv {
                Some(p) => p,
                None => {
                    // create a diagonal entry from an off-diagonal one: e_i += e_k
                    let (i, k) = (0..n)
                        .flat_map(|i| (0..n).map(move |k| (i, k)))
                        .find(|&(i, k)| i != k && !done[i] && !done[k] && !a[i * n + k].is_zero())
                        .expect("nondegenerate");
                    for c in 0..n {
                        a[i * n + c] = &a[i * n + c] + &a[k * n + c];
                    }
                    for r in 0..n {
                        a[r * n + i] = &a[r * n + i] + &a[r * n + k];
                    }
                    i
                }
            };
            let p = a[piv * n + piv].clone();
            match p.signum() {
                std::cmp::Ordering::Greater => pos += 1,
                std::cmp::Ordering::Less => neg += 1,
                std::cmp::Ordering::Equal => unreachable!(),
            }
            done[piv] = true;
            let pinv = p.inv().unwrap();
            for r in 0..n {
                if done[r] || a[r * n + piv].is_zero() {
                    continue;
                }
                let f = &a[r * n + piv] * &pinv;
                for c in 0..n {
                    let t = &f * &a[piv * n + c];
                    a[r * n + c] = &a[r * n + c] - &t;
                }
                for c in 0..n {
                    let t = &f * &a[c * n + piv];
                    a[c * n + r] = &a[c * n + r] - &t;
                }
            }
        }
        (pos, neg)
    }

    #[test]
    fn restricted_form_signature() {
        assert_eq!(signature(&gram_form(3).unwrap().j0), (3, 1));
        for n in 2..=6 {
            assert_eq!(signature(&gram_form(n).unwrap().j0), (n, 1));
            assert_eq!(signature(&gram_form(n).unwrap().j), (n, 2));
        }
    }
}
