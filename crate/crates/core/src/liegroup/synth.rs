//! Float elements `k · exp(v) · k′` with `k, k′` in the maximal compact subgroup, used to test
//! Cartan projections against a known answer.

use nalgebra::DMatrix;
use rand::Rng;

use super::forms::ChamberVec;
use super::gram::{partner, weight};

fn balance(n: usize) -> Vec<f64> {
    (0..n + 2).map(|i| if weight(n, i) == 2 { std::f64::consts::FRAC_1_SQRT_2 } else { 1.0 }).collect()
}

/// `exp(v) = diag(e^{v1}, e^{v2}, 1, …, 1, e^{−v2}, e^{−v1})`.
pub fn torus_element(n: usize, v: ChamberVec) -> DMatrix<f64> {
    let dim = n + 2;
    let mut m = DMatrix::identity(dim, dim);
    m[(0, 0)] = v.v1.exp();
    m[(1, 1)] = v.v2.exp();
    m[(dim - 2, dim - 2)] = (-v.v2).exp();
    m[(dim - 1, dim - 1)] = (-v.v1).exp();
    m
}

/// Random element of the maximal compact subgroup: the exponential of a random antisymmetric
/// matrix commuting with the pairing permutation, transported back from the balanced model.
pub fn compact_element<R: Rng>(n: usize, rng: &mut R) -> DMatrix<f64> {
    let dim = n + 2;
    let mut a = DMatrix::<f64>::zeros(dim, dim);
    for i in 0..dim {
        for j in i + 1..dim {
            let x: f64 = rng.gen_range(-1.5..1.5);
            a[(i, j)] = x;
            a[(j, i)] = -x;
        }
    }
    let p = DMatrix::from_fn(dim, dim, |i, j| if partner(n, i) == j { 1.0 } else { 0.0 });
    let x = (&a + &p * &a * &p) * 0.5;
    let k = x.exp();
    from_balanced(n, &k)
}

/// `D g D⁻¹` for `g` in the balanced model.
pub fn from_balanced(n: usize, g: &DMatrix<f64>) -> DMatrix<f64> {
    let s = balance(n);
    DMatrix::from_fn(g.nrows(), g.ncols(), |i, j| g[(i, j)] * s[i] / s[j])
}

/// `k · exp(v) · k′` for random `k, k′`.
pub fn synthesize<R: Rng>(n: usize, v: ChamberVec, rng: &mut R) -> DMatrix<f64> {
    compact_element(n, rng) * torus_element(n, v) * compact_element(n, rng)
}
