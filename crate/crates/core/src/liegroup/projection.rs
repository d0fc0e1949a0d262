//! Cartan and Jordan projections.
//!
//! With the Gram matrix `J` of `Q` the group SO(Q) is not stable under transposition once the
//! middle block is present (`J` mixes entries ½ and 1), so singular values of `g` itself do not
//! give the Cartan projection. Conjugating by `D = diag(1, 1, 2^{-1/2}, …, 2^{-1/2}, 1, 1)` turns
//! `J` into ½ times a symmetric permutation matrix; the conjugated group is self-adjoint, its
//! maximal compact subgroup is the orthogonal part, and `D` commutes with the Cartan subgroup.
//! Singular values of `D⁻¹gD` are therefore `e^{±v1}, e^{±v2}, 1, …, 1`.
//!
//! `v1` is the log of the top singular value and `v1 + v2` the log of the top singular value of
//! the exterior square, which is formed from exact 2×2 minors; both are top singular values and
//! so are computed to full relative precision even when `g` is badly conditioned.

use nalgebra::{Complex, DMatrix};

use super::forms::ChamberVec;
use super::gmatrix::{GMatrix, ScaledFloat};
use super::gram::weight;
use crate::error::{Error, Result};
use crate::scalars::{char_poly, embed_real, wedge_pairs, Poly, QuadMatrix, QuadRational};

/// Default absolute tolerance on log scale for chamber and pairing checks.
pub const DEFAULT_TOL: f64 = 1e-8;

fn balance(n: usize) -> Vec<f64> {
    (0..n + 2).map(|i| if weight(n, i) == 2 { std::f64::consts::FRAC_1_SQRT_2 } else { 1.0 }).collect()
}

fn sorted_log_singular_values(mat: DMatrix<f64>, log_scale: f64) -> Result<Vec<f64>> {
    let sv = mat
        .try_svd(false, false, f64::EPSILON, 0)
        .ok_or(Error::Numerical { what: "cartan projection", detail: "SVD did not converge".into() })?
        .singular_values;
    let mut out: Vec<f64> = sv.iter().map(|s| s.ln() + log_scale).collect();
    out.sort_by(|a, b| b.total_cmp(a));
    Ok(out)
}

/// Largest log gap below the top value at which a value is still resolved to `tol`.
fn resolution_limit(dim: usize, tol: f64) -> f64 {
    (tol / (dim as f64 * f64::EPSILON)).ln()
}

/// Check that sorted log values pair as `{l, −l}` and the middle ones vanish, wherever the values
/// are numerically resolved relative to the top one.
fn check_pairing(logs: &[f64], middle: usize, tol: f64, limit: f64, what: &'static str) -> Result<()> {
    let m = logs.len();
    let top = logs[0];
    let resolved = |k: usize| top - logs[k] < limit;
    for k in 0..m / 2 {
        let p = m - 1 - k;
        if resolved(p) && (logs[k] + logs[p]).abs() > tol {
            return Err(Error::Numerical {
                what,
                detail: format!("values {:.3e} and {:.3e} do not pair", logs[k], logs[p]),
            });
        }
    }
    let lo = (m - middle) / 2;
    for k in lo..lo + middle {
        if resolved(k) && logs[k].abs() > tol {
            return Err(Error::Numerical { what, detail: format!("middle value {:.3e} is not 0", logs[k]) });
        }
    }
    Ok(())
}

fn chamber_from(v1: f64, sum: f64, tol: f64, what: &'static str) -> Result<ChamberVec> {
    let mut v2 = sum - v1;
    if v2 < -tol || v1 < -tol {
        return Err(Error::Numerical { what, detail: format!("({v1:.3e}, {v2:.3e}) outside the chamber") });
    }
    v2 = v2.max(0.0);
    Ok(ChamberVec::new(v1.max(v2), v2))
}

/// `μ(g)` with the default tolerance.
pub fn cartan_projection(g: &GMatrix) -> Result<ChamberVec> {
    cartan_projection_with(g, DEFAULT_TOL)
}

pub fn cartan_projection_with(g: &GMatrix, tol: f64) -> Result<ChamberVec> {
    let ext = ScaledFloat::of(&g.exact().exterior_square());
    project_scaled(g.n(), g.float(), &ext, tol)
}

/// `μ` of a float matrix in SO(Q); the exterior square is formed from float minors.
pub fn cartan_projection_f64(n: usize, g: &DMatrix<f64>, tol: f64) -> Result<ChamberVec> {
    let dim = n + 2;
    if g.nrows() != dim || g.ncols() != dim {
        return Err(Error::Dimension { expected: dim, got: g.nrows() });
    }
    let pairs = wedge_pairs(dim);
    let ext = DMatrix::from_fn(pairs.len(), pairs.len(), |r, c| {
        let (i, j) = pairs[r];
        let (k, l) = pairs[c];
        g[(i, k)] * g[(j, l)] - g[(i, l)] * g[(j, k)]
    });
    let f = ScaledFloat { mat: g.clone(), shift: 0 };
    project_scaled(n, &f, &ScaledFloat { mat: ext, shift: 0 }, tol)
}

fn project_scaled(n: usize, f: &ScaledFloat, ext: &ScaledFloat, tol: f64) -> Result<ChamberVec> {
    let dim = n + 2;
    let s = balance(n);
    let bal = DMatrix::from_fn(dim, dim, |i, j| f.mat[(i, j)] * s[j] / s[i]);
    let logs = sorted_log_singular_values(bal, f.log_scale())?;
    check_pairing(&logs, n - 2, tol, resolution_limit(dim, tol), "cartan projection")?;
    let pairs = wedge_pairs(dim);
    let m = pairs.len();
    let ebal = DMatrix::from_fn(m, m, |r, c| {
        let (i, j) = pairs[r];
        let (k, l) = pairs[c];
        ext.mat[(r, c)] * (s[k] * s[l]) / (s[i] * s[j])
    });
    let top2 = sorted_log_singular_values(ebal, ext.log_scale())?[0];
    chamber_from(logs[0], top2, tol, "cartan projection")
}

/// `ln |x|` without overflow for huge or tiny values.
fn ln_abs(x: &QuadRational) -> f64 {
    let v = x.to_f64();
    if v.is_finite() && v != 0.0 && v.abs() > f64::MIN_POSITIVE {
        return v.abs().ln();
    }
    let bits = x.a().bits().max(x.b().bits()) as i64 - x.den().bits() as i64;
    let (a, b, den) = if bits >= 0 {
        (x.a().clone(), x.b().clone(), x.den() << bits as u64)
    } else {
        let s = (-bits) as u64;
        (x.a() << s, x.b() << s, x.den().clone())
    };
    embed_real(&a, &b, &den, x.d()).value.abs().ln() + bits as f64 * std::f64::consts::LN_2
}

fn mul_pow2(x: &QuadRational, e: i64) -> QuadRational {
    let (a, b, den) = if e >= 0 {
        (x.a() << e as u64, x.b() << e as u64, x.den().clone())
    } else {
        (x.a().clone(), x.b().clone(), x.den() << (-e) as u64)
    };
    QuadRational::normalize(a, b, den, x.d()).expect("positive denominator")
}

/// Upper convex hull of `(k, ln|c_k|)`: consecutive vertex indices.
fn newton_polygon(logs: &[Option<f64>]) -> Vec<usize> {
    let mut hull: Vec<usize> = Vec::new();
    for (k, l) in logs.iter().enumerate() {
        let Some(l) = *l else { continue };
        while hull.len() >= 2 {
            let (i, j) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let (li, lj) = (logs[i].unwrap(), logs[j].unwrap());
            // drop j when it lies on or below the chord from i to k
            if (lj - li) * (k - i) as f64 <= (l - li) * (j - i) as f64 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(k);
    }
    hull
}

/// Log-moduli of the roots of a monic square-free polynomial with real coefficients.
/// Each edge of the Newton polygon is solved in its own power-of-two scaling, so clusters of
/// roots whose moduli differ by many orders of magnitude do not contaminate each other.
fn root_log_moduli(p: &Poly) -> Result<Vec<f64>> {
    let c = p.coeffs();
    let m = p.degree();
    if c[0].is_zero() {
        return Err(Error::Numerical { what: "jordan projection", detail: "zero eigenvalue".into() });
    }
    if m == 1 {
        return Ok(vec![ln_abs(&c[0])]);
    }
    let logs: Vec<Option<f64>> = c.iter().map(|x| (!x.is_zero()).then(|| ln_abs(x))).collect();
    let hull = newton_polygon(&logs);
    let ln2 = std::f64::consts::LN_2;
    // merge edges whose slopes are too close for the truncated polynomials to separate the roots
    let slope = |i: usize, j: usize| (logs[j].unwrap() - logs[i].unwrap()) / (j - i) as f64;
    let gap = 2.0 * (4.0 * m as f64).ln();
    let mut blocks = vec![hull[0]];
    for w in hull.windows(3) {
        if slope(w[0], w[1]) - slope(w[1], w[2]) >= gap {
            blocks.push(w[1]);
        }
    }
    blocks.push(hull[hull.len() - 1]);
    let mut out = Vec::with_capacity(m);
    for w in blocks.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (la, lb) = (logs[a].unwrap(), logs[b].unwrap());
        // roots on this edge have modulus near exp(−slope); scale x = 2^e y and divide by 2^f
        let e = (-(lb - la) / (b - a) as f64 / ln2).round() as i64;
        let f = ((la + a as f64 * e as f64 * ln2) / ln2).round() as i64;
        let scaled: Vec<f64> = (0..=m).map(|k| mul_pow2(&c[k], k as i64 * e - f).to_f64()).collect();
        let deg = b - a;
        let lead = scaled[b];
        let mut comp = DMatrix::<f64>::zeros(deg, deg);
        for i in 1..deg {
            comp[(i, i - 1)] = 1.0;
        }
        for k in 0..deg {
            comp[(k, deg - 1)] = -scaled[a + k] / lead;
        }
        let shift = e as f64 * ln2;
        for &z in comp.complex_eigenvalues().iter() {
            out.push(polish(&scaled, z).norm().ln() + shift);
        }
    }
    Ok(out)
}

/// Newton refinement of a root of `Σ c_k y^k`; QR on companion matrices alone loses several
/// digits on palindromic polynomials.
fn polish(c: &[f64], mut z: Complex<f64>) -> Complex<f64> {
    let eval = |z: Complex<f64>| {
        let mut p = Complex::new(0.0, 0.0);
        let mut dp = Complex::new(0.0, 0.0);
        for &ck in c.iter().rev() {
            dp = dp * z + p;
            p = p * z + ck;
        }
        (p, dp)
    };
    let (mut p, mut dp) = eval(z);
    for _ in 0..20 {
        if dp.norm() == 0.0 {
            break;
        }
        let next = z - p / dp;
        let (np, ndp) = eval(next);
        if np.norm() >= p.norm() {
            break;
        }
        z = next;
        p = np;
        dp = ndp;
    }
    z
}

/// Sorted (descending) log-moduli of the eigenvalues of an exact matrix, with multiplicity.
/// Repeated eigenvalues are split off exactly before any floating point work, so unipotent and
/// other defective elements are handled without loss of accuracy. Roots of each square-free
/// factor that are not resolved relative to that factor's top root carry `false`.
fn eigen_log_moduli(m: &QuadMatrix, tol: f64) -> Result<Vec<(f64, bool)>> {
    let mut out = Vec::with_capacity(m.dim());
    for (factor, mult) in char_poly(m).square_free() {
        let logs = root_log_moduli(&factor)?;
        if logs.iter().any(|l| !l.is_finite()) {
            return Err(Error::Numerical { what: "jordan projection", detail: "non-finite eigenvalue".into() });
        }
        let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        // companion eigenvalues are less accurate than SVD; allow a wider margin
        let limit = resolution_limit(factor.degree() * 64, tol);
        for l in logs {
            let resolved = factor.degree() == 1 || top - l < limit;
            for _ in 0..mult {
                out.push((l, resolved));
            }
        }
    }
    out.sort_by(|a, b| b.0.total_cmp(&a.0));
    Ok(out)
}

/// `λ(g)` with the default tolerance.
pub fn jordan_projection(g: &GMatrix) -> Result<ChamberVec> {
    jordan_projection_with(g, DEFAULT_TOL)
}

pub fn jordan_projection_with(g: &GMatrix, tol: f64) -> Result<ChamberVec> {
    let n = g.n();
    let moduli = eigen_log_moduli(g.exact(), tol)?;
    let dim = moduli.len();
    for k in 0..dim / 2 {
        let (a, _) = moduli[k];
        let (b, rb) = moduli[dim - 1 - k];
        if rb && (a + b).abs() > tol {
            return Err(Error::Numerical {
                what: "jordan projection",
                detail: format!("eigenvalue moduli {a:.6e} and {b:.6e} do not pair ({:.2e})", a + b),
            });
        }
    }
    let lo = (dim - (n - 2)) / 2;
    for &(l, r) in &moduli[lo..lo + n - 2] {
        if r && l.abs() > tol {
            return Err(Error::Numerical { what: "jordan projection", detail: format!("middle modulus {l:.3e}") });
        }
    }
    let ext = eigen_log_moduli(&g.exact().exterior_square(), tol)?;
    chamber_from(moduli[0].0, ext[0].0, tol, "jordan projection")
}
