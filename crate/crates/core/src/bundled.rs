//! Constructions of the bundled generator systems.
//!
//! Fuchsian groups enter through the symmetric square `SL2(R) → SO(2,1)`, acting on binary
//! quadratic forms `[[α, β], [β, δ]]` in the coordinates `(y0, y2, y3) = (β, α, −δ)` of `V`, where
//! `Q0 = y0² + y2·y3 = −det`. Kleinian groups enter through `SL2(C) → SO(3,1)`, acting on
//! Hermitian matrices `[[α, β], [β̄, δ]]` in the coordinates `(y0, y2, y3, y4) = (Im β, α, Re β, −δ)`
//! with `Q0 = y0² + y2·y4 + y3² = −det`. Real matrices then land in the copy of SO(2,1) that
//! fixes `y0`, which is the subgroup the bending direction centralizes. Both are followed by the
//! embedding of SO(n,1) into SO(n,2).

use crate::enumerate::{GeneratorSystem, Tag};
use crate::error::Result;
use crate::liegroup::{embed_h, gram_form, GramForm};
use crate::scalars::{QuadMatrix, QuadRational};

/// 2×2 matrix over the Gaussian integers, entries `(re, im)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GaussianSl2(pub [[(i64, i64); 2]; 2]);

fn cmul(x: (i64, i64), y: (i64, i64)) -> (i64, i64) {
    (x.0 * y.0 - x.1 * y.1, x.0 * y.1 + x.1 * y.0)
}

fn cadd(x: (i64, i64), y: (i64, i64)) -> (i64, i64) {
    (x.0 + y.0, x.1 + y.1)
}

fn conj(x: (i64, i64)) -> (i64, i64) {
    (x.0, -x.1)
}

impl GaussianSl2 {
    pub fn real(p: i64, q: i64, r: i64, s: i64) -> Self {
        GaussianSl2([[(p, 0), (q, 0)], [(r, 0), (s, 0)]])
    }

    /// `[[1, w], [0, 1]]`.
    pub fn translation(re: i64, im: i64) -> Self {
        GaussianSl2([[(1, 0), (re, im)], [(0, 0), (1, 0)]])
    }

    pub fn mul(&self, o: &Self) -> Self {
        let a = &self.0;
        let b = &o.0;
        let e = |i: usize, j: usize| cadd(cmul(a[i][0], b[0][j]), cmul(a[i][1], b[1][j]));
        GaussianSl2([[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]])
    }

    /// Inverse of a determinant-one matrix.
    pub fn inv(&self) -> Self {
        let [[p, q], [r, s]] = self.0;
        let neg = |x: (i64, i64)| (-x.0, -x.1);
        GaussianSl2([[s, neg(q)], [neg(r), p]])
    }

    pub fn det(&self) -> (i64, i64) {
        let [[p, q], [r, s]] = self.0;
        let ps = cmul(p, s);
        let qr = cmul(q, r);
        (ps.0 - qr.0, ps.1 - qr.1)
    }

    /// Image in SO(Q0) for `n = 3`.
    pub fn to_so31(&self) -> QuadMatrix {
        // y ↦ X(y) = [[y2, y3 + i·y0], [y3 − i·y0, −y4]]
        let herm = |y: [i64; 4]| [[(y[1], 0), (y[2], y[0])], [(y[2], -y[0]), (-y[3], 0)]];
        let g = &self.0;
        let mut cols = Vec::with_capacity(4);
        for k in 0..4 {
            let mut y = [0i64; 4];
            y[k] = 1;
            let x = herm(y);
            // g X g*
            let gx = |i: usize, j: usize| cadd(cmul(g[i][0], x[0][j]), cmul(g[i][1], x[1][j]));
            let out = |i: usize, j: usize| cadd(cmul(gx(i, 0), conj(g[j][0])), cmul(gx(i, 1), conj(g[j][1])));
            let (a, b, dd) = (out(0, 0), out(0, 1), out(1, 1));
            cols.push([b.1, a.0, b.0, -dd.0]);
        }
        let mut entries = Vec::with_capacity(16);
        for r in 0..4 {
            for c in cols.iter() {
                entries.push(c[r]);
            }
        }
        QuadMatrix::from_ints(4, 1, &entries).expect("4x4")
    }
}

/// Symmetric-square image of a 2×2 matrix `[[p, q], [r, s]]` of determinant one over Q(√d) in
/// SO(Q0) for `n = 2`.
pub fn sym2(g: &QuadMatrix) -> QuadMatrix {
    let d = g.d();
    let (p, q, r, s) = (g.entry(0, 0), g.entry(0, 1), g.entry(1, 0), g.entry(1, 1));
    let two = QuadRational::from_int(2.into(), d);
    let rows = [
        [&(&p * &s) + &(&q * &r), &p * &r, -(&q * &s)],
        [&(&two * &p) * &q, &p * &p, -(&q * &q)],
        [-(&(&two * &r) * &s), -(&r * &r), &s * &s],
    ];
    let entries: Vec<QuadRational> = rows.into_iter().flatten().collect();
    QuadMatrix::from_entries(3, d, &entries).expect("3x3")
}

fn int2(p: i64, q: i64, r: i64, s: i64) -> QuadMatrix {
    QuadMatrix::from_ints(2, 1, &[p, q, r, s]).expect("2x2")
}

fn fuchsian(entries: Vec<(&str, Option<Tag>, QuadMatrix)>) -> Result<GeneratorSystem> {
    let d = entries[0].2.d();
    let form = GramForm::new(2, d)?;
    let mut out = Vec::with_capacity(entries.len());
    for (label, tag, g) in entries {
        out.push((label.to_string(), tag, embed_h(&form, &sym2(&g))?.into_exact()));
    }
    GeneratorSystem::new(2, d, out)
}

fn kleinian(entries: Vec<(&str, Option<Tag>, GaussianSl2)>) -> Result<GeneratorSystem> {
    let form = gram_form(3)?;
    let mut out = Vec::with_capacity(entries.len());
    for (label, tag, g) in entries {
        out.push((label.to_string(), tag, embed_h(&form, &g.to_so31())?.into_exact()));
    }
    GeneratorSystem::new(3, 1, out)
}

/// The modular group generated by `S = [[0, −1], [1, 0]]` and `T = [[1, 1], [0, 1]]`; a lattice in
/// SO(2,1) containing the parabolic `T`.
pub fn modular_group() -> Result<GeneratorSystem> {
    fuchsian(vec![("S", None, int2(0, -1, 1, 0)), ("T", None, int2(1, 1, 0, 1))])
}

/// Classical Schottky pair `A = [[5, 12], [2, 5]]`, `B = [[5, 2], [12, 5]]` inside SL2(Z): the four
/// isometric circles (centers ±5/2 and ±5/12, radii 1/2 and 1/12) are disjoint, so the group is
/// free on `A`, `B`.
pub fn schottky_pair() -> Result<GeneratorSystem> {
    fuchsian(vec![("A", None, int2(5, 12, 2, 5)), ("B", None, int2(5, 2, 12, 5))])
}

/// Cyclic group generated by the hyperbolic element `[[5, 12], [2, 5]]`.
pub fn cyclic_hyperbolic() -> Result<GeneratorSystem> {
    fuchsian(vec![("A", None, int2(5, 12, 2, 5))])
}

/// Picard-type generators `a, t, u, l` of PSL2(Z[i]), a lattice in SO(3,1).
pub fn gaussian_bianchi() -> Result<GeneratorSystem> {
    kleinian(vec![
        ("a", None, GaussianSl2::real(0, -1, 1, 0)),
        ("t", None, GaussianSl2::translation(1, 0)),
        ("u", None, GaussianSl2::translation(0, 1)),
        ("l", None, GaussianSl2([[(0, -1), (0, 0)], [(0, 0), (0, 1)]])),
    ])
}

fn kleinian_letters() -> (GaussianSl2, GaussianSl2, GaussianSl2) {
    let delta = GaussianSl2::real(2, 1, 1, 1);
    let up = GaussianSl2::translation(0, 4);
    let down = GaussianSl2::translation(0, -4);
    let a = up.mul(&GaussianSl2::real(5, 12, 2, 5)).mul(&up.inv());
    let b = down.mul(&GaussianSl2::real(5, 2, 12, 5)).mul(&down.inv());
    (delta, a, b)
}

/// Colored Kleinian amalgam `⟨δ, a⟩ *_⟨δ⟩ ⟨δ, b⟩` in SO(3,1): `δ = [[2, 1], [1, 1]]` is real, so
/// it lies in the centralized SO(2,1); `a` and `b` are Schottky generators translated by `±4i`.
/// All six isometric circles are disjoint, so the group is free of rank three.
pub fn kleinian_amalgam() -> Result<GeneratorSystem> {
    let (delta, a, b) = kleinian_letters();
    kleinian(vec![("delta", Some(Tag::Delta), delta), ("a", Some(Tag::Gamma1), a), ("b", Some(Tag::Gamma2), b)])
}

/// HNN-colored free group `⟨δ, s⟩`: an HNN extension of `Γ1 = ⟨δ, s⁻¹δs⟩` over `Δ = ⟨δ⟩` with
/// stable letter `s`.
pub fn kleinian_hnn() -> Result<GeneratorSystem> {
    let (delta, a, _) = kleinian_letters();
    kleinian(vec![("delta", Some(Tag::Delta), delta), ("s", Some(Tag::Stable), a)])
}

/// Genus-two surface group in SO(2,1) as a double `Γ1 *_Δ Γ2` of a one-holed torus group.
///
/// `Γ1 = ⟨A, B⟩` with `A = [[0, −1], [1, 3]]`, `B = [[4, −1], [−3, 1]]` has trace triple
/// `(3, 5, 5)`, so it is free and discrete with hyperbolic boundary `δ = [A, B]` of trace −18.
/// `M = δ + 9·I` commutes with `δ` and has negative determinant, i.e. it is the reflection in the
/// axis of `δ`; `Γ2 = MΓ1M⁻¹`. Everything is conjugated by an eigenbasis of `δ`, defined over
/// Q(√5), so that `δ` becomes diagonal and lies in the centralized SO(1,1).
pub fn fuchsian_amalgam() -> Result<GeneratorSystem> {
    let a = int2(0, -1, 1, 3);
    let b = int2(4, -1, -3, 1);
    let delta = a.mul(&b).mul(&a.inverse()?).mul(&b.inverse()?);
    let m = delta.add(&QuadMatrix::from_ints(2, 1, &[9, 0, 0, 9])?);
    let m_inv = m.inverse()?;
    let a2 = m.mul(&a).mul(&m_inv);
    let b2 = m.mul(&b).mul(&m_inv);
    // eigenvectors (q, λ − p) of δ = [[p, q], [r, s]] for λ = −9 ± 4√5
    let d = 5;
    let lift = |x: &QuadMatrix| -> QuadMatrix {
        let entries: Vec<QuadRational> = x
            .entries()
            .iter()
            .map(|e| QuadRational::normalize(e.a().clone(), 0.into(), e.den().clone(), d).expect("den > 0"))
            .collect();
        QuadMatrix::from_entries(2, d, &entries).expect("2x2")
    };
    let (p, q) = (delta.entry(0, 0), delta.entry(0, 1));
    let lam1 = QuadRational::from_i64s(-9, 4, 1, d)?;
    let lam2 = QuadRational::from_i64s(-9, -4, 1, d)?;
    let pd = QuadRational::normalize(p.a().clone(), 0.into(), p.den().clone(), d)?;
    let qd = QuadRational::normalize(q.a().clone(), 0.into(), q.den().clone(), d)?;
    let basis = QuadMatrix::from_entries(2, d, &[qd.clone(), qd, &lam1 - &pd, &lam2 - &pd])?;
    let basis_inv = basis.inverse()?;
    let conj = |x: &QuadMatrix| basis_inv.mul(&lift(x)).mul(&basis);
    fuchsian(vec![
        ("delta", Some(Tag::Delta), conj(&delta)),
        ("A", Some(Tag::Gamma1), conj(&a)),
        ("B", Some(Tag::Gamma1), conj(&b)),
        ("A'", Some(Tag::Gamma2), conj(&a2)),
        ("B'", Some(Tag::Gamma2), conj(&b2)),
    ])
}

/// Every bundled system with its file stem.
pub fn all() -> Result<Vec<(&'static str, GeneratorSystem)>> {
    Ok(vec![
        ("modular", modular_group()?),
        ("schottky", schottky_pair()?),
        ("cyclic", cyclic_hyperbolic()?),
        ("bianchi_gaussian", gaussian_bianchi()?),
        ("kleinian_amalgam", kleinian_amalgam()?),
        ("kleinian_hnn", kleinian_hnn()?),
        ("fuchsian_amalgam", fuchsian_amalgam()?),
    ])
}
