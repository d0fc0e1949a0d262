//! Bending deformations `σ_q` of colored generator systems, with `q = e^t` rational so that bent
//! matrices stay exact.

use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::enumerate::{Coloring, GeneratorSystem, Tag};
use crate::error::{Error, Result};
use crate::liegroup::{lie_algebra_basis, GMatrix, GramForm};
use crate::scalars::{wedge_pairs, QuadMatrix, QuadRational};

/// Exact basis of the solution space of `A·c = 0` (rows of `A` given as slices).
pub fn nullspace(rows: &[Vec<QuadRational>], ncols: usize, d: u32) -> Vec<Vec<QuadRational>> {
    let mut m: Vec<Vec<QuadRational>> = rows.iter().filter(|r| r.iter().any(|x| !x.is_zero())).cloned().collect();
    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = m[r][c].inv().expect("nonzero pivot");
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for k in 0..ncols {
                    let t = &f * &m[r][k];
                    m[i][k] = &m[i][k] - &t;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![QuadRational::zero(d); ncols];
            v[f] = QuadRational::one(d);
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -m[row][f].clone();
            }
            v
        })
        .collect()
}

fn commutator(a: &QuadMatrix, b: &QuadMatrix) -> QuadMatrix {
    a.mul(b).sub(&b.mul(a))
}

/// Direction of the one-parameter subgroup `a_t` together with its exact eigenbasis.
#[derive(Clone, Debug)]
pub struct BendingParam {
    n: usize,
    d: u32,
    x: QuadMatrix,
    basis: QuadMatrix,
    basis_inv: QuadMatrix,
}

/// Basis of the embedded `so(n−1, 1)`: the algebra elements supported on the coordinates
/// `x2, …, x_{n+1}`, which fix `e1` and `e_{n+2}`.
pub fn embedded_subalgebra(form: &GramForm) -> Vec<QuadMatrix> {
    let dim = form.dim();
    let basis = lie_algebra_basis(form);
    wedge_pairs(dim)
        .into_iter()
        .zip(basis)
        .filter(|((i, j), _)| *i >= 1 && *j <= dim - 2)
        .map(|(_, x)| x)
        .collect()
}

/// The element `X ∈ so(Q)` commuting with the embedded `so(n−1, 1)` and acting trivially on its
/// coordinates, normalized so that its eigenvalues are `1, 0, −1`.
pub fn centralizer_generator(n: usize, d: u32) -> Result<BendingParam> {
    let form = GramForm::new(n, d)?;
    let dim = form.dim();
    let basis = lie_algebra_basis(&form);
    let sub = embedded_subalgebra(&form);
    let unknowns = basis.len();
    let mut rows: Vec<Vec<QuadRational>> = Vec::new();
    // [X, h] = 0 for every h in the subalgebra
    for h in &sub {
        let cols: Vec<QuadMatrix> = basis.iter().map(|b| commutator(b, h)).collect();
        for e in 0..dim * dim {
            rows.push(cols.iter().map(|c| c.entry(e / dim, e % dim)).collect());
        }
    }
    // X e_i = 0 for the coordinates of the subalgebra
    for i in 1..dim - 1 {
        for r in 0..dim {
            rows.push(basis.iter().map(|b| b.entry(r, i)).collect());
        }
    }
    let kernel = nullspace(&rows, unknowns, d);
    if kernel.len() != 1 {
        return Err(Error::Model(format!("centralizer has dimension {} (expected 1)", kernel.len())));
    }
    let mut x = QuadMatrix::zeros(dim, d);
    for (c, b) in kernel[0].iter().zip(&basis) {
        if !c.is_zero() {
            x = x.add(&b.scale(c));
        }
    }
    // normalize so that the first nonzero diagonal entry is 1
    let top = (0..dim)
        .map(|i| x.entry(i, i))
        .find(|e| !e.is_zero())
        .ok_or_else(|| Error::Model("centralizer generator is not semisimple with real spectrum".into()))?;
    let x = x.scale(&top.inv().expect("nonzero"));
    let basis = eigenbasis(&x, d)?;
    let basis_inv = basis.inverse()?;
    Ok(BendingParam { n, d, x, basis, basis_inv })
}

/// Columns: eigenvectors for 1, then for 0, then for −1.
fn eigenbasis(x: &QuadMatrix, d: u32) -> Result<QuadMatrix> {
    let dim = x.dim();
    let mut cols: Vec<Vec<QuadRational>> = Vec::new();
    let mut counts = Vec::new();
    for lam in [1i64, 0, -1] {
        let shifted = x.sub(&QuadMatrix::identity(dim, d).scale(&QuadRational::from_int(lam.into(), d)));
        let rows: Vec<Vec<QuadRational>> = (0..dim).map(|r| (0..dim).map(|c| shifted.entry(r, c)).collect()).collect();
        let k = nullspace(&rows, dim, d);
        counts.push(k.len());
        cols.extend(k);
    }
    if counts != [1, dim - 2, 1] {
        return Err(Error::Model(format!("unexpected eigenspace dimensions {counts:?} for the bending direction")));
    }
    let mut entries = Vec::with_capacity(dim * dim);
    for r in 0..dim {
        for c in &cols {
            entries.push(c[r].clone());
        }
    }
    QuadMatrix::from_entries(dim, d, &entries)
}

/// Parse a positive rational `a/b` or integer `a`.
pub fn parse_q(s: &str, d: u32) -> Result<QuadRational> {
    let bad = || Error::Invalid(format!("bending parameter {s:?} is not a positive rational"));
    let (num, den) = match s.trim().split_once('/') {
        Some((a, b)) => (a.trim().parse::<BigInt>().map_err(|_| bad())?, b.trim().parse::<BigInt>().map_err(|_| bad())?),
        None => (s.trim().parse::<BigInt>().map_err(|_| bad())?, BigInt::one()),
    };
    if den.is_zero() || (num.is_positive() != den.is_positive()) || num.is_zero() {
        return Err(bad());
    }
    QuadRational::rational(num, den, d)
}

/// `num/den` text of a rational scalar.
pub fn format_q(q: &QuadRational) -> String {
    if q.den().is_one() {
        q.a().to_string()
    } else {
        format!("{}/{}", q.a(), q.den())
    }
}

impl BendingParam {
    pub fn direction(&self) -> &QuadMatrix {
        &self.x
    }

    pub fn eigenbasis(&self) -> &QuadMatrix {
        &self.basis
    }

    /// `a_q = P · diag(q, 1, …, 1, q⁻¹) · P⁻¹`.
    pub fn a_q(&self, q: &QuadRational) -> Result<GMatrix> {
        if !q.is_rational() || q.signum() != std::cmp::Ordering::Greater {
            return Err(Error::Invalid(format!("bending parameter {q:?} must be a positive rational")));
        }
        let dim = self.n + 2;
        let mut e = QuadMatrix::identity(dim, self.d).entries();
        e[0] = q.clone();
        e[dim * dim - 1] = q.inv().expect("q > 0");
        let diag = QuadMatrix::from_entries(dim, self.d, &e)?;
        GMatrix::certify(self.n, self.basis.mul(&diag).mul(&self.basis_inv), "a_q")
    }
}

/// Apply `σ_q`: amalgams conjugate `Γ2` by `a_q`, HNN extensions send the stable letter `s` to
/// `a_q·s` (relations read `s⁻¹δs ∈ Γ1` with `δ ∈ Δ`). `Δ` generators must commute with `a_q`.
pub fn bend(gens: &GeneratorSystem, q: &QuadRational) -> Result<GeneratorSystem> {
    let coloring = gens.coloring();
    if coloring == Coloring::Untagged {
        return Err(Error::Bending("bending needs a colored generator system".into()));
    }
    if q.is_one() {
        return Ok(gens.clone());
    }
    let param = centralizer_generator(gens.n(), gens.d())?;
    let a = param.a_q(q)?;
    let a_inv = a.inverse();
    gens.with_primaries(|g| {
        let m = &g.matrix;
        match g.tag {
            Some(Tag::Delta) => {
                if a.mul(m).mul(&a_inv) != *m {
                    return Err(Error::Bending(format!("Delta generator {:?} does not commute with a_q", g.label)));
                }
                Ok(m.clone())
            }
            Some(Tag::Gamma2) => Ok(a.mul(m).mul(&a_inv)),
            Some(Tag::Stable) => Ok(a.mul(m)),
            _ => Ok(m.clone()),
        }
    })
}

/// One bent system per parameter.
pub fn bend_sweep(gens: &GeneratorSystem, qs: &[QuadRational]) -> Result<Vec<GeneratorSystem>> {
    qs.iter().map(|q| bend(gens, q)).collect()
}

/// File name stem for parameter `q`, e.g. `q21_20`.
pub fn q_stem(q: &QuadRational) -> String {
    format!("q{}", format_q(q).replace('/', "_"))
}

/// Write each bent system to `dir` and a `manifest.json` mapping `q` to files and hashes.
pub fn write_sweep(base: &GeneratorSystem, qs: &[QuadRational], systems: &[GeneratorSystem], dir: &Path) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let param = centralizer_generator(base.n(), base.d())?;
    let mut entries = Vec::new();
    for (q, s) in qs.iter().zip(systems) {
        let name = format!("{}.json", q_stem(q));
        let text = s.to_json_string();
        std::fs::write(dir.join(&name), &text)?;
        entries.push(json!({
            "q": format_q(q),
            "file": name,
            "sha256": hex::encode(Sha256::digest(text.as_bytes())),
        }));
    }
    let matrix_text = |m: &QuadMatrix| -> Value {
        let dim = m.dim();
        Value::Array((0..dim).map(|r| Value::Array((0..dim).map(|c| json!(m.entry(r, c).to_string())).collect())).collect())
    };
    let doc = json!({
        "base_sha256": base.content_hash(),
        "rule": match base.coloring() {
            Coloring::Hnn => "hnn: stable letter s -> a_q s, Gamma1 and Delta fixed",
            _ => "amalgam: Gamma2 -> a_q g a_q^-1, Gamma1 and Delta fixed",
        },
        "direction": matrix_text(param.direction()),
        "direction_choice": "the centralizer ray acting nontrivially on e1 - e_{n+2}, the J-orthogonal line of V",
        "eigenbasis": matrix_text(param.eigenbasis()),
        "systems": entries,
    });
    let path = dir.join("manifest.json");
    std::fs::write(&path, serde_json::to_string_pretty(&doc)? + "\n")?;
    Ok(path)
}
