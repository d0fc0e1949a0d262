use super::gmatrix::GMatrix;
use super::gram::{adapted_basis, GramForm};
use crate::error::{Error, Result};
use crate::scalars::QuadMatrix;

/// Extend `h ∈ SO(Q0)` to SO(Q): act by `h` on `V` and trivially on the J-orthogonal line
/// spanned by `e1 − e_{n+2}`, i.e. `P · (h ⊕ 1) · P⁻¹` with the adapted basis `P`.
pub fn embed_h(form: &GramForm, h: &QuadMatrix) -> Result<GMatrix> {
    let n = form.n;
    if h.dim() != n + 1 {
        return Err(Error::Dimension { expected: n + 1, got: h.dim() });
    }
    if h.transpose().mul(&form.j0).mul(h) != form.j0 {
        return Err(Error::NotFormPreserving { label: "h".into() });
    }
    let det = h.det();
    if !det.is_one() {
        return Err(Error::BadDeterminant { label: "h".into(), det: format!("{det:?}") });
    }
    let d = h.d();
    let dim = n + 2;
    let mut entries = QuadMatrix::identity(dim, d).entries();
    for r in 0..=n {
        for c in 0..=n {
            entries[r * dim + c] = h.entry(r, c);
        }
    }
    let block = QuadMatrix::from_entries(dim, d, &entries)?;
    let p = adapted_basis(n, d);
    let p_inv = p.inverse()?;
    Ok(GMatrix::from_trusted(n, p.mul(&block).mul(&p_inv)))
}
