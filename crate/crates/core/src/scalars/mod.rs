//! Exact arithmetic in a real quadratic field Q(√d) and matrices over it.

mod matrix;
mod poly;
mod quad;

pub use matrix::{wedge_pairs, QuadMatrix};
pub use poly::{char_poly, Poly};
pub use quad::{check_discriminant, embed_real, Embedding, QuadRational, EMBED_REL_ERROR};
