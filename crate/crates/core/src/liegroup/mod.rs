//! The group SO(Q) for `Q = x1·x_{n+2} + x2·x_{n+1} + Σ x_i²`, its Cartan data and the embedded
//! subgroup stabilizing `V = {x1 = x_{n+2}}`.

mod adjoint;
mod embed;
mod forms;
mod gmatrix;
mod gram;
mod projection;
pub mod synth;

pub use adjoint::{adjoint, adjoint_exact, adjoint_scaled, lie_algebra_basis, lie_algebra_dim, lie_coords};
pub use embed::embed_h;
pub use forms::{alpha1, alpha2, property_t_form, rho_form, ChamberVec, LinearForm};
pub use gmatrix::{GMatrix, ScaledFloat};
pub use gram::{gram_form, GramForm};
pub use projection::{
    cartan_projection, cartan_projection_f64, cartan_projection_with, jordan_projection, jordan_projection_with,
    DEFAULT_TOL,
};
