//! Exact and numerical tools for discrete subgroups of SO(n,2): word balls, Cartan projections,
//! growth indicators, critical exponents and bending deformations.

pub mod error;
pub mod liegroup;
pub mod scalars;

pub use error::{Error, Result};
pub mod enumerate;
pub mod bundled;
pub mod bending;
pub mod asymptotics;
pub mod config;
pub mod pipeline;
