use serde::{Deserialize, Serialize};

/// Point `diag(v1, v2, 0, …, 0, −v2, −v1)` of the Cartan subspace, stored by its two coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChamberVec {
    pub v1: f64,
    pub v2: f64,
}

impl ChamberVec {
    pub const ZERO: ChamberVec = ChamberVec { v1: 0.0, v2: 0.0 };

    pub fn new(v1: f64, v2: f64) -> Self {
        ChamberVec { v1, v2 }
    }

    /// Euclidean norm on `(v1, v2)`.
    pub fn norm(&self) -> f64 {
        self.v1.hypot(self.v2)
    }

    pub fn unit(&self) -> Option<ChamberVec> {
        let r = self.norm();
        (r > 0.0).then(|| ChamberVec::new(self.v1 / r, self.v2 / r))
    }

    /// Angle from the `v1` axis.
    pub fn angle(&self) -> f64 {
        self.v2.atan2(self.v1)
    }

    pub fn from_angle(theta: f64) -> Self {
        ChamberVec::new(theta.cos(), theta.sin())
    }

    /// `v1 ≥ v2 ≥ 0` up to `tol`.
    pub fn in_chamber(&self, tol: f64) -> bool {
        self.v1 + tol >= self.v2 && self.v2 >= -tol
    }
}

/// Linear functional `φ(v) = c1·v1 + c2·v2` on the Cartan subspace.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearForm {
    pub c1: f64,
    pub c2: f64,
}

impl LinearForm {
    pub fn new(c1: f64, c2: f64) -> Self {
        LinearForm { c1, c2 }
    }

    pub fn eval(&self, v: &ChamberVec) -> f64 {
        self.c1 * v.v1 + self.c2 * v.v2
    }
}

/// First simple root `v1 − v2`.
pub fn alpha1() -> LinearForm {
    LinearForm::new(1.0, -1.0)
}

/// Second simple root `v2`.
pub fn alpha2() -> LinearForm {
    LinearForm::new(0.0, 1.0)
}

/// Half sum of positive roots with multiplicity: `α1` and `α1 + 2α2` once each, `α2` and
/// `α1 + α2` with multiplicity `n − 2`.
pub fn rho_form(n: usize) -> LinearForm {
    let n = n as f64;
    LinearForm::new(n / 2.0, (n - 2.0) / 2.0)
}

/// Growth bound `(n−1)v1 + (n−2)v2 = 2ρ − Θ`, with `Θ(v) = v1` the sum over the maximal strongly
/// orthogonal system `{α1 + 2α2, α1}` halved. The bound is a theorem for `n ≥ 3`; for `n = 2`
/// the same form is returned and used as a plain reference value.
pub fn property_t_form(n: usize) -> LinearForm {
    let n = n as f64;
    LinearForm::new(n - 1.0, n - 2.0)
}
