use serde::{Deserialize, Serialize};

use crate::enumerate::CartanCloud;
use crate::error::{Error, Result};
use crate::liegroup::ChamberVec;

/// Estimate of the limit cone `{0 ≤ v2 ≤ c·v1}` from the far part of a cloud.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConeEstimate {
    pub c_hat: f64,
    /// Unit directions of the points with the smallest and the largest angle.
    pub extremal: Vec<ChamberVec>,
    pub t_min: f64,
    pub points_used: usize,
}

impl ConeEstimate {
    /// Angles of the extremal rays.
    pub fn angle_range(&self) -> (f64, f64) {
        let lo = self.extremal.first().map_or(0.0, ChamberVec::angle);
        let hi = self.extremal.last().map_or(0.0, ChamberVec::angle);
        (lo, hi)
    }

    /// Whether `v` lies within `slack` radians of the cone hull.
    pub fn contains_dilated(&self, v: &ChamberVec, slack: f64) -> bool {
        let (lo, hi) = self.angle_range();
        let a = v.angle();
        a >= lo - slack && a <= hi + slack
    }
}

/// `c_hat = max{v2/v1 : ‖μ(γ)‖ ≥ T_min}`; negative `v2` from rounding counts as zero.
pub fn limit_cone(cloud: &CartanCloud, t_min: f64) -> Result<ConeEstimate> {
    let mut used = 0usize;
    let mut lo: Option<(f64, ChamberVec)> = None;
    let mut hi: Option<(f64, ChamberVec)> = None;
    for p in &cloud.points {
        let mu = p.mu();
        if mu.norm() < t_min || mu.norm() == 0.0 {
            continue;
        }
        used += 1;
        let a = mu.angle();
        if lo.is_none_or(|(b, _)| a < b) {
            lo = Some((a, mu));
        }
        if hi.is_none_or(|(b, _)| a > b) {
            hi = Some((a, mu));
        }
    }
    let (Some((_, lo)), Some((_, hi))) = (lo, hi) else {
        return Err(Error::InsufficientData(format!(
            "no cloud points with |mu| >= {t_min}; enumerate a larger ball"
        )));
    };
    let c_hat = (hi.v2 / hi.v1).max(0.0);
    Ok(ConeEstimate {
        c_hat,
        extremal: vec![lo.unit().expect("nonzero"), hi.unit().expect("nonzero")],
        t_min,
        points_used: used,
    })
}

/// Norm completeness radius `min{‖μ(γ)‖ : |γ| = R}` over the outermost layer.
pub fn norm_completeness_radius(cloud: &CartanCloud) -> Option<f64> {
    let r = cloud.max_wordlen();
    cloud.points.iter().filter(|p| p.wordlen == r).map(|p| p.mu().norm()).min_by(f64::total_cmp)
}
