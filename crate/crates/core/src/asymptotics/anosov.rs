use serde::{Deserialize, Serialize};

use super::fit::{fit_line, LineFit};
use crate::enumerate::CartanCloud;
use crate::error::{Error, Result};
use crate::liegroup::alpha1;

/// Linear fit of the per-layer minimum of `α1(μ(γ))` against the word length.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnosovFit {
    /// `(word length, min α1)` for every populated layer `≥ 1`.
    pub minima: Vec<(u32, f64)>,
    pub fit: LineFit,
    pub head_slope: f64,
    pub tail_slope: f64,
    /// Set when the slope is not positive, `R² < 0.9`, or the outer half of the layers grows at
    /// less than half the rate of the inner half.
    pub degenerate: bool,
}

pub const MIN_LAYERS: usize = 5;

pub fn anosov_gap(cloud: &CartanCloud) -> Result<AnosovFit> {
    let r = cloud.max_wordlen() as usize;
    let mut minima = vec![f64::INFINITY; r + 1];
    for p in &cloud.points {
        let a = alpha1().eval(&p.mu());
        let m = &mut minima[p.wordlen as usize];
        *m = m.min(a);
    }
    let minima: Vec<(u32, f64)> =
        minima.into_iter().enumerate().skip(1).filter(|(_, m)| m.is_finite()).map(|(k, m)| (k as u32, m)).collect();
    if minima.len() < MIN_LAYERS {
        return Err(Error::InsufficientData(format!(
            "{} populated layers, at least {MIN_LAYERS} are needed for a gap fit",
            minima.len()
        )));
    }
    let fit_of = |pts: &[(u32, f64)]| {
        let xs: Vec<f64> = pts.iter().map(|p| p.0 as f64).collect();
        let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
        fit_line(&xs, &ys).expect("distinct layers")
    };
    let fit = fit_of(&minima);
    let half = minima.len() / 2;
    let head_slope = fit_of(&minima[..minima.len() - half]).slope;
    let tail_slope = fit_of(&minima[half..]).slope;
    let degenerate = !(fit.slope > 0.0) || fit.r2 < 0.9 || tail_slope < 0.5 * head_slope;
    Ok(AnosovFit { minima, fit, head_slope, tail_slope, degenerate })
}
