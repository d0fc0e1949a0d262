use serde::{Deserialize, Serialize};

/// Ordinary least-squares line `y ≈ slope·x + intercept`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope from the residuals.
    pub stderr: f64,
    pub r2: f64,
    pub points: usize,
}

impl LineFit {
    /// `2·stderr + slack`.
    pub fn tolerance(&self, slack: f64) -> f64 {
        2.0 * self.stderr + slack
    }
}

/// Fit a line through at least three points with distinct abscissae.
pub fn fit_line(xs: &[f64], ys: &[f64]) -> Option<LineFit> {
    let k = xs.len();
    if k < 3 || ys.len() != k {
        return None;
    }
    let kf = k as f64;
    let mx = xs.iter().sum::<f64>() / kf;
    let my = ys.iter().sum::<f64>() / kf;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx <= 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = xs.iter().zip(ys).map(|(x, y)| (y - slope * x - intercept).powi(2)).sum();
    let stderr = (ssr / (kf - 2.0) / sxx).sqrt();
    let r2 = if syy > 0.0 { 1.0 - ssr / syy } else { 1.0 };
    Some(LineFit { slope, intercept, stderr, r2, points: k })
}

/// `k` evenly spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, k: usize) -> Vec<f64> {
    match k {
        0 => Vec::new(),
        1 => vec![hi],
        _ => (0..k).map(|i| lo + (hi - lo) * i as f64 / (k - 1) as f64).collect(),
    }
}
