use std::fmt;

use serde::{Deserialize, Serialize};

use super::fit::{fit_line, linspace, LineFit};
use crate::enumerate::CartanCloud;
use crate::error::{Error, Result};
use crate::liegroup::{property_t_form, rho_form, ChamberVec, LinearForm};

/// Counting settings shared by the directional and the form-based estimators.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CountSettings {
    pub grid_points: usize,
    /// Minimum number of grid points with nonzero counts for a fit.
    pub min_nonzero: usize,
    /// Minimum population of a cone for its slope to be used as `ψ̂`.
    pub min_cone_points: usize,
}

impl Default for CountSettings {
    fn default() -> Self {
        CountSettings { grid_points: 16, min_nonzero: 8, min_cone_points: 50 }
    }
}

pub const DEFAULT_APERTURES: [f64; 3] = [0.3, 0.2, 0.1];

/// Counts and fit for one aperture.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApertureFit {
    pub aperture: f64,
    /// `N_C(T)` on the grid.
    pub counts: Vec<u64>,
    /// `None` when fewer than the required grid points have nonzero counts.
    pub fit: Option<LineFit>,
}

/// Growth estimate along one direction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DirectionalGrowth {
    pub direction: ChamberVec,
    pub grid: Vec<f64>,
    /// One entry per aperture, in the order given.
    pub apertures: Vec<ApertureFit>,
    /// Slope at the smallest adequately populated aperture; `None` means insufficient data.
    pub psi: Option<LineFit>,
    pub aperture_used: Option<f64>,
}

impl DirectionalGrowth {
    pub fn insufficient(&self) -> bool {
        self.psi.is_none()
    }

    /// Counts never increase when the aperture shrinks.
    pub fn counts_nested(&self) -> bool {
        let mut order: Vec<&ApertureFit> = self.apertures.iter().collect();
        order.sort_by(|a, b| b.aperture.total_cmp(&a.aperture));
        order.windows(2).all(|w| w[0].counts.iter().zip(&w[1].counts).all(|(big, small)| small <= big))
    }
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.windows(2).any(|w| w[1] <= w[0]) || grid.iter().any(|t| !t.is_finite()) {
        return Err(Error::Invalid("count grid must be finite and strictly increasing".into()));
    }
    Ok(())
}

/// Log-count fit over the grid points with nonzero counts.
fn log_fit(grid: &[f64], counts: &[u64], min_nonzero: usize) -> Option<LineFit> {
    let (xs, ys): (Vec<f64>, Vec<f64>) =
        grid.iter().zip(counts).filter(|(_, &c)| c > 0).map(|(&t, &c)| (t, (c as f64).ln())).unzip();
    if xs.len() < min_nonzero.max(3) {
        return None;
    }
    fit_line(&xs, &ys)
}

/// `ψ̂(v)`: slope of `log N_C(T)` where `N_C(T)` counts points with `‖μ‖ ≤ T` in the open cone of
/// half-angle `aperture` around `v`.
pub fn directional_growth(
    cloud: &CartanCloud,
    v: ChamberVec,
    apertures: &[f64],
    grid: &[f64],
    settings: &CountSettings,
) -> Result<DirectionalGrowth> {
    if apertures.iter().any(|&a| !(a > 0.0)) {
        return Err(Error::Invalid("apertures must be positive".into()));
    }
    check_grid(grid)?;
    let v = v.unit().ok_or_else(|| Error::Invalid("direction must be nonzero".into()))?;
    let theta = v.angle();
    let polar: Vec<(f64, f64)> = cloud
        .points
        .iter()
        .map(|p| p.mu())
        .filter(|m| m.norm() > 0.0)
        .map(|m| (m.norm(), (m.angle() - theta).abs()))
        .collect();
    let fits: Vec<ApertureFit> = apertures
        .iter()
        .map(|&aperture| {
            let mut norms: Vec<f64> = polar.iter().filter(|(_, da)| *da < aperture).map(|(r, _)| *r).collect();
            norms.sort_by(f64::total_cmp);
            let counts: Vec<u64> = grid.iter().map(|&t| norms.partition_point(|&r| r <= t) as u64).collect();
            let fit = log_fit(grid, &counts, settings.min_nonzero);
            ApertureFit { aperture, counts, fit }
        })
        .collect();
    let chosen = fits
        .iter()
        .filter(|f| f.fit.is_some() && f.counts.last().copied().unwrap_or(0) >= settings.min_cone_points as u64)
        .min_by(|a, b| a.aperture.total_cmp(&b.aperture));
    Ok(DirectionalGrowth {
        direction: v,
        grid: grid.to_vec(),
        psi: chosen.and_then(|f| f.fit),
        aperture_used: chosen.map(|f| f.aperture),
        apertures: fits,
    })
}

/// Evenly spaced unit directions across the closed chamber `0 ≤ v2 ≤ v1`, from `(1,0)` to
/// `(1,1)/√2`.
pub fn direction_grid(k: usize) -> Vec<ChamberVec> {
    linspace(0.0, std::f64::consts::FRAC_PI_4, k).into_iter().map(ChamberVec::from_angle).collect()
}

/// Critical exponent estimate for a linear form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub name: String,
    pub form: LinearForm,
    /// `min{φ(μ(γ)) : |γ| = R}`.
    pub t_comp: f64,
    pub grid: Vec<f64>,
    pub counts: Vec<u64>,
    pub fit: LineFit,
}

impl ExponentFit {
    pub fn delta(&self) -> f64 {
        self.fit.slope
    }

    pub fn window(&self) -> (f64, f64) {
        (self.grid[0], *self.grid.last().expect("nonempty grid"))
    }
}

/// `δ̂_φ`: slope of `log #{γ : φ(μ(γ)) ≤ T}` over `[T_comp/2, T_comp]`.
pub fn critical_exponent(cloud: &CartanCloud, name: &str, form: LinearForm, settings: &CountSettings) -> Result<ExponentFit> {
    if cloud.points.is_empty() {
        return Err(Error::InsufficientData("empty cloud".into()));
    }
    // a linear form is positive on a planar cone iff it is positive on both extremal rays
    let cone = super::cone::limit_cone(cloud, 0.0)?;
    if cone.extremal.iter().any(|u| form.eval(u) <= 0.0) {
        return Err(Error::Invalid(format!("form {name} is not positive on the limit cone")));
    }
    let r = cloud.max_wordlen();
    let t_comp = cloud
        .points
        .iter()
        .filter(|p| p.wordlen == r)
        .map(|p| form.eval(&p.mu()))
        .min_by(f64::total_cmp)
        .expect("outer layer nonempty");
    if !(t_comp > 0.0) {
        return Err(Error::InsufficientData(format!("completeness radius {t_comp} for {name} is not positive")));
    }
    let grid = linspace(t_comp / 2.0, t_comp, settings.grid_points);
    let mut vals: Vec<f64> = cloud.points.iter().map(|p| form.eval(&p.mu())).collect();
    vals.sort_by(f64::total_cmp);
    let counts: Vec<u64> = grid.iter().map(|&t| vals.partition_point(|&x| x <= t) as u64).collect();
    let fit = log_fit(&grid, &counts, settings.min_nonzero).ok_or_else(|| {
        Error::InsufficientData(format!("too few populated grid points below T_comp = {t_comp:.4} for {name}"))
    })?;
    Ok(ExponentFit { name: name.to_string(), form, t_comp, grid, counts, fit })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Tempered,
    NonTempered,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Tempered => "tempered",
            Verdict::NonTempered => "non-tempered",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TemperednessVerdict {
    pub verdict: Verdict,
    /// `δ̂_ρ − 1`.
    pub margin: f64,
    /// Integrability exponent `2/(1 − η̂)`; `None` when `η̂ ≥ 1`.
    pub p_hat: Option<f64>,
}

/// Inconclusive when `|δ̂_ρ − 1| ≤ 2·stderr`, so an exact boundary value is never decided.
pub fn temperedness_verdict(delta_rho: f64, stderr: f64) -> TemperednessVerdict {
    let margin = delta_rho - 1.0;
    let verdict = if margin.abs() <= 2.0 * stderr {
        Verdict::Inconclusive
    } else if margin < 0.0 {
        Verdict::Tempered
    } else {
        Verdict::NonTempered
    };
    let eta = margin.max(0.0);
    let p_hat = (eta < 1.0).then(|| 2.0 / (1.0 - eta));
    TemperednessVerdict { verdict, margin, p_hat }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundRow {
    pub direction: ChamberVec,
    pub psi: f64,
    pub tolerance: f64,
    /// `(n−1)v1 + (n−2)v2`.
    pub bound: f64,
    /// `ψ̂(v)/ρ(v)`.
    pub ratio_to_rho: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundsCheck {
    pub rows: Vec<BoundRow>,
    /// Directions without enough data.
    pub skipped: Vec<ChamberVec>,
    /// Direction maximizing `ψ̂/ρ`; ties go to the first in lexicographic `(v1, v2)` order.
    pub v_sigma: Option<ChamberVec>,
    pub max_ratio: Option<f64>,
    pub all_pass: bool,
    /// The bound is a theorem only for `n ≥ 3`; for `n = 2` it is a reference value.
    pub theorem_applies: bool,
}

impl BoundsCheck {
    /// No violation of a bound that holds as a theorem.
    pub fn holds(&self) -> bool {
        !self.theorem_applies || self.all_pass
    }
}

/// Compare every populated `ψ̂(v)` with the bound `(n−1)v1 + (n−2)v2` at tolerance
/// `2·stderr + slack`.
pub fn bounds_check(samples: &[DirectionalGrowth], n: usize, slack: f64) -> BoundsCheck {
    let bound_form = property_t_form(n);
    let rho = rho_form(n);
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for s in samples {
        match s.psi {
            Some(fit) => {
                let v = s.direction;
                let bound = bound_form.eval(&v);
                let tolerance = fit.tolerance(slack);
                rows.push(BoundRow {
                    direction: v,
                    psi: fit.slope,
                    tolerance,
                    bound,
                    ratio_to_rho: fit.slope / rho.eval(&v),
                    pass: fit.slope <= bound + tolerance,
                });
            }
            None => skipped.push(s.direction),
        }
    }
    let mut order: Vec<&BoundRow> = rows.iter().collect();
    order.sort_by(|a, b| a.direction.v1.total_cmp(&b.direction.v1).then(a.direction.v2.total_cmp(&b.direction.v2)));
    let mut best: Option<&BoundRow> = None;
    for r in order {
        if best.is_none_or(|b| r.ratio_to_rho > b.ratio_to_rho) {
            best = Some(r);
        }
    }
    BoundsCheck {
        all_pass: rows.iter().all(|r| r.pass),
        theorem_applies: n >= 3,
        v_sigma: best.map(|b| b.direction),
        max_ratio: best.map(|b| b.ratio_to_rho),
        rows,
        skipped,
    }
}
