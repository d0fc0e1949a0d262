use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::anosov::{anosov_gap, AnosovFit};
use super::cone::{limit_cone, norm_completeness_radius, ConeEstimate};
use super::fit::linspace;
use super::growth::{
    bounds_check, critical_exponent, direction_grid, directional_growth, temperedness_verdict, BoundsCheck,
    CountSettings, DirectionalGrowth, ExponentFit, TemperednessVerdict, DEFAULT_APERTURES,
};
use super::zariski::{zariski_span_rank, ZariskiRank, ZariskiSettings};
use crate::enumerate::{CartanCloud, WordBall};
use crate::error::{Error, Result};
use crate::liegroup::{property_t_form, rho_form, ChamberVec};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GrowthOptions {
    pub apertures: Vec<f64>,
    /// Number of directions sampled across the chamber.
    pub directions: usize,
    pub counts: CountSettings,
    /// Added to `2·stderr` to form the tolerance of a fitted slope.
    pub fit_slack: f64,
    /// Limit-cone cutoff as a fraction of the norm completeness radius.
    pub cone_cutoff: f64,
    pub zariski: ZariskiSettings,
}

impl Default for GrowthOptions {
    fn default() -> Self {
        GrowthOptions {
            apertures: DEFAULT_APERTURES.to_vec(),
            directions: 9,
            counts: CountSettings::default(),
            fit_slack: 0.05,
            cone_cutoff: 0.5,
            zariski: ZariskiSettings::default(),
        }
    }
}

/// `ψ̂(v) ≤ δ̂_ρ·ρ(v)` up to the combined tolerance of both fits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KmoRow {
    pub direction: ChamberVec,
    pub psi: f64,
    pub limit: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    pub n: usize,
    pub radius: usize,
    pub ball_size: usize,
    pub complete: bool,
    pub generator_hash: String,
    /// `min{‖μ(γ)‖ : |γ| = R}`; directional counts stay below it.
    pub t_norm: f64,
    pub cone: ConeEstimate,
    pub directions: Vec<DirectionalGrowth>,
    /// `ρ` first.
    pub exponents: Vec<ExponentFit>,
    pub delta_rho: f64,
    pub delta_rho_stderr: f64,
    pub tempered: TemperednessVerdict,
    pub bounds: BoundsCheck,
    pub kmo: Vec<KmoRow>,
    pub kmo_pass: bool,
    pub cone_consistent: bool,
    pub apertures_nested: bool,
    pub anosov: Option<AnosovFit>,
    pub zariski: Option<ZariskiRank>,
    pub notes: Vec<String>,
}

/// All estimators on one cloud; the Zariski rank needs the ball.
pub fn growth_report(cloud: &CartanCloud, ball: Option<&WordBall>, opts: &GrowthOptions, seed: u64) -> Result<GrowthReport> {
    if cloud.points.is_empty() {
        return Err(Error::InsufficientData("cloud has no non-identity elements".into()));
    }
    let n = cloud.meta.n;
    let mut notes = Vec::new();
    if !cloud.meta.complete {
        notes.push("ball is incomplete (memory budget); counts are truncated".to_string());
    }
    let t_norm = norm_completeness_radius(cloud).expect("nonempty cloud");
    let cone = limit_cone(cloud, opts.cone_cutoff * t_norm)?;
    let grid = linspace(t_norm / 2.0, t_norm, opts.counts.grid_points);
    let directions: Vec<DirectionalGrowth> = direction_grid(opts.directions)
        .into_par_iter()
        .map(|v| directional_growth(cloud, v, &opts.apertures, &grid, &opts.counts))
        .collect::<Result<_>>()?;
    let rho = critical_exponent(cloud, "rho", rho_form(n), &opts.counts)?;
    let mut exponents = vec![rho.clone()];
    match critical_exponent(cloud, "property_t", property_t_form(n), &opts.counts) {
        Ok(e) => exponents.push(e),
        Err(e) => notes.push(format!("property_t exponent: {e}")),
    }
    let delta_rho = rho.delta();
    let delta_tol = rho.fit.tolerance(opts.fit_slack);
    let tempered = temperedness_verdict(delta_rho, rho.fit.stderr);
    let bounds = bounds_check(&directions, n, opts.fit_slack);
    let kmo: Vec<KmoRow> = directions
        .iter()
        .filter_map(|d| {
            let fit = d.psi?;
            let r = rho_form(n).eval(&d.direction);
            let limit = delta_rho * r + delta_tol * r + fit.tolerance(opts.fit_slack);
            Some(KmoRow { direction: d.direction, psi: fit.slope, limit, pass: fit.slope <= limit })
        })
        .collect();
    let cone_consistent = directions
        .iter()
        .filter_map(|d| d.aperture_used.map(|a| cone.contains_dilated(&d.direction, a)))
        .all(|ok| ok);
    let apertures_nested = directions.iter().all(DirectionalGrowth::counts_nested);
    let anosov = match anosov_gap(cloud) {
        Ok(a) => Some(a),
        Err(e) => {
            notes.push(format!("anosov: {e}"));
            None
        }
    };
    let zariski = ball.map(|b| zariski_span_rank(b, &opts.zariski, seed));
    for d in directions.iter().filter(|d| d.insufficient()) {
        notes.push(format!("direction ({:.4}, {:.4}): insufficient data", d.direction.v1, d.direction.v2));
    }
    Ok(GrowthReport {
        n,
        radius: cloud.meta.radius,
        ball_size: cloud.meta.ball_size,
        complete: cloud.meta.complete,
        generator_hash: cloud.meta.generator_hash.clone(),
        t_norm,
        cone,
        kmo_pass: kmo.iter().all(|k| k.pass),
        kmo,
        directions,
        delta_rho,
        delta_rho_stderr: rho.fit.stderr,
        exponents,
        tempered,
        bounds,
        cone_consistent,
        apertures_nested,
        anosov,
        zariski,
        notes,
    })
}

impl GrowthReport {
    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn load(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }

    /// `report.json`, `directions.csv`, `exponents.csv` and, when fitted, `anosov.csv`.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut out = Vec::new();
        let path = dir.join("report.json");
        std::fs::write(&path, self.to_json_string()?)?;
        out.push(path);

        let path = dir.join("directions.csv");
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(["direction", "v1", "v2", "aperture", "t", "count"])?;
        for (i, d) in self.directions.iter().enumerate() {
            for a in &d.apertures {
                for (t, c) in d.grid.iter().zip(&a.counts) {
                    w.serialize((i, d.direction.v1, d.direction.v2, a.aperture, t, c))?;
                }
            }
        }
        w.flush()?;
        out.push(path);

        let path = dir.join("exponents.csv");
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(["form", "t", "count"])?;
        for e in &self.exponents {
            for (t, c) in e.grid.iter().zip(&e.counts) {
                w.serialize((&e.name, t, c))?;
            }
        }
        w.flush()?;
        out.push(path);

        if let Some(a) = &self.anosov {
            let path = dir.join("anosov.csv");
            let mut w = csv::Writer::from_path(&path)?;
            w.write_record(["layer", "min_alpha1"])?;
            for (k, m) in &a.minima {
                w.serialize((k, m))?;
            }
            w.flush()?;
            out.push(path);
        }
        Ok(out)
    }
}
