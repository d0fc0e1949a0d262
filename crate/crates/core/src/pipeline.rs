//! The full experiment: load, optional bending sweep, ball, cloud, estimators, reports.

use std::fmt::{self, Write as _};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::asymptotics::{growth_report, GrowthReport};
use crate::bending::{bend_sweep, format_q, parse_q, q_stem, write_sweep};
use crate::config::ExperimentConfig;
use crate::enumerate::{cartan_cloud, write_layer_counts, BallOptions, GeneratorSystem, WordBall};
use crate::error::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Config,
    Load,
    Bend,
    Enumerate,
    Project,
    Growth,
    Anosov,
    Zariski,
    Report,
    Write,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("unit variant");
        f.write_str(s.as_str().expect("string"))
    }
}

/// An error tagged with the pipeline stage that raised it.
#[derive(Debug, thiserror::Error)]
#[error("[{stage}] {source}")]
pub struct StageError {
    pub stage: Stage,
    #[source]
    pub source: Error,
}

pub trait AtStage<T> {
    fn at(self, stage: Stage) -> std::result::Result<T, StageError>;
}

impl<T, E: Into<Error>> AtStage<T> for std::result::Result<T, E> {
    fn at(self, stage: Stage) -> std::result::Result<T, StageError> {
        self.map_err(|e| StageError { stage, source: e.into() })
    }
}

pub type StageResult<T> = std::result::Result<T, StageError>;

/// One analyzed system: the base system, or one member of a bending sweep.
#[derive(Clone, Debug)]
pub struct Variant {
    pub label: String,
    pub q: Option<String>,
    pub report: GrowthReport,
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub out_dir: PathBuf,
    pub variants: Vec<Variant>,
    pub summary: String,
    pub manifest: PathBuf,
}

pub fn sha256_file(path: &Path) -> std::io::Result<String> {
    Ok(hex::encode(Sha256::digest(std::fs::read(path)?)))
}

/// Records written files and produces the manifest.
#[derive(Debug, Default)]
pub struct OutputLog {
    root: PathBuf,
    files: Vec<PathBuf>,
}

impl OutputLog {
    pub fn new(root: &Path) -> Self {
        OutputLog { root: root.to_path_buf(), files: Vec::new() }
    }

    pub fn add(&mut self, path: PathBuf) {
        if !self.files.contains(&path) {
            self.files.push(path);
        }
    }

    pub fn extend(&mut self, paths: impl IntoIterator<Item = PathBuf>) {
        for p in paths {
            self.add(p);
        }
    }

    fn entries(&self) -> Vec<Value> {
        self.files
            .iter()
            .map(|p| {
                let rel = p.strip_prefix(&self.root).unwrap_or(p);
                json!({
                    "path": rel.to_string_lossy().replace('\\', "/"),
                    "sha256": sha256_file(p).unwrap_or_default(),
                    "bytes": std::fs::metadata(p).map(|m| m.len()).unwrap_or(0),
                })
            })
            .collect()
    }

    /// Write `manifest.json` listing every recorded file; `error` marks the outputs invalid.
    pub fn write_manifest(&self, header: Value, error: Option<&StageError>) -> std::io::Result<PathBuf> {
        let mut doc = json!({
            "tool": "growthlab",
            "version": env!("CARGO_PKG_VERSION"),
            "status": if error.is_some() { "invalid" } else { "complete" },
        });
        let obj = doc.as_object_mut().expect("object");
        if let Value::Object(h) = header {
            obj.extend(h);
        }
        if let Some(e) = error {
            obj.insert("error".into(), json!({ "stage": e.stage, "message": e.source.to_string() }));
        }
        obj.insert("outputs".into(), Value::Array(self.entries()));
        std::fs::create_dir_all(&self.root)?;
        let path = self.root.join("manifest.json");
        std::fs::write(&path, serde_json::to_string_pretty(&doc).expect("json") + "\n")?;
        Ok(path)
    }
}

/// Ball, cloud and growth report for one system, written to `dir`.
pub fn analyze(
    system: &GeneratorSystem,
    config: &ExperimentConfig,
    seed: u64,
    dir: &Path,
    log: &mut OutputLog,
) -> StageResult<GrowthReport> {
    std::fs::create_dir_all(dir).at(Stage::Write)?;
    let opts = BallOptions { radius: config.radius, memory_budget: config.memory_budget, threads: None };
    let ball = WordBall::build(system, &opts).at(Stage::Enumerate)?;
    let layers = dir.join("layers.csv");
    write_layer_counts(&ball.layer_counts(), &layers).at(Stage::Write)?;
    log.add(layers);
    if !ball.is_complete() {
        return Err(StageError {
            stage: Stage::Enumerate,
            source: Error::InsufficientData(format!(
                "memory budget reached at radius {} of {}; lower the radius or raise memory_budget",
                ball.reached(),
                config.radius
            )),
        });
    }
    let cloud = cartan_cloud(&ball, config.projection_tol).at(Stage::Project)?;
    let cloud_path = dir.join("cloud.csv");
    cloud.save(&cloud_path).at(Stage::Write)?;
    log.add(cloud_path.clone());
    log.add(crate::enumerate::CartanCloud::meta_path(&cloud_path));
    let report = growth_report(&cloud, Some(&ball), &config.growth, seed).at(Stage::Growth)?;
    log.extend(report.write(dir).at(Stage::Write)?);
    Ok(report)
}

/// Run the configured experiment into `out`; `seed` overrides the configured seed.
pub fn run(config: &ExperimentConfig, out: &Path, seed: Option<u64>) -> StageResult<RunOutcome> {
    let seed = seed.unwrap_or(config.seed);
    let mut log = OutputLog::new(out);
    let gens_path = config.generators_path();
    let header = json!({
        "seed": seed,
        "config": config,
        "inputs": [{
            "path": config.generators.to_string_lossy(),
            "sha256": sha256_file(&gens_path).unwrap_or_default(),
        }],
    });
    let result = run_stages(config, out, seed, &mut log);
    let manifest = log.write_manifest(header, result.as_ref().err()).at(Stage::Write)?;
    let (variants, summary) = result?;
    Ok(RunOutcome { out_dir: out.to_path_buf(), variants, summary, manifest })
}

fn run_stages(config: &ExperimentConfig, out: &Path, seed: u64, log: &mut OutputLog) -> StageResult<(Vec<Variant>, String)> {
    config.validate().at(Stage::Config)?;
    std::fs::create_dir_all(out).at(Stage::Write)?;
    let base = GeneratorSystem::load(&config.generators_path()).at(Stage::Load)?;
    let mut variants = Vec::new();
    if config.bend.is_empty() {
        let report = analyze(&base, config, seed, &out.join("base"), log)?;
        variants.push(Variant { label: "base".into(), q: None, report });
    } else {
        let qs = config.bend.iter().map(|q| parse_q(q, base.d())).collect::<crate::Result<Vec<_>>>().at(Stage::Config)?;
        let systems = bend_sweep(&base, &qs).at(Stage::Bend)?;
        let bend_dir = out.join("bend");
        let manifest = write_sweep(&base, &qs, &systems, &bend_dir).at(Stage::Write)?;
        for q in &qs {
            log.add(bend_dir.join(format!("{}.json", q_stem(q))));
        }
        log.add(manifest);
        for (q, system) in qs.iter().zip(&systems) {
            let label = q_stem(q);
            let report = analyze(system, config, seed, &out.join(&label), log)?;
            variants.push(Variant { label, q: Some(format_q(q)), report });
        }
    }
    let summary = summary_text(&config.generators.to_string_lossy(), &variants);
    let path = out.join("summary.txt");
    std::fs::write(&path, &summary).at(Stage::Write)?;
    log.add(path);
    Ok((variants, summary))
}

/// Human-readable verdict lines for one report.
pub fn report_summary(label: &str, r: &GrowthReport) -> String {
    let mut s = String::new();
    let rho = &r.exponents[0];
    let (lo, hi) = rho.window();
    let _ = writeln!(s, "== {label} ==");
    let _ = writeln!(
        s,
        "n = {}, radius {}, ball {} elements{}",
        r.n,
        r.radius,
        r.ball_size,
        if r.complete { "" } else { " (incomplete)" }
    );
    let _ = writeln!(s, "verdict: {}", r.tempered.verdict);
    let _ = writeln!(
        s,
        "delta_rho = {:.4} +/- {:.4} over [{lo:.3}, {hi:.3}], R^2 = {:.4}",
        r.delta_rho, r.delta_rho_stderr, rho.fit.r2
    );
    match r.tempered.p_hat {
        Some(p) => {
            let _ = writeln!(s, "p_hat = {p:.3}");
        }
        None => {
            let _ = writeln!(s, "p_hat = unbounded");
        }
    }
    for e in &r.exponents[1..] {
        let _ = writeln!(s, "delta_{} = {:.4} +/- {:.4}", e.name, e.delta(), e.fit.stderr);
    }
    let _ = writeln!(s, "c_hat = {:.6} (points with |mu| >= {:.3})", r.cone.c_hat, r.cone.t_min);
    for d in &r.directions {
        if let (Some(f), Some(a)) = (d.psi, d.aperture_used) {
            let _ = writeln!(
                s,
                "psi({:.4}, {:.4}) = {:.4} +/- {:.4} (aperture {a})",
                d.direction.v1, d.direction.v2, f.slope, f.stderr
            );
        }
    }
    let skipped = r.directions.iter().filter(|d| d.insufficient()).count();
    if skipped > 0 {
        let _ = writeln!(s, "directions with insufficient data: {skipped}");
    }
    if let (Some(v), Some(m)) = (r.bounds.v_sigma, r.bounds.max_ratio) {
        let _ = writeln!(s, "v_sigma = ({:.4}, {:.4}), max psi/rho = {m:.4}", v.v1, v.v2);
    }
    let pass = |b: bool| if b { "pass" } else { "FAIL" };
    if r.bounds.theorem_applies {
        let _ = writeln!(s, "property-(T) bound: {}", pass(r.bounds.all_pass));
    } else {
        let within = if r.bounds.all_pass { "within" } else { "exceeded" };
        let _ = writeln!(s, "property-(T) reference bound (not a theorem for n = 2): {within}");
    }
    let _ = writeln!(s, "KMO inequality: {}", pass(r.kmo_pass));
    match &r.anosov {
        Some(a) => {
            let _ = writeln!(
                s,
                "anosov: slope {:.4}, intercept {:.4}, R^2 {:.4}, gap-degenerate: {}",
                a.fit.slope,
                a.fit.intercept,
                a.fit.r2,
                if a.degenerate { "yes" } else { "no" }
            );
        }
        None => {
            let _ = writeln!(s, "anosov: insufficient data");
        }
    }
    if let Some(z) = &r.zariski {
        let _ = writeln!(s, "zariski span rank: {} / {}", z.rank, z.full);
    }
    s
}

/// Per-`q` table of cone slope, exponent and Zariski rank.
pub fn sweep_table(variants: &[Variant]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{:<10} {:>10} {:>10} {:>10} {:>9}", "q", "c_hat", "delta_rho", "stderr", "zariski");
    for v in variants {
        let r = &v.report;
        let rank = r.zariski.as_ref().map_or("-".to_string(), |z| format!("{}/{}", z.rank, z.full));
        let _ = writeln!(
            s,
            "{:<10} {:>10.6} {:>10.4} {:>10.4} {:>9}",
            v.q.as_deref().unwrap_or("-"),
            r.cone.c_hat,
            r.delta_rho,
            r.delta_rho_stderr,
            rank
        );
    }
    s
}

pub fn summary_text(source: &str, variants: &[Variant]) -> String {
    let mut s = format!("growthlab summary for {source}\n\n");
    if variants.iter().any(|v| v.q.is_some()) {
        s.push_str("bending sweep\n");
        s.push_str(&sweep_table(variants));
        s.push('\n');
    }
    for v in variants {
        s.push_str(&report_summary(&v.label, &v.report));
        s.push('\n');
    }
    s
}
