//! Experiment configuration, read from a TOML file.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::asymptotics::GrowthOptions;
use crate::bending::parse_q;
use crate::enumerate::DEFAULT_MEMORY_BUDGET;
use crate::error::{Error, Result};
use crate::liegroup::DEFAULT_TOL;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Generator file, relative to the configuration file.
    pub generators: PathBuf,
    pub radius: usize,
    #[serde(default)]
    pub seed: u64,
    /// Bending parameters `q = e^t` as rationals such as `"21/20"`; empty means no sweep.
    #[serde(default)]
    pub bend: Vec<String>,
    /// Output directory, relative to the configuration file; `--out` overrides it.
    #[serde(default)]
    pub output: Option<PathBuf>,
    /// Pairing tolerance of the Cartan projection.
    #[serde(default = "default_projection_tol")]
    pub projection_tol: f64,
    #[serde(default = "default_memory_budget")]
    pub memory_budget: usize,
    #[serde(default)]
    pub growth: GrowthOptions,
    /// Directory the relative paths are resolved against; not part of the file.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn default_projection_tol() -> f64 {
    DEFAULT_TOL
}

fn default_memory_budget() -> usize {
    DEFAULT_MEMORY_BUDGET
}

impl ExperimentConfig {
    /// Minimal configuration with every tolerance at its default.
    pub fn new(generators: impl Into<PathBuf>, radius: usize) -> Self {
        ExperimentConfig {
            generators: generators.into(),
            radius,
            seed: 0,
            bend: Vec::new(),
            output: None,
            projection_tol: DEFAULT_TOL,
            memory_budget: DEFAULT_MEMORY_BUDGET,
            growth: GrowthOptions::default(),
            base_dir: PathBuf::from("."),
        }
    }

    pub fn from_toml_str(text: &str, base_dir: &Path) -> Result<Self> {
        let mut c: ExperimentConfig =
            toml::from_str(text).map_err(|e| Error::Invalid(format!("configuration: {e}")))?;
        c.base_dir = base_dir.to_path_buf();
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Invalid(format!("configuration {}: {e}", path.display())))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        let c = Self::from_toml_str(&text, &base)?;
        c.validate()?;
        Ok(c)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Invalid(format!("configuration: {e}")))
    }

    pub fn generators_path(&self) -> PathBuf {
        self.base_dir.join(&self.generators)
    }

    pub fn output_path(&self) -> Option<PathBuf> {
        self.output.as_ref().map(|o| self.base_dir.join(o))
    }

    pub fn validate(&self) -> Result<()> {
        let gens = self.generators_path();
        if !gens.is_file() {
            return Err(Error::Invalid(format!("generator file {} does not exist", gens.display())));
        }
        if self.radius < 1 {
            return Err(Error::Invalid("radius must be at least 1".into()));
        }
        for q in &self.bend {
            parse_q(q, 1)?;
        }
        let g = &self.growth;
        if g.apertures.is_empty() || g.apertures.iter().any(|a| !(*a > 0.0)) {
            return Err(Error::Invalid("apertures must be positive".into()));
        }
        if g.directions == 0 || g.counts.grid_points < 3 {
            return Err(Error::Invalid("need at least one direction and three grid points".into()));
        }
        if !(self.projection_tol > 0.0) || !(g.zariski.rel_tol > 0.0) || !(g.fit_slack >= 0.0) {
            return Err(Error::Invalid("tolerances must be positive".into()));
        }
        Ok(())
    }
}
