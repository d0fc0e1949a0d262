use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ball::WordBall;
use crate::error::{Error, Result};
use crate::liegroup::{cartan_projection_with, ChamberVec};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CloudPoint {
    pub v1: f64,
    pub v2: f64,
    pub wordlen: u32,
}

impl CloudPoint {
    pub fn mu(&self) -> ChamberVec {
        ChamberVec::new(self.v1, self.v2)
    }
}

/// Session data stored next to a cloud.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CloudMeta {
    pub n: usize,
    pub d: u32,
    pub radius: usize,
    pub generator_hash: String,
    /// Ball size including the identity.
    pub ball_size: usize,
    pub layer_counts: Vec<usize>,
    pub complete: bool,
}

/// Cartan projections of the non-identity elements of a word ball with their word lengths.
#[derive(Clone, Debug, PartialEq)]
pub struct CartanCloud {
    pub meta: CloudMeta,
    pub points: Vec<CloudPoint>,
}

/// Project every non-identity element; the identity is kept only in the metadata counts.
pub fn cartan_cloud(ball: &WordBall, tol: f64) -> Result<CartanCloud> {
    let elements = ball.elements();
    let results: Vec<Result<CloudPoint>> = (1..elements.len())
        .into_par_iter()
        .map(|i| {
            let mu = cartan_projection_with(&elements[i], tol).map_err(|e| match e {
                Error::Numerical { what, detail } => {
                    Error::Numerical { what, detail: format!("{detail} (element {})", ball.word_labels(i).join(" ")) }
                }
                other => other,
            })?;
            Ok(CloudPoint { v1: mu.v1, v2: mu.v2, wordlen: ball.length(i) as u32 })
        })
        .collect();
    let points = results.into_iter().collect::<Result<Vec<_>>>()?;
    let system = ball.system();
    Ok(CartanCloud {
        meta: CloudMeta {
            n: system.n(),
            d: system.d(),
            radius: ball.radius(),
            generator_hash: system.content_hash(),
            ball_size: ball.len(),
            layer_counts: ball.layer_counts(),
            complete: ball.is_complete(),
        },
        points,
    })
}

impl CartanCloud {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Largest word length present.
    pub fn max_wordlen(&self) -> u32 {
        self.points.iter().map(|p| p.wordlen).max().unwrap_or(0)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        for p in &self.points {
            w.serialize(p)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Sidecar path `<stem>.meta.json` next to a cloud CSV.
    pub fn meta_path(csv_path: &Path) -> std::path::PathBuf {
        csv_path.with_extension("meta.json")
    }

    /// Write the CSV and its metadata sidecar.
    pub fn save(&self, csv_path: &Path) -> Result<()> {
        self.write_csv(csv_path)?;
        let meta = serde_json::to_string_pretty(&self.meta)? + "\n";
        std::fs::write(Self::meta_path(csv_path), meta)?;
        Ok(())
    }

    pub fn load(csv_path: &Path) -> Result<Self> {
        let meta_text = std::fs::read_to_string(Self::meta_path(csv_path))
            .map_err(|e| Error::Invalid(format!("cloud metadata for {}: {e}", csv_path.display())))?;
        let meta: CloudMeta = serde_json::from_str(&meta_text)?;
        let mut r = csv::Reader::from_path(csv_path)?;
        let points = r.deserialize().collect::<std::result::Result<Vec<CloudPoint>, _>>()?;
        if points.len() + 1 != meta.ball_size {
            return Err(Error::Invalid(format!(
                "cloud has {} points but metadata records a ball of {}",
                points.len(),
                meta.ball_size
            )));
        }
        Ok(CartanCloud { meta, points })
    }
}

/// Ball statistics table `(layer, count)`.
pub fn write_layer_counts(counts: &[usize], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["layer", "count"])?;
    for (k, c) in counts.iter().enumerate() {
        w.write_record([k.to_string(), c.to_string()])?;
    }
    w.flush()?;
    Ok(())
}
