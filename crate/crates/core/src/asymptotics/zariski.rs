use nalgebra::DMatrix;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::enumerate::WordBall;
use crate::liegroup::{adjoint, lie_algebra_dim};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ZariskiSettings {
    pub sample_size: usize,
    /// Sample words of at most this length, where adjoint matrices are well conditioned; longer
    /// layers are added only while the pool is smaller than `sample_size`.
    pub max_layer: usize,
    /// Singular values below `rel_tol·σ_max` count as zero.
    pub rel_tol: f64,
}

impl Default for ZariskiSettings {
    fn default() -> Self {
        ZariskiSettings { sample_size: 400, max_layer: 4, rel_tol: 1e-8 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZariskiRank {
    pub rank: usize,
    /// `D²` with `D = dim so(n, 2)`: the rank of a Zariski-dense subgroup.
    pub full: usize,
    pub sampled: usize,
    /// Singular values relative to the largest, in decreasing order.
    pub singular_values: Vec<f64>,
}

impl ZariskiRank {
    pub fn is_full(&self) -> bool {
        self.rank == self.full
    }
}

/// Numerical rank of the span of the normalized, flattened `Ad(γ)` over a seeded sample of short
/// words.
pub fn zariski_span_rank(ball: &WordBall, settings: &ZariskiSettings, seed: u64) -> ZariskiRank {
    let dim = lie_algebra_dim(ball.n());
    // extend past max_layer when the short words are too few to fill the sample
    let mut top = settings.max_layer.min(ball.reached());
    while top < ball.reached() && ball.layer(top).end < settings.sample_size {
        top += 1;
    }
    let pool = ball.layer(top).end;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picks: Vec<usize> = if pool <= settings.sample_size {
        (0..pool).collect()
    } else {
        sample(&mut rng, pool, settings.sample_size).into_vec()
    };
    picks.sort_unstable();
    let mut rows = DMatrix::<f64>::zeros(picks.len(), dim * dim);
    for (r, &i) in picks.iter().enumerate() {
        let ad = adjoint(&ball.elements()[i]);
        let scale = ad.norm();
        for (c, x) in ad.iter().enumerate() {
            rows[(r, c)] = x / scale;
        }
    }
    let mut sv: Vec<f64> = rows.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    let max = sv.first().copied().unwrap_or(0.0);
    let rel: Vec<f64> = sv.iter().map(|s| if max > 0.0 { s / max } else { 0.0 }).collect();
    let rank = rel.iter().filter(|&&s| s > settings.rel_tol).count();
    ZariskiRank { rank, full: dim * dim, sampled: picks.len(), singular_values: rel }
}
