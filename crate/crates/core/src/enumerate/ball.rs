//! Breadth-first word balls with exact deduplication.
//!
//! Each layer is produced in three steps: candidate products `parent · generator` are formed in
//! parallel in a fixed order; candidates are deduplicated per hash shard, each shard scanning its
//! candidates in that order; survivors are appended in candidate order. The result depends only
//! on the generator order, never on the number of worker threads.

use std::collections::HashMap;
use std::hash::{DefaultHasher, Hash, Hasher};

use rayon::prelude::*;

use super::generators::GeneratorSystem;
use crate::error::{Error, Result};
use crate::liegroup::GMatrix;
use crate::scalars::QuadMatrix;

const SHARD_BITS: u32 = 6;
const NONE: u32 = u32::MAX;
/// Bookkeeping bytes per stored element beyond the matrix itself.
const ENTRY_OVERHEAD: usize = 48;

pub const DEFAULT_MEMORY_BUDGET: usize = 8 << 30;

#[derive(Clone, Debug)]
pub struct BallOptions {
    pub radius: usize,
    /// Upper bound on the approximate heap footprint in bytes.
    pub memory_budget: usize,
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
}

impl BallOptions {
    pub fn new(radius: usize) -> Self {
        BallOptions { radius, memory_budget: DEFAULT_MEMORY_BUDGET, threads: None }
    }
}

/// All distinct elements of word length at most `radius`, in BFS order, with witness words.
#[derive(Debug)]
pub struct WordBall {
    system: GeneratorSystem,
    radius: usize,
    elements: Vec<GMatrix>,
    parent: Vec<u32>,
    last: Vec<u16>,
    /// `layer_start[k]` is the index of the first element of length `k`; one extra sentinel.
    layer_start: Vec<usize>,
    complete: bool,
    bytes: usize,
}

fn key_hash(m: &QuadMatrix) -> u64 {
    let mut h = DefaultHasher::new();
    m.hash(&mut h);
    h.finish()
}

fn shard_of(h: u64) -> usize {
    (h >> (64 - SHARD_BITS)) as usize
}

struct Index {
    shards: Vec<HashMap<u64, u32>>,
    chain: Vec<u32>,
}

impl Index {
    fn new() -> Self {
        Index { shards: (0..1 << SHARD_BITS).map(|_| HashMap::new()).collect(), chain: Vec::new() }
    }

    fn contains(&self, elements: &[GMatrix], h: u64, m: &QuadMatrix) -> bool {
        let mut cur = self.shards[shard_of(h)].get(&h).copied().unwrap_or(NONE);
        while cur != NONE {
            if elements[cur as usize].exact() == m {
                return true;
            }
            cur = self.chain[cur as usize];
        }
        false
    }

    fn insert(&mut self, h: u64, idx: u32) {
        let prev = self.shards[shard_of(h)].insert(h, idx).unwrap_or(NONE);
        debug_assert_eq!(self.chain.len(), idx as usize);
        self.chain.push(prev);
    }
}

struct Candidate {
    hash: u64,
    matrix: Option<QuadMatrix>,
    parent: u32,
    gen: u16,
}

impl WordBall {
    pub fn build(system: &GeneratorSystem, opts: &BallOptions) -> Result<Self> {
        match opts.threads {
            Some(k) => rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build()
                .map_err(|e| Error::Invalid(format!("thread pool: {e}")))?
                .install(|| Self::build_inner(system, opts)),
            None => Self::build_inner(system, opts),
        }
    }

    fn build_inner(system: &GeneratorSystem, opts: &BallOptions) -> Result<Self> {
        if system.len() > u16::MAX as usize {
            return Err(Error::GeneratorFile("too many generators".into()));
        }
        let id = GMatrix::identity(system.n(), system.d());
        let mut index = Index::new();
        index.insert(key_hash(id.exact()), 0);
        let mut ball = WordBall {
            system: system.clone(),
            radius: opts.radius,
            bytes: id.approx_bytes() + ENTRY_OVERHEAD,
            elements: vec![id],
            parent: vec![NONE],
            last: vec![u16::MAX],
            layer_start: vec![0, 1],
            complete: true,
        };
        let gens = system.generators();
        for _ in 1..=opts.radius {
            let lo = ball.layer_start[ball.layer_start.len() - 2];
            let hi = ball.elements.len();
            if lo == hi {
                // the group is finite and exhausted
                ball.layer_start.push(hi);
                continue;
            }
            let frontier_bytes: usize = ball.elements[lo..hi].iter().map(GMatrix::approx_bytes).sum();
            let estimate = frontier_bytes * gens.len();
            if ball.bytes + estimate > opts.memory_budget {
                ball.complete = false;
                break;
            }
            let elements = &ball.elements;
            let last = &ball.last;
            let mut cands: Vec<Candidate> = (lo..hi)
                .into_par_iter()
                .flat_map_iter(|p| {
                    let parent = &elements[p];
                    let skip = last[p];
                    gens.iter().enumerate().filter_map(move |(gi, g)| {
                        if skip != u16::MAX && gens[skip as usize].inverse == gi {
                            return None;
                        }
                        let m = parent.exact().mul(g.matrix.exact());
                        Some(Candidate { hash: key_hash(&m), matrix: Some(m), parent: p as u32, gen: gi as u16 })
                    })
                })
                .collect();
            let mut by_shard: Vec<Vec<u32>> = vec![Vec::new(); 1 << SHARD_BITS];
            for (ci, c) in cands.iter().enumerate() {
                by_shard[shard_of(c.hash)].push(ci as u32);
            }
            let index_ref = &index;
            let cands_ref = &cands;
            let kept: Vec<Vec<u32>> = by_shard
                .par_iter()
                .map(|ids| {
                    let mut local: HashMap<u64, Vec<u32>> = HashMap::new();
                    let mut out = Vec::new();
                    for &ci in ids {
                        let c = &cands_ref[ci as usize];
                        let m = c.matrix.as_ref().expect("present");
                        if index_ref.contains(elements, c.hash, m) {
                            continue;
                        }
                        let bucket = local.entry(c.hash).or_default();
                        if bucket.iter().any(|&o| cands_ref[o as usize].matrix.as_ref() == Some(m)) {
                            continue;
                        }
                        bucket.push(ci);
                        out.push(ci);
                    }
                    out
                })
                .collect();
            let mut fresh: Vec<u32> = kept.concat();
            fresh.sort_unstable();
            for ci in fresh {
                let c = &mut cands[ci as usize];
                let g = GMatrix::from_trusted(system.n(), c.matrix.take().expect("present"));
                let idx = ball.elements.len() as u32;
                index.insert(c.hash, idx);
                ball.bytes += g.approx_bytes() + ENTRY_OVERHEAD;
                ball.elements.push(g);
                ball.parent.push(c.parent);
                ball.last.push(c.gen);
            }
            ball.layer_start.push(ball.elements.len());
            if ball.bytes > opts.memory_budget {
                ball.complete = false;
                break;
            }
        }
        Ok(ball)
    }

    pub fn system(&self) -> &GeneratorSystem {
        &self.system
    }

    pub fn n(&self) -> usize {
        self.system.n()
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    /// Radius actually reached (equals `radius` for complete balls).
    pub fn reached(&self) -> usize {
        self.layer_start.len() - 2
    }

    /// False when the memory budget stopped the enumeration early; such balls must not be used
    /// for counting.
    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[GMatrix] {
        &self.elements
    }

    pub fn approx_bytes(&self) -> usize {
        self.bytes
    }

    /// Number of elements of each word length `0..=reached`.
    pub fn layer_counts(&self) -> Vec<usize> {
        self.layer_start.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// Minimal word length of element `idx`.
    pub fn length(&self, idx: usize) -> usize {
        self.layer_start.partition_point(|&s| s <= idx) - 1
    }

    /// Indices of the elements of length `k`.
    pub fn layer(&self, k: usize) -> std::ops::Range<usize> {
        self.layer_start[k]..self.layer_start[k + 1]
    }

    /// Witness word of element `idx` as generator indices.
    pub fn word(&self, idx: usize) -> Vec<usize> {
        let mut w = Vec::new();
        let mut cur = idx;
        while self.parent[cur] != NONE {
            w.push(self.last[cur] as usize);
            cur = self.parent[cur] as usize;
        }
        w.reverse();
        w
    }

    pub fn word_labels(&self, idx: usize) -> Vec<&str> {
        let gens = self.system.generators();
        self.word(idx).into_iter().map(|k| gens[k].label.as_str()).collect()
    }

    /// Position of an exact element, if present.
    pub fn find(&self, g: &GMatrix) -> Option<usize> {
        // BFS order is fixed, so a linear scan over the stored keys is exact; used only in tests
        // and small queries.
        self.elements.iter().position(|e| e == g)
    }

    /// Rebuild a ball from stored witness words (used when reading ball files).
    pub(crate) fn from_words(system: &GeneratorSystem, radius: usize, complete: bool, words: &[Vec<usize>]) -> Result<Self> {
        let mut ball = WordBall {
            system: system.clone(),
            radius,
            elements: Vec::with_capacity(words.len()),
            parent: Vec::with_capacity(words.len()),
            last: Vec::with_capacity(words.len()),
            layer_start: vec![0],
            complete,
            bytes: 0,
        };
        let mut pos: HashMap<&[usize], u32> = HashMap::new();
        for (i, w) in words.iter().enumerate() {
            let k = w.len();
            if k + 1 < ball.layer_start.len() {
                return Err(Error::Invalid("ball words are not in BFS order".into()));
            }
            while ball.layer_start.len() <= k {
                ball.layer_start.push(i);
            }
            let (g, parent, last) = if k == 0 {
                (GMatrix::identity(system.n(), system.d()), NONE, u16::MAX)
            } else {
                let p = *pos
                    .get(&w[..k - 1])
                    .ok_or_else(|| Error::Invalid("ball word prefix missing".into()))?;
                let gi = w[k - 1];
                if gi >= system.len() {
                    return Err(Error::Invalid("generator index out of range".into()));
                }
                (ball.elements[p as usize].mul(&system.generators()[gi].matrix), p, gi as u16)
            };
            pos.insert(w.as_slice(), i as u32);
            ball.bytes += g.approx_bytes() + ENTRY_OVERHEAD;
            ball.elements.push(g);
            ball.parent.push(parent);
            ball.last.push(last);
        }
        ball.layer_start.push(words.len());
        Ok(ball)
    }
}
