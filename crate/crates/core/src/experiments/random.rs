use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format;
use crate::intertwine::Instance;
use crate::matroid::{GraphicMatroid, LinearMatroid, Matroid, TableMatroid, UniformSum};
use crate::subset::{Subset, MAX_ELEMENTS};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// Connected multigraphs: a random spanning tree plus random extra edges.
    Graphic,
    /// Random 0/1 matrices over GF(2).
    LinearGf2,
    /// Direct sums of one to three uniform matroids.
    UniformMix,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::Graphic => "graphic",
            Family::LinearGf2 => "linear-gf2",
            Family::UniformMix => "uniform-mix",
        }
    }
}

fn default_budget_ms() -> u64 {
    60_000
}

/// Everything that determines a scan. Ranges are inclusive `[lo, hi]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanConfig {
    pub seed: u64,
    pub family: Family,
    pub samples: usize,
    pub elements: (usize, usize),
    pub q: (usize, usize),
    pub r: (usize, usize),
    pub s: (usize, usize),
    pub t: (usize, usize),
    #[serde(default = "default_budget_ms")]
    pub budget_ms: u64,
}

impl ScanConfig {
    pub fn validate(&self) -> Result<()> {
        let ranges = [("elements", self.elements), ("q", self.q), ("r", self.r), ("s", self.s), ("t", self.t)];
        for (name, (lo, hi)) in ranges {
            if lo > hi {
                return Err(Error::InvalidArgument(format!("{name} range [{lo}, {hi}] is empty")));
            }
        }
        if self.elements.1 > MAX_ELEMENTS {
            return Err(Error::SizeCap(self.elements.1));
        }
        let needed = self.q.1 + self.r.1 + self.s.1 + self.t.1;
        if needed > self.elements.0 {
            return Err(Error::InvalidArgument(format!(
                "Q, R, S, T may need {needed} elements but instances can have as few as {}",
                self.elements.0
            )));
        }
        if self.family == Family::Graphic && self.elements.0 < 1 {
            return Err(Error::InvalidArgument("graphic instances need at least one edge".into()));
        }
        Ok(())
    }
}

/// Identifies one generated instance; `digest` hashes its serialized form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Fingerprint {
    pub family: Family,
    pub seed: u64,
    pub index: usize,
    pub elements: usize,
    pub sizes: [usize; 4],
    pub digest: String,
}

impl Fingerprint {
    pub fn of(config: &ScanConfig, index: usize, inst: &Instance) -> Result<Fingerprint> {
        let text = format::write_instance(inst)?;
        // FNV-1a
        let digest = text.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3));
        Ok(Fingerprint {
            family: config.family,
            seed: config.seed,
            index,
            elements: inst.matroid.len(),
            sizes: [inst.q.len(), inst.r.len(), inst.s.len(), inst.t.len()],
            digest: format!("{digest:016x}"),
        })
    }
}

fn pick(rng: &mut ChaCha8Rng, (lo, hi): (usize, usize)) -> usize {
    rng.gen_range(lo..=hi)
}

fn random_graph(rng: &mut ChaCha8Rng, m: usize) -> Result<GraphicMatroid> {
    let lo = (m / 3 + 1).max(2).min(m + 1);
    let hi = (m / 2 + 1).max(lo).min(m + 1);
    let v = rng.gen_range(lo..=hi);
    let mut order: Vec<usize> = (0..v).collect();
    order.shuffle(rng);
    let mut edges = Vec::with_capacity(m);
    for i in 1..v {
        let parent = order[rng.gen_range(0..i)];
        edges.push((parent, order[i]));
    }
    while edges.len() < m {
        let a = rng.gen_range(0..v);
        let b = rng.gen_range(0..v - 1);
        let b = if b >= a { b + 1 } else { b };
        edges.push((a.min(b), a.max(b)));
    }
    edges.shuffle(rng);
    GraphicMatroid::new(v, edges)
}

fn random_gf2(rng: &mut ChaCha8Rng, m: usize) -> Result<LinearMatroid> {
    let rows = rng.gen_range(1..=(m / 2 + 1).max(1));
    let matrix = (0..rows).map(|_| (0..m).map(|_| rng.gen_range(0..2u8)).collect()).collect();
    LinearMatroid::with_columns(2, m, matrix)
}

fn random_uniform_mix(rng: &mut ChaCha8Rng, m: usize) -> Result<UniformSum> {
    let parts = rng.gen_range(1..=3usize).min(m.max(1));
    let mut cuts: Vec<usize> = (1..m).collect();
    cuts.shuffle(rng);
    let mut cuts: Vec<usize> = cuts.into_iter().take(parts - 1).collect();
    cuts.sort_unstable();
    let mut blocks = Vec::with_capacity(parts);
    let mut start = 0;
    for end in cuts.into_iter().chain([m]) {
        let n = end - start;
        let r = if n <= 1 { n as u32 } else { rng.gen_range(1..n as u32) };
        blocks.push((r, n));
        start = end;
    }
    UniformSum::new(blocks)
}

/// Deterministic in `(config.seed, index)`. Q, R, S and T are pairwise disjoint.
pub fn random_instance(config: &ScanConfig, index: usize) -> Result<Instance> {
    config.validate()?;
    if index >= config.samples {
        return Err(Error::InvalidArgument(format!("index {index} >= sample count {}", config.samples)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(index as u64);
    let m = pick(&mut rng, config.elements);
    let matroid = match config.family {
        Family::Graphic => Matroid::new(random_graph(&mut rng, m)?)?,
        Family::LinearGf2 => Matroid::new(random_gf2(&mut rng, m)?)?,
        Family::UniformMix => Matroid::new(random_uniform_mix(&mut rng, m)?)?,
    };
    if m <= 9 {
        // tabulating runs the rank-axiom check
        TableMatroid::from_fn(m, |x| matroid.rank_unchecked(x))?;
    }
    let mut elements: Vec<usize> = (0..m).collect();
    elements.shuffle(&mut rng);
    let mut rest = elements.into_iter();
    let mut take = |range| -> Subset { rest.by_ref().take(pick(&mut rng, range)).collect() };
    let q = take(config.q);
    let r = take(config.r);
    let s = take(config.s);
    let t = take(config.t);
    Instance::new(matroid, q, r, s, t)
}
