//! Seeded instance generators. Everything here is deterministic under its
//! (spec, seed) pair; the CLI, the benchmark tables and the acceptance
//! suite all draw from these.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::blowup::{blow_up, Blob, BlobKind, BlowupMap, ColorRule, Prototype, WeightRule};
use crate::error::{Error, Result};
use crate::graph::{Color, WeightedColoredGraph};

/// Prototype topology.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shape {
    Path,
    Cycle,
    Complete,
    /// Independent band coin flips with this probability.
    Random { band_probability: f64 },
}

/// Blob sizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sizes {
    Fixed(usize),
    Random { min: usize, max: usize },
}

/// Blob kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kinds {
    Clique,
    Independent,
    Random,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlowupSpec {
    pub shape: Shape,
    pub blob_count: usize,
    pub sizes: Sizes,
    pub kinds: Kinds,
    pub weight_max: u64,
    /// `None` leaves edges uncolored; `Some(p)` colors them red with
    /// probability p, blue otherwise.
    pub red_probability: Option<f64>,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct GeneratedInstance {
    pub graph: WeightedColoredGraph,
    pub prototype: Prototype,
    pub map: BlowupMap,
    pub ordering: Vec<usize>,
}

/// Build the blowup instance described by `spec`. The total vertex count is
/// forced even by growing the last blob when needed, so the result is
/// always a legal solver input.
pub fn generate_blowup(spec: &BlowupSpec) -> Result<GeneratedInstance> {
    if spec.blob_count == 0 {
        return Err(Error::InvalidParameter("blob count must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let bands: Vec<(usize, usize)> = match spec.shape {
        Shape::Path => (0..spec.blob_count.saturating_sub(1)).map(|i| (i, i + 1)).collect(),
        Shape::Cycle => {
            if spec.blob_count < 3 {
                return Err(Error::InvalidParameter("cycles need >= 3 blobs".into()));
            }
            let mut b: Vec<(usize, usize)> =
                (0..spec.blob_count - 1).map(|i| (i, i + 1)).collect();
            b.push((0, spec.blob_count - 1));
            b
        }
        Shape::Complete => {
            let mut b = Vec::new();
            for i in 0..spec.blob_count {
                for j in i + 1..spec.blob_count {
                    b.push((i, j));
                }
            }
            b
        }
        Shape::Random { band_probability } => {
            if !(0.0..=1.0).contains(&band_probability) {
                return Err(Error::InvalidParameter("band probability outside [0, 1]".into()));
            }
            let mut b = Vec::new();
            for i in 0..spec.blob_count {
                for j in i + 1..spec.blob_count {
                    if rng.gen_bool(band_probability) {
                        b.push((i, j));
                    }
                }
            }
            b
        }
    };

    let mut blobs: Vec<Blob> = (0..spec.blob_count)
        .map(|_| {
            let size = match spec.sizes {
                Sizes::Fixed(s) => s,
                Sizes::Random { min, max } => rng.gen_range(min..=max),
            };
            let kind = match spec.kinds {
                Kinds::Clique => BlobKind::Clique,
                Kinds::Independent => BlobKind::Independent,
                Kinds::Random => {
                    if rng.gen_bool(0.5) {
                        BlobKind::Clique
                    } else {
                        BlobKind::Independent
                    }
                }
            };
            Blob { size: size.max(1), kind }
        })
        .collect();
    let total: usize = blobs.iter().map(|b| b.size).sum();
    if !total.is_multiple_of(2) {
        blobs.last_mut().unwrap().size += 1;
    }

    let prototype = Prototype::new(blobs, &bands)?;
    let weights = WeightRule::Uniform { max: spec.weight_max.max(1), seed: rng.gen() };
    let colors = match spec.red_probability {
        None => ColorRule::Uncolored,
        Some(p) => ColorRule::Random { red_probability: p, seed: rng.gen() },
    };
    let (graph, map) = blow_up(&prototype, &weights, &colors)?;
    let ordering: Vec<usize> = (0..prototype.blob_count()).collect();
    Ok(GeneratedInstance { graph, prototype, map, ordering })
}

/// A plain random graph: each pair becomes an edge independently, weights
/// uniform in `[1, weight_max]`, optional red/blue coloring.
pub fn random_graph(
    vertices: usize,
    edge_probability: f64,
    weight_max: u64,
    red_probability: Option<f64>,
    seed: u64,
) -> Result<WeightedColoredGraph> {
    if !(0.0..=1.0).contains(&edge_probability) {
        return Err(Error::InvalidParameter("edge probability outside [0, 1]".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..vertices {
        for v in u + 1..vertices {
            if rng.gen_bool(edge_probability) {
                let w = rng.gen_range(1..=weight_max.max(1));
                let color = match red_probability {
                    None => Color::Uncolored,
                    Some(p) => {
                        if rng.gen_bool(p) {
                            Color::Red
                        } else {
                            Color::Blue
                        }
                    }
                };
                edges.push((u, v, w, color));
            }
        }
    }
    WeightedColoredGraph::new(vertices, edges)
}
