//! Prototypes, blowups, bandwidth orderings, and loose-separator search.
//!
//! A prototype is a small graph whose vertices ("blobs") are blown up into
//! cliques or independent sets and whose edges ("bands") become complete
//! bipartite edge sets. The recursive solver works on the prototype side:
//! it needs a bandwidth ordering and, given a set of tight bands, a
//! balanced window of consecutive blobs touched by none of them.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{Color, WeightedColoredGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlobKind {
    Clique,
    Independent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Blob {
    pub size: usize,
    pub kind: BlobKind,
}

/// The small graph before blowing up. Bands are unordered blob pairs. The
/// optional ordering is a bandwidth witness supplied with the instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Prototype {
    pub blobs: Vec<Blob>,
    pub bands: BTreeSet<(usize, usize)>,
    pub ordering: Option<Vec<usize>>,
}

impl Prototype {
    pub fn new(blobs: Vec<Blob>, bands: &[(usize, usize)]) -> Result<Self> {
        let count = blobs.len();
        let mut set = BTreeSet::new();
        for &(i, j) in bands {
            if i >= count || j >= count {
                return Err(Error::InvalidPrototype(format!(
                    "band ({i}, {j}) references a missing blob"
                )));
            }
            if i == j {
                return Err(Error::InvalidPrototype(format!("band ({i}, {j}) is a loop")));
            }
            if !set.insert((i.min(j), i.max(j))) {
                return Err(Error::InvalidPrototype(format!("duplicate band ({i}, {j})")));
            }
        }
        Ok(Prototype { blobs, bands: set, ordering: None })
    }

    pub fn with_ordering(mut self, ordering: Vec<usize>) -> Result<Self> {
        validate_permutation(&ordering, self.blob_count())?;
        self.ordering = Some(ordering);
        Ok(self)
    }

    pub fn blob_count(&self) -> usize {
        self.blobs.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.blobs.iter().map(|b| b.size).sum()
    }

    /// Bands incident to blob `i`, in sorted order.
    pub fn bands_at(&self, i: usize) -> Vec<(usize, usize)> {
        self.bands.iter().copied().filter(|&(a, b)| a == i || b == i).collect()
    }

    pub fn max_degree(&self) -> usize {
        let mut deg = vec![0usize; self.blob_count()];
        for &(a, b) in &self.bands {
            deg[a] += 1;
            deg[b] += 1;
        }
        deg.into_iter().max().unwrap_or(0)
    }
}

fn validate_permutation(ordering: &[usize], count: usize) -> Result<()> {
    if ordering.len() != count {
        return Err(Error::InvalidPrototype(format!(
            "ordering has {} entries for {count} blobs",
            ordering.len()
        )));
    }
    let mut seen = vec![false; count];
    for &b in ordering {
        if b >= count || seen[b] {
            return Err(Error::InvalidPrototype("ordering is not a permutation".into()));
        }
        seen[b] = true;
    }
    Ok(())
}

/// Where every blown-up vertex and edge came from.
#[derive(Debug, Clone)]
pub struct BlowupMap {
    /// Blown-up vertex -> blob id.
    pub blob_of: Vec<usize>,
    /// Per-blob vertex ranges, consecutive ids.
    pub blob_vertices: Vec<Vec<usize>>,
    /// Blown-up edge -> origin.
    pub edge_origin: Vec<EdgeOrigin>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeOrigin {
    /// Edge inside a clique blob.
    IntraBlob(usize),
    /// Edge of the band between two blobs (stored as min, max).
    Band(usize, usize),
}

/// How blown-up edges get their weights.
#[derive(Debug, Clone)]
pub enum WeightRule {
    Constant(u64),
    /// Independent uniform draws from `[1, max]`, seeded.
    Uniform { max: u64, seed: u64 },
    /// One weight per edge in blowup order.
    Explicit(Vec<u64>),
}

/// How blown-up edges get their colors.
#[derive(Debug, Clone)]
pub enum ColorRule {
    Uncolored,
    /// Red with the given probability, blue otherwise, seeded.
    Random { red_probability: f64, seed: u64 },
    /// One color per edge in blowup order.
    Explicit(Vec<Color>),
}

/// Blow a prototype up into a concrete graph. Clique blobs become complete
/// subgraphs, independent blobs stay edgeless, and every band becomes a
/// complete bipartite edge set. Blob `i`'s vertices are the consecutive ids
/// starting after blob `i-1`'s; edges are emitted intra-blob first (by blob
/// id), then band by band in sorted order.
pub fn blow_up(
    p: &Prototype,
    weights: &WeightRule,
    colors: &ColorRule,
) -> Result<(WeightedColoredGraph, BlowupMap)> {
    let mut blob_vertices = Vec::with_capacity(p.blob_count());
    let mut blob_of = Vec::new();
    let mut next = 0usize;
    for (i, blob) in p.blobs.iter().enumerate() {
        if blob.size == 0 {
            return Err(Error::InvalidPrototype(format!("blob {i} has size 0")));
        }
        let ids: Vec<usize> = (next..next + blob.size).collect();
        next += blob.size;
        blob_of.extend(std::iter::repeat_n(i, blob.size));
        blob_vertices.push(ids);
    }

    let mut pairs: Vec<(usize, usize, EdgeOrigin)> = Vec::new();
    for (i, blob) in p.blobs.iter().enumerate() {
        if blob.kind == BlobKind::Clique {
            let ids = &blob_vertices[i];
            for a in 0..ids.len() {
                for b in a + 1..ids.len() {
                    pairs.push((ids[a], ids[b], EdgeOrigin::IntraBlob(i)));
                }
            }
        }
    }
    for &(i, j) in &p.bands {
        for &u in &blob_vertices[i] {
            for &v in &blob_vertices[j] {
                pairs.push((u, v, EdgeOrigin::Band(i, j)));
            }
        }
    }

    let weight_of: Vec<u64> = match weights {
        WeightRule::Constant(w) => vec![*w; pairs.len()],
        WeightRule::Uniform { max, seed } => {
            if *max == 0 {
                return Err(Error::InvalidParameter("uniform weight max must be >= 1".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            (0..pairs.len()).map(|_| rng.gen_range(1..=*max)).collect()
        }
        WeightRule::Explicit(list) => {
            if list.len() != pairs.len() {
                return Err(Error::InvalidParameter(format!(
                    "explicit weight list has {} entries for {} edges",
                    list.len(),
                    pairs.len()
                )));
            }
            list.clone()
        }
    };
    let color_of: Vec<Color> = match colors {
        ColorRule::Uncolored => vec![Color::Uncolored; pairs.len()],
        ColorRule::Random { red_probability, seed } => {
            if !(0.0..=1.0).contains(red_probability) {
                return Err(Error::InvalidParameter("red probability outside [0, 1]".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(0x636f6c6f72));
            (0..pairs.len())
                .map(|_| if rng.gen_bool(*red_probability) { Color::Red } else { Color::Blue })
                .collect()
        }
        ColorRule::Explicit(list) => {
            if list.len() != pairs.len() {
                return Err(Error::InvalidParameter(format!(
                    "explicit color list has {} entries for {} edges",
                    list.len(),
                    pairs.len()
                )));
            }
            list.clone()
        }
    };

    let edges: Vec<(usize, usize, u64, Color)> = pairs
        .iter()
        .zip(weight_of.iter().zip(color_of.iter()))
        .map(|(&(u, v, _), (&w, &c))| (u, v, w, c))
        .collect();
    let g = WeightedColoredGraph::new(next, edges)?;
    let edge_origin = pairs.into_iter().map(|(_, _, o)| o).collect();
    Ok((g, BlowupMap { blob_of, blob_vertices, edge_origin }))
}

/// Max index gap over bands under the given blob ordering.
pub fn bandwidth_of_ordering(p: &Prototype, ordering: &[usize]) -> Result<usize> {
    validate_permutation(ordering, p.blob_count())?;
    let mut position = vec![0usize; p.blob_count()];
    for (pos, &b) in ordering.iter().enumerate() {
        position[b] = pos;
    }
    Ok(p.bands
        .iter()
        .map(|&(i, j)| position[i].abs_diff(position[j]))
        .max()
        .unwrap_or(0))
}

/// Largest prototype for which an exact bandwidth search is attempted.
pub const BANDWIDTH_SEARCH_LIMIT: usize = 12;

/// An ordering witnessing the exact optimal bandwidth, found by
/// branch-and-bound when the prototype has at most
/// [`BANDWIDTH_SEARCH_LIMIT`] blobs. Larger prototypes must carry their own
/// ordering, which is returned verbatim.
pub fn find_bandwidth_ordering(p: &Prototype) -> Result<Vec<usize>> {
    let n = p.blob_count();
    if n > BANDWIDTH_SEARCH_LIMIT {
        return match &p.ordering {
            Some(ordering) => {
                validate_permutation(ordering, n)?;
                Ok(ordering.clone())
            }
            None => Err(Error::OrderingRequired { blobs: n, limit: BANDWIDTH_SEARCH_LIMIT }),
        };
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let adjacency: Vec<Vec<usize>> = (0..n)
        .map(|i| p.bands_at(i).iter().map(|&(a, b)| if a == i { b } else { a }).collect())
        .collect();
    // Neighbors fit within +-phi of each position, so maxdeg/2 rounded up
    // is a lower bound; grow phi until a feasible placement exists.
    let mut phi = p.max_degree().div_ceil(2);
    loop {
        if let Some(ordering) = place_with_bandwidth(n, &adjacency, phi) {
            return Ok(ordering);
        }
        phi += 1;
        assert!(phi < n.max(1), "bandwidth search must terminate by phi = n - 1");
    }
}

/// Depth-first placement: extend a prefix one blob at a time, pruning when
/// a placed blob with an unplaced neighbor is already more than `phi`
/// positions behind the frontier, or a placed pair violates the gap.
fn place_with_bandwidth(n: usize, adjacency: &[Vec<usize>], phi: usize) -> Option<Vec<usize>> {
    fn rec(
        n: usize,
        adjacency: &[Vec<usize>],
        phi: usize,
        prefix: &mut Vec<usize>,
        position: &mut Vec<Option<usize>>,
    ) -> bool {
        if prefix.len() == n {
            return true;
        }
        let frontier = prefix.len();
        for candidate in 0..n {
            if position[candidate].is_some() {
                continue;
            }
            let gap_ok = adjacency[candidate]
                .iter()
                .all(|&nb| position[nb].is_none_or(|pos| frontier - pos <= phi));
            if !gap_ok {
                continue;
            }
            position[candidate] = Some(frontier);
            prefix.push(candidate);
            // Every placed blob with an unplaced neighbor must still be
            // reachable within phi of the next position.
            let feasible = prefix.iter().all(|&placed| {
                let pos = position[placed].unwrap();
                adjacency[placed]
                    .iter()
                    .all(|&nb| position[nb].is_some() || frontier + 1 - pos <= phi)
            });
            if feasible && rec(n, adjacency, phi, prefix, position) {
                return true;
            }
            prefix.pop();
            position[candidate] = None;
        }
        false
    }
    let mut prefix = Vec::with_capacity(n);
    let mut position = vec![None; n];
    rec(n, adjacency, phi, &mut prefix, &mut position).then_some(prefix)
}

/// A set of bands assumed tight (holding at least `threshold` edges of the
/// matching under consideration).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TightSet {
    pub bands: BTreeSet<(usize, usize)>,
}

impl TightSet {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_bands(bands: &[(usize, usize)]) -> Self {
        TightSet { bands: bands.iter().map(|&(i, j)| (i.min(j), i.max(j))).collect() }
    }

    pub fn len(&self) -> usize {
        self.bands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bands.is_empty()
    }

    pub fn touches_blob(&self, blob: usize) -> bool {
        self.bands.iter().any(|&(i, j)| i == blob || j == blob)
    }

    /// Restriction to bands with both endpoints inside `blobs`.
    pub fn restrict(&self, blobs: &BTreeSet<usize>) -> TightSet {
        TightSet {
            bands: self
                .bands
                .iter()
                .copied()
                .filter(|&(i, j)| blobs.contains(&i) && blobs.contains(&j))
                .collect(),
        }
    }
}

/// A window of at most phi consecutive blobs in the ordering, together with
/// the balanced split it induces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Separator {
    /// Blob ids inside the window.
    pub window: Vec<usize>,
    /// Blobs strictly before the window in the ordering.
    pub left: Vec<usize>,
    /// Blobs strictly after the window in the ordering.
    pub right: Vec<usize>,
}

/// The guaranteed number of disjoint candidate windows,
/// `floor((n'/2 - 3) / phi)`; negative when the prototype is tiny.
pub fn separator_window_bound(blob_count: usize, phi: usize) -> i64 {
    debug_assert!(phi >= 1);
    (blob_count as i64 - 6).div_euclid(2 * phi as i64)
}

/// Scan the disjoint windows of `phi` consecutive positions in
/// `ordering[s..=e]` with `s = ceil(n'/4) + 1` and `e = floor(3n'/4) - 1`
/// (1-based), returning the first window no tight band touches. When
/// `2|T| < floor((n'/2 - 3)/phi)` a clean window always exists; outside
/// that hypothesis `None` is a legal outcome.
pub fn find_loose_separator(
    p: &Prototype,
    ordering: &[usize],
    tight: &TightSet,
    phi: usize,
) -> Result<Option<Separator>> {
    validate_permutation(ordering, p.blob_count())?;
    if phi == 0 {
        return Err(Error::InvalidParameter("phi must be >= 1".into()));
    }
    let n = p.blob_count();
    // 1-based endpoints from the counting argument, converted to 0-based.
    let s = n.div_ceil(4) + 1;
    let e = (3 * n) / 4;
    if e < 1 || s > e - 1 {
        return Ok(None);
    }
    let s0 = s - 1;
    let e0 = e - 2;
    let mut start = s0;
    while start + phi <= e0 + 1 {
        let window = &ordering[start..start + phi];
        if window.iter().all(|&blob| !tight.touches_blob(blob)) {
            return Ok(Some(Separator {
                window: window.to_vec(),
                left: ordering[..start].to_vec(),
                right: ordering[start + phi..].to_vec(),
            }));
        }
        start += phi;
    }
    Ok(None)
}
