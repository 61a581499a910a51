//! Graph, matching and weight-evaluation primitives shared by every solver.
//!
//! Graphs are simple, undirected, with nonnegative integer weights and an
//! optional red/blue color per edge. Values are immutable after
//! construction, so everything in here is safe to share across threads.

use std::collections::BTreeSet;

use crate::error::{Error, Result};

/// Edge color. `Uncolored` is legal so TkPM instances need no colors;
/// exact-matching entry points reject it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Color {
    Red,
    Blue,
    Uncolored,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub weight: u64,
    pub color: Color,
}

impl Edge {
    /// The endpoint opposite to `x`; panics if `x` is not an endpoint.
    pub fn other(&self, x: usize) -> usize {
        if x == self.u {
            self.v
        } else {
            debug_assert_eq!(x, self.v);
            self.u
        }
    }
}

/// A simple undirected graph with weighted, optionally colored edges and a
/// per-vertex incidence index.
#[derive(Debug, Clone)]
pub struct WeightedColoredGraph {
    vertex_count: usize,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<usize>>,
}

impl WeightedColoredGraph {
    /// Build a graph, validating simple-graph invariants: ids in range, no
    /// self-loops, no parallel edges. Also rejects weights so large that a
    /// sum of `vertex_count / 2` of them could overflow `u64`.
    pub fn new(vertex_count: usize, edges: Vec<(usize, usize, u64, Color)>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        let mut adjacency = vec![Vec::new(); vertex_count];
        let mut out = Vec::with_capacity(edges.len());
        let mut max_weight: u64 = 0;
        for (id, (u, v, weight, color)) in edges.into_iter().enumerate() {
            if u >= vertex_count {
                return Err(Error::VertexOutOfRange { id: u, count: vertex_count });
            }
            if v >= vertex_count {
                return Err(Error::VertexOutOfRange { id: v, count: vertex_count });
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            let key = (u.min(v), u.max(v));
            if !seen.insert(key) {
                return Err(Error::DuplicateEdge(key.0, key.1));
            }
            adjacency[u].push(id);
            adjacency[v].push(id);
            max_weight = max_weight.max(weight);
            out.push(Edge { u, v, weight, color });
        }
        let n = (vertex_count as u128 / 2).max(1);
        if max_weight as u128 * n > u64::MAX as u128 {
            return Err(Error::InputTooLarge(format!(
                "max weight {max_weight} times n={n} exceeds u64"
            )));
        }
        Ok(Self { vertex_count, edges: out, adjacency })
    }

    /// Convenience constructor for uncolored instances.
    pub fn from_weighted_edges(vertex_count: usize, edges: &[(usize, usize, u64)]) -> Result<Self> {
        Self::new(
            vertex_count,
            edges.iter().map(|&(u, v, w)| (u, v, w, Color::Uncolored)).collect(),
        )
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> &Edge {
        &self.edges[id]
    }

    /// Edge ids incident to `v`.
    pub fn incident(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    /// Looks up the edge id of the unordered pair `{u, v}`, if present.
    pub fn edge_between(&self, u: usize, v: usize) -> Option<usize> {
        self.adjacency[u]
            .iter()
            .copied()
            .find(|&id| self.edges[id].other(u) == v)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edge_between(u, v).is_some()
    }

    /// True iff every edge carries a red or blue color.
    pub fn fully_colored(&self) -> bool {
        self.edges.iter().all(|e| e.color != Color::Uncolored)
    }

    /// Returns an error naming the first uncolored edge, for EM entry points.
    pub fn require_colored(&self) -> Result<()> {
        match self.edges.iter().position(|e| e.color == Color::Uncolored) {
            Some(id) => Err(Error::UncoloredEdge(id)),
            None => Ok(()),
        }
    }

    /// Open neighborhood of `v` as a sorted vertex list.
    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        let mut out: Vec<usize> =
            self.adjacency[v].iter().map(|&id| self.edges[id].other(v)).collect();
        out.sort_unstable();
        out
    }

    /// The subgraph induced on `keep`, plus the id remap needed to lift
    /// matchings back to this graph. Vertices keep their relative order.
    pub fn induced_subgraph(&self, keep: &[usize]) -> (WeightedColoredGraph, SubgraphMap) {
        let mut sorted: Vec<usize> = keep.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        let mut new_of_old = vec![None; self.vertex_count];
        for (new, &old) in sorted.iter().enumerate() {
            new_of_old[old] = Some(new);
        }
        let mut edges = Vec::new();
        let mut edge_to_parent = Vec::new();
        for (id, e) in self.edges.iter().enumerate() {
            if let (Some(u), Some(v)) = (new_of_old[e.u], new_of_old[e.v]) {
                edges.push((u, v, e.weight, e.color));
                edge_to_parent.push(id);
            }
        }
        let sub = WeightedColoredGraph::new(sorted.len(), edges)
            .expect("induced subgraph of a valid graph is valid");
        (sub, SubgraphMap { vertex_to_parent: sorted, new_of_old, edge_to_parent })
    }
}

/// Bidirectional id remap between a graph and one of its induced subgraphs.
#[derive(Debug, Clone)]
pub struct SubgraphMap {
    /// Subgraph vertex id -> parent vertex id.
    pub vertex_to_parent: Vec<usize>,
    /// Parent vertex id -> subgraph vertex id, if kept.
    pub new_of_old: Vec<Option<usize>>,
    /// Subgraph edge id -> parent edge id.
    pub edge_to_parent: Vec<usize>,
}

impl SubgraphMap {
    /// Lift a matching of the subgraph to edge ids of the parent graph.
    pub fn lift(&self, m: &Matching) -> Vec<usize> {
        m.edge_ids().iter().map(|&id| self.edge_to_parent[id]).collect()
    }
}

/// A set of pairwise non-adjacent edges of one particular graph, with a
/// cached per-vertex matched flag.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    edge_ids: Vec<usize>,
    covered: Vec<bool>,
}

impl Matching {
    pub fn empty(g: &WeightedColoredGraph) -> Self {
        Self { edge_ids: Vec::new(), covered: vec![false; g.vertex_count()] }
    }

    /// Build from edge ids, rejecting shared endpoints.
    pub fn from_edge_ids(g: &WeightedColoredGraph, ids: &[usize]) -> Result<Self> {
        let mut m = Self::empty(g);
        for &id in ids {
            if id >= g.edge_count() {
                return Err(Error::InvalidParameter(format!("edge id {id} out of range")));
            }
            let e = g.edge(id);
            if m.covered[e.u] || m.covered[e.v] {
                return Err(Error::InvalidParameter(format!(
                    "edges share a vertex at edge id {id}"
                )));
            }
            m.covered[e.u] = true;
            m.covered[e.v] = true;
            m.edge_ids.push(id);
        }
        m.edge_ids.sort_unstable();
        Ok(m)
    }

    /// Sorted edge ids; the canonical form used for deterministic tie-breaks.
    pub fn edge_ids(&self) -> &[usize] {
        &self.edge_ids
    }

    pub fn len(&self) -> usize {
        self.edge_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edge_ids.is_empty()
    }

    pub fn covers(&self, v: usize) -> bool {
        self.covered[v]
    }

    pub fn is_perfect(&self, g: &WeightedColoredGraph) -> bool {
        self.len() * 2 == g.vertex_count()
    }

    pub fn contains(&self, edge_id: usize) -> bool {
        self.edge_ids.binary_search(&edge_id).is_ok()
    }

    /// Total weight of all edges.
    pub fn total_weight(&self, g: &WeightedColoredGraph) -> u64 {
        self.edge_ids.iter().map(|&id| g.edge(id).weight).sum()
    }

    /// Number of red edges.
    pub fn red_count(&self, g: &WeightedColoredGraph) -> usize {
        self.edge_ids.iter().filter(|&&id| g.edge(id).color == Color::Red).count()
    }

    /// Sum of the `min(k, |M|)` largest edge weights. Ties are irrelevant:
    /// the sum does not depend on which equal-weight edges are picked.
    pub fn topk_value(&self, g: &WeightedColoredGraph, k: usize) -> u64 {
        let mut weights: Vec<u64> = self.edge_ids.iter().map(|&id| g.edge(id).weight).collect();
        weights.sort_unstable_by(|a, b| b.cmp(a));
        weights.iter().take(k).sum()
    }

    /// Union of two vertex-disjoint matchings of the same graph.
    pub fn union(&self, g: &WeightedColoredGraph, other: &Matching) -> Result<Self> {
        let mut ids = self.edge_ids.clone();
        ids.extend_from_slice(other.edge_ids());
        Self::from_edge_ids(g, &ids)
    }
}

/// True iff no vertex is incident to two edges of `ids`.
pub fn is_matching(g: &WeightedColoredGraph, ids: &[usize]) -> bool {
    let mut covered = vec![false; g.vertex_count()];
    for &id in ids {
        let e = g.edge(id);
        if covered[e.u] || covered[e.v] {
            return false;
        }
        covered[e.u] = true;
        covered[e.v] = true;
    }
    true
}
