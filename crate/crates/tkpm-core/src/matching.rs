//! Classical matching kernels: maximum-cardinality matching and
//! maximum-weight perfect matching (MWPM) on general graphs.
//!
//! Solver state is per-call; concurrent independent calls are fine.

use crate::blossom::{self, NONE};
use crate::error::{Error, Result};
use crate::graph::{Matching, WeightedColoredGraph};

/// A matching of maximum cardinality.
pub fn max_cardinality_matching(g: &WeightedColoredGraph) -> Matching {
    let edges: Vec<(usize, usize, i64)> =
        g.edges().iter().map(|e| (e.u, e.v, 0i64)).collect();
    let mate = blossom::max_weight_matching(g.vertex_count(), &edges, true);
    matching_from_mates(g, &mate)
}

/// Whether `g` admits a perfect matching.
pub fn has_perfect_matching(g: &WeightedColoredGraph) -> bool {
    if !g.vertex_count().is_multiple_of(2) {
        return false;
    }
    max_cardinality_matching(g).len() * 2 == g.vertex_count()
}

/// A perfect matching of maximum total weight, or `None` if the graph has
/// no perfect matching (which is an outcome, not a fault).
///
/// Runs the blossom solver in max-cardinality mode, which is equivalent to
/// the classic trick of shifting every weight by `n * max_weight`: any
/// larger matching then dominates any smaller one. The dual variables grow
/// with `n * max_weight`, so weights that would push that product near
/// `i64::MAX` are rejected up front.
pub fn max_weight_perfect_matching(g: &WeightedColoredGraph) -> Result<Option<Matching>> {
    if !g.vertex_count().is_multiple_of(2) {
        return Ok(None);
    }
    check_weight_range(g)?;
    let edges: Vec<(usize, usize, i64)> =
        g.edges().iter().map(|e| (e.u, e.v, e.weight as i64)).collect();
    let mate = blossom::max_weight_matching(g.vertex_count(), &edges, true);
    let m = matching_from_mates(g, &mate);
    if m.is_perfect(g) {
        Ok(Some(m))
    } else {
        Ok(None)
    }
}

/// Reject weights large enough that the solver's shifted duals could
/// overflow 64-bit arithmetic. The bound is conservative.
fn check_weight_range(g: &WeightedColoredGraph) -> Result<()> {
    let max_weight = g.edges().iter().map(|e| e.weight).max().unwrap_or(0);
    let n = g.vertex_count() as u128 + 2;
    if (max_weight as u128 + 1) * 16 * n * n > i64::MAX as u128 {
        return Err(Error::InputTooLarge(format!(
            "max weight {max_weight} with {} vertices would overflow the weight shift",
            g.vertex_count()
        )));
    }
    Ok(())
}

fn matching_from_mates(g: &WeightedColoredGraph, mate: &[usize]) -> Matching {
    let mut ids = Vec::new();
    for (v, &w) in mate.iter().enumerate() {
        if w != NONE && v < w {
            let id = g
                .edge_between(v, w)
                .expect("solver only matches along existing edges");
            ids.push(id);
        }
    }
    Matching::from_edge_ids(g, &ids).expect("mate array is a matching")
}
