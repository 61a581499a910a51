//! Ground-truth solvers for EM and TkPM, used for acceptance testing and as
//! the pluggable EM base case.
//!
//! The brute-force routines enumerate every perfect matching by recursively
//! pairing the lowest-id unmatched vertex, so they are guarded to small
//! graphs. [`randomized_em`] is the classical isolation-lemma Monte Carlo
//! test over an exact Tutte-matrix Pfaffian.

mod poly;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{Color, Matching, WeightedColoredGraph};
use poly::{pfaffian_via_determinant, Poly};

/// Largest vertex count the enumeration oracles accept.
pub const ORACLE_VERTEX_LIMIT: usize = 20;

fn check_oracle_size(g: &WeightedColoredGraph, limit: usize) -> Result<()> {
    if g.vertex_count() > limit {
        return Err(Error::OracleSizeExceeded { vertices: g.vertex_count(), limit });
    }
    Ok(())
}

/// Visit every perfect matching of `g` (as sorted edge-id lists), pairing
/// the lowest-id unmatched vertex first. Aborts early when `visit` returns
/// false.
fn for_each_perfect_matching<F: FnMut(&[usize]) -> bool>(
    g: &WeightedColoredGraph,
    visit: &mut F,
) {
    if !g.vertex_count().is_multiple_of(2) {
        return;
    }
    let mut covered = vec![false; g.vertex_count()];
    let mut chosen = Vec::new();
    fn recurse<F: FnMut(&[usize]) -> bool>(
        g: &WeightedColoredGraph,
        covered: &mut [bool],
        chosen: &mut Vec<usize>,
        visit: &mut F,
    ) -> bool {
        let v = match covered.iter().position(|&c| !c) {
            None => return visit(chosen),
            Some(v) => v,
        };
        covered[v] = true;
        for &id in g.incident(v) {
            let w = g.edge(id).other(v);
            if covered[w] {
                continue;
            }
            covered[w] = true;
            chosen.push(id);
            let keep_going = recurse(g, covered, chosen, visit);
            chosen.pop();
            covered[w] = false;
            if !keep_going {
                covered[v] = false;
                return false;
            }
        }
        covered[v] = false;
        true
    }
    recurse(g, &mut covered, &mut chosen, visit);
}

/// Exhaustive TkPM: the maximum of `topk_value` over all perfect matchings,
/// with a witness. `None` when no perfect matching exists.
pub fn brute_force_tkpm(
    g: &WeightedColoredGraph,
    k: usize,
) -> Result<Option<(u64, Matching)>> {
    check_oracle_size(g, ORACLE_VERTEX_LIMIT)?;
    let mut best: Option<(u64, Vec<usize>)> = None;
    for_each_perfect_matching(g, &mut |ids| {
        let mut weights: Vec<u64> = ids.iter().map(|&id| g.edge(id).weight).collect();
        weights.sort_unstable_by(|a, b| b.cmp(a));
        let value: u64 = weights.iter().take(k).sum();
        let better = match &best {
            None => true,
            Some((bv, bids)) => value > *bv || (value == *bv && ids < bids.as_slice()),
        };
        if better {
            best = Some((value, ids.to_vec()));
        }
        true
    });
    match best {
        None => Ok(None),
        Some((value, ids)) => Ok(Some((value, Matching::from_edge_ids(g, &ids)?))),
    }
}

/// Exhaustive EM: some perfect matching with exactly `k` red edges, or
/// `None`. Requires every edge to be colored.
pub fn brute_force_em(g: &WeightedColoredGraph, k: usize) -> Result<Option<Matching>> {
    check_oracle_size(g, ORACLE_VERTEX_LIMIT)?;
    g.require_colored()?;
    let mut found: Option<Vec<usize>> = None;
    for_each_perfect_matching(g, &mut |ids| {
        let red = ids.iter().filter(|&&id| g.edge(id).color == Color::Red).count();
        if red == k {
            found = Some(ids.to_vec());
            false
        } else {
            true
        }
    });
    match found {
        None => Ok(None),
        Some(ids) => Ok(Some(Matching::from_edge_ids(g, &ids)?)),
    }
}

/// All red-edge counts realized by some perfect matching of `g`.
pub fn em_feasible_red_counts(g: &WeightedColoredGraph) -> Result<Vec<usize>> {
    check_oracle_size(g, ORACLE_VERTEX_LIMIT)?;
    g.require_colored()?;
    let mut feasible = vec![false; g.vertex_count() / 2 + 1];
    for_each_perfect_matching(g, &mut |ids| {
        let red = ids.iter().filter(|&&id| g.edge(id).color == Color::Red).count();
        feasible[red] = true;
        true
    });
    Ok(feasible
        .iter()
        .enumerate()
        .filter_map(|(k, &ok)| ok.then_some(k))
        .collect())
}

/// Outcome of the Monte Carlo EM decision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EmDecision {
    /// A perfect matching with exactly `k` red edges certainly exists. The
    /// witness is optional; this implementation does not reconstruct one.
    Yes(Option<Matching>),
    /// No trial found evidence; wrong with probability <= 2^-trials on YES
    /// instances, always right on NO instances.
    ProbablyNo,
}

/// One-sided Monte Carlo test for "does `g` have a perfect matching with
/// exactly `k` red edges?".
///
/// Per trial, every edge gets an independent uniform weight in `[1, 2|E|]`
/// and the skew-symmetric Tutte-style matrix with entries
/// `±2^w_e * y^(1 if red else 0)` is formed. The Pfaffian of that matrix is
/// `sum over PMs M of ±2^w(M) * y^(red(M))`, computed exactly over big
/// integers, so a nonzero `y^k` coefficient certifies a YES answer. By the
/// isolation lemma, on YES instances the minimum-weight PM among those with
/// `k` red edges is unique with probability >= 1/2, in which case its term
/// survives cancellation in that coefficient.
pub fn randomized_em(
    g: &WeightedColoredGraph,
    k: usize,
    trials: u32,
    seed: u64,
) -> Result<EmDecision> {
    g.require_colored()?;
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be >= 1".into()));
    }
    let n = g.vertex_count();
    if !n.is_multiple_of(2) || k > n / 2 {
        return Ok(EmDecision::ProbablyNo);
    }
    if n == 0 {
        // The empty matching is the unique PM; it has 0 red edges.
        return Ok(if k == 0 { EmDecision::Yes(None) } else { EmDecision::ProbablyNo });
    }
    for trial in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (0x9e3779b97f4a7c15u64.wrapping_mul(trial as u64 + 1)));
        let weight_bound = 2 * g.edge_count() as u64;
        let mut matrix = vec![vec![Poly::zero(); n]; n];
        for e in g.edges() {
            let w = rng.gen_range(1..=weight_bound);
            let red_degree = usize::from(e.color == Color::Red);
            let entry = Poly::two_pow_times_y_pow(w, red_degree);
            let (lo, hi) = (e.u.min(e.v), e.u.max(e.v));
            matrix[lo][hi] = entry.clone();
            matrix[hi][lo] = entry.neg();
        }
        let pfaffian = pfaffian_via_determinant(matrix);
        if !pfaffian.coeff(k).is_zero() {
            return Ok(EmDecision::Yes(None));
        }
    }
    Ok(EmDecision::ProbablyNo)
}

/// Batched variant of [`randomized_em`]: one Pfaffian per trial certifies
/// every red count at once. `result[k] == true` means a PM with exactly `k`
/// red edges certainly exists; `false` means "probably not" (with the same
/// per-k error bound as [`randomized_em`]).
pub fn randomized_em_red_spectrum(
    g: &WeightedColoredGraph,
    trials: u32,
    seed: u64,
) -> Result<Vec<bool>> {
    g.require_colored()?;
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be >= 1".into()));
    }
    let n = g.vertex_count();
    if !n.is_multiple_of(2) {
        return Ok(Vec::new());
    }
    let mut certified = vec![false; n / 2 + 1];
    if n == 0 {
        certified[0] = true;
        return Ok(certified);
    }
    for trial in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (0x9e3779b97f4a7c15u64.wrapping_mul(trial as u64 + 1)));
        let weight_bound = 2 * g.edge_count() as u64;
        let mut matrix = vec![vec![Poly::zero(); n]; n];
        for e in g.edges() {
            let w = rng.gen_range(1..=weight_bound);
            let red_degree = usize::from(e.color == Color::Red);
            let entry = Poly::two_pow_times_y_pow(w, red_degree);
            let (lo, hi) = (e.u.min(e.v), e.u.max(e.v));
            matrix[lo][hi] = entry.clone();
            matrix[hi][lo] = entry.neg();
        }
        let pfaffian = pfaffian_via_determinant(matrix);
        for (k, flag) in certified.iter_mut().enumerate() {
            if !pfaffian.coeff(k).is_zero() {
                *flag = true;
            }
        }
    }
    Ok(certified)
}
