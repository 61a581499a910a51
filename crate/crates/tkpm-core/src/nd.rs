//! Solvers parameterized by neighborhood diversity: the type partition, the
//! type-constrained maximum-weight matching reduction, the exact top-k
//! solver, and the geometric-level approximation scheme.
//!
//! A graph has neighborhood diversity gamma when its vertices split into
//! gamma classes such that adjacency depends only on class membership. Two
//! vertices land in the same class exactly when they are twins:
//! `N(u) \ {v} == N(v) \ {u}`. Blowups of a prototype with n' blobs always
//! have gamma <= n'.
//!
//! Tuple enumeration is embarrassingly parallel in principle; this
//! implementation runs it sequentially and keeps the best-so-far reduction
//! deterministic (objective first, then canonical edge-id order).

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::graph::{Color, Matching, WeightedColoredGraph};
use crate::matching::{has_perfect_matching, max_cardinality_matching, max_weight_perfect_matching};

/// Partition of the vertices into twin classes, with the class-level
/// adjacency structure. Minimal by construction: twin classes are the
/// canonical witness of the neighborhood diversity.
#[derive(Debug, Clone)]
pub struct TypePartition {
    classes: Vec<Vec<usize>>,
    class_of: Vec<usize>,
    adjacency: Vec<Vec<bool>>,
    clique: Vec<bool>,
}

impl TypePartition {
    /// Number of classes (the neighborhood diversity gamma).
    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn class_size(&self, i: usize) -> usize {
        self.classes[i].len()
    }

    pub fn class_of(&self, v: usize) -> usize {
        self.class_of[v]
    }

    /// Whether an edge runs between classes `i` and `j` (`i != j`).
    pub fn classes_adjacent(&self, i: usize, j: usize) -> bool {
        self.adjacency[i][j]
    }

    /// Whether class `i` induces a clique with internal edges. Singleton
    /// classes count as independent: they have no internal edges.
    pub fn is_clique(&self, i: usize) -> bool {
        self.clique[i]
    }

    /// Per-class coverage counts of a matching.
    pub fn coverage(&self, g: &WeightedColoredGraph, m: &Matching) -> Vec<usize> {
        let mut counts = vec![0usize; self.class_count()];
        for v in 0..g.vertex_count() {
            if m.covers(v) {
                counts[self.class_of[v]] += 1;
            }
        }
        counts
    }
}

/// Compute the minimal type partition by grouping twins. Vertices u, v are
/// twins iff `N(u) \ {v} == N(v) \ {u}`, which covers adjacent (clique) and
/// non-adjacent (independent) twin classes alike; the lookup keys both the
/// open and the closed neighborhood, as usual for this computation.
pub fn compute_type_partition(g: &WeightedColoredGraph) -> TypePartition {
    let n = g.vertex_count();
    let words = n.div_ceil(64).max(1);
    let mut rows: Vec<Vec<u64>> = vec![vec![0u64; words]; n];
    for e in g.edges() {
        rows[e.u][e.v / 64] |= 1u64 << (e.v % 64);
        rows[e.v][e.u / 64] |= 1u64 << (e.u % 64);
    }

    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut class_of = vec![usize::MAX; n];
    let mut by_open: BTreeMap<Vec<u64>, usize> = BTreeMap::new();
    let mut by_closed: BTreeMap<Vec<u64>, usize> = BTreeMap::new();
    for v in 0..n {
        let open = rows[v].clone();
        let mut closed = open.clone();
        closed[v / 64] |= 1u64 << (v % 64);
        let class = if let Some(&c) = by_open.get(&open) {
            c
        } else if let Some(&c) = by_closed.get(&closed) {
            c
        } else {
            classes.push(Vec::new());
            classes.len() - 1
        };
        if class == classes.len() - 1 && classes[class].is_empty() {
            by_open.insert(open, class);
            by_closed.insert(closed, class);
        }
        classes[class].push(v);
        class_of[v] = class;
    }

    let gamma = classes.len();
    let mut adjacency = vec![vec![false; gamma]; gamma];
    let mut clique = vec![false; gamma];
    for (i, members) in classes.iter().enumerate() {
        clique[i] = members.len() >= 2 && g.has_edge(members[0], members[1]);
        for (j, others) in classes.iter().enumerate().skip(i + 1) {
            let adj = g.has_edge(members[0], others[0]);
            adjacency[i][j] = adj;
            adjacency[j][i] = adj;
        }
    }
    TypePartition { classes, class_of, adjacency, clique }
}

/// Per-class coverage demand for TC-MWM: exactly `counts[i]` vertices of
/// class `i` must be matched.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeCountTuple {
    pub counts: Vec<usize>,
}

impl TypeCountTuple {
    pub fn new(counts: Vec<usize>) -> Self {
        Self { counts }
    }

    pub fn validate(&self, partition: &TypePartition) -> Result<()> {
        if self.counts.len() != partition.class_count() {
            return Err(Error::InvalidTypeCounts(format!(
                "{} counts for {} classes",
                self.counts.len(),
                partition.class_count()
            )));
        }
        for (i, &c) in self.counts.iter().enumerate() {
            if c > partition.class_size(i) {
                return Err(Error::InvalidTypeCounts(format!(
                    "c_{i} = {c} exceeds class size {}",
                    partition.class_size(i)
                )));
            }
        }
        if self.counts.iter().sum::<usize>() % 2 != 0 {
            return Err(Error::InvalidTypeCounts("sum of counts is odd".into()));
        }
        Ok(())
    }
}

/// Iteration counters surfaced in solver reports. The outer-tuple counter
/// is the machine-checkable side of the solver's loop-count bounds.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Counters {
    /// Coverage/band tuples enumerated by the outer loop.
    pub outer_tuples: u64,
    /// Blossom-solver invocations (weighted and cardinality-only).
    pub matching_calls: u64,
    /// Nodes visited by the recursive solver.
    pub recursion_nodes: u64,
    /// Separator edge sets enumerated by the recursive solver.
    pub eprime_sets: u64,
    /// Recursive-solver base-case delegations.
    pub base_case_calls: u64,
    /// Tight-set guesses tried by the recursive wrapper.
    pub tight_set_guesses: u64,
}

impl Counters {
    pub fn absorb(&mut self, other: &Counters) {
        self.outer_tuples += other.outer_tuples;
        self.matching_calls += other.matching_calls;
        self.recursion_nodes += other.recursion_nodes;
        self.eprime_sets += other.eprime_sets;
        self.base_case_calls += other.base_case_calls;
        self.tight_set_guesses += other.tight_set_guesses;
    }
}

/// A feasible solve: the perfect matching and its top-k objective.
#[derive(Debug, Clone)]
pub struct TkpmSolution {
    pub matching: Matching,
    pub objective: u64,
}

/// Solver result: `solution` is `None` iff the instance is infeasible
/// (no perfect matching at all).
#[derive(Debug, Clone)]
pub struct TkpmOutcome {
    pub solution: Option<TkpmSolution>,
    pub counters: Counters,
}

/// Type-Constrained Maximum Weight Matching: among matchings covering
/// exactly `c_i` vertices of each class `V_i`, one of maximum total weight;
/// `None` if no matching meets the coverage demand.
///
/// Reduction: add a killer set `K_i` of `|V_i| - c_i` fresh vertices joined
/// to all of `V_i` by weight-0 edges, run MWPM on the extended graph and
/// keep only original edges. The killers soak up exactly the vertices that
/// must stay uncovered.
pub fn tc_mwm(
    g: &WeightedColoredGraph,
    partition: &TypePartition,
    c: &TypeCountTuple,
) -> Result<Option<Matching>> {
    let mut counters = Counters::default();
    tc_mwm_counted(g, partition, c, &mut counters)
}

fn tc_mwm_counted(
    g: &WeightedColoredGraph,
    partition: &TypePartition,
    c: &TypeCountTuple,
    counters: &mut Counters,
) -> Result<Option<Matching>> {
    c.validate(partition)?;
    let n = g.vertex_count();
    let mut edges: Vec<(usize, usize, u64, Color)> =
        g.edges().iter().map(|e| (e.u, e.v, e.weight, e.color)).collect();
    let mut next_vertex = n;
    for (i, &ci) in c.counts.iter().enumerate() {
        let killers = partition.class_size(i) - ci;
        for _ in 0..killers {
            for &v in &partition.classes()[i] {
                edges.push((next_vertex, v, 0, Color::Uncolored));
            }
            next_vertex += 1;
        }
    }
    let extended = WeightedColoredGraph::new(next_vertex, edges)?;
    counters.matching_calls += 1;
    let pm = match max_weight_perfect_matching(&extended)? {
        None => return Ok(None),
        Some(pm) => pm,
    };
    // Original edges kept their ids; killer edges got ids >= edge_count.
    let kept: Vec<usize> =
        pm.edge_ids().iter().copied().filter(|&id| id < g.edge_count()).collect();
    let m = Matching::from_edge_ids(g, &kept)?;
    debug_assert_eq!(partition.coverage(g, &m), c.counts);
    Ok(Some(m))
}

/// Visit every tuple with the given per-coordinate caps summing to
/// `target`, in lexicographic order.
fn for_each_composition<F: FnMut(&[usize])>(target: usize, caps: &[usize], f: &mut F) {
    let mut suffix = vec![0usize; caps.len() + 1];
    for i in (0..caps.len()).rev() {
        suffix[i] = suffix[i + 1].saturating_add(caps[i]);
    }
    let mut current = vec![0usize; caps.len()];
    fn recurse<F: FnMut(&[usize])>(
        i: usize,
        remaining: usize,
        caps: &[usize],
        suffix: &[usize],
        current: &mut Vec<usize>,
        f: &mut F,
    ) {
        if i == caps.len() {
            if remaining == 0 {
                f(current);
            }
            return;
        }
        if remaining > suffix[i] {
            return;
        }
        for value in 0..=caps[i].min(remaining) {
            current[i] = value;
            recurse(i + 1, remaining - value, caps, suffix, current, f);
        }
        current[i] = 0;
    }
    recurse(0, target, caps, &suffix, &mut current, f);
}

/// Candidate tracking with a deterministic tie-break: higher objective
/// wins; equal objectives keep the lexicographically smallest edge-id set.
struct Best {
    solution: Option<TkpmSolution>,
}

impl Best {
    fn new() -> Self {
        Best { solution: None }
    }

    fn offer(&mut self, matching: Matching, objective: u64) {
        let better = match &self.solution {
            None => true,
            Some(cur) => {
                objective > cur.objective
                    || (objective == cur.objective
                        && matching.edge_ids() < cur.matching.edge_ids())
            }
        };
        if better {
            self.solution = Some(TkpmSolution { matching, objective });
        }
    }
}

/// One iteration of the exact/approximate outer loop: solve TC-MWM for the
/// coverage tuple, test extendibility on the residual graph, and offer the
/// extended perfect matching to the running best.
fn try_coverage_tuple(
    g: &WeightedColoredGraph,
    partition: &TypePartition,
    counts: &[usize],
    k: usize,
    counters: &mut Counters,
    best: &mut Best,
) -> Result<()> {
    let tuple = TypeCountTuple::new(counts.to_vec());
    let core = match tc_mwm_counted(g, partition, &tuple, counters)? {
        None => return Ok(()),
        Some(m) => m,
    };
    let leftover: Vec<usize> = (0..g.vertex_count()).filter(|&v| !core.covers(v)).collect();
    let (residual, map) = g.induced_subgraph(&leftover);
    counters.matching_calls += 1;
    let extension = max_cardinality_matching(&residual);
    if !extension.is_perfect(&residual) {
        // Not extendible to a perfect matching; discard this tuple.
        return Ok(());
    }
    let lifted = map.lift(&extension);
    let mut ids: Vec<usize> = core.edge_ids().to_vec();
    ids.extend(lifted);
    let pm = Matching::from_edge_ids(g, &ids)?;
    debug_assert!(pm.is_perfect(g));
    let objective = pm.topk_value(g, k);
    best.offer(pm, objective);
    Ok(())
}

/// Exact TkPM for bounded neighborhood diversity: enumerate every coverage
/// tuple `(c_1..c_gamma)` with `sum = 2k` and `c_i <= min(2k, |V_i|)`, run
/// TC-MWM, keep extendible results, return the best extended perfect
/// matching under the top-k objective. `None` solution iff `g` has no
/// perfect matching.
///
/// `k` larger than `n` is clamped to `n`: the objective of every perfect
/// matching is constant in `k` beyond its size, so the optimum and its
/// value are unchanged.
pub fn tkpm_exact_nd(g: &WeightedColoredGraph, k: usize) -> Result<TkpmOutcome> {
    let partition = compute_type_partition(g);
    tkpm_exact_nd_with_partition(g, &partition, k)
}

pub fn tkpm_exact_nd_with_partition(
    g: &WeightedColoredGraph,
    partition: &TypePartition,
    k: usize,
) -> Result<TkpmOutcome> {
    if !g.vertex_count().is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!(
            "vertex count {} is odd; perfect matchings need an even count",
            g.vertex_count()
        )));
    }
    let k_eff = k.min(g.vertex_count() / 2);
    let mut counters = Counters::default();
    let mut best = Best::new();
    let caps: Vec<usize> =
        (0..partition.class_count()).map(|i| partition.class_size(i).min(2 * k_eff)).collect();
    let mut failure: Option<Error> = None;
    for_each_composition(2 * k_eff, &caps, &mut |counts| {
        counters.outer_tuples += 1;
        if failure.is_none() {
            if let Err(e) = try_coverage_tuple(g, partition, counts, k_eff, &mut counters, &mut best)
            {
                failure = Some(e);
            }
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    if best.solution.is_none() {
        debug_assert!(!has_perfect_matching(g));
    }
    Ok(TkpmOutcome { solution: best.solution, counters })
}

/// The geometric level set `A = {0, 1, ceil(a), ceil(a^2), ...} ∪ {k}` with
/// `a = 1/(1-eps)`, deduplicated and ascending. Every power whose ceiling
/// is at most `k` is included.
pub fn geometric_levels(k: usize, epsilon: f64) -> Result<Vec<usize>> {
    if !(epsilon > 0.0 && epsilon < 1.0) || !epsilon.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "epsilon must lie in (0, 1), got {epsilon}"
        )));
    }
    if k == 0 {
        return Err(Error::InvalidParameter("k must be >= 1".into()));
    }
    let alpha = 1.0 / (1.0 - epsilon);
    let mut levels = vec![0usize, 1usize];
    let mut j: f64 = 1.0;
    loop {
        let value = alpha.powf(j).ceil();
        if value.is_nan() || value > k as f64 {
            break;
        }
        let v = value as usize;
        if v > *levels.last().unwrap() {
            levels.push(v);
        }
        // Jump past the plateau where consecutive powers share a ceiling.
        let next_j = ((v as f64).ln() / alpha.ln()).floor() + 1.0;
        j = next_j.max(j + 1.0);
    }
    if *levels.last().unwrap() < k {
        levels.push(k);
    }
    Ok(levels)
}

/// Per-band edge budgets for the approximation scheme. Keys are unordered
/// class pairs `{i, j}` stored as `i <= j`; the diagonal `{i, i}` is only
/// meaningful for clique classes.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BandCountTuple {
    pub counts: BTreeMap<(usize, usize), usize>,
}

impl BandCountTuple {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, i: usize, j: usize, count: usize) {
        self.counts.insert((i.min(j), i.max(j)), count);
    }

    pub fn total(&self) -> usize {
        self.counts.values().sum()
    }
}

/// Convert band counts to the coverage tuple they induce: an inter-class
/// edge covers one vertex on each side, an intra-class edge covers two.
pub fn band_counts_to_type_counts(gamma: usize, b: &BandCountTuple) -> TypeCountTuple {
    let mut counts = vec![0usize; gamma];
    for (&(i, j), &count) in &b.counts {
        if i == j {
            counts[i] += 2 * count;
        } else {
            counts[i] += count;
            counts[j] += count;
        }
    }
    TypeCountTuple::new(counts)
}

/// The band index set the approximation scheme enumerates over: adjacent
/// class pairs plus the diagonal of clique classes with internal edges.
fn band_index_set(partition: &TypePartition) -> Vec<(usize, usize)> {
    let gamma = partition.class_count();
    let mut pairs = Vec::new();
    for i in 0..gamma {
        if partition.is_clique(i) {
            pairs.push((i, i));
        }
        for j in i + 1..gamma {
            if partition.classes_adjacent(i, j) {
                pairs.push((i, j));
            }
        }
    }
    pairs
}

/// Approximation scheme for TkPM: like the exact solver, but the outer loop
/// guesses per-band edge budgets from the geometric level set `A` with
/// total at most `k`, instead of exact coverage tuples. The returned
/// perfect matching has top-k value at least `(1 - eps)` times the optimum;
/// `None` solution iff `g` has no perfect matching.
pub fn tkpm_approx_nd(g: &WeightedColoredGraph, k: usize, epsilon: f64) -> Result<TkpmOutcome> {
    let partition = compute_type_partition(g);
    tkpm_approx_nd_with_partition(g, &partition, k, epsilon)
}

pub fn tkpm_approx_nd_with_partition(
    g: &WeightedColoredGraph,
    partition: &TypePartition,
    k: usize,
    epsilon: f64,
) -> Result<TkpmOutcome> {
    if !g.vertex_count().is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!(
            "vertex count {} is odd; perfect matchings need an even count",
            g.vertex_count()
        )));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) || !epsilon.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "epsilon must lie in (0, 1), got {epsilon}"
        )));
    }
    let k_eff = k.min(g.vertex_count() / 2);
    let mut counters = Counters::default();
    let mut best = Best::new();

    if k_eff == 0 {
        counters.outer_tuples += 1;
        let zero = vec![0usize; partition.class_count()];
        try_coverage_tuple(g, partition, &zero, k_eff, &mut counters, &mut best)?;
        return Ok(TkpmOutcome { solution: best.solution, counters });
    }

    let levels = geometric_levels(k_eff, epsilon)?;
    let pairs = band_index_set(partition);
    let gamma = partition.class_count();

    // Depth-first over band coordinates, pruning once the budget exceeds k.
    let mut assignment = vec![0usize; pairs.len()];
    let mut failure: Option<Error> = None;
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        g: &WeightedColoredGraph,
        partition: &TypePartition,
        pairs: &[(usize, usize)],
        levels: &[usize],
        gamma: usize,
        k: usize,
        used: usize,
        idx: usize,
        assignment: &mut Vec<usize>,
        counters: &mut Counters,
        best: &mut Best,
        failure: &mut Option<Error>,
    ) {
        if failure.is_some() {
            return;
        }
        if idx == pairs.len() {
            counters.outer_tuples += 1;
            let mut bands = BandCountTuple::new();
            for (p, &(i, j)) in pairs.iter().enumerate() {
                bands.set(i, j, assignment[p]);
            }
            let c = band_counts_to_type_counts(gamma, &bands);
            for (i, &ci) in c.counts.iter().enumerate() {
                if ci > partition.class_size(i) {
                    return;
                }
            }
            if let Err(e) = try_coverage_tuple(g, partition, &c.counts, k, counters, best) {
                *failure = Some(e);
            }
            return;
        }
        for &value in levels {
            if used + value > k {
                break;
            }
            assignment[idx] = value;
            recurse(
                g, partition, pairs, levels, gamma, k, used + value, idx + 1, assignment,
                counters, best, failure,
            );
        }
        assignment[idx] = 0;
    }
    recurse(
        g,
        partition,
        &pairs,
        &levels,
        gamma,
        k_eff,
        0,
        0,
        &mut assignment,
        &mut counters,
        &mut best,
        &mut failure,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    if best.solution.is_none() {
        debug_assert!(!has_perfect_matching(g));
    }
    Ok(TkpmOutcome { solution: best.solution, counters })
}

/// Number of coverage tuples the exact solver enumerates when the
/// per-class caps are inactive: compositions of 2k into gamma parts.
pub fn exact_outer_tuple_bound(k: usize, gamma: usize) -> u64 {
    binomial(2 * k as u64 + gamma as u64 - 1, gamma as u64 - 1)
}

pub fn binomial(n: u64, mut r: u64) -> u64 {
    if r > n {
        return 0;
    }
    r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 0..r {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::WeightedColoredGraph;
    use crate::oracle::brute_force_tkpm;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn graph(vertices: usize, edges: &[(usize, usize, u64)]) -> WeightedColoredGraph {
        WeightedColoredGraph::from_weighted_edges(vertices, edges).unwrap()
    }

    fn complete_bipartite(a: usize, b: usize) -> WeightedColoredGraph {
        let mut edges = Vec::new();
        for u in 0..a {
            for v in a..a + b {
                edges.push((u, v, 1));
            }
        }
        graph(a + b, &edges)
    }

    #[test]
    fn partition_of_k23() {
        let g = complete_bipartite(2, 3);
        let p = compute_type_partition(&g);
        assert_eq!(p.class_count(), 2);
        let mut sizes: Vec<usize> = (0..2).map(|i| p.class_size(i)).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![2, 3]);
        assert!(p.classes_adjacent(0, 1));
        assert!(!p.is_clique(0) && !p.is_clique(1));
    }

    #[test]
    fn partition_of_path4_is_discrete() {
        let g = graph(4, &[(0, 1, 1), (1, 2, 1), (2, 3, 1)]);
        let p = compute_type_partition(&g);
        assert_eq!(p.class_count(), 4);
    }

    #[test]
    fn partition_matches_pairwise_twin_predicate() {
        // Cross-check the map-based grouping against the quadratic
        // definition N(u)\{v} == N(v)\{u} on random graphs.
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..40 {
            let n = rng.gen_range(1..=9);
            let mut edges = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen_bool(0.5) {
                        edges.push((u, v, 1u64));
                    }
                }
            }
            let g = graph(n, &edges);
            let p = compute_type_partition(&g);
            let neighbors: Vec<Vec<usize>> = (0..n).map(|v| g.neighbors(v)).collect();
            for u in 0..n {
                for v in u + 1..n {
                    let nu: Vec<usize> =
                        neighbors[u].iter().copied().filter(|&x| x != v).collect();
                    let nv: Vec<usize> =
                        neighbors[v].iter().copied().filter(|&x| x != u).collect();
                    let twins = nu == nv;
                    assert_eq!(
                        p.class_of(u) == p.class_of(v),
                        twins,
                        "twin disagreement for {u},{v} in graph with edges {:?}",
                        g.edges()
                    );
                }
            }
        }
    }

    #[test]
    fn partition_minimality_no_two_classes_mergeable() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let n = rng.gen_range(2..=8);
            let mut edges = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen_bool(0.4) {
                        edges.push((u, v, 1u64));
                    }
                }
            }
            let g = graph(n, &edges);
            let p = compute_type_partition(&g);
            let neighbors: Vec<Vec<usize>> = (0..n).map(|v| g.neighbors(v)).collect();
            for i in 0..p.class_count() {
                for j in i + 1..p.class_count() {
                    let u = p.classes()[i][0];
                    let v = p.classes()[j][0];
                    let nu: Vec<usize> =
                        neighbors[u].iter().copied().filter(|&x| x != v).collect();
                    let nv: Vec<usize> =
                        neighbors[v].iter().copied().filter(|&x| x != u).collect();
                    assert_ne!(nu, nv, "classes {i} and {j} could merge");
                }
            }
        }
    }

    #[test]
    fn tc_mwm_single_edge() {
        let g = graph(2, &[(0, 1, 9)]);
        let p = compute_type_partition(&g);
        assert_eq!(p.class_count(), 1);
        let m = tc_mwm(&g, &p, &TypeCountTuple::new(vec![2])).unwrap().unwrap();
        assert_eq!(m.total_weight(&g), 9);
        let empty = tc_mwm(&g, &p, &TypeCountTuple::new(vec![0])).unwrap().unwrap();
        assert!(empty.is_empty());
    }

    #[test]
    fn tc_mwm_rejects_invalid_counts() {
        let g = graph(2, &[(0, 1, 9)]);
        let p = compute_type_partition(&g);
        assert!(tc_mwm(&g, &p, &TypeCountTuple::new(vec![5])).is_err());
        assert!(tc_mwm(&g, &p, &TypeCountTuple::new(vec![1])).is_err());
    }

    #[test]
    fn tc_mwm_matches_filtered_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..30 {
            let n = 2 * rng.gen_range(2..=5);
            let mut edges = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen_bool(0.55) {
                        edges.push((u, v, rng.gen_range(1..=20)));
                    }
                }
            }
            let g = graph(n, &edges);
            let p = compute_type_partition(&g);
            // Random coverage demand, then compare against exhaustive
            // enumeration of all matchings filtered by exact coverage.
            let mut counts: Vec<usize> =
                (0..p.class_count()).map(|i| rng.gen_range(0..=p.class_size(i))).collect();
            if counts.iter().sum::<usize>() % 2 != 0 {
                let bump = counts.iter().position(|&c| c > 0);
                match bump {
                    Some(i) => counts[i] -= 1,
                    None => continue,
                }
            }
            let tuple = TypeCountTuple::new(counts.clone());
            let solver = tc_mwm(&g, &p, &tuple).unwrap();
            let oracle = brute_force_tc_mwm(&g, &p, &counts);
            match (solver, oracle) {
                (None, None) => {}
                (Some(m), Some(best)) => {
                    assert_eq!(m.total_weight(&g), best, "weight mismatch");
                    assert_eq!(p.coverage(&g, &m), counts);
                }
                (a, b) => panic!("feasibility mismatch: solver {:?} oracle {:?}", a.is_some(), b),
            }
        }
    }

    /// Exhaustive best weight over all matchings with exact per-class
    /// coverage, by take/skip recursion over the edge list.
    fn brute_force_tc_mwm(
        g: &WeightedColoredGraph,
        p: &TypePartition,
        counts: &[usize],
    ) -> Option<u64> {
        #[allow(clippy::too_many_arguments)]
        fn rec(
            g: &WeightedColoredGraph,
            p: &TypePartition,
            counts: &[usize],
            i: usize,
            covered: &mut Vec<bool>,
            class_cov: &mut Vec<usize>,
            weight: u64,
            best: &mut Option<u64>,
        ) {
            if i == g.edge_count() {
                if class_cov == counts {
                    *best = Some(best.map_or(weight, |b: u64| b.max(weight)));
                }
                return;
            }
            rec(g, p, counts, i + 1, covered, class_cov, weight, best);
            let e = g.edge(i);
            if !covered[e.u] && !covered[e.v] {
                covered[e.u] = true;
                covered[e.v] = true;
                class_cov[p.class_of(e.u)] += 1;
                class_cov[p.class_of(e.v)] += 1;
                rec(g, p, counts, i + 1, covered, class_cov, weight + e.weight, best);
                class_cov[p.class_of(e.u)] -= 1;
                class_cov[p.class_of(e.v)] -= 1;
                covered[e.u] = false;
                covered[e.v] = false;
            }
        }
        let mut best = None;
        let mut covered = vec![false; g.vertex_count()];
        let mut class_cov = vec![0usize; p.class_count()];
        rec(g, p, counts, 0, &mut covered, &mut class_cov, 0, &mut best);
        best
    }

    #[test]
    fn exact_two_disjoint_edges() {
        let g = graph(4, &[(0, 1, 1), (2, 3, 5)]);
        let out = tkpm_exact_nd(&g, 1).unwrap();
        assert_eq!(out.solution.unwrap().objective, 5);
    }

    #[test]
    fn exact_four_cycle() {
        let g = graph(4, &[(0, 1, 1), (1, 2, 2), (2, 3, 1), (3, 0, 2)]);
        assert_eq!(tkpm_exact_nd(&g, 1).unwrap().solution.unwrap().objective, 2);
        assert_eq!(tkpm_exact_nd(&g, 2).unwrap().solution.unwrap().objective, 4);
    }

    #[test]
    fn exact_infeasible_graph() {
        let g = graph(4, &[(0, 1, 3), (0, 2, 3), (0, 3, 3)]);
        assert!(tkpm_exact_nd(&g, 1).unwrap().solution.is_none());
    }

    #[test]
    fn empty_graph_has_the_empty_perfect_matching() {
        let g = graph(0, &[]);
        let out = tkpm_exact_nd(&g, 3).unwrap();
        let sol = out.solution.unwrap();
        assert_eq!(sol.objective, 0);
        assert!(sol.matching.is_empty());
        let (value, m) = crate::oracle::brute_force_tkpm(&g, 3).unwrap().unwrap();
        assert_eq!(value, 0);
        assert!(m.is_empty());
    }

    #[test]
    fn odd_vertex_count_rejected() {
        let g = graph(3, &[(0, 1, 1), (1, 2, 1)]);
        assert!(tkpm_exact_nd(&g, 1).is_err());
        assert!(tkpm_approx_nd(&g, 1, 0.5).is_err());
    }

    #[test]
    fn exact_equals_mwpm_at_k_n() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let n = 2 * rng.gen_range(2..=5);
            let mut edges = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen_bool(0.6) {
                        edges.push((u, v, rng.gen_range(1..=50)));
                    }
                }
            }
            let g = graph(n, &edges);
            let exact = tkpm_exact_nd(&g, n / 2).unwrap();
            let mwpm = max_weight_perfect_matching(&g).unwrap();
            match (exact.solution, mwpm) {
                (None, None) => {}
                (Some(sol), Some(pm)) => {
                    assert_eq!(sol.objective, pm.total_weight(&g));
                }
                (a, b) => {
                    panic!("feasibility mismatch: exact {:?} mwpm {:?}", a.is_some(), b.is_some())
                }
            }
        }
    }

    #[test]
    fn exact_matches_oracle_on_small_randoms() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..25 {
            let n = 2 * rng.gen_range(2..=5);
            let mut edges = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen_bool(0.5) {
                        edges.push((u, v, rng.gen_range(1..=30)));
                    }
                }
            }
            let g = graph(n, &edges);
            let k = rng.gen_range(1..=n / 2);
            let exact = tkpm_exact_nd(&g, k).unwrap();
            let oracle = brute_force_tkpm(&g, k).unwrap();
            match (exact.solution, oracle) {
                (None, None) => {}
                (Some(sol), Some((value, _))) => assert_eq!(sol.objective, value),
                (a, b) => {
                    panic!("feasibility mismatch: exact {:?} oracle {:?}", a.is_some(), b.is_some())
                }
            }
        }
    }

    #[test]
    fn outer_tuple_counter_matches_binomial_when_caps_inactive() {
        // K_{8,8}: gamma = 2, class sizes 8 >= 2k for k <= 4.
        let g = complete_bipartite(8, 8);
        for k in 1..=4usize {
            let out = tkpm_exact_nd(&g, k).unwrap();
            assert_eq!(out.counters.outer_tuples, exact_outer_tuple_bound(k, 2));
        }
    }

    #[test]
    fn geometric_levels_examples() {
        assert_eq!(geometric_levels(1, 0.3).unwrap(), vec![0, 1]);
        assert_eq!(geometric_levels(10, 0.5).unwrap(), vec![0, 1, 2, 4, 8, 10]);
        assert!(geometric_levels(10, 0.0).is_err());
        assert!(geometric_levels(10, 1.0).is_err());
        assert!(geometric_levels(0, 0.5).is_err());
    }

    #[test]
    fn geometric_levels_size_bound() {
        for &epsilon in &[0.05, 0.1, 0.3, 0.5, 0.9] {
            let alpha: f64 = 1.0 / (1.0 - epsilon);
            for &k in &[1usize, 2, 3, 10, 100, 1000, 99_999, 1_000_000] {
                let levels = geometric_levels(k, epsilon).unwrap();
                let bound = ((k as f64).ln() / alpha.ln()).ceil() as usize + 3;
                assert!(
                    levels.len() <= bound,
                    "|A|={} exceeds bound {bound} for k={k}, eps={epsilon}",
                    levels.len()
                );
                assert!(levels.windows(2).all(|w| w[0] < w[1]));
                assert_eq!(*levels.last().unwrap(), k);
            }
        }
    }

    #[test]
    fn band_counts_to_type_counts_examples() {
        let b = BandCountTuple::new();
        assert_eq!(band_counts_to_type_counts(2, &b).counts, vec![0, 0]);

        let mut b = BandCountTuple::new();
        b.set(0, 1, 3);
        assert_eq!(band_counts_to_type_counts(2, &b).counts, vec![3, 3]);

        let mut b = BandCountTuple::new();
        b.set(0, 0, 2);
        assert_eq!(band_counts_to_type_counts(1, &b).counts, vec![4]);
    }

    #[test]
    fn approx_exact_when_band_counts_in_levels() {
        // All optimal band counts are 0 or 1, so some iteration guesses
        // them exactly and the scheme returns the true optimum.
        let g = graph(4, &[(0, 1, 1), (2, 3, 5)]);
        let out = tkpm_approx_nd(&g, 1, 0.5).unwrap();
        assert_eq!(out.solution.unwrap().objective, 5);
    }

    #[test]
    fn approx_within_factor_on_small_randoms() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..15 {
            let n = 2 * rng.gen_range(2..=5);
            let mut edges = Vec::new();
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen_bool(0.6) {
                        edges.push((u, v, rng.gen_range(1..=40)));
                    }
                }
            }
            let g = graph(n, &edges);
            let k = rng.gen_range(1..=n / 2);
            let exact = tkpm_exact_nd(&g, k).unwrap();
            for &epsilon in &[0.1, 0.3, 0.5] {
                let approx = tkpm_approx_nd(&g, k, epsilon).unwrap();
                match (&exact.solution, &approx.solution) {
                    (None, None) => {}
                    (Some(e), Some(a)) => {
                        assert!(a.objective <= e.objective);
                        assert!(
                            a.objective as f64 >= (1.0 - epsilon) * e.objective as f64,
                            "approx {} below (1-{epsilon}) * exact {}",
                            a.objective,
                            e.objective
                        );
                    }
                    _ => panic!("feasibility mismatch between exact and approx"),
                }
            }
        }
    }

    #[test]
    fn approx_iteration_bound() {
        let g = complete_bipartite(4, 4);
        let p = compute_type_partition(&g);
        let out = tkpm_approx_nd(&g, 3, 0.5).unwrap();
        let levels = geometric_levels(3, 0.5).unwrap();
        let coords = (p.class_count() * (p.class_count() - 1)) / 2 + p.class_count();
        assert!(out.counters.outer_tuples <= (levels.len() as u64).pow(coords as u32));
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(3, 1), 3);
        assert_eq!(binomial(11, 3), 165);
        assert_eq!(binomial(5, 0), 1);
        assert_eq!(binomial(4, 7), 0);
    }
}
