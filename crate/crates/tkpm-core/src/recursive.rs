//! Divide-and-conquer TkPM for blowups of bounded-bandwidth prototypes, and
//! its exact-matching adaptation.
//!
//! Working on the prototype side, each node either delegates to the
//! neighborhood-diversity solver (when the prototype is small or the
//! assumed tight set is too large for the separator guarantee) or finds a
//! loose separator, guesses the matching edges incident to the separator
//! blobs, splits the budget, and recurses on the two sides. The wrapper
//! tries every candidate tight set of bounded size and keeps the best
//! perfect matching.
//!
//! Subproblems are vertex subsets of one global graph, so partial matchings
//! combine without id translation; prototypes are renumbered locally only
//! for the separator search.

use std::collections::{BTreeMap, BTreeSet};

use crate::blowup::{
    find_loose_separator, separator_window_bound, Blob, BlowupMap, EdgeOrigin, Prototype,
    TightSet,
};
use crate::error::{Error, Result};
use crate::graph::{Color, Matching, WeightedColoredGraph};
use crate::matching::{has_perfect_matching, max_cardinality_matching};
use crate::nd::{tkpm_exact_nd, Counters, TkpmOutcome, TkpmSolution};
use crate::oracle::brute_force_em;

/// Blob count at or below which a node always delegates to the
/// neighborhood-diversity solver. Chosen so the separator window count
/// `floor((n'/2 - 3)/phi)` is safely positive whenever the recursive branch
/// runs.
pub const BASE_CASE_BLOB_LIMIT: usize = 16;

/// Budget split at a recursion node: `reserved` weighs the guessed
/// separator edges, `blobs` the intra-blob subproblem, `left`/`right` the
/// recursive children. The four parts always sum to the node's k.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RecursionBudget {
    pub reserved: usize,
    pub blobs: usize,
    pub left: usize,
    pub right: usize,
}

impl RecursionBudget {
    pub fn total(&self) -> usize {
        self.reserved + self.blobs + self.left + self.right
    }
}

/// All budget splits of `k`, lexicographic in (blobs, left, right). The
/// reserved share is determined by the other three.
fn budgets(k: usize) -> Vec<RecursionBudget> {
    let mut out = Vec::new();
    for blobs in 0..=k {
        for left in 0..=k - blobs {
            for right in 0..=k - blobs - left {
                let b = RecursionBudget { reserved: k - blobs - left - right, blobs, left, right };
                debug_assert_eq!(b.total(), k);
                out.push(b);
            }
        }
    }
    out
}

/// Exact ceil(sqrt(n)), the default per-band cap for TkPM.
pub fn sqrt_threshold(n: usize) -> usize {
    let mut t = (n as f64).sqrt() as usize;
    while t * t < n {
        t += 1;
    }
    while t > 0 && (t - 1) * (t - 1) >= n {
        t -= 1;
    }
    t.max(1)
}

/// Exact ceil(n^(12/13)), the default per-band cap for EM: the smallest t
/// with t^13 >= n^12. Verified in integers while n^12 fits u128; the float
/// estimate alone is accurate far past that point.
pub fn em_threshold(n: usize) -> usize {
    if n <= 1 {
        return 1;
    }
    let estimate = (n as f64).powf(12.0 / 13.0).ceil() as usize;
    if n > 1600 {
        return estimate.max(1);
    }
    let target = (n as u128).pow(12);
    let reaches = |t: usize| (t as u128).checked_pow(13).is_none_or(|v| v >= target);
    let mut t = estimate.max(1);
    while !reaches(t) {
        t += 1;
    }
    while t > 1 && reaches(t - 1) {
        t -= 1;
    }
    t
}

/// ceil(n^alpha) for threshold sweeps.
pub fn power_threshold(n: usize, alpha: f64) -> Result<usize> {
    if !(alpha > 0.0 && alpha <= 1.0) || !alpha.is_finite() {
        return Err(Error::InvalidParameter(format!("alpha must lie in (0, 1], got {alpha}")));
    }
    Ok(((n as f64).powf(alpha).ceil() as usize).max(1))
}

/// Pluggable exact-matching solver used for the base case and the
/// intra-blob subproblems of [`em_recursive`].
pub trait EmBaseSolver {
    /// A perfect matching of `g` with exactly `k` red edges, or `None`.
    fn solve(&self, g: &WeightedColoredGraph, k: usize) -> Result<Option<Matching>>;
}

/// Desk-scale base case: exhaustive perfect-matching enumeration.
#[derive(Debug, Clone, Copy, Default)]
pub struct BruteForceEmBase;

impl EmBaseSolver for BruteForceEmBase {
    fn solve(&self, g: &WeightedColoredGraph, k: usize) -> Result<Option<Matching>> {
        brute_force_em(g, k)
    }
}

/// One node's share of the instance: retained blobs in bandwidth order,
/// with the still-active global vertex ids of each. Blobs emptied by edge
/// guesses stay listed; the base-case trigger and separator counting are
/// stated over blob counts.
#[derive(Debug, Clone)]
struct SubInstance {
    /// Global blob ids in ordering order.
    order: Vec<usize>,
    /// Active global vertices per blob, parallel to `order`.
    vertices: Vec<Vec<usize>>,
}

impl SubInstance {
    fn active_vertices(&self) -> Vec<usize> {
        let mut all: Vec<usize> = self.vertices.iter().flatten().copied().collect();
        all.sort_unstable();
        all
    }

    fn blob_count(&self) -> usize {
        self.order.len()
    }
}

struct Context<'a> {
    g: &'a WeightedColoredGraph,
    proto: &'a Prototype,
    map: &'a BlowupMap,
    phi: usize,
    threshold: usize,
    counters: Counters,
}

/// Renumber a node's blobs to 0..n' so the separator search sees a proper
/// prototype; the node's `order` is its bandwidth ordering, so the local
/// ordering is the identity.
fn local_view(ctx: &Context, sub: &SubInstance, tight: &TightSet) -> (Prototype, TightSet) {
    let mut local_of = BTreeMap::new();
    for (local, &blob) in sub.order.iter().enumerate() {
        local_of.insert(blob, local);
    }
    let local_bands: Vec<(usize, usize)> = ctx
        .proto
        .bands
        .iter()
        .filter(|(a, b)| local_of.contains_key(a) && local_of.contains_key(b))
        .map(|(a, b)| (local_of[a], local_of[b]))
        .collect();
    let blobs: Vec<Blob> = sub
        .order
        .iter()
        .enumerate()
        .map(|(i, &blob)| Blob {
            size: sub.vertices[i].len().max(1),
            kind: ctx.proto.blobs[blob].kind,
        })
        .collect();
    let local_proto = Prototype::new(blobs, &local_bands).expect("restricted bands stay simple");
    let local_tight = TightSet::from_bands(
        &tight
            .bands
            .iter()
            .filter(|(a, b)| local_of.contains_key(a) && local_of.contains_key(b))
            .map(|(a, b)| (local_of[a], local_of[b]))
            .collect::<Vec<_>>(),
    );
    (local_proto, local_tight)
}

/// The node-level split data shared by the TkPM and EM recursions.
struct NodeSplit {
    window_start: usize,
    window_len: usize,
    /// Global edge ids eligible for the separator guess.
    universe: Vec<usize>,
    /// Global vertex ids inside the window blobs.
    in_window: BTreeSet<usize>,
    /// Global ids of the window blobs.
    window_blobs: BTreeSet<usize>,
}

fn split_node(ctx: &Context, sub: &SubInstance, tight: &TightSet) -> Result<NodeSplit> {
    let (local_proto, local_tight) = local_view(ctx, sub, tight);
    let ordering: Vec<usize> = (0..sub.blob_count()).collect();
    let separator = find_loose_separator(&local_proto, &ordering, &local_tight, ctx.phi)?
        .expect("window bound holds, so a loose separator exists");
    let window_start = separator.left.len();
    let window_len = separator.window.len();
    let window_range = window_start..window_start + window_len;
    let in_window: BTreeSet<usize> = window_range
        .clone()
        .flat_map(|i| sub.vertices[i].iter().copied())
        .collect();
    let mut active_flags = vec![false; ctx.g.vertex_count()];
    for vs in &sub.vertices {
        for &v in vs {
            active_flags[v] = true;
        }
    }
    // Guessable edges: active band edges with at least one endpoint in a
    // window blob. Intra-blob edges of window blobs are left to the blob
    // subproblem.
    let mut universe = Vec::new();
    for &v in &in_window {
        for &id in ctx.g.incident(v) {
            let e = ctx.g.edge(id);
            if !active_flags[e.u] || !active_flags[e.v] {
                continue;
            }
            if matches!(ctx.map.edge_origin[id], EdgeOrigin::IntraBlob(_)) {
                continue;
            }
            universe.push(id);
        }
    }
    universe.sort_unstable();
    universe.dedup();
    let window_blobs: BTreeSet<usize> = window_range.map(|i| sub.order[i]).collect();
    Ok(NodeSplit { window_start, window_len, universe, in_window, window_blobs })
}

/// Every admissible separator edge set E': a matching from the universe
/// respecting the per-band cap. Emitted in canonical subset order.
fn enumerate_eprime(
    g: &WeightedColoredGraph,
    map: &BlowupMap,
    threshold: usize,
    universe: &[usize],
) -> Vec<Vec<usize>> {
    #[allow(clippy::too_many_arguments)]
    fn rec(
        g: &WeightedColoredGraph,
        map: &BlowupMap,
        threshold: usize,
        universe: &[usize],
        idx: usize,
        covered: &mut Vec<bool>,
        band_load: &mut BTreeMap<(usize, usize), usize>,
        chosen: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if idx == universe.len() {
            debug_assert!(band_load.values().all(|&c| c <= threshold));
            debug_assert!(crate::graph::is_matching(g, chosen));
            out.push(chosen.clone());
            return;
        }
        rec(g, map, threshold, universe, idx + 1, covered, band_load, chosen, out);
        let id = universe[idx];
        let e = g.edge(id);
        if covered[e.u] || covered[e.v] {
            return;
        }
        let band = match map.edge_origin[id] {
            EdgeOrigin::Band(a, b) => (a, b),
            EdgeOrigin::IntraBlob(_) => unreachable!("universe holds band edges only"),
        };
        let load = band_load.entry(band).or_insert(0);
        if *load >= threshold {
            return;
        }
        *load += 1;
        covered[e.u] = true;
        covered[e.v] = true;
        chosen.push(id);
        rec(g, map, threshold, universe, idx + 1, covered, band_load, chosen, out);
        chosen.pop();
        covered[e.u] = false;
        covered[e.v] = false;
        *band_load.get_mut(&band).unwrap() -= 1;
    }
    let mut covered = vec![false; g.vertex_count()];
    let mut band_load = BTreeMap::new();
    let mut chosen = Vec::new();
    let mut out = Vec::new();
    rec(g, map, threshold, universe, 0, &mut covered, &mut band_load, &mut chosen, &mut out);
    out
}

fn split_instance(sub: &SubInstance, side: std::ops::Range<usize>, removed: &[bool]) -> SubInstance {
    let order: Vec<usize> = sub.order[side.clone()].to_vec();
    let vertices: Vec<Vec<usize>> = side
        .map(|i| sub.vertices[i].iter().copied().filter(|&v| !removed[v]).collect())
        .collect();
    SubInstance { order, vertices }
}

/// Graph on `vertices` with only the intra-blob edges of `window_blobs`.
/// Returns the graph and the global edge id behind each local edge.
fn intra_blob_graph(
    g: &WeightedColoredGraph,
    map: &BlowupMap,
    vertices: &[usize],
    window_blobs: &BTreeSet<usize>,
) -> (WeightedColoredGraph, Vec<usize>) {
    let mut sorted = vertices.to_vec();
    sorted.sort_unstable();
    let mut local_of = BTreeMap::new();
    for (i, &v) in sorted.iter().enumerate() {
        local_of.insert(v, i);
    }
    let mut edges = Vec::new();
    let mut global_ids = Vec::new();
    for (id, e) in g.edges().iter().enumerate() {
        if let EdgeOrigin::IntraBlob(b) = map.edge_origin[id] {
            if window_blobs.contains(&b) {
                if let (Some(&u), Some(&v)) = (local_of.get(&e.u), local_of.get(&e.v)) {
                    edges.push((u, v, e.weight, e.color));
                    global_ids.push(id);
                }
            }
        }
    }
    let graph = WeightedColoredGraph::new(sorted.len(), edges).expect("intra-blob subgraph");
    (graph, global_ids)
}

/// Whether this node must delegate: the tight set is too large for the
/// separator guarantee, or the prototype is small.
fn base_case_triggered(blob_count: usize, phi: usize, tight_len: usize) -> bool {
    blob_count <= BASE_CASE_BLOB_LIMIT
        || 2 * tight_len as i64 >= separator_window_bound(blob_count, phi)
}

/// Deterministic best-matching reduction: objective first, then canonical
/// edge-id order.
fn offer(best: &mut Option<(Matching, u64)>, candidate: Matching, objective: u64) {
    let better = match best {
        None => true,
        Some((m, obj)) => {
            objective > *obj || (objective == *obj && candidate.edge_ids() < m.edge_ids())
        }
    };
    if better {
        *best = Some((candidate, objective));
    }
}

/// Recursive TkPM under the promise that the optimum uses fewer than
/// `ctx.threshold` edges in every band outside `tight`. Returns the best
/// perfect matching of the node's active vertices (global edge ids), or
/// `None` when no perfect matching fits the promise.
fn bbb(ctx: &mut Context, sub: &SubInstance, k: usize, tight: &TightSet) -> Result<Option<Matching>> {
    ctx.counters.recursion_nodes += 1;
    let active = sub.active_vertices();
    let (node_g, node_map) = ctx.g.induced_subgraph(&active);

    ctx.counters.matching_calls += 1;
    if max_cardinality_matching(&node_g).len() * 2 != node_g.vertex_count() {
        return Ok(None);
    }

    if base_case_triggered(sub.blob_count(), ctx.phi, tight.len()) {
        ctx.counters.base_case_calls += 1;
        let out = tkpm_exact_nd(&node_g, k)?;
        ctx.counters.absorb(&out.counters);
        return Ok(out.solution.map(|sol| {
            let ids = node_map.lift(&sol.matching);
            Matching::from_edge_ids(ctx.g, &ids).expect("lifted PM stays a matching")
        }));
    }

    let split = split_node(ctx, sub, tight)?;
    let eprime_sets = enumerate_eprime(ctx.g, ctx.map, ctx.threshold, &split.universe);
    let budget_list = budgets(k);
    let mut best: Option<(Matching, u64)> = None;

    for eprime in &eprime_sets {
        ctx.counters.eprime_sets += 1;
        let mut removed = vec![false; ctx.g.vertex_count()];
        for &id in eprime {
            let e = ctx.g.edge(id);
            removed[e.u] = true;
            removed[e.v] = true;
        }
        let left_sub = split_instance(sub, 0..split.window_start, &removed);
        let right_sub = split_instance(
            sub,
            split.window_start + split.window_len..sub.blob_count(),
            &removed,
        );
        let left_blobs: BTreeSet<usize> = left_sub.order.iter().copied().collect();
        let right_blobs: BTreeSet<usize> = right_sub.order.iter().copied().collect();
        let left_tight = tight.restrict(&left_blobs);
        let right_tight = tight.restrict(&right_blobs);
        let blob_vertices: Vec<usize> =
            split.in_window.iter().copied().filter(|&v| !removed[v]).collect();
        let (blobs_g, blobs_edge_ids) =
            intra_blob_graph(ctx.g, ctx.map, &blob_vertices, &split.window_blobs);

        let mut left_memo: BTreeMap<usize, Option<Matching>> = BTreeMap::new();
        let mut right_memo: BTreeMap<usize, Option<Matching>> = BTreeMap::new();
        let mut blobs_memo: BTreeMap<usize, Option<Matching>> = BTreeMap::new();

        for budget in &budget_list {
            if let std::collections::btree_map::Entry::Vacant(e) = left_memo.entry(budget.left) {
                let r = bbb(ctx, &left_sub, budget.left, &left_tight)?;
                e.insert(r);
            }
            let Some(left) = left_memo[&budget.left].clone() else { continue };
            if let std::collections::btree_map::Entry::Vacant(e) = right_memo.entry(budget.right) {
                let r = bbb(ctx, &right_sub, budget.right, &right_tight)?;
                e.insert(r);
            }
            let Some(right) = right_memo[&budget.right].clone() else { continue };
            if let std::collections::btree_map::Entry::Vacant(e) = blobs_memo.entry(budget.blobs) {
                let out = tkpm_exact_nd(&blobs_g, budget.blobs)?;
                ctx.counters.absorb(&out.counters);
                let lifted = out.solution.map(|sol| {
                    let ids: Vec<usize> =
                        sol.matching.edge_ids().iter().map(|&i| blobs_edge_ids[i]).collect();
                    Matching::from_edge_ids(ctx.g, &ids).expect("lifted blob PM")
                });
                e.insert(lifted);
            }
            let Some(blobs) = blobs_memo[&budget.blobs].clone() else { continue };

            let mut ids: Vec<usize> = eprime.clone();
            ids.extend_from_slice(left.edge_ids());
            ids.extend_from_slice(right.edge_ids());
            ids.extend_from_slice(blobs.edge_ids());
            let combined = Matching::from_edge_ids(ctx.g, &ids)
                .expect("separator guess, children and blob matching are vertex-disjoint");
            debug_assert!(active.iter().all(|&v| combined.covers(v)));
            debug_assert_eq!(combined.len() * 2, active.len());
            let objective = combined.topk_value(ctx.g, k);
            offer(&mut best, combined, objective);
        }
    }
    Ok(best.map(|(m, _)| m))
}

/// All tight-set guesses: subsets of the prototype's bands with at most
/// `max_len` elements, in size-then-lexicographic order.
fn tight_set_guesses(p: &Prototype, max_len: usize) -> Vec<TightSet> {
    let bands: Vec<(usize, usize)> = p.bands.iter().copied().collect();
    fn rec(
        bands: &[(usize, usize)],
        start: usize,
        remaining: usize,
        current: &mut Vec<(usize, usize)>,
        out: &mut Vec<TightSet>,
    ) {
        out.push(TightSet::from_bands(current));
        if remaining == 0 {
            return;
        }
        for i in start..bands.len() {
            current.push(bands[i]);
            rec(bands, i + 1, remaining - 1, current, out);
            current.pop();
        }
    }
    let mut out = Vec::new();
    rec(&bands, 0, max_len, &mut Vec::new(), &mut out);
    out.sort_by_key(|t| (t.len(), t.bands.iter().copied().collect::<Vec<_>>()));
    out.dedup();
    out
}

fn root_instance(map: &BlowupMap, ordering: &[usize]) -> SubInstance {
    SubInstance {
        order: ordering.to_vec(),
        vertices: ordering.iter().map(|&b| map.blob_vertices[b].clone()).collect(),
    }
}

/// Exact TkPM for blowups of bounded-bandwidth prototypes: maximize the
/// promise-constrained recursion over every candidate tight set with at
/// most `floor(n / threshold)` bands. The ordering must list all blobs;
/// its bandwidth is the parameter phi. `threshold` defaults to
/// ceil(sqrt(n)).
pub fn tkpm_recursive(
    g: &WeightedColoredGraph,
    p: &Prototype,
    map: &BlowupMap,
    ordering: &[usize],
    k: usize,
    threshold: Option<usize>,
) -> Result<TkpmOutcome> {
    let phi = crate::blowup::bandwidth_of_ordering(p, ordering)?.max(1);
    let n = g.vertex_count() / 2;
    let threshold = threshold.unwrap_or_else(|| sqrt_threshold(n)).max(1);
    let mut ctx = Context { g, proto: p, map, phi, threshold, counters: Counters::default() };

    ctx.counters.matching_calls += 1;
    if !has_perfect_matching(g) {
        return Ok(TkpmOutcome { solution: None, counters: ctx.counters });
    }

    let root = root_instance(map, ordering);
    let mut best: Option<(Matching, u64)> = None;
    // Guesses that trigger the base case at the root all delegate to the
    // same call; run one representative.
    let mut base_done = false;
    for tight in tight_set_guesses(p, n / threshold) {
        if base_case_triggered(p.blob_count(), phi, tight.len()) {
            if base_done {
                continue;
            }
            base_done = true;
        }
        ctx.counters.tight_set_guesses += 1;
        if let Some(m) = bbb(&mut ctx, &root, k, &tight)? {
            let objective = m.topk_value(g, k);
            offer(&mut best, m, objective);
        }
    }

    let (matching, objective) = best.expect("a perfect matching exists, so some guess succeeds");
    assert!(matching.is_perfect(g));
    Ok(TkpmOutcome { solution: Some(TkpmSolution { matching, objective }), counters: ctx.counters })
}

/// Recursive EM under the tight-set promise: some perfect matching of the
/// node's active vertices with exactly `k` red edges, or `None`.
fn em_bbb(
    ctx: &mut Context,
    sub: &SubInstance,
    k: usize,
    tight: &TightSet,
    base: &dyn EmBaseSolver,
) -> Result<Option<Matching>> {
    ctx.counters.recursion_nodes += 1;
    let active = sub.active_vertices();
    let (node_g, node_map) = ctx.g.induced_subgraph(&active);

    ctx.counters.matching_calls += 1;
    if max_cardinality_matching(&node_g).len() * 2 != node_g.vertex_count() {
        return Ok(None);
    }

    if base_case_triggered(sub.blob_count(), ctx.phi, tight.len()) {
        ctx.counters.base_case_calls += 1;
        return Ok(base.solve(&node_g, k)?.map(|m| {
            let ids = node_map.lift(&m);
            Matching::from_edge_ids(ctx.g, &ids).expect("lifted PM stays a matching")
        }));
    }

    let split = split_node(ctx, sub, tight)?;
    let eprime_sets = enumerate_eprime(ctx.g, ctx.map, ctx.threshold, &split.universe);

    for eprime in &eprime_sets {
        ctx.counters.eprime_sets += 1;
        let red_in_guess =
            eprime.iter().filter(|&&id| ctx.g.edge(id).color == Color::Red).count();
        if red_in_guess > k {
            continue;
        }
        let remaining = k - red_in_guess;

        let mut removed = vec![false; ctx.g.vertex_count()];
        for &id in eprime {
            let e = ctx.g.edge(id);
            removed[e.u] = true;
            removed[e.v] = true;
        }
        let left_sub = split_instance(sub, 0..split.window_start, &removed);
        let right_sub = split_instance(
            sub,
            split.window_start + split.window_len..sub.blob_count(),
            &removed,
        );
        let left_blobs: BTreeSet<usize> = left_sub.order.iter().copied().collect();
        let right_blobs: BTreeSet<usize> = right_sub.order.iter().copied().collect();
        let left_tight = tight.restrict(&left_blobs);
        let right_tight = tight.restrict(&right_blobs);
        let blob_vertices: Vec<usize> =
            split.in_window.iter().copied().filter(|&v| !removed[v]).collect();
        let (blobs_g, blobs_edge_ids) =
            intra_blob_graph(ctx.g, ctx.map, &blob_vertices, &split.window_blobs);

        let mut left_memo: BTreeMap<usize, Option<Matching>> = BTreeMap::new();
        let mut right_memo: BTreeMap<usize, Option<Matching>> = BTreeMap::new();
        let mut blobs_memo: BTreeMap<usize, Option<Matching>> = BTreeMap::new();

        // Exact red budgets: blobs + left + right = k - red(E').
        for blobs_k in 0..=remaining {
            for left_k in 0..=remaining - blobs_k {
                let right_k = remaining - blobs_k - left_k;
                if let std::collections::btree_map::Entry::Vacant(e) = left_memo.entry(left_k) {
                    let r = em_bbb(ctx, &left_sub, left_k, &left_tight, base)?;
                    e.insert(r);
                }
                let Some(left) = left_memo[&left_k].clone() else { continue };
                if let std::collections::btree_map::Entry::Vacant(e) = right_memo.entry(right_k) {
                    let r = em_bbb(ctx, &right_sub, right_k, &right_tight, base)?;
                    e.insert(r);
                }
                let Some(right) = right_memo[&right_k].clone() else { continue };
                if let std::collections::btree_map::Entry::Vacant(e) = blobs_memo.entry(blobs_k) {
                    let solved = base.solve(&blobs_g, blobs_k)?;
                    let lifted = solved.map(|m| {
                        let ids: Vec<usize> =
                            m.edge_ids().iter().map(|&i| blobs_edge_ids[i]).collect();
                        Matching::from_edge_ids(ctx.g, &ids).expect("lifted blob PM")
                    });
                    e.insert(lifted);
                }
                let Some(blobs) = blobs_memo[&blobs_k].clone() else { continue };

                let mut ids: Vec<usize> = eprime.clone();
                ids.extend_from_slice(left.edge_ids());
                ids.extend_from_slice(right.edge_ids());
                ids.extend_from_slice(blobs.edge_ids());
                let combined = Matching::from_edge_ids(ctx.g, &ids)
                    .expect("separator guess, children and blob matching are vertex-disjoint");
                debug_assert!(active.iter().all(|&v| combined.covers(v)));
                debug_assert_eq!(combined.red_count(ctx.g), k);
                return Ok(Some(combined));
            }
        }
    }
    Ok(None)
}

/// Outcome of an exact-matching solve.
#[derive(Debug, Clone)]
pub struct EmOutcome {
    /// A perfect matching with exactly k red edges, when one exists.
    pub matching: Option<Matching>,
    pub counters: Counters,
}

/// Recursive EM for blowups of bounded-bandwidth prototypes, with a
/// pluggable base-case solver. The per-band cap defaults to
/// ceil(n^(12/13)); the tight-set budget is `floor(n / threshold)`.
pub fn em_recursive(
    g: &WeightedColoredGraph,
    p: &Prototype,
    map: &BlowupMap,
    ordering: &[usize],
    k: usize,
    base: &dyn EmBaseSolver,
    threshold: Option<usize>,
) -> Result<EmOutcome> {
    g.require_colored()?;
    let phi = crate::blowup::bandwidth_of_ordering(p, ordering)?.max(1);
    let n = g.vertex_count() / 2;
    let threshold = threshold.unwrap_or_else(|| em_threshold(n)).max(1);
    let mut ctx = Context { g, proto: p, map, phi, threshold, counters: Counters::default() };

    ctx.counters.matching_calls += 1;
    if !has_perfect_matching(g) {
        return Ok(EmOutcome { matching: None, counters: ctx.counters });
    }

    let root = root_instance(map, ordering);
    let mut result: Option<Matching> = None;
    let mut base_done = false;
    for tight in tight_set_guesses(p, n / threshold) {
        if base_case_triggered(p.blob_count(), phi, tight.len()) {
            if base_done {
                continue;
            }
            base_done = true;
        }
        ctx.counters.tight_set_guesses += 1;
        if let Some(m) = em_bbb(&mut ctx, &root, k, &tight, base)? {
            result = Some(m);
            break;
        }
    }

    if let Some(m) = &result {
        assert!(m.is_perfect(g));
        assert_eq!(m.red_count(g), k);
    }
    Ok(EmOutcome { matching: result, counters: ctx.counters })
}
