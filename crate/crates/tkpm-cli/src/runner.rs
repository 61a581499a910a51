//! Shared solver dispatch for `solve` and `bench`.

use anyhow::{anyhow, bail, Context, Result};
use serde::Serialize;

use tkpm_core::gen::GeneratedInstance;
use tkpm_core::graph::{Matching, WeightedColoredGraph};
use tkpm_core::nd::{compute_type_partition, tkpm_approx_nd, tkpm_exact_nd, Counters};
use tkpm_core::oracle::{brute_force_em, brute_force_tkpm, randomized_em, EmDecision};
use tkpm_core::recursive::{
    em_recursive, power_threshold, tkpm_recursive, BruteForceEmBase,
};

use crate::instance::{infer_blowup_map, InstanceFile, ProblemKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Algorithm {
    /// Exact TkPM parameterized by neighborhood diversity.
    ExactNd,
    /// (1 - eps) approximation scheme.
    ApproxNd,
    /// Recursive TkPM for blowups of bounded-bandwidth prototypes.
    Recursive,
    /// Recursive exact matching with the brute-force base case.
    EmRecursive,
    /// Randomized isolation-lemma exact-matching decision.
    EmRandom,
    /// Brute-force reference solver (small instances only).
    Oracle,
}

impl Algorithm {
    pub fn as_str(&self) -> &'static str {
        match self {
            Algorithm::ExactNd => "exact-nd",
            Algorithm::ApproxNd => "approx-nd",
            Algorithm::Recursive => "recursive",
            Algorithm::EmRecursive => "em-recursive",
            Algorithm::EmRandom => "em-random",
            Algorithm::Oracle => "oracle",
        }
    }

    fn is_em(&self) -> bool {
        matches!(self, Algorithm::EmRecursive | Algorithm::EmRandom)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct RunOptions {
    pub k: usize,
    pub epsilon: Option<f64>,
    pub threshold_alpha: Option<f64>,
    pub seed: u64,
    pub trials: u32,
    pub max_oracle_size: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Solved,
    Infeasible,
    Yes,
    ProbablyNo,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Solved => "solved",
            Status::Infeasible => "infeasible",
            Status::Yes => "yes",
            Status::ProbablyNo => "probably-no",
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            Status::Solved | Status::Yes => 0,
            Status::Infeasible | Status::ProbablyNo => 1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub status: Status,
    pub objective: Option<u64>,
    pub red_edges: Option<usize>,
    pub matching: Option<Vec<(usize, usize)>>,
    pub counters: Counters,
    pub gamma: usize,
    pub threshold: Option<usize>,
}

/// The solver-side picture of an instance: the graph plus the prototype
/// bundle when one is available.
pub struct Prepared {
    pub kind: ProblemKind,
    pub graph: WeightedColoredGraph,
    pub blowup: Option<(tkpm_core::blowup::Prototype, tkpm_core::blowup::BlowupMap, Vec<usize>)>,
}

impl Prepared {
    pub fn from_instance(file: &InstanceFile) -> Result<Self> {
        let graph = file.to_graph()?;
        let blowup = file.to_prototype()?;
        Ok(Prepared { kind: file.kind, graph, blowup })
    }

    pub fn from_generated(kind: ProblemKind, inst: &GeneratedInstance) -> Result<Self> {
        let map = infer_blowup_map(&inst.prototype, &inst.graph)?;
        Ok(Prepared {
            kind,
            graph: inst.graph.clone(),
            blowup: Some((inst.prototype.clone(), map, inst.ordering.clone())),
        })
    }
}

/// Dispatch one solver run and re-validate whatever it reports: returned
/// matchings must be perfect, objectives must recompute from scratch, and
/// exact-matching results must hit the red count on the nose.
pub fn run_algorithm(prepared: &Prepared, algorithm: Algorithm, opts: &RunOptions) -> Result<RunOutput> {
    let g = &prepared.graph;
    if !g.vertex_count().is_multiple_of(2) {
        bail!("solve requires an even vertex count, got {}", g.vertex_count());
    }
    if algorithm.is_em() && prepared.kind != ProblemKind::Em {
        bail!("{} requires an em instance", algorithm.as_str());
    }
    if !algorithm.is_em() && algorithm != Algorithm::Oracle && prepared.kind != ProblemKind::Tkpm {
        bail!("{} requires a tkpm instance", algorithm.as_str());
    }
    let gamma = compute_type_partition(g).class_count();
    let n = g.vertex_count() / 2;

    let pm_pairs = |m: &Matching| -> Vec<(usize, usize)> {
        m.edge_ids().iter().map(|&id| (g.edge(id).u, g.edge(id).v)).collect()
    };
    let validate_tkpm = |m: &Matching, objective: u64, k: usize| -> Result<()> {
        if !m.is_perfect(g) {
            bail!("solver returned a non-perfect matching");
        }
        let recomputed = m.topk_value(g, k.min(n));
        if recomputed != objective {
            bail!("reported objective {objective} differs from recomputed {recomputed}");
        }
        Ok(())
    };

    match algorithm {
        Algorithm::ExactNd => {
            let out = tkpm_exact_nd(g, opts.k)?;
            finish_tkpm(out.solution, out.counters, gamma, None, opts.k, pm_pairs, validate_tkpm)
        }
        Algorithm::ApproxNd => {
            let epsilon =
                opts.epsilon.ok_or_else(|| anyhow!("approx-nd needs --epsilon in (0, 1)"))?;
            let out = tkpm_approx_nd(g, opts.k, epsilon)?;
            finish_tkpm(out.solution, out.counters, gamma, None, opts.k, pm_pairs, validate_tkpm)
        }
        Algorithm::Recursive => {
            let (p, map, order) = prepared
                .blowup
                .as_ref()
                .ok_or_else(|| anyhow!("recursive needs a prototype block in the instance"))?;
            let threshold = opts
                .threshold_alpha
                .map(|a| power_threshold(n, a))
                .transpose()?
                .or(None);
            let effective = threshold.unwrap_or_else(|| tkpm_core::recursive::sqrt_threshold(n));
            let out = tkpm_recursive(g, p, map, order, opts.k, threshold)?;
            finish_tkpm(
                out.solution,
                out.counters,
                gamma,
                Some(effective),
                opts.k,
                pm_pairs,
                validate_tkpm,
            )
        }
        Algorithm::EmRecursive => {
            g.require_colored().context("em instances must color every edge")?;
            let (p, map, order) = prepared
                .blowup
                .as_ref()
                .ok_or_else(|| anyhow!("em-recursive needs a prototype block in the instance"))?;
            let threshold = opts.threshold_alpha.map(|a| power_threshold(n, a)).transpose()?;
            let effective = threshold.unwrap_or_else(|| tkpm_core::recursive::em_threshold(n));
            let base = BruteForceEmBase;
            let out = em_recursive(g, p, map, order, opts.k, &base, threshold)?;
            match out.matching {
                Some(m) => {
                    if !m.is_perfect(g) || m.red_count(g) != opts.k {
                        bail!("em solver returned an invalid witness");
                    }
                    Ok(RunOutput {
                        status: Status::Solved,
                        objective: None,
                        red_edges: Some(opts.k),
                        matching: Some(pm_pairs(&m)),
                        counters: out.counters,
                        gamma,
                        threshold: Some(effective),
                    })
                }
                None => Ok(RunOutput {
                    status: Status::Infeasible,
                    objective: None,
                    red_edges: None,
                    matching: None,
                    counters: out.counters,
                    gamma,
                    threshold: Some(effective),
                }),
            }
        }
        Algorithm::EmRandom => {
            g.require_colored().context("em instances must color every edge")?;
            let decision = randomized_em(g, opts.k, opts.trials, opts.seed)?;
            let status = match decision {
                EmDecision::Yes(_) => Status::Yes,
                EmDecision::ProbablyNo => Status::ProbablyNo,
            };
            Ok(RunOutput {
                status,
                objective: None,
                red_edges: None,
                matching: None,
                counters: Counters::default(),
                gamma,
                threshold: None,
            })
        }
        Algorithm::Oracle => {
            if g.vertex_count() > opts.max_oracle_size {
                bail!(
                    "instance has {} vertices; the oracle is limited to {} (see --max-oracle-size)",
                    g.vertex_count(),
                    opts.max_oracle_size
                );
            }
            match prepared.kind {
                ProblemKind::Tkpm => {
                    let outcome = brute_force_tkpm(g, opts.k)?;
                    match outcome {
                        Some((objective, m)) => {
                            validate_tkpm(&m, objective, opts.k)?;
                            Ok(RunOutput {
                                status: Status::Solved,
                                objective: Some(objective),
                                red_edges: None,
                                matching: Some(pm_pairs(&m)),
                                counters: Counters::default(),
                                gamma,
                                threshold: None,
                            })
                        }
                        None => Ok(RunOutput {
                            status: Status::Infeasible,
                            objective: None,
                            red_edges: None,
                            matching: None,
                            counters: Counters::default(),
                            gamma,
                            threshold: None,
                        }),
                    }
                }
                ProblemKind::Em => {
                    let outcome = brute_force_em(g, opts.k)?;
                    match outcome {
                        Some(m) => {
                            if !m.is_perfect(g) || m.red_count(g) != opts.k {
                                bail!("oracle returned an invalid witness");
                            }
                            Ok(RunOutput {
                                status: Status::Solved,
                                objective: None,
                                red_edges: Some(opts.k),
                                matching: Some(pm_pairs(&m)),
                                counters: Counters::default(),
                                gamma,
                                threshold: None,
                            })
                        }
                        None => Ok(RunOutput {
                            status: Status::Infeasible,
                            objective: None,
                            red_edges: None,
                            matching: None,
                            counters: Counters::default(),
                            gamma,
                            threshold: None,
                        }),
                    }
                }
            }
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn finish_tkpm(
    solution: Option<tkpm_core::nd::TkpmSolution>,
    counters: Counters,
    gamma: usize,
    threshold: Option<usize>,
    k: usize,
    pm_pairs: impl Fn(&Matching) -> Vec<(usize, usize)>,
    validate: impl Fn(&Matching, u64, usize) -> Result<()>,
) -> Result<RunOutput> {
    match solution {
        Some(sol) => {
            validate(&sol.matching, sol.objective, k)?;
            Ok(RunOutput {
                status: Status::Solved,
                objective: Some(sol.objective),
                red_edges: None,
                matching: Some(pm_pairs(&sol.matching)),
                counters,
                gamma,
                threshold,
            })
        }
        None => Ok(RunOutput {
            status: Status::Infeasible,
            objective: None,
            red_edges: None,
            matching: None,
            counters,
            gamma,
            threshold,
        }),
    }
}
