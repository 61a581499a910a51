//! Benchmark tables: a TOML config describes (generator, solver, grid)
//! sweeps; each row is an isolated solver invocation and the output is one
//! CSV table. Rows run concurrently; failures are recorded per row and the
//! run continues.

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde::Deserialize;

use tkpm_core::gen::{generate_blowup, BlowupSpec, Kinds, Shape, Sizes};
use tkpm_core::nd::{compute_type_partition, exact_outer_tuple_bound, geometric_levels};

use crate::instance::ProblemKind;
use crate::runner::{run_algorithm, Algorithm, Prepared, RunOptions};

#[derive(Debug, Deserialize)]
pub struct BenchConfig {
    #[serde(default)]
    pub sweep: Vec<Sweep>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct Sweep {
    pub name: Option<String>,
    pub prototype: String,
    #[serde(default)]
    pub band_probability: Option<f64>,
    pub blob_count: usize,
    pub size_min: usize,
    pub size_max: usize,
    pub kind: String,
    pub weight_max: u64,
    pub problem: String,
    #[serde(default)]
    pub red_probability: Option<f64>,
    pub algorithms: Vec<String>,
    pub k: Vec<usize>,
    #[serde(default)]
    pub epsilon: Vec<f64>,
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub threshold_alpha: Option<f64>,
    #[serde(default)]
    pub trials: Option<u32>,
}

struct Row {
    sweep: String,
    algorithm: Algorithm,
    seed: u64,
    k: usize,
    epsilon: Option<f64>,
    spec: BlowupSpec,
    problem: ProblemKind,
    threshold_alpha: Option<f64>,
    trials: u32,
}

fn parse_algorithm(name: &str) -> Result<Algorithm> {
    Ok(match name {
        "exact-nd" => Algorithm::ExactNd,
        "approx-nd" => Algorithm::ApproxNd,
        "recursive" => Algorithm::Recursive,
        "em-recursive" => Algorithm::EmRecursive,
        "em-random" => Algorithm::EmRandom,
        "oracle" => Algorithm::Oracle,
        other => bail!("unknown algorithm '{other}'"),
    })
}

fn expand(config: &BenchConfig) -> Result<Vec<Row>> {
    let mut rows = Vec::new();
    for (i, sweep) in config.sweep.iter().enumerate() {
        let shape = match sweep.prototype.as_str() {
            "path" => Shape::Path,
            "cycle" => Shape::Cycle,
            "complete" => Shape::Complete,
            "random" => {
                Shape::Random { band_probability: sweep.band_probability.unwrap_or(0.5) }
            }
            other => bail!("sweep {i}: unknown prototype shape '{other}'"),
        };
        let kinds = match sweep.kind.as_str() {
            "clique" => Kinds::Clique,
            "independent" => Kinds::Independent,
            "random" => Kinds::Random,
            other => bail!("sweep {i}: unknown blob kind '{other}'"),
        };
        let problem = match sweep.problem.as_str() {
            "tkpm" => ProblemKind::Tkpm,
            "em" => ProblemKind::Em,
            other => bail!("sweep {i}: unknown problem '{other}'"),
        };
        let name = sweep.name.clone().unwrap_or_else(|| format!("sweep{i}"));
        for &seed in &sweep.seeds {
            let spec = BlowupSpec {
                shape,
                blob_count: sweep.blob_count,
                sizes: Sizes::Random { min: sweep.size_min, max: sweep.size_max },
                kinds,
                weight_max: sweep.weight_max,
                red_probability: match problem {
                    ProblemKind::Em => Some(sweep.red_probability.unwrap_or(0.5)),
                    ProblemKind::Tkpm => None,
                },
                seed,
            };
            for &k in &sweep.k {
                for algo_name in &sweep.algorithms {
                    let algorithm = parse_algorithm(algo_name)?;
                    let eps_grid: Vec<Option<f64>> = if algorithm == Algorithm::ApproxNd {
                        if sweep.epsilon.is_empty() {
                            bail!("sweep {i}: approx-nd needs an epsilon grid");
                        }
                        sweep.epsilon.iter().copied().map(Some).collect()
                    } else {
                        vec![None]
                    };
                    for epsilon in eps_grid {
                        rows.push(Row {
                            sweep: name.clone(),
                            algorithm,
                            seed,
                            k,
                            epsilon,
                            spec: spec.clone(),
                            problem,
                            threshold_alpha: sweep.threshold_alpha,
                            trials: sweep.trials.unwrap_or(20),
                        });
                    }
                }
            }
        }
    }
    Ok(rows)
}

pub const CSV_HEADER: &str = "sweep,algorithm,prototype,blob_count,seed,k,epsilon,vertices,edges,gamma,status,objective,outer_tuples,matching_calls,recursion_nodes,eprime_sets,base_case_calls,tight_set_guesses,levels,expected_outer_tuples,counter_matches,wall_ms,error";

fn run_row(row: &Row) -> String {
    let prototype_name = match row.spec.shape {
        Shape::Path => "path",
        Shape::Cycle => "cycle",
        Shape::Complete => "complete",
        Shape::Random { .. } => "random",
    };
    let epsilon_str = row.epsilon.map(|e| e.to_string()).unwrap_or_default();
    let prefix = |vertices: String, edges: String, gamma: String| {
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            row.sweep,
            row.algorithm.as_str(),
            prototype_name,
            row.spec.blob_count,
            row.seed,
            row.k,
            epsilon_str,
            vertices,
            edges,
            gamma
        )
    };

    let instance = match generate_blowup(&row.spec) {
        Ok(i) => i,
        Err(e) => {
            return format!(
                "{},error,,,,,,,,,,,,{}",
                prefix(String::new(), String::new(), String::new()),
                csv_escape(&e.to_string())
            );
        }
    };
    let prepared = match Prepared::from_generated(row.problem, &instance) {
        Ok(p) => p,
        Err(e) => {
            return format!(
                "{},error,,,,,,,,,,,,{}",
                prefix(String::new(), String::new(), String::new()),
                csv_escape(&e.to_string())
            );
        }
    };
    let g = &prepared.graph;
    let gamma = compute_type_partition(g).class_count();
    let n = g.vertex_count() / 2;
    let opts = RunOptions {
        k: row.k,
        epsilon: row.epsilon,
        threshold_alpha: row.threshold_alpha,
        seed: row.seed,
        trials: row.trials,
        max_oracle_size: tkpm_core::oracle::ORACLE_VERTEX_LIMIT,
    };
    let head = prefix(g.vertex_count().to_string(), g.edge_count().to_string(), gamma.to_string());

    let started = std::time::Instant::now();
    match run_algorithm(&prepared, row.algorithm, &opts) {
        Ok(out) => {
            let wall_ms = started.elapsed().as_secs_f64() * 1e3;
            let levels = match (row.algorithm, row.epsilon) {
                (Algorithm::ApproxNd, Some(eps)) => geometric_levels(row.k.min(n).max(1), eps)
                    .map(|l| l.len().to_string())
                    .unwrap_or_default(),
                _ => String::new(),
            };
            // The closed-form loop count applies when no per-class cap binds.
            let partition = compute_type_partition(g);
            let caps_inactive = (0..partition.class_count())
                .all(|i| partition.class_size(i) >= 2 * row.k.min(n));
            let (expected, matches) = if row.algorithm == Algorithm::ExactNd && caps_inactive {
                let expected = exact_outer_tuple_bound(row.k.min(n), gamma);
                let matches = out.counters.outer_tuples == expected;
                (expected.to_string(), matches.to_string())
            } else {
                (String::new(), String::new())
            };
            format!(
                "{},{},{},{},{},{},{},{},{},{},{},{},{:.3},",
                head,
                out.status.as_str(),
                out.objective.map(|v| v.to_string()).unwrap_or_default(),
                out.counters.outer_tuples,
                out.counters.matching_calls,
                out.counters.recursion_nodes,
                out.counters.eprime_sets,
                out.counters.base_case_calls,
                out.counters.tight_set_guesses,
                levels,
                expected,
                matches,
                wall_ms
            )
        }
        Err(e) => {
            let wall_ms = started.elapsed().as_secs_f64() * 1e3;
            format!("{},error,,,,,,,,,,,{:.3},{}", head, wall_ms, csv_escape(&e.to_string()))
        }
    }
}

fn csv_escape(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Run every row of the config concurrently and return the CSV table with
/// rows in config order.
pub fn run_bench(config: &BenchConfig) -> Result<String> {
    let rows = expand(config).context("expanding bench config")?;
    let lines: Vec<String> = rows.par_iter().map(run_row).collect();
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for line in lines {
        out.push_str(&line);
        out.push('\n');
    }
    Ok(out)
}
