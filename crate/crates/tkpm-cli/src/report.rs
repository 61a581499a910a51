//! Machine-readable solve reports.

use serde::Serialize;

use tkpm_core::nd::Counters;

use crate::runner::{RunOutput, Status};

#[derive(Debug, Serialize)]
pub struct CountersReport {
    pub outer_tuples: u64,
    pub matching_calls: u64,
    pub recursion_nodes: u64,
    pub eprime_sets: u64,
    pub base_case_calls: u64,
    pub tight_set_guesses: u64,
}

impl From<&Counters> for CountersReport {
    fn from(c: &Counters) -> Self {
        CountersReport {
            outer_tuples: c.outer_tuples,
            matching_calls: c.matching_calls,
            recursion_nodes: c.recursion_nodes,
            eprime_sets: c.eprime_sets,
            base_case_calls: c.base_case_calls,
            tight_set_guesses: c.tight_set_guesses,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SolveReport {
    pub instance: String,
    pub problem: String,
    pub algorithm: String,
    pub vertex_count: usize,
    pub edge_count: usize,
    pub k: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<u32>,
    pub gamma: usize,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub objective: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub red_edges: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matching: Option<Vec<(usize, usize)>>,
    pub counters: CountersReport,
    pub wall_time_ms: f64,
}

impl SolveReport {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        instance: String,
        problem: &str,
        algorithm: &str,
        vertex_count: usize,
        edge_count: usize,
        k: usize,
        epsilon: Option<f64>,
        seed: Option<u64>,
        trials: Option<u32>,
        output: RunOutput,
        wall_time_ms: f64,
    ) -> Self {
        SolveReport {
            instance,
            problem: problem.to_string(),
            algorithm: algorithm.to_string(),
            vertex_count,
            edge_count,
            k,
            epsilon,
            threshold: output.threshold,
            seed,
            trials,
            gamma: output.gamma,
            status: output.status,
            objective: output.objective,
            red_edges: output.red_edges,
            matching: output.matching,
            counters: CountersReport::from(&output.counters),
            wall_time_ms,
        }
    }
}
