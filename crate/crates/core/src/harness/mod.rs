//! Repeated seeded experiments over instances and heuristics, with
//! post-processing, summary statistics and CSV output.

mod config;
mod output;
mod stats;

pub use config::{ExperimentConfig, Instance, RawConfig};
pub use output::{emit_outputs, OutputFiles};
pub use stats::{
    quantile, summarise, wilcoxon_rank_sum, EmptySample, RankSumResult, SummaryStats, ALPHA,
    EXACT_BELOW,
};

use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use thiserror::Error;

use crate::heuristic::Heuristic;
use crate::ledger::EvaluationLedger;
use crate::leh::{StopReason, TraceEntry};
use crate::rng::{stable_hash, RngStream};
use crate::testbed::reference_worst_case;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl HarnessError {
    /// Process exit code for the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => 2,
            HarnessError::Read { .. } | HarnessError::Write { .. } => 3,
        }
    }
}

/// Everything a 2D run evaluated, for plotting.
#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    pub points: Vec<Vec<f64>>,
    pub values: Vec<f64>,
    pub path: Vec<TraceEntry>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub problem: String,
    pub dim: usize,
    pub heuristic: String,
    pub run_index: usize,
    pub seed: u64,
    /// The search's own estimate of its best point's worst case.
    pub reported_value: f64,
    /// Dense re-estimate of the same point's worst case.
    pub post_value: f64,
    pub best_point: Vec<f64>,
    pub candidates_visited: usize,
    pub evaluations_used: usize,
    pub stop_reason: StopReason,
    /// Seconds, from a monotonic clock.
    pub wall_time: f64,
    pub trace: Option<RunTrace>,
}

impl RunRecord {
    pub fn instance_label(&self) -> String {
        format!("{}_n{}", self.problem, self.dim)
    }
}

/// Seed of one run. Depends only on its own coordinates, so adding or
/// reordering instances and heuristics leaves other runs untouched.
pub fn run_seed(base_seed: u64, instance: &Instance, heuristic: &str, run_index: usize) -> u64 {
    stable_hash(
        base_seed,
        &[
            instance.function.name(),
            &instance.dim.to_string(),
            heuristic,
            &run_index.to_string(),
        ],
    )
}

/// Executes a single run.
pub fn run_one(
    config: &ExperimentConfig,
    instance: &Instance,
    heuristic: &Heuristic,
    run_index: usize,
) -> RunRecord {
    let problem = instance.problem();
    let seed = run_seed(config.base_seed, instance, heuristic.name(), run_index);
    let root = RngStream::new(seed);
    let mut search_rng = root.substream("search", 0);
    let mut post_rng = root.substream("post", 0);

    let started = Instant::now();
    let mut ledger = EvaluationLedger::new(problem.dim(), config.budget);
    let outcome = heuristic.run(
        &problem,
        &mut ledger,
        &mut search_rng,
        config.num_initial,
        config.inner_samples,
    );
    let post_value = reference_worst_case(
        &problem,
        &outcome.best_point,
        config.post_samples,
        &mut post_rng,
    );
    let wall_time = started.elapsed().as_secs_f64();

    let trace = (config.trace && problem.dim() == 2).then(|| RunTrace {
        points: ledger.points().iter().map(<[f64]>::to_vec).collect(),
        values: ledger.values().to_vec(),
        path: outcome.trace.clone(),
    });
    RunRecord {
        problem: instance.function.name().to_string(),
        dim: instance.dim,
        heuristic: heuristic.name().to_string(),
        run_index,
        seed,
        reported_value: outcome.best_value,
        post_value,
        best_point: outcome.best_point,
        candidates_visited: outcome.candidates_visited,
        evaluations_used: outcome.evaluations_used,
        stop_reason: outcome.stop_reason,
        wall_time,
        trace,
    }
}

/// Runs every (instance, heuristic, run) job on up to `config.workers`
/// threads. Records are returned sorted by instance, heuristic and run
/// index, so the thread count never affects the result.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<RunRecord>, HarnessError> {
    config.validate()?;
    let mut jobs = Vec::new();
    for inst in &config.instances {
        for h in &config.heuristics {
            for run in 0..config.runs {
                jobs.push((inst, h, run));
            }
        }
    }
    let next = AtomicUsize::new(0);
    let records = Mutex::new(Vec::with_capacity(jobs.len()));
    let workers = config.workers.min(jobs.len()).max(1);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(&(inst, h, run)) = jobs.get(i) else {
                    break;
                };
                let record = run_one(config, inst, h, run);
                records.lock().unwrap().push(record);
            });
        }
    });
    let mut records = records.into_inner().unwrap();
    sort_records(&mut records);
    Ok(records)
}

pub fn sort_records(records: &mut [RunRecord]) {
    records.sort_by(|a, b| {
        (a.instance_label(), &a.heuristic, a.run_index).cmp(&(
            b.instance_label(),
            &b.heuristic,
            b.run_index,
        ))
    });
}
