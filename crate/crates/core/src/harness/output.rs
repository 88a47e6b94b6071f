use std::fs;
use std::path::{Path, PathBuf};

use serde_json::json;

use super::{sort_records, ExperimentConfig, HarnessError, RunRecord, SummaryStats, ALPHA};

/// Paths written by [`emit_outputs`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct OutputFiles {
    pub runs: PathBuf,
    pub summary: PathBuf,
    pub timings: PathBuf,
    pub manifest: PathBuf,
    pub boxplots: Vec<PathBuf>,
    pub traces: Vec<PathBuf>,
}

fn write_err(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Write {
        path: path.to_path_buf(),
        source,
    }
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> HarnessError + '_ {
    move |e| HarnessError::Write {
        path: path.to_path_buf(),
        source: e.into(),
    }
}

fn write_csv(
    path: &Path,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    w.write_record(header).map_err(csv_err(path))?;
    for row in rows {
        w.write_record(&row).map_err(csv_err(path))?;
    }
    w.flush().map_err(write_err(path))
}

fn join(point: &[f64]) -> String {
    point
        .iter()
        .map(f64::to_string)
        .collect::<Vec<_>>()
        .join(";")
}

/// Writes `runs.csv`, `summary.csv`, `timings.csv`, one
/// `boxplot_<instance>.csv` per instance, trace files for traced runs and
/// `manifest.json` into `config.output_dir`.
///
/// Everything except `timings.csv` is a pure function of the config, so
/// reruns produce identical bytes.
pub fn emit_outputs(
    records: &[RunRecord],
    stats: &[SummaryStats],
    config: &ExperimentConfig,
) -> Result<OutputFiles, HarnessError> {
    if records.is_empty() {
        return Err(HarnessError::Config("no records to write".into()));
    }
    let dir = &config.output_dir;
    fs::create_dir_all(dir).map_err(write_err(dir))?;
    let mut records = records.to_vec();
    sort_records(&mut records);
    let mut files = OutputFiles {
        runs: dir.join("runs.csv"),
        summary: dir.join("summary.csv"),
        timings: dir.join("timings.csv"),
        manifest: dir.join("manifest.json"),
        ..Default::default()
    };

    write_csv(
        &files.runs,
        &[
            "problem",
            "dim",
            "heuristic",
            "run_index",
            "seed",
            "reported_value",
            "post_value",
            "candidates_visited",
            "evaluations_used",
            "stop_reason",
            "best_point",
        ],
        records.iter().map(|r| {
            vec![
                r.problem.clone(),
                r.dim.to_string(),
                r.heuristic.clone(),
                r.run_index.to_string(),
                r.seed.to_string(),
                r.reported_value.to_string(),
                r.post_value.to_string(),
                r.candidates_visited.to_string(),
                r.evaluations_used.to_string(),
                r.stop_reason.to_string(),
                join(&r.best_point),
            ]
        }),
    )?;

    write_csv(
        &files.summary,
        &[
            "instance",
            "heuristic",
            "mean",
            "sd",
            "median",
            "q1",
            "q3",
            "mean_candidates",
            "mean_evaluations",
            "best_flag",
        ],
        stats.iter().map(|s| {
            vec![
                s.instance.clone(),
                s.heuristic.clone(),
                s.mean.to_string(),
                s.sd.to_string(),
                s.median.to_string(),
                s.q1.to_string(),
                s.q3.to_string(),
                s.mean_candidates.to_string(),
                s.mean_evaluations.to_string(),
                s.best_flag.to_string(),
            ]
        }),
    )?;

    write_csv(
        &files.timings,
        &["instance", "heuristic", "run_index", "wall_time"],
        records.iter().map(|r| {
            vec![
                r.instance_label(),
                r.heuristic.clone(),
                r.run_index.to_string(),
                r.wall_time.to_string(),
            ]
        }),
    )?;

    let mut start = 0;
    while start < records.len() {
        let label = records[start].instance_label();
        let end = (start..records.len())
            .find(|&i| records[i].instance_label() != label)
            .unwrap_or(records.len());
        let path = dir.join(format!("boxplot_{label}.csv"));
        write_csv(
            &path,
            &["heuristic", "run_index", "post_value"],
            records[start..end].iter().map(|r| {
                vec![
                    r.heuristic.clone(),
                    r.run_index.to_string(),
                    r.post_value.to_string(),
                ]
            }),
        )?;
        files.boxplots.push(path);
        start = end;
    }

    for r in &records {
        let Some(trace) = &r.trace else { continue };
        let stem = format!(
            "trace_{}_{}_r{}",
            r.instance_label(),
            r.heuristic,
            r.run_index
        );
        let points = dir.join(format!("{stem}_points.csv"));
        write_csv(
            &points,
            &["index", "x1", "x2", "value"],
            trace
                .points
                .iter()
                .zip(&trace.values)
                .enumerate()
                .map(|(i, (p, v))| {
                    vec![
                        i.to_string(),
                        p[0].to_string(),
                        p[1].to_string(),
                        v.to_string(),
                    ]
                }),
        )?;
        let path = dir.join(format!("{stem}_path.csv"));
        write_csv(
            &path,
            &[
                "step",
                "x1",
                "x2",
                "radius",
                "estimate",
                "curtailed",
                "exhausted",
                "tau",
            ],
            trace.path.iter().enumerate().map(|(i, e)| {
                vec![
                    i.to_string(),
                    e.candidate[0].to_string(),
                    e.candidate[1].to_string(),
                    e.radius.map(|v| v.to_string()).unwrap_or_default(),
                    e.estimate.to_string(),
                    e.curtailed.to_string(),
                    e.exhausted.to_string(),
                    e.tau.to_string(),
                ]
            }),
        )?;
        files.traces.push(points);
        files.traces.push(path);
    }

    let manifest = json!({
        "crate_version": env!("CARGO_PKG_VERSION"),
        "config": {
            "instances": config.instances.iter().map(|i| json!({
                "problem": i.function.name(),
                "dim": i.dim,
                "gamma": i.function.default_gamma(),
                "bounds": i.function.default_bounds(),
            })).collect::<Vec<_>>(),
            "heuristics": config.heuristics.iter().map(|h| json!({
                "name": h.name(),
                "params": h.params_json(),
            })).collect::<Vec<_>>(),
            "runs": config.runs,
            "budget": config.budget,
            "inner_samples": config.inner_samples,
            "num_initial": config.num_initial,
            "post_samples": config.post_samples,
            "base_seed": config.base_seed,
            "trace": config.trace,
        },
        "seed_derivation": "sha256(base_seed, problem, dim, heuristic, run_index); substreams \"search\" and \"post\"",
        "significance_test": {
            "method": "two-sided Wilcoxon rank-sum of post_value against the lowest-mean heuristic per instance",
            "alpha": ALPHA,
            "ties": "midranks",
            "approximation": "normal with continuity and tie correction; exact enumeration when either sample has fewer than 8 values",
        },
        "seeds": records.iter().map(|r| json!({
            "instance": r.instance_label(),
            "heuristic": r.heuristic,
            "run_index": r.run_index,
            "seed": r.seed,
        })).collect::<Vec<_>>(),
    });
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serialises");
    fs::write(&files.manifest, text + "\n").map_err(write_err(&files.manifest))?;
    Ok(files)
}
