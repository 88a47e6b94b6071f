use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use robustmin::harness::{emit_outputs, run_experiment, summarise, HarnessError, RawConfig};

#[derive(Parser)]
#[command(
    name = "robustmin",
    version,
    about = "Robust min-max search experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and write CSV results.
    Run(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Config file of `key = value` lines with optional `[heuristic.<name>]` sections.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Problem name, or a comma-separated list.
    #[arg(long)]
    problem: Option<String>,
    /// Dimension, or a comma-separated list.
    #[arg(long)]
    dim: Option<String>,
    /// Heuristics: any of rnd, ga, vor, pso, ddre, comma-separated.
    #[arg(long)]
    heuristic: Option<String>,
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long)]
    inner_samples: Option<usize>,
    #[arg(long)]
    post_samples: Option<usize>,
    #[arg(long)]
    num_initial: Option<usize>,
    /// Base seed for every run's random stream.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Runs executed in parallel.
    #[arg(long)]
    workers: Option<usize>,
    /// Write per-run trace files (2D problems only).
    #[arg(long)]
    trace: bool,
}

fn run(args: RunArgs) -> Result<(), HarnessError> {
    let mut raw = match &args.config {
        Some(path) => RawConfig::from_file(path)?,
        None => RawConfig::default(),
    };
    let flags = [
        ("problem", args.problem),
        ("dim", args.dim),
        ("heuristic", args.heuristic),
        ("runs", args.runs.map(|v| v.to_string())),
        ("budget", args.budget.map(|v| v.to_string())),
        ("inner_samples", args.inner_samples.map(|v| v.to_string())),
        ("post_samples", args.post_samples.map(|v| v.to_string())),
        ("num_initial", args.num_initial.map(|v| v.to_string())),
        ("seed", args.seed.map(|v| v.to_string())),
        ("out", args.out.map(|v| v.to_string_lossy().into_owned())),
        ("workers", args.workers.map(|v| v.to_string())),
        ("trace", args.trace.then(|| "true".to_string())),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            raw.set(key, v)?;
        }
    }
    let config = raw.resolve()?;
    let records = run_experiment(&config)?;
    let stats = summarise(&records);
    let files = emit_outputs(&records, &stats, &config)?;

    println!(
        "{:<16} {:<6} {:>12} {:>10} {:>10}  best",
        "instance", "heur", "mean", "sd", "evals"
    );
    for s in &stats {
        println!(
            "{:<16} {:<6} {:>12.4} {:>10.4} {:>10.0}  {}",
            s.instance,
            s.heuristic,
            s.mean,
            s.sd,
            s.mean_evaluations,
            if s.best_flag { "*" } else { "" }
        );
    }
    println!(
        "wrote {}",
        files.runs.parent().unwrap_or(&files.runs).display()
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => run(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
