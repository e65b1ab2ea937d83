use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rateless_coop::harness::{self, HarnessError, RunOptions};

/// Rateless coded cooperation experiments.
#[derive(Parser)]
#[command(name = "rcoop", version)]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand)]
enum Verb {
    /// Monte Carlo trials over the experiment's sweep.
    Simulate(Common),
    /// Analytical predictions aligned with `simulate`.
    Analyze(Common),
    /// Degree distribution design.
    Optimize(Common),
    /// Two-user throughput upper bounds over the sweep.
    Bounds(Common),
    /// simulate + analyze (+ bounds for two users).
    Sweep(Common),
}

#[derive(Args)]
struct Common {
    /// Experiment or design file, or `preset:NAME`.
    #[arg(long)]
    config: String,
    /// Overrides the config's master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    workers: Option<usize>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (verb, c): (fn(&str, &RunOptions) -> Result<Vec<PathBuf>, HarnessError>, Common) = match cli.verb {
        Verb::Simulate(c) => (harness::cmd_simulate, c),
        Verb::Analyze(c) => (harness::cmd_analyze, c),
        Verb::Optimize(c) => (harness::cmd_optimize, c),
        Verb::Bounds(c) => (harness::cmd_bounds, c),
        Verb::Sweep(c) => (harness::cmd_sweep, c),
    };
    let opts = RunOptions { seed: c.seed, workers: c.workers, out: c.out };
    match verb(&c.config, &opts) {
        Ok(paths) => {
            for p in paths {
                println!("wrote {}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
