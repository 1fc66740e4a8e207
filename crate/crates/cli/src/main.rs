use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};
use mapforest_cli::{run_experiment, run_sample, run_verify, ExperimentConfig};

#[derive(Parser)]
#[command(name = "mapforest", version, about = "Random bipartite maps with prescribed face degrees")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Overrides the seed in the config.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, env = "MAPFOREST_THREADS")]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Sample maps and write their dumps and encodings.
    Sample(Common),
    /// Check the exact identities on fresh samples; exit 1 on any failure.
    Verify(Common),
    /// Scaling experiment: CSV tables and regression summaries.
    Experiment(Common),
}

fn run() -> Result<bool> {
    let cli = Cli::parse();
    let (Command::Sample(c) | Command::Verify(c) | Command::Experiment(c)) = &cli.command;
    if let Some(t) = c.threads {
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global()?;
    }
    let cfg = ExperimentConfig::load(&c.config)?;
    let seed = c.seed.unwrap_or(cfg.seed);
    match &cli.command {
        Command::Sample(_) => run_sample(&cfg, seed, &c.out)?,
        Command::Experiment(_) => run_experiment(&cfg, seed, &c.out)?,
        Command::Verify(_) => {
            let outcome = run_verify(&cfg, seed, &c.out, Some(&c.config))?;
            let failed: Vec<_> = outcome.checks.iter().filter(|r| !r.pass).collect();
            println!("{} checks, {} failed", outcome.checks.len(), failed.len());
            for r in failed.iter().take(10) {
                eprintln!("FAIL n={} replica={} {}: {}", r.n, r.replica, r.check, r.detail);
            }
            if let Some(rep) = &outcome.reproducer {
                eprintln!("reproduce with: {rep}");
            }
            return Ok(outcome.pass());
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
