use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod config;
mod output;
mod pgm;

use config::PipelineConfig;

/// Extract, track and score dives in event-probability signals.
#[derive(Debug, Parser)]
#[command(name = "divetrack", version)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// JSON configuration with per-stage sections.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Seed for the simulator and for MSAC sampling.
    #[arg(long, global = true, value_name = "U64")]
    pub seed: Option<u64>,
    /// Worker threads for per-dive and per-frame work.
    #[arg(long, global = true, value_name = "N", value_parser = clap::value_parser!(u16).range(1..))]
    pub jobs: Option<u16>,
    /// Output directory.
    #[arg(short = 'o', long = "output", global = true, value_name = "DIR")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic scene with ground truth.
    Simulate(commands::SimulateArgs),
    /// Smooth the three event signals with a Hann window.
    Smooth(commands::SmoothArgs),
    /// Smooth signals and extract dive intervals.
    Extract(commands::ExtractArgs),
    /// Fit a trajectory to every extracted dive and plan its crops.
    Track(commands::TrackArgs),
    /// Score intervals and trajectories against labels.
    Eval(commands::EvalArgs),
    /// Compare the weighted BCE gradient with finite differences.
    LossCheck(commands::LossCheckArgs),
    /// Parse or format dive codes.
    #[command(subcommand)]
    Code(commands::CodeCommand),
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let mut config = PipelineConfig::load(cli.global.config.as_deref())?;
    if let Some(seed) = cli.global.seed {
        config.simulator.seed = seed;
        config.msac.seed = seed;
    }
    if let Some(jobs) = cli.global.jobs {
        rayon::ThreadPoolBuilder::new().num_threads(jobs.into()).build_global()?;
    }
    let out = cli.global.output.clone().or_else(|| config.output_dir.clone()).unwrap_or_else(|| PathBuf::from("."));
    match cli.command {
        Command::Simulate(a) => commands::simulate(a, config, &out),
        Command::Smooth(a) => commands::smooth(a, config, &out),
        Command::Extract(a) => commands::extract(a, config, &out),
        Command::Track(a) => commands::track(a, config, &out),
        Command::Eval(a) => commands::eval(a, config, &out),
        Command::LossCheck(a) => commands::loss_check(a, cli.global.seed.unwrap_or(0), cli.global.output.as_deref()),
        Command::Code(c) => commands::code(c),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
