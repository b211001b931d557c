//! `nsumkit`: sample sizes, estimates and simulation studies for the network
//! scale-up method.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::{BatchArgs, SampleSizeArgs};

#[derive(Parser)]
#[command(name = "nsumkit", version, about = "Network scale-up method toolkit")]
struct Cli {
    /// Worker threads for simulations (default: all cores).
    #[arg(long, global = true, env = "NSUMKIT_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Minimum sample size for a relative margin of error.
    Samplesize {
        #[arg(long)]
        epsilon: f64,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        prevalence: f64,
        #[arg(long)]
        mean_degree: f64,
        #[arg(long)]
        population: u64,
        /// Design effect of the sampling plan.
        #[arg(long, default_value_t = 1.0)]
        deff: f64,
        /// Use z = 2 instead of the exact normal quantile.
        #[arg(long)]
        z2: bool,
    },
    /// Scale-up estimate and confidence interval from degree reports.
    Estimate {
        /// Headerless CSV with columns `d,d_u`.
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        population: u64,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[arg(long)]
        z2: bool,
    },
    /// Factorial coverage study over graph models.
    Simulate {
        #[command(flatten)]
        batch: Batch,
        /// Run the complete five-model grid instead of a config file.
        #[arg(long)]
        full_grid: bool,
    },
    /// Sweep from Erdős–Rényi towards structured graphs.
    Sweep {
        #[command(flatten)]
        batch: Batch,
    },
    /// Retrospective analysis of published studies (bundled cases by default).
    Retro {
        #[command(flatten)]
        batch: Batch,
    },
    /// Sample sizes over a prevalence × mean-degree grid.
    Grid {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output directory.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

#[derive(Args)]
struct Batch {
    /// JSON configuration, or a manifest from an earlier run.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Overrides the seed in the configuration.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the replicate count in the configuration.
    #[arg(long)]
    replicates: Option<u64>,
}

impl Batch {
    fn args(self) -> anyhow::Result<BatchArgs> {
        if let Some(p) = &self.config {
            commands::require_file(p)?;
        }
        Ok(BatchArgs { config: self.config, out: self.out, seed: self.seed, replicates: self.replicates })
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    if let Some(n) = cli.threads {
        if n == 0 {
            anyhow::bail!(commands::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    match cli.command {
        Command::Samplesize { epsilon, alpha, prevalence, mean_degree, population, deff, z2 } => {
            let args = SampleSizeArgs { epsilon, alpha, prevalence, mean_degree, population, deff, z2 };
            print!("{}", commands::samplesize(&args)?);
        }
        Command::Estimate { input, population, alpha, z2 } => {
            print!("{}", commands::estimate_cmd(&input, population, alpha, z2)?);
        }
        Command::Simulate { batch, full_grid } => commands::simulate(&batch.args()?, full_grid)?,
        Command::Sweep { batch } => commands::sweep(&batch.args()?)?,
        Command::Retro { batch } => commands::retro(&batch.args()?)?,
        Command::Grid { config, out } => {
            if let Some(p) = &config {
                commands::require_file(p)?;
            }
            commands::grid(config.as_deref(), &out)?
        }
    }
    Ok(())
}

/// 3 for degenerate data, 2 for everything the user can fix by changing
/// flags or configuration.
fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<nsumkit::Error>() {
        Some(nsumkit::Error::Degenerate(_)) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
