mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use relvis_core::eval::DEFAULT_K;
use relvis_core::SyntheticSpec;

use config::{Overrides, RunConfig};
use error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "relvis",
    version,
    about = "Two-view latent factorization for user-relevant visualization"
)]
struct Cli {
    /// Random seed (overrides the config file)
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads; results do not depend on this
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Run configuration file (required by `fit`)
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fit shared and view-specific coordinates to a primary and a user view
    Fit {
        #[arg(long)]
        output_dir: Option<PathBuf>,
        #[arg(long)]
        restarts: Option<usize>,
        #[arg(long)]
        max_iters: Option<usize>,
    },
    /// Generate a synthetic two-view dataset with structured noise
    Synth {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 200)]
        n_items: usize,
        #[arg(long, default_value_t = 4)]
        relevant: usize,
        #[arg(long, default_value_t = 4)]
        irrelevant: usize,
        #[arg(long, default_value_t = 10)]
        feature_dim: usize,
        #[arg(long, default_value_t = 6.0)]
        separation: f64,
        #[arg(long, default_value_t = 0.1)]
        noise_rate: f64,
    },
    /// Leave-one-out k-NN separability of labels on 2-D coordinates
    Eval {
        #[arg(long)]
        coords: PathBuf,
        #[arg(long)]
        labels: PathBuf,
        #[arg(long, default_value_t = DEFAULT_K)]
        k: usize,
    },
    /// Render coordinates as an SVG scatterplot coloured by label
    Plot {
        #[arg(long)]
        coords: PathBuf,
        #[arg(long)]
        labels: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(CliError::Config("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    match cli.command {
        Command::Fit {
            output_dir,
            restarts,
            max_iters,
        } => {
            let path = cli
                .config
                .ok_or_else(|| CliError::Config("fit requires --config <path>".into()))?;
            let overrides = Overrides {
                seed: cli.seed,
                output_dir,
                restarts,
                max_iters,
            };
            commands::fit(&RunConfig::load(&path, &overrides)?)
        }
        Command::Synth {
            out,
            n_items,
            relevant,
            irrelevant,
            feature_dim,
            separation,
            noise_rate,
        } => {
            let spec = SyntheticSpec {
                n_items,
                n_relevant_classes: relevant,
                n_irrelevant_classes: irrelevant,
                feature_dim,
                cluster_separation: separation,
                noise_rate,
                seed: cli.seed.unwrap_or(0),
            };
            commands::synth(&spec, &out)
        }
        Command::Eval { coords, labels, k } => {
            println!("{}", commands::eval(&coords, &labels, k)?);
            Ok(())
        }
        Command::Plot {
            coords,
            labels,
            out,
        } => commands::plot(&coords, &labels, &out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("relvis: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
