//! qtraj: generate, reconstruct and analyze continuous weak-measurement
//! records of dispersively read-out qubits.

mod commands;
mod config_file;
mod error;
mod output;
mod presets;
mod units;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config_file::{parse_axis, ConfigFile, ResolvedCascade, ResolvedRun};
use error::{CliError, CliErrorKind};

#[derive(Parser)]
#[command(
    name = "qtraj",
    version,
    about = "Quantum trajectory engine for continuously monitored qubits",
    after_help = "Exit codes: 2 config error, 3 I/O error, 4 insufficient statistics."
)]
struct Cli {
    /// Worker threads for ensemble generation (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SourceArgs {
    /// Named preset: jump, diffusive, conditional, driven, undriven
    #[arg(long, conflicts_with = "config")]
    preset: Option<String>,

    /// JSON config file (see README for the schema)
    #[arg(long)]
    config: Option<PathBuf>,

    /// Override the number of emitted steps
    #[arg(long)]
    steps: Option<usize>,

    /// Override the measurement axis (z or phi)
    #[arg(long)]
    axis: Option<String>,
}

impl SourceArgs {
    fn resolve(&self) -> Result<ResolvedRun, CliError> {
        let mut run = match (&self.preset, &self.config) {
            (Some(name), None) => presets::qubit_preset(name)?,
            (None, Some(path)) => ConfigFile::load(path)?.resolve_run()?,
            _ => {
                return Err(CliError::new(
                    CliErrorKind::Config,
                    "exactly one of --preset or --config is required",
                ))
            }
        };
        if let Some(steps) = self.steps {
            if steps == 0 {
                return Err(CliError::new(CliErrorKind::Config, "--steps must be positive"));
            }
            run.n_steps = steps;
        }
        if let Some(axis) = &self.axis {
            run.config = run.config.with_axis(parse_axis(axis)?);
        }
        Ok(run)
    }

    fn resolve_cascade(&self) -> Result<ResolvedCascade, CliError> {
        let mut run = match (&self.preset, &self.config) {
            (Some(name), None) => presets::cascade_preset(name)?,
            (None, Some(path)) => ConfigFile::load(path)?.resolve_cascade()?,
            _ => {
                return Err(CliError::new(
                    CliErrorKind::Config,
                    "exactly one of --preset or --config is required",
                ))
            }
        };
        if let Some(steps) = self.steps {
            if steps == 0 {
                return Err(CliError::new(CliErrorKind::Config, "--steps must be positive"));
            }
            run.n_steps = steps;
        }
        Ok(run)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate measurement records with their ground-truth trajectories
    Generate {
        #[command(flatten)]
        source: SourceArgs,
        /// Number of records
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Reconstruct conditioned trajectories from a records file
    Reconstruct {
        #[command(flatten)]
        source: SourceArgs,
        /// records.csv produced by `generate`
        #[arg(long)]
        records: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Run a seeded ensemble: per-step means, greyscale histograms,
    /// optional final-state post-selection
    Ensemble {
        #[command(flatten)]
        source: SourceArgs,
        /// Number of trajectories
        #[arg(long, default_value_t = 5000)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Value bins on [-1, 1]
        #[arg(long, default_value_t = qtraj_core::ensemble::DEFAULT_HISTOGRAM_BINS)]
        bins: usize,
        /// Post-selection window on the final state: x,z,eps
        #[arg(long)]
        window: Option<commands::WindowSpec>,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Emulate conditional state tomography against the Bayesian prediction
    Tomo {
        #[command(flatten)]
        source: SourceArgs,
        /// Total shots, split round-robin over the three axes
        #[arg(long, default_value_t = 30_000)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Conditioning mode: scalar (outcome window) or matching
        /// (trajectory window)
        #[arg(long, default_value = "scalar")]
        mode: String,
        /// Window center for scalar mode
        #[arg(long, default_value_t = 1.0)]
        r_center: f64,
        /// Window half-width
        #[arg(long, default_value_t = 0.05)]
        eps: f64,
        /// Step index to condition at (default: the full record)
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Forward/backward smoothing of one record with a hidden-measurement table
    Smooth {
        #[command(flatten)]
        source: SourceArgs,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Hidden-measurement position as a fraction of the record
        #[arg(long, default_value_t = 0.5)]
        hidden_at: f64,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Cascaded two-qubit half-parity trajectories with concurrence
    Cascade {
        #[command(flatten)]
        source: SourceArgs,
        /// Number of trajectories
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out_dir: PathBuf,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::new(CliErrorKind::Config, format!("--threads: {e}")))?;
    }
    match cli.command {
        Command::Generate { source, n, seed, out_dir } => {
            commands::generate(&source.resolve()?, n, seed, &out_dir)
        }
        Command::Reconstruct { source, records, out_dir } => {
            commands::reconstruct_cmd(&source.resolve()?, &records, &out_dir)
        }
        Command::Ensemble { source, n, seed, bins, window, out_dir } => {
            commands::ensemble(&source.resolve()?, n, seed, bins, window, &out_dir)
        }
        Command::Tomo { source, n, seed, mode, r_center, eps, k, out_dir } => {
            let mode = match mode.as_str() {
                "scalar" => commands::TomoMode::Scalar,
                "matching" => commands::TomoMode::Matching,
                other => {
                    return Err(CliError::new(
                        CliErrorKind::Config,
                        format!("--mode must be scalar or matching, got {other:?}"),
                    ))
                }
            };
            commands::tomo(&source.resolve()?, n, seed, mode, r_center, eps, k, &out_dir)
        }
        Command::Smooth { source, seed, hidden_at, out_dir } => {
            commands::smooth(&source.resolve()?, seed, hidden_at, &out_dir)
        }
        Command::Cascade { source, n, seed, out_dir } => {
            commands::cascade(&source.resolve_cascade()?, n, seed, &out_dir)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{}", err.to_json());
            err.kind.exit_code()
        }
    }
}
