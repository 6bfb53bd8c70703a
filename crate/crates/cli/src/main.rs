use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use romkit_cli::commands;
use romkit_cli::CliError;

/// Snapshot-based reduced order modelling toolkit.
///
/// Exit codes: 0 success, 2 configuration/usage error, 3 numerical failure,
/// 4 malformed input file.
#[derive(Parser)]
#[command(name = "romkit", version, about)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct RunArgs {
    /// Input tensor file (.mft).
    #[arg(long)]
    input: PathBuf,
    /// JSON run configuration; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Artifact directory to create (must not exist).
    #[arg(long)]
    output: PathBuf,
    /// Also render SVG figures where the command supports them.
    #[arg(long)]
    plots: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Modal decompositions of a snapshot database.
    Decompose {
        #[command(subcommand)]
        what: DecomposeCmd,
    },
    /// Repair corrupted entries.
    Repair {
        #[command(subcommand)]
        what: RepairCmd,
    },
    /// Increase spatial resolution by iterative doubling.
    Superres(RunArgs),
    /// Predict the future evolution of the database.
    Forecast {
        #[command(subcommand)]
        what: ForecastCmd,
    },
    /// Reconstruct full fields from sparse sensors.
    Reconstruct {
        #[command(subcommand)]
        what: ReconstructCmd,
    },
    /// Autoencoder pattern identification.
    Autoencode(RunArgs),
    /// Produce synthetic databases with a known ground truth.
    Generate {
        #[command(subcommand)]
        what: GenerateCmd,
    },
    /// Convert foreign formats into tensor files.
    Import {
        #[command(subcommand)]
        what: ImportCmd,
    },
    /// Print the header and basic statistics of a tensor file.
    Info {
        #[arg(long)]
        input: PathBuf,
    },
}

#[derive(Subcommand)]
enum DecomposeCmd {
    /// Truncated SVD / POD.
    Svd(RunArgs),
    /// Tucker factorisation with per-axis tolerances.
    Hosvd(RunArgs),
    /// High-order DMD on the snapshot matrix.
    Hodmd(RunArgs),
    /// Multidimensional (optionally iterative) high-order DMD.
    Mdhodmd(RunArgs),
}

#[derive(Subcommand)]
enum RepairCmd {
    /// Iterative low-rank completion of NaN-flagged entries.
    Gappy {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        output: PathBuf,
    },
}

#[derive(Subcommand)]
enum ForecastCmd {
    /// DMD-mode extrapolation beyond the training window.
    Dmd(RunArgs),
    /// Neural forecasting ROM (hybrid SVD+network or fully neural).
    Nn {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        output: PathBuf,
    },
}

#[derive(Subcommand)]
enum ReconstructCmd {
    /// Parallel-decoder reconstruction from stride-sampled sensors.
    Nn {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        output: PathBuf,
    },
}

#[derive(Subcommand)]
enum GenerateCmd {
    /// Evaluate a known mode table on a seeded random orthonormal basis.
    Synthetic {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        output: PathBuf,
        /// Number of auto-generated modes (shortcut for a config file).
        #[arg(long)]
        modes: Option<usize>,
    },
}

#[derive(Subcommand)]
enum ImportCmd {
    /// CSV with a header row; rows are flattened space, columns time.
    Csv {
        #[arg(long)]
        input: PathBuf,
        /// Tensor shape, comma separated (last axis = time).
        #[arg(long)]
        shape: Option<String>,
        #[arg(long)]
        output: PathBuf,
    },
}

fn parse_shape(s: &str) -> Result<Vec<usize>, CliError> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<usize>()
                .map_err(|e| CliError::Config(format!("bad shape component '{p}': {e}")))
        })
        .collect()
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.cmd {
        Cmd::Decompose { what } => match what {
            DecomposeCmd::Svd(a) => {
                commands::decompose_svd(&a.input, a.config.as_deref(), &a.output, a.plots)
            }
            DecomposeCmd::Hosvd(a) => {
                commands::decompose_hosvd(&a.input, a.config.as_deref(), &a.output, a.plots)
            }
            DecomposeCmd::Hodmd(a) => {
                commands::decompose_hodmd(&a.input, a.config.as_deref(), &a.output, a.plots)
            }
            DecomposeCmd::Mdhodmd(a) => {
                commands::decompose_mdhodmd(&a.input, a.config.as_deref(), &a.output, a.plots)
            }
        },
        Cmd::Repair { what } => match what {
            RepairCmd::Gappy {
                input,
                config,
                output,
            } => commands::repair_gappy(&input, config.as_deref(), &output),
        },
        Cmd::Superres(a) => commands::superres(&a.input, a.config.as_deref(), &a.output),
        Cmd::Forecast { what } => match what {
            ForecastCmd::Dmd(a) => {
                commands::forecast_dmd(&a.input, a.config.as_deref(), &a.output, a.plots)
            }
            ForecastCmd::Nn {
                input,
                config,
                output,
            } => commands::forecast_nn(&input, config.as_deref(), &output),
        },
        Cmd::Reconstruct { what } => match what {
            ReconstructCmd::Nn {
                input,
                config,
                output,
            } => commands::reconstruct_nn(&input, config.as_deref(), &output),
        },
        Cmd::Autoencode(a) => commands::autoencode(&a.input, a.config.as_deref(), &a.output),
        Cmd::Generate { what } => match what {
            GenerateCmd::Synthetic {
                config,
                output,
                modes,
            } => commands::generate(config.as_deref(), &output, modes),
        },
        Cmd::Import { what } => match what {
            ImportCmd::Csv {
                input,
                shape,
                output,
            } => {
                let shape = shape.as_deref().map(parse_shape).transpose()?;
                commands::import_csv_file(&input, shape, &output)
            }
        },
        Cmd::Info { input } => commands::info(&input),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
