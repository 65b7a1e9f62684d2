use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hollowsep::hollowizer::{HollowiseOptions, DEFAULT_MAX_ITERS, DEFAULT_RESTARTS, DEFAULT_SEED};
use hollowsep::separability::{ClassifyOptions, VerdictStatus};
use hollowsep::states::SystemShape;
use hollowsep::Error;

mod commands;
mod report;

pub const EXIT_SEPARABLE: u8 = 0;
pub const EXIT_ENTANGLED: u8 = 10;
pub const EXIT_UNDECIDED: u8 = 20;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_INVALID_STATE: u8 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "hollowsep",
    version,
    about = "Multipartite separability via generalized concurrences"
)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Human, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Human,
    Machine,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List the spin-flip operators of a shape.
    Ops {
        /// Local dimensions, e.g. `2,2,2`.
        #[arg(long, value_delimiter = ',', required = true)]
        shape: Vec<usize>,
        /// The redundant family instead of the minimal one.
        #[arg(long)]
        redundant: bool,
        /// Print the count only.
        #[arg(long)]
        count_only: bool,
    },
    /// Per-operator concurrences of a state file.
    Concurrence {
        file: PathBuf,
        #[command(flatten)]
        tol: TolArgs,
    },
    /// Decide separability of a state file.
    Separability {
        file: PathBuf,
        #[command(flatten)]
        tol: TolArgs,
        /// Largest decomposition length tried (default r²).
        #[arg(long)]
        p_max: Option<usize>,
        /// Random restarts per length.
        #[arg(long, default_value_t = DEFAULT_RESTARTS)]
        restarts: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Iterations per restart.
        #[arg(long, default_value_t = DEFAULT_MAX_ITERS)]
        max_iters: usize,
        /// Skip the partial-transpose scan.
        #[arg(long)]
        skip_ppt: bool,
    },
    /// Write a bundled example state.
    Examples {
        /// Example name; omit to list them.
        name: Option<String>,
        /// Write every example into this directory instead of stdout.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

#[derive(Args, Debug, Clone, Copy)]
struct TolArgs {
    /// Zero-threshold on concurrences and hollowisation residuals, relative
    /// to the largest singular value of the preconcurrence matrices (floored
    /// at 1). Defaults to 1e-9 (1e-10 for pure states in `concurrence`).
    #[arg(long, allow_negative_numbers = true)]
    tol: Option<f64>,
}

/// Failure of a command, mapped to an exit code.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    InvalidState(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse(_)
            | Error::InvalidShape(_)
            | Error::OverflowGuard { .. }
            | Error::InvalidPartition(_)
            | Error::PartyOutOfRange { .. }
            | Error::ShapeMismatch { .. } => Failure::Usage(e.to_string()),
            other => Failure::InvalidState(other.to_string()),
        }
    }
}

pub fn status_code(status: VerdictStatus) -> u8 {
    match status {
        VerdictStatus::Separable => EXIT_SEPARABLE,
        VerdictStatus::Entangled => EXIT_ENTANGLED,
        VerdictStatus::Undecided => EXIT_UNDECIDED,
    }
}

fn check_tol(tol: f64) -> Result<(), Failure> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Failure::Usage(format!("--tol must be positive, got {tol}")))
    }
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let format = cli.format;
    match cli.command {
        Command::Ops {
            shape,
            redundant,
            count_only,
        } => {
            let shape = SystemShape::new(shape)?;
            commands::ops(&shape, redundant, count_only, format)
        }
        Command::Concurrence { file, tol } => {
            if let Some(t) = tol.tol {
                check_tol(t)?;
            }
            commands::concurrence(&file, tol.tol, format)
        }
        Command::Separability {
            file,
            tol,
            p_max,
            restarts,
            seed,
            max_iters,
            skip_ppt,
        } => {
            let tol = tol.tol.unwrap_or(hollowsep::concurrence::DEFAULT_MIXED_TOL);
            check_tol(tol)?;
            if restarts == 0 {
                return Err(Failure::Usage("--restarts must be at least 1".into()));
            }
            let opts = ClassifyOptions {
                tol,
                p_max,
                skip_ppt,
                hollowise: HollowiseOptions {
                    tolerance: tol,
                    max_iters,
                    restarts,
                    seed,
                },
                ..ClassifyOptions::default()
            };
            commands::separability(&file, &opts, format)
        }
        Command::Examples { name, out_dir } => commands::examples(name.as_deref(), out_dir.as_deref()),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::InvalidState(msg)) => {
            eprintln!("error: invalid state: {msg}");
            ExitCode::from(EXIT_INVALID_STATE)
        }
    }
}
