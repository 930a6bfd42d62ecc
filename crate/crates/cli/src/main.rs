use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod figure;
mod output;
mod verify;

use output::Format;

#[derive(Debug, Parser)]
#[command(name = "pinchlab", version, about = "Pinching thresholds, harmonic identities and sharpness runs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Threshold table over a range of dimensions.
    Thresholds {
        #[arg(long, default_value_t = 3)]
        n_min: usize,
        #[arg(long, default_value_t = 20)]
        n_max: usize,
        #[command(flatten)]
        io: Io,
    },
    /// Threshold-vs-dimension data as CSV plus an SVG plot.
    Figure {
        #[arg(long, default_value_t = 3)]
        n_min: usize,
        #[arg(long, default_value_t = 140)]
        n_max: usize,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a verification suite; exits with status 1 on any failed check.
    Verify {
        suite: Suite,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[command(flatten)]
        io: Io,
    },
    /// Random-restart search for the curvature coupling constant.
    Sharpness(SharpnessArgs),
    /// Invariant structures that can occur in dimension n.
    Classify {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        io: Io,
    },
    /// Ergodicity verdict for dimension n and pinching delta.
    Eval {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        delta: f64,
        #[command(flatten)]
        io: Io,
    },
}

#[derive(Debug, Clone, Args)]
struct Io {
    /// Output format; defaults depend on the command.
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write the artifact here (plus a sidecar manifest) instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
enum Suite {
    Identities,
    Curvature,
    Monotonicity,
    All,
}

#[derive(Debug, Clone, Args)]
struct SharpnessArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 3)]
    k: usize,
    #[arg(long)]
    restarts: Option<usize>,
    /// Ascent steps per restart.
    #[arg(long)]
    iters: Option<usize>,
    /// Samples for the final evaluation of the best field.
    #[arg(long)]
    mc_samples: Option<usize>,
    #[arg(long, default_value = "one")]
    weights: String,
    /// Search only fields whose contraction drops two degrees.
    #[arg(long)]
    constrained: bool,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Per-restart trace as CSV.
    #[arg(long)]
    trace: Option<PathBuf>,
    #[command(flatten)]
    io: Io,
}

/// Arithmetic used by the identity suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
enum Mode {
    Exact,
    Double,
}

fn mode_from_env() -> Result<Mode, CliError> {
    match std::env::var("PINCHLAB_MODE") {
        Err(_) => Ok(Mode::Exact),
        Ok(v) => match v.as_str() {
            "" | "exact" => Ok(Mode::Exact),
            "double" => Ok(Mode::Double),
            other => Err(CliError::Usage(format!("PINCHLAB_MODE must be exact|double, got '{other}'"))),
        },
    }
}

#[derive(Debug)]
enum CliError {
    /// Bad flags or values outside a formula's domain: exit 2.
    Usage(String),
    /// A verification check failed: exit 1.
    Failed(String),
    Io(String),
}

impl From<pinchlab_core::Error> for CliError {
    fn from(e: pinchlab_core::Error) -> Self {
        match e {
            pinchlab_core::Error::Domain(_) => CliError::Usage(e.to_string()),
            other => CliError::Failed(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Thresholds { n_min, n_max, io } => commands::thresholds(n_min, n_max, &io),
        Command::Figure { n_min, n_max, out } => commands::figure(n_min, n_max, &out),
        Command::Verify { suite, seed, io } => commands::verify(suite, seed, mode_from_env()?, &io),
        Command::Sharpness(args) => commands::sharpness(&args),
        Command::Classify { n, io } => commands::classify(n, &io),
        Command::Eval { n, delta, io } => commands::eval(n, delta, &io),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Failed(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
