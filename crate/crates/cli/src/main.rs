//! `raga`: synthesize labeled clips, extract note-grid features, train the
//! TDNN+LSTM classifier, evaluate checkpoints, and classify recordings.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgAction, Parser, Subcommand};

use raga_core::error::ErrorCategory;

/// Exit codes: 0 success, 2 usage errors, 3 data errors, 4 numeric errors.
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_DATA: u8 = 3;
pub const EXIT_NUMERIC: u8 = 4;

#[derive(Parser)]
#[command(name = "raga", version, about = "Carnatic raga classification pipeline")]
pub struct Cli {
    /// Directory every relative path resolves against.
    #[arg(long, global = true, default_value = ".")]
    pub workdir: PathBuf,

    /// TOML file supplying defaults for any flag (flags win).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Print per-clip progress to stderr.
    #[arg(short, long, global = true, action = ArgAction::Count)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Generate labeled synthetic raga clips and a manifest.
    Synth(commands::SynthArgs),
    /// Turn manifest clips into feature files (resample, trim, segment, filter bank).
    Featurize(commands::FeaturizeArgs),
    /// Train the classifier on a manifest and save a checkpoint.
    Train(commands::TrainArgs),
    /// Evaluate a checkpoint on a manifest.
    Eval(commands::EvalArgs),
    /// Rank ragas for one WAV clip.
    Predict(commands::PredictArgs),
}

/// Command-level failure, already categorized for the exit code.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(raga_core::RagaError),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl<E: Into<raga_core::RagaError>> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError::Core(e.into())
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Core(e) => match e.category() {
                ErrorCategory::Usage => EXIT_USAGE,
                ErrorCategory::Data => EXIT_DATA,
                ErrorCategory::Numeric => EXIT_NUMERIC,
            },
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let ctx = match config::Context::new(&cli) {
        Ok(ctx) => ctx,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code());
        }
    };
    let result = match &cli.command {
        Command::Synth(args) => commands::run_synth(&ctx, args),
        Command::Featurize(args) => commands::run_featurize(&ctx, args),
        Command::Train(args) => commands::run_train(&ctx, args),
        Command::Eval(args) => commands::run_eval(&ctx, args),
        Command::Predict(args) => commands::run_predict(&ctx, args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
