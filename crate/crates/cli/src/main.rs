//! `memcoref` command-line front end.

mod analyze;
mod corpus;
mod failure;
mod oracle;
mod run;
mod score;
mod synth;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "memcoref",
    version,
    about = "Bounded-memory incremental coreference clustering"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Input options shared by every corpus-reading subcommand.
#[derive(clap::Args, Debug, Clone)]
pub struct InputArgs {
    /// Corpus files or directories (directories are read in file-name order).
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    /// Input format; inferred from the file extension when omitted
    /// (`.jsonl`/`.json` is JSON lines, anything else CoNLL-2012).
    #[arg(long, value_enum)]
    pub format: Option<InputFormat>,
    /// Worker threads.
    #[arg(long, env = "COREF_JOBS", default_value_t = 1)]
    pub jobs: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum InputFormat {
    Conll,
    Jsonl,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SingletonArg {
    Keep,
    Drop,
}

impl From<SingletonArg> for memcoref::SingletonMode {
    fn from(s: SingletonArg) -> Self {
        match s {
            SingletonArg::Keep => memcoref::SingletonMode::KeepSingletons,
            SingletonArg::Drop => memcoref::SingletonMode::DropSingletons,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Entity spread and active-entity statistics.
    Analyze(analyze::AnalyzeArgs),
    /// Cluster a corpus with one memory policy.
    Run(run::RunArgs),
    /// Ground-truth oracle actions and trackable fractions.
    Oracle(oracle::OracleArgs),
    /// Score predicted clusters against gold.
    Score(score::ScoreArgs),
    /// Generate a seeded synthetic corpus as JSON lines.
    Synth(synth::SynthArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Analyze(a) => analyze::execute(&a),
        Command::Run(a) => run::execute(&a),
        Command::Oracle(a) => oracle::execute(&a),
        Command::Score(a) => score::execute(&a),
        Command::Synth(a) => synth::execute(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code())
        }
    }
}
