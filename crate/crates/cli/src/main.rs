//! Pipeline driver for OOV proper-name retrieval experiments.
//!
//! Exit codes: 0 success, 1 usage/config error, 2 data/contract error.

mod commands;
mod config;
mod layout;

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Parser, Subcommand};

use commands::rank::RankMethod;
use commands::train::TrainMethod;
use commands::Ctx;
use config::RunConfig;
use oovrank_core::corpus::Split;

/// Configuration or command-line problem; maps to exit code 1.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl std::error::Error for UsageError {}

#[derive(Parser)]
#[command(
    name = "oovrank",
    version,
    about = "Rank out-of-vocabulary proper names relevant to a document",
    after_help = "Typical run:\n  \
        oovrank gen-corpus && oovrank prepare && oovrank train skipgram\n  \
        oovrank train dcbow2plus && oovrank rank dcbow2plus --split test\n  \
        oovrank evaluate data/ranked/dcbow2plus.test.jsonl"
)]
struct Cli {
    /// Configuration file (TOML); defaults apply without one
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Global random seed (overrides the config file)
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads for ranking; 0 = deterministic single-threaded
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    /// Override a config key, e.g. --set lda.topics=50 (repeatable)
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic diachronic corpus and lexicon
    GenCorpus,
    /// Build the IV/OOV vocabulary and encode all splits
    Prepare,
    /// Train a model (neural methods need a prior skipgram run)
    Train {
        #[arg(value_enum)]
        method: TrainMethod,
    },
    /// Rank the OOV PN vocabulary for every document of a split
    Rank {
        #[arg(value_enum)]
        method: RankMethod,
        /// Which split to rank
        #[arg(long, default_value = "test")]
        split: String,
        /// Simulate transcription noise at this word error rate first
        #[arg(long)]
        noise: Option<f64>,
    },
    /// Compute Recall@N / MAP@N reports; two inputs also get a diff report
    Evaluate {
        /// Ranked-list files produced by `rank`
        files: Vec<PathBuf>,
    },
    /// Keyword importance and target ranks for given documents
    Keywords {
        doc_ids: Vec<String>,
    },
    /// Print statistics of the prepared splits
    Stats {
        #[arg(long)]
        split: Option<String>,
    },
}

fn main() {
    std::process::exit(real_main());
}

fn real_main() -> i32 {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };

    let config = match RunConfig::load(
        cli.config.as_deref(),
        &cli.set,
        cli.seed,
        cli.threads,
    ) {
        Ok(config) => config,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    let ctx = Ctx::new(config);

    match run(&ctx, cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                1
            } else {
                2
            }
        }
    }
}

fn run(ctx: &Ctx, command: Command) -> anyhow::Result<()> {
    match command {
        Command::GenCorpus => commands::gen::gen_corpus(ctx),
        Command::Prepare => commands::prepare::prepare(ctx),
        Command::Train { method } => commands::train::train(ctx, method),
        Command::Rank {
            method,
            split,
            noise,
        } => {
            let split = Split::from_str(&split).map_err(|e| UsageError(e.to_string()))?;
            if let Some(rate) = noise {
                if !(0.0..1.0).contains(&rate) {
                    return Err(UsageError(format!(
                        "--noise must be in [0, 1), got {rate}"
                    ))
                    .into());
                }
            }
            commands::rank::rank(ctx, method, split, noise)
        }
        Command::Evaluate { files } => commands::evaluate::evaluate(ctx, &files),
        Command::Keywords { doc_ids } => commands::keywords::keywords(ctx, &doc_ids),
        Command::Stats { split } => {
            let split = split
                .map(|s| Split::from_str(&s).map_err(|e| UsageError(e.to_string())))
                .transpose()?;
            commands::prepare::stats(ctx, split)
        }
    }
}
