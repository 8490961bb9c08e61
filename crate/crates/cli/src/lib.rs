//! Command-line front end: build, query, bench, stats and mwe-parse.
//!
//! Every command writes its report to the supplied writer so it can be
//! driven in-process. Failures map to exit code 2 for configurations the
//! index cannot answer and 1 for everything else.

pub mod commands;
pub mod queryfile;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use topk_core::mwe::DEFAULT_THRESHOLD;
use topk_core::{Estimator, Measure, Mode, Variant};

#[derive(Debug, Parser)]
#[command(name = "topk", version, about = "Top-k document retrieval over a wavelet-tree self-index")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build an index from a file (one document per line) or a directory
    /// (one document per file, ordered by file name).
    Build(BuildArgs),
    /// Run a query file and print a TREC run.
    Query(QueryArgs),
    /// Count processed states per estimator against exhaustive traversal.
    Bench(BenchArgs),
    /// Print component sizes of an index.
    Stats(StatsArgs),
    /// Parse a query into multi-word expressions.
    MweParse(MweArgs),
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long, default_value = "dr", value_parser = parse::<Variant>)]
    pub variant: Variant,
}

#[derive(Debug, Args)]
pub struct QueryArgs {
    #[arg(long)]
    pub index: PathBuf,
    /// Lines of `qid<TAB>body`; phrases in double quotes.
    #[arg(long)]
    pub queries: PathBuf,
    #[arg(long, default_value_t = 10)]
    pub k: usize,
    #[arg(long, default_value = "or", value_parser = parse::<Mode>)]
    pub mode: Mode,
    #[arg(long, default_value = "bm25", value_parser = parse::<Measure>)]
    pub measure: Measure,
    #[arg(long, default_value = "e1", value_parser = parse::<Estimator>)]
    pub estimator: Estimator,
    /// Merge multi-word expressions before querying.
    #[arg(long)]
    pub mwe: bool,
    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    pub mwe_threshold: f64,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long)]
    pub index: PathBuf,
    #[arg(long)]
    pub queries: PathBuf,
    /// Comma-separated cutoffs; `N` means every document.
    #[arg(long, default_value = "10", value_delimiter = ',')]
    pub k: Vec<String>,
    #[arg(long, default_value = "or", value_parser = parse::<Mode>)]
    pub mode: Mode,
    #[arg(long, default_value = "bm25", value_parser = parse::<Measure>)]
    pub measure: Measure,
    /// Estimators to sweep; defaults to all the index supports.
    #[arg(long, value_delimiter = ',', value_parser = parse::<Estimator>)]
    pub estimator: Vec<Estimator>,
    /// Output path; standard output when absent.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(long)]
    pub index: PathBuf,
}

#[derive(Debug, Args)]
pub struct MweArgs {
    #[arg(long)]
    pub index: PathBuf,
    #[arg(long)]
    pub query: String,
    #[arg(long, default_value_t = DEFAULT_THRESHOLD)]
    pub threshold: f64,
}

fn parse<T: std::str::FromStr<Err = topk_core::Error>>(s: &str) -> Result<T, String> {
    s.parse().map_err(|e: topk_core::Error| e.to_string())
}

pub fn run(cli: Cli, out: &mut dyn Write) -> anyhow::Result<()> {
    match cli.command {
        Command::Build(a) => commands::build(&a, out),
        Command::Query(a) => commands::query(&a, out),
        Command::Bench(a) => commands::bench(&a, out),
        Command::Stats(a) => commands::stats(&a, out),
        Command::MweParse(a) => commands::mwe_parse(&a, out),
    }
}

/// 2 for configurations the index cannot answer, 1 otherwise.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    match err.downcast_ref::<topk_core::Error>() {
        Some(topk_core::Error::InvalidConfig(_)) => 2,
        _ => 1,
    }
}
