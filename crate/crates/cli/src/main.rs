mod commands;
mod error;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

/// Shortest entity distance scoring of news article pairs.
#[derive(Debug, Parser)]
#[command(name = "sedrec", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse and prune an N-Triples dump into a graph snapshot.
    Ingest(IngestArgs),
    /// Turn one-row-per-rating data into the pairs CSV.
    Convert(ConvertArgs),
    /// Dump the expanded subgraph around some seed entities.
    Subgraph(SubgraphArgs),
    /// Score article pairs with one method.
    Score(ScoreArgs),
    /// Evaluate score files against the human ratings.
    Evaluate(EvaluateArgs),
    /// Side-by-side per-pair table of several score files.
    Compare(CompareArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct IngestArgs {
    /// N-Triples file, optionally gzip-compressed.
    #[arg(long)]
    pub triples: PathBuf,
    /// Keep only English or untagged literals.
    #[arg(long)]
    pub english_only: bool,
    /// Drop nodes with fewer distinct out-neighbors (0 disables).
    #[arg(long, default_value_t = 20)]
    pub min_out_degree: usize,
    /// Node identifiers to remove, one per line.
    #[arg(long)]
    pub stoplist: Option<PathBuf>,
    /// Remove degree-1 nodes once after collapsing.
    #[arg(long)]
    pub drop_leaves: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct ConvertArgs {
    /// CSV with columns pair_id,article_a,article_b,annotator,q1,q2.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct SubgraphArgs {
    #[arg(long, env = "SEDREC_KG")]
    pub kg: Option<PathBuf>,
    /// Comma-separated node identifiers.
    #[arg(long, value_delimiter = ',', required = true)]
    pub seeds: Vec<String>,
    #[arg(long, default_value_t = 1)]
    pub hops: u8,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Sed,
    Tfidf,
    Embedding,
}

#[derive(Debug, Args, Serialize)]
pub struct ScoreArgs {
    /// Graph snapshot (required for sed).
    #[arg(long, env = "SEDREC_KG")]
    pub kg: Option<PathBuf>,
    /// Dataset directory holding articles/ and pairs.csv, or a directory
    /// of article files when --pairs is given.
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub pairs: Option<PathBuf>,
    /// Entity annotations TSV (required for sed).
    #[arg(long)]
    pub annotations: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Method::Sed)]
    pub method: Method,
    /// pair_id,distance CSV for --method embedding.
    #[arg(long)]
    pub embedding_scores: Option<PathBuf>,
    /// Method name written to the score file (defaults to the method).
    #[arg(long)]
    pub label: Option<String>,
    /// row, avg or sym.
    #[arg(long, default_value = "sym")]
    pub variant: String,
    /// Expansion radius, 1 or 2.
    #[arg(long, default_value_t = 1)]
    pub hops: u8,
    /// unweighted, rws, af, iaf, af-iaf or joint-ic.
    #[arg(long, default_value = "rws")]
    pub weighting: String,
    #[arg(long, default_value_t = 0.98)]
    pub penalty: f64,
    /// Entities kept per article after screening (0 keeps all).
    #[arg(long, default_value_t = 5)]
    pub top_entities: usize,
    /// Comma-separated entity types to drop; empty keeps all.
    #[arg(long, default_value = "LOC,GPE")]
    pub drop_types: String,
    #[arg(long, default_value_t = 2)]
    pub context_words: u8,
    /// Score every pair from its second article to its first.
    #[arg(long)]
    pub reverse_direction: bool,
    /// Worker threads (0 uses all cores).
    #[arg(long, default_value_t = 0)]
    #[serde(skip)]
    pub jobs: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct EvaluateArgs {
    /// Score CSV files.
    #[arg(long, num_args = 1.., required = true)]
    pub scores: Vec<PathBuf>,
    /// Dataset directory holding pairs.csv.
    #[arg(long, conflicts_with = "pairs")]
    pub dataset: Option<PathBuf>,
    #[arg(long)]
    pub pairs: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', default_value = "GR@.75,GR@.5,DR@.75,DR@.5")]
    pub conditions: Vec<String>,
    /// Comma-separated methods to combine; repeatable.
    #[arg(long)]
    pub ensemble: Vec<String>,
    /// Metrics CSV.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Correlations CSV.
    #[arg(long)]
    pub correlations: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct CompareArgs {
    #[arg(long, num_args = 1.., required = true)]
    pub scores: Vec<PathBuf>,
    /// Adds mean ratings per pair.
    #[arg(long)]
    pub pairs: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Ingest(a) => commands::ingest(a),
        Command::Convert(a) => commands::convert(a),
        Command::Subgraph(a) => commands::subgraph(a),
        Command::Score(a) => commands::score(a),
        Command::Evaluate(a) => commands::evaluate(a),
        Command::Compare(a) => commands::compare(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
