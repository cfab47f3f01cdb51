//! Flag definitions and `--config` merging.

use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use cordir::bm25::FieldSelector;
use cordir::contrastive::{PairMethod, ScoreFn};
use cordir::dense::Metric;
use cordir::eval::{TopicField, TopicFormat};

use crate::error::Failure;

/// Lexical, bag-of-embeddings and dense retrieval over a CORD-19-shaped corpus.
///
/// Any flag may also be given in a `--config` file as `name = value` (one per
/// line, `#` comments). Flags on the command line override the file.
#[derive(Debug, Parser)]
#[command(name = "cordir", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
#[command(args_override_self = true)]
pub enum Command {
    /// Build a corpus snapshot from metadata.csv and the pdf_json directory.
    Ingest(IngestArgs),
    /// Build and persist a BM25 inverted index.
    Index(IndexArgs),
    /// Query an index and print the ranked documents.
    Search(SearchArgs),
    /// Rank every topic with one ranker and write a run file.
    Run(RunArgs),
    /// Train the contrastive encoder and export a checkpoint.
    Train(TrainArgs),
    /// Top-k overlap statistics between two or three run files.
    Compare(CompareArgs),
    /// Score run files against relevance judgments.
    Eval(EvalArgs),
}

#[derive(Debug, Clone, Args)]
pub struct PrepArgs {
    /// Stopword list replacing the bundled one (one term per line).
    #[arg(long)]
    pub stopwords: Option<PathBuf>,
    #[arg(long)]
    pub no_stopwords: bool,
    #[arg(long)]
    pub no_stem: bool,
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    #[arg(long)]
    pub metadata: PathBuf,
    #[arg(long)]
    pub json_dir: PathBuf,
    /// Keep only the ids listed in this file.
    #[arg(long)]
    pub docids: Option<PathBuf>,
    /// Keep documents whose abstract is empty.
    #[arg(long)]
    pub keep_empty_abstracts: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct IndexArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    /// Comma-separated document fields: title, abstract, body.
    #[arg(long, default_value = "title,abstract")]
    pub fields: FieldSelector,
    #[command(flatten)]
    pub prep: PrepArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, Args)]
pub struct Bm25Args {
    #[arg(long, default_value_t = 1.2)]
    pub k1: f64,
    #[arg(long, default_value_t = 0.75)]
    pub b: f64,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[arg(long)]
    pub index: PathBuf,
    #[arg(long)]
    pub query: String,
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u32).range(1..))]
    pub k: u32,
    #[command(flatten)]
    pub bm25: Bm25Args,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum RankerName {
    Bm25,
    Bag,
    Dense,
}

impl RankerName {
    pub fn as_str(self) -> &'static str {
        match self {
            RankerName::Bm25 => "bm25",
            RankerName::Bag => "bag",
            RankerName::Dense => "dense",
        }
    }
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long, value_enum)]
    pub ranker: RankerName,
    #[arg(long)]
    pub topics: PathBuf,
    /// Topic file format; guessed from the extension when omitted.
    #[arg(long)]
    pub topic_format: Option<TopicFormat>,
    /// query, question, narrative, average or combined.
    #[arg(long, default_value = "query")]
    pub field: TopicField,
    #[arg(long, default_value_t = 50, value_parser = clap::value_parser!(u32).range(1..))]
    pub k: u32,
    /// Run tag written in the last column; defaults to the ranker name.
    #[arg(long)]
    pub tag: Option<String>,
    /// Inverted index (bm25).
    #[arg(long)]
    pub index: Option<PathBuf>,
    /// Corpus snapshot (bag, dense).
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// Word embeddings (bag) or document/topic vectors (dense).
    #[arg(long)]
    pub embeddings: Option<PathBuf>,
    /// cosine or gaussian.
    #[arg(long, default_value = "cosine")]
    pub metric: Metric,
    /// Spherical variance given to every word or document vector.
    #[arg(long, default_value_t = 1.0)]
    pub variance: f64,
    /// Document fields embedded by the bag ranker.
    #[arg(long, default_value = "title,abstract")]
    pub fields: FieldSelector,
    #[command(flatten)]
    pub prep: PrepArgs,
    #[command(flatten)]
    pub bm25: Bm25Args,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long, default_value = "title,abstract")]
    pub fields: FieldSelector,
    #[command(flatten)]
    pub prep: PrepArgs,
    #[arg(long, default_value_t = 32, value_parser = clap::value_parser!(u32).range(1..))]
    pub dim: u32,
    /// Zero exports the seeded random initialisation.
    #[arg(long, default_value_t = 200)]
    pub steps: u32,
    #[arg(long, default_value_t = 32, value_parser = clap::value_parser!(u32).range(1..))]
    pub batch_size: u32,
    #[arg(long, default_value_t = 0.5)]
    pub lr: f64,
    #[arg(long, default_value_t = 0.5)]
    pub temperature: f64,
    #[arg(long, default_value_t = 256)]
    pub queue: u32,
    /// dot or cosine.
    #[arg(long, default_value = "cosine")]
    pub score: ScoreFn,
    /// ict or crop.
    #[arg(long, default_value = "crop")]
    pub pairs: PairMethod,
    /// Span fraction; defaults to 0.1 for ict and 0.5 for crop.
    #[arg(long)]
    pub span: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    pub delete_prob: f64,
    #[arg(long, default_value_t = 0.1)]
    pub init_scale: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also write the per-step loss, one value per line.
    #[arg(long)]
    pub losses: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Two or three run files.
    #[arg(required = true, num_args = 2..=3)]
    pub runs: Vec<PathBuf>,
    #[arg(long, default_value_t = 50, value_parser = clap::value_parser!(u32).range(1..))]
    pub k: u32,
    /// Topic file; topics a run retrieved nothing for then count as zero overlap.
    #[arg(long)]
    pub topics: Option<PathBuf>,
    #[arg(long)]
    pub topic_format: Option<TopicFormat>,
    /// Write the table here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write the machine-readable report.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub qrels: PathBuf,
    #[arg(required = true)]
    pub runs: Vec<PathBuf>,
    /// Cutoff for precision.
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u32).range(1..))]
    pub k: u32,
    /// Lowest grade counted as relevant (1 lenient, 2 strict).
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub min_grade: u8,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parse `name = value` lines into long flags.
fn config_flags(text: &str) -> Result<Vec<OsString>, Failure> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Failure::usage(format!("config line {}: expected `name = value`", i + 1)))?;
        let key = key.trim().replace('_', "-");
        let value = value.trim();
        if key.is_empty() {
            return Err(Failure::usage(format!("config line {}: empty name", i + 1)));
        }
        match value {
            "true" => out.push(format!("--{key}").into()),
            "false" => {}
            _ => {
                out.push(format!("--{key}").into());
                out.push(value.into());
            }
        }
    }
    Ok(out)
}

/// Splice flags from `--config FILE` in front of the subcommand's own flags,
/// so that explicit flags win.
pub fn expand_config(argv: Vec<OsString>) -> Result<Vec<OsString>, Failure> {
    let mut rest = Vec::with_capacity(argv.len());
    let mut config: Option<PathBuf> = None;
    let mut iter = argv.into_iter();
    while let Some(arg) = iter.next() {
        let s = arg.to_string_lossy();
        if s == "--config" {
            let path = iter.next().ok_or_else(|| Failure::usage("--config needs a file"))?;
            config = Some(path.into());
        } else if let Some(path) = s.strip_prefix("--config=") {
            config = Some(path.into());
        } else {
            rest.push(arg);
        }
    }
    let Some(path) = config else {
        return Ok(rest);
    };
    let text = fs::read_to_string(&path)
        .map_err(|e| Failure::usage(format!("cannot read config {}: {e}", path.display())))?;
    let flags = config_flags(&text)?;
    // argv[0] is the program, argv[1] the subcommand
    let at = rest.len().min(2);
    rest.splice(at..at, flags);
    Ok(rest)
}
