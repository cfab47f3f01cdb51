//! Topics, relevance judgments, run files and the measures computed over them.

mod metrics;
mod overlap;
mod qrels;
mod run;
mod topics;

use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

pub use metrics::{average_precision, precision_at_k, MetricReport};
pub use overlap::{compare_runs, intersect_at_k, overlap_stats, OverlapStats, StatsReport};
pub use qrels::{load_qrels, parse_qrels, Grade, Qrels};
pub use run::{read_run, write_run, RankedRun};
pub use topics::{
    load_topics, parse_topics_csv, parse_topics_xml, write_topics_csv, write_topics_xml, Topic,
    TopicField, TopicFormat,
};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("file not found: {0}")]
    MissingFile(PathBuf),
    #[error("malformed topic record {0}")]
    MalformedRecord(usize),
    #[error("malformed topic xml: {0}")]
    MalformedXml(String),
    #[error("duplicate topic id {0}")]
    DuplicateTopicId(u32),
    #[error("unknown topic field `{0}`")]
    UnknownTopicField(String),
    #[error("unknown topic format `{0}`")]
    UnknownTopicFormat(String),
    #[error("relevance grade `{0}` is outside 0..=2")]
    BadGrade(String),
    #[error("malformed line {0}")]
    MalformedLine(usize),
    #[error("ranks for topic {0} are not 1..n")]
    RankGap(u32),
    #[error("document `{doc_id}` appears twice for topic {topic}")]
    DuplicateDocument { topic: u32, doc_id: String },
    #[error("scores for topic {0} increase with rank")]
    ScoreOrder(u32),
    #[error("`{0}` cannot be written to a run file")]
    InvalidToken(String),
    #[error("runs cover different topic sets")]
    TopicMismatch,
    #[error("need at least two topics for a sample standard deviation, got {0}")]
    TooFewTopics(usize),
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl EvalError {
    pub fn name(&self) -> &'static str {
        match self {
            EvalError::MissingFile(_) => "MissingFile",
            EvalError::MalformedRecord(_) => "MalformedRecord",
            EvalError::MalformedXml(_) => "MalformedXml",
            EvalError::DuplicateTopicId(_) => "DuplicateTopicId",
            EvalError::UnknownTopicField(_) => "UnknownTopicField",
            EvalError::UnknownTopicFormat(_) => "UnknownTopicFormat",
            EvalError::BadGrade(_) => "BadGrade",
            EvalError::MalformedLine(_) => "MalformedLine",
            EvalError::RankGap(_) => "RankGap",
            EvalError::DuplicateDocument { .. } => "DuplicateDocument",
            EvalError::ScoreOrder(_) => "ScoreOrder",
            EvalError::InvalidToken(_) => "InvalidToken",
            EvalError::TopicMismatch => "TopicMismatch",
            EvalError::TooFewTopics(_) => "TooFewTopics",
            EvalError::Io(_) => "Io",
        }
    }
}

pub(crate) fn read_file(path: &Path) -> Result<String, EvalError> {
    std::fs::read_to_string(path).map_err(|e| match e.kind() {
        io::ErrorKind::NotFound => EvalError::MissingFile(path.to_path_buf()),
        _ => EvalError::Io(e),
    })
}
