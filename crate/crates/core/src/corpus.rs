//! CORD-19-shaped corpus ingestion.
//!
//! A corpus is built from a metadata table (`cord_uid`, `title`, `abstract`,
//! `pdf_json_files` columns) plus the per-paper `pdf_json` parses it points
//! to. `pmc_json` parses are never read.

use std::collections::HashSet;
use std::fs;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const ID_COLUMN: &str = "cord_uid";
pub const TITLE_COLUMN: &str = "title";
pub const ABSTRACT_COLUMN: &str = "abstract";
pub const JSON_PATH_COLUMN: &str = "pdf_json_files";

const SNAPSHOT_MAGIC: &str = "cordir-corpus";
const SNAPSHOT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("file not found: {0}")]
    MissingFile(PathBuf),
    #[error("metadata header lacks column `{0}`")]
    MissingColumn(String),
    #[error("malformed row at line {0}")]
    MalformedRow(u64),
    #[error("malformed document json: {0}")]
    MalformedJson(String),
    #[error("document json has no paper_id")]
    MissingPaperId,
    #[error("cannot read directory {0}")]
    UnreadableDirectory(PathBuf),
    #[error("malformed corpus snapshot: {0}")]
    MalformedSnapshot(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl CorpusError {
    pub fn name(&self) -> &'static str {
        match self {
            CorpusError::MissingFile(_) => "MissingFile",
            CorpusError::MissingColumn(_) => "MissingColumn",
            CorpusError::MalformedRow(_) => "MalformedRow",
            CorpusError::MalformedJson(_) => "MalformedJson",
            CorpusError::MissingPaperId => "MissingPaperId",
            CorpusError::UnreadableDirectory(_) => "UnreadableDirectory",
            CorpusError::MalformedSnapshot(_) => "MalformedSnapshot",
            CorpusError::Io(_) => "Io",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetadataRow {
    pub doc_id: String,
    pub title: String,
    pub abstract_text: String,
    pub json_path: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MetadataTable {
    pub rows: Vec<MetadataRow>,
    /// Rows skipped because their id was already seen.
    pub duplicates: usize,
    /// Line numbers of rows that could not be parsed.
    pub malformed_lines: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub doc_id: String,
    pub title: String,
    #[serde(rename = "abstract")]
    pub abstract_text: String,
    pub body: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Corpus {
    pub documents: Vec<Document>,
    pub source_note: String,
}

impl Corpus {
    pub fn new(documents: Vec<Document>, source_note: impl Into<String>) -> Self {
        Corpus {
            documents,
            source_note: source_note.into(),
        }
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Document> {
        self.documents.iter()
    }

    pub fn get(&self, doc_id: &str) -> Option<&Document> {
        self.documents.iter().find(|d| d.doc_id == doc_id)
    }

    /// Write the corpus as JSON lines: a header object followed by one document per line.
    pub fn write_snapshot(&self, path: &Path) -> Result<(), CorpusError> {
        let mut out = BufWriter::new(fs::File::create(path)?);
        let header = SnapshotHeader {
            format: SNAPSHOT_MAGIC.to_string(),
            version: SNAPSHOT_VERSION,
            documents: self.documents.len(),
            source_note: self.source_note.clone(),
        };
        serde_json::to_writer(&mut out, &header).map_err(io::Error::from)?;
        out.write_all(b"\n")?;
        for doc in &self.documents {
            serde_json::to_writer(&mut out, doc).map_err(io::Error::from)?;
            out.write_all(b"\n")?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_snapshot(path: &Path) -> Result<Corpus, CorpusError> {
        let file = open(path)?;
        let mut lines = BufReader::new(file).lines();
        let header_line = lines
            .next()
            .ok_or_else(|| CorpusError::MalformedSnapshot("empty file".into()))??;
        let header: SnapshotHeader = serde_json::from_str(&header_line)
            .map_err(|e| CorpusError::MalformedSnapshot(format!("header: {e}")))?;
        if header.format != SNAPSHOT_MAGIC || header.version != SNAPSHOT_VERSION {
            return Err(CorpusError::MalformedSnapshot(format!(
                "unsupported format {} v{}",
                header.format, header.version
            )));
        }
        let mut documents = Vec::with_capacity(header.documents);
        for (i, line) in lines.enumerate() {
            let line = line?;
            if line.is_empty() {
                continue;
            }
            let doc: Document = serde_json::from_str(&line)
                .map_err(|e| CorpusError::MalformedSnapshot(format!("line {}: {e}", i + 2)))?;
            documents.push(doc);
        }
        if documents.len() != header.documents {
            return Err(CorpusError::MalformedSnapshot(format!(
                "header announces {} documents, found {}",
                header.documents,
                documents.len()
            )));
        }
        Ok(Corpus::new(documents, header.source_note))
    }
}

#[derive(Serialize, Deserialize)]
struct SnapshotHeader {
    format: String,
    version: u32,
    documents: usize,
    source_note: String,
}

fn open(path: &Path) -> Result<fs::File, CorpusError> {
    fs::File::open(path).map_err(|e| match e.kind() {
        io::ErrorKind::NotFound => CorpusError::MissingFile(path.to_path_buf()),
        _ => CorpusError::Io(e),
    })
}

/// Read the metadata table. Rows that fail to parse are skipped and
/// recorded; duplicate ids keep their first occurrence.
pub fn load_metadata(path: &Path) -> Result<MetadataTable, CorpusError> {
    let file = open(path)?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(file);

    let headers = reader
        .headers()
        .map_err(|_| CorpusError::MalformedRow(1))?
        .clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| CorpusError::MissingColumn(name.to_string()))
    };
    let id_col = column(ID_COLUMN)?;
    let title_col = column(TITLE_COLUMN)?;
    let abstract_col = column(ABSTRACT_COLUMN)?;
    let json_col = column(JSON_PATH_COLUMN)?;

    let mut table = MetadataTable::default();
    let mut seen = HashSet::new();
    for record in reader.records() {
        let record = match record {
            Ok(r) => r,
            Err(e) => {
                let line = e.position().map(|p| p.line()).unwrap_or(0);
                table.malformed_lines.push(line);
                continue;
            }
        };
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let cell = |i: usize| record.get(i).unwrap_or("").trim().to_string();
        let doc_id = cell(id_col);
        if doc_id.is_empty() {
            table.malformed_lines.push(line);
            continue;
        }
        if !seen.insert(doc_id.clone()) {
            table.duplicates += 1;
            continue;
        }
        table.rows.push(MetadataRow {
            doc_id,
            title: cell(title_col),
            abstract_text: cell(abstract_col),
            json_path: first_json_path(&cell(json_col)),
        });
    }
    Ok(table)
}

// CORD-19 lists several parses separated by "; " when a paper has more than one.
fn first_json_path(cell: &str) -> String {
    cell.split(';')
        .map(str::trim)
        .find(|p| !p.is_empty())
        .unwrap_or("")
        .to_string()
}

#[derive(Deserialize)]
struct RawDocument {
    paper_id: Option<String>,
    #[serde(default)]
    metadata: RawMetadata,
    #[serde(default, rename = "abstract")]
    abstract_paragraphs: Vec<RawParagraph>,
    #[serde(default)]
    body_text: Vec<RawParagraph>,
}

#[derive(Deserialize, Default)]
struct RawMetadata {
    #[serde(default)]
    title: String,
}

#[derive(Deserialize)]
struct RawParagraph {
    #[serde(default)]
    text: String,
}

fn join_paragraphs(paragraphs: &[RawParagraph]) -> String {
    paragraphs
        .iter()
        .map(|p| p.text.as_str())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Parse one `pdf_json` document. The returned `doc_id` is the file's `paper_id`.
pub fn parse_document_json(bytes: &[u8]) -> Result<Document, CorpusError> {
    let raw: RawDocument =
        serde_json::from_slice(bytes).map_err(|e| CorpusError::MalformedJson(e.to_string()))?;
    let paper_id = raw
        .paper_id
        .filter(|id| !id.trim().is_empty())
        .ok_or(CorpusError::MissingPaperId)?;
    Ok(Document {
        doc_id: paper_id,
        title: raw.metadata.title,
        abstract_text: join_paragraphs(&raw.abstract_paragraphs),
        body: join_paragraphs(&raw.body_text),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusBuild {
    pub corpus: Corpus,
    pub kept: usize,
    /// Rows excluded for an empty abstract.
    pub dropped_missing: usize,
    /// Rows excluded because their JSON could not be read or parsed, with the reason.
    pub parse_errors: Vec<(String, String)>,
}

/// Assemble documents from metadata rows and their JSON parses, in row order.
///
/// The JSON abstract and title take precedence over the metadata ones when
/// non-empty. With `drop_missing`, rows whose abstract is blank are excluded.
pub fn build_corpus(
    table: &MetadataTable,
    json_dir: &Path,
    drop_missing: bool,
) -> Result<CorpusBuild, CorpusError> {
    if fs::read_dir(json_dir).is_err() {
        return Err(CorpusError::UnreadableDirectory(json_dir.to_path_buf()));
    }

    let assembled: Vec<Result<Document, String>> = table
        .rows
        .par_iter()
        .map(|row| assemble(row, json_dir))
        .collect();

    let mut documents = Vec::new();
    let mut dropped_missing = 0;
    let mut parse_errors = Vec::new();
    for (row, doc) in table.rows.iter().zip(assembled) {
        match doc {
            Ok(doc) if drop_missing && doc.abstract_text.trim().is_empty() => dropped_missing += 1,
            Ok(doc) => documents.push(doc),
            Err(reason) => parse_errors.push((row.doc_id.clone(), reason)),
        }
    }
    let kept = documents.len();
    let note = format!(
        "{} metadata rows; {} kept, {} dropped for empty abstract, {} parse errors",
        table.rows.len(),
        kept,
        dropped_missing,
        parse_errors.len()
    );
    Ok(CorpusBuild {
        corpus: Corpus::new(documents, note),
        kept,
        dropped_missing,
        parse_errors,
    })
}

fn assemble(row: &MetadataRow, json_dir: &Path) -> Result<Document, String> {
    let mut doc = Document {
        doc_id: row.doc_id.clone(),
        title: row.title.clone(),
        abstract_text: row.abstract_text.clone(),
        body: String::new(),
    };
    if row.json_path.is_empty() {
        return Ok(doc);
    }
    let path = json_dir.join(&row.json_path);
    let bytes = fs::read(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    let parsed = parse_document_json(&bytes).map_err(|e| e.to_string())?;
    if !parsed.title.trim().is_empty() {
        doc.title = parsed.title;
    }
    if !parsed.abstract_text.trim().is_empty() {
        doc.abstract_text = parsed.abstract_text;
    }
    doc.body = parsed.body;
    Ok(doc)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateFilter {
    pub corpus: Corpus,
    /// Ids listed in the file that are not in the corpus.
    pub missing_ids: usize,
    /// Set when no corpus document survived the filter.
    pub empty_candidate_set: bool,
}

/// Read a candidate id file: one id per line.
pub fn read_docids(path: &Path) -> Result<Vec<String>, CorpusError> {
    let text = fs::read_to_string(path).map_err(|e| match e.kind() {
        io::ErrorKind::NotFound => CorpusError::MissingFile(path.to_path_buf()),
        _ => CorpusError::Io(e),
    })?;
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(String::from)
        .collect())
}

/// Keep only documents whose id is listed in `docids_path`, preserving corpus order.
pub fn filter_candidates(corpus: &Corpus, docids_path: &Path) -> Result<CandidateFilter, CorpusError> {
    let ids = read_docids(docids_path)?;
    Ok(filter_by_ids(corpus, &ids))
}

pub fn filter_by_ids(corpus: &Corpus, ids: &[String]) -> CandidateFilter {
    let wanted: HashSet<&str> = ids.iter().map(String::as_str).collect();
    let present: HashSet<&str> = corpus.iter().map(|d| d.doc_id.as_str()).collect();
    let missing_ids = wanted.iter().filter(|id| !present.contains(*id)).count();
    let documents: Vec<Document> = corpus
        .iter()
        .filter(|d| wanted.contains(d.doc_id.as_str()))
        .cloned()
        .collect();
    CandidateFilter {
        empty_candidate_set: documents.is_empty(),
        corpus: Corpus::new(documents, corpus.source_note.clone()),
        missing_ids,
    }
}
