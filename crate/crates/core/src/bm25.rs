//! Okapi BM25 over an in-memory inverted index.
//!
//! ```text
//! score(D, Q) = Σ_i IDF(q_i) · f(q_i, D)(k1 + 1) / (f(q_i, D) + k1(1 − b + b·|D|/avgdl))
//! IDF(q_i)    = ln((N − n(q_i) + 0.5) / (n(q_i) + 0.5) + 1)
//! ```
//!
//! The sum runs over query tokens, so a term repeated in the query contributes
//! once per occurrence.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::fs;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Corpus, Document};
use crate::ranking::{top_k, ScoredDoc};
use crate::textprep::{preprocess, PrepConfig};

/// First line of a persisted index.
pub const INDEX_MAGIC: &str = "CORDIR-BM25 v1";

#[derive(Debug, Error)]
pub enum Bm25Error {
    #[error("cannot index an empty corpus")]
    EmptyCorpus,
    #[error("document `{0}` is not in the index")]
    UnknownDocument(String),
    #[error("invalid field selector `{0}`")]
    InvalidFields(String),
    #[error("document id `{0}` cannot be persisted (contains whitespace)")]
    InvalidDocId(String),
    #[error("malformed index file at line {line}: {reason}")]
    MalformedIndex { line: usize, reason: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Bm25Error {
    pub fn name(&self) -> &'static str {
        match self {
            Bm25Error::EmptyCorpus => "EmptyCorpus",
            Bm25Error::UnknownDocument(_) => "UnknownDocument",
            Bm25Error::InvalidFields(_) => "InvalidFields",
            Bm25Error::InvalidDocId(_) => "InvalidDocId",
            Bm25Error::MalformedIndex { .. } => "MalformedIndex",
            Bm25Error::Io(_) => "Io",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bm25Params {
    pub k1: f64,
    pub b: f64,
}

impl Default for Bm25Params {
    fn default() -> Self {
        Bm25Params { k1: 1.2, b: 0.75 }
    }
}

/// Which document fields are concatenated into the indexed text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSelector {
    pub title: bool,
    pub abstract_text: bool,
    pub body: bool,
}

impl Default for FieldSelector {
    fn default() -> Self {
        FieldSelector {
            title: true,
            abstract_text: true,
            body: false,
        }
    }
}

impl FieldSelector {
    pub fn all() -> Self {
        FieldSelector {
            title: true,
            abstract_text: true,
            body: true,
        }
    }

    /// The selected fields joined with a single space.
    pub fn text_of(&self, doc: &Document) -> String {
        let mut parts = Vec::with_capacity(3);
        if self.title {
            parts.push(doc.title.as_str());
        }
        if self.abstract_text {
            parts.push(doc.abstract_text.as_str());
        }
        if self.body {
            parts.push(doc.body.as_str());
        }
        parts.join(" ")
    }
}

impl fmt::Display for FieldSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut names = Vec::new();
        if self.title {
            names.push("title");
        }
        if self.abstract_text {
            names.push("abstract");
        }
        if self.body {
            names.push("body");
        }
        f.write_str(&names.join(","))
    }
}

impl FromStr for FieldSelector {
    type Err = Bm25Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut sel = FieldSelector {
            title: false,
            abstract_text: false,
            body: false,
        };
        for name in s.split(',').map(str::trim).filter(|n| !n.is_empty()) {
            match name {
                "title" => sel.title = true,
                "abstract" => sel.abstract_text = true,
                "body" => sel.body = true,
                _ => return Err(Bm25Error::InvalidFields(s.to_string())),
            }
        }
        if !(sel.title || sel.abstract_text || sel.body) {
            return Err(Bm25Error::InvalidFields(s.to_string()));
        }
        Ok(sel)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Posting {
    /// Position of the document in the index's document list.
    pub doc: u32,
    pub tf: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvertedIndex {
    doc_ids: Vec<String>,
    doc_lookup: HashMap<String, u32>,
    doc_len: Vec<u32>,
    postings: BTreeMap<String, Vec<Posting>>,
    avgdl: f64,
    fields: FieldSelector,
    prep: PrepConfig,
}

/// Index the selected fields of every document.
pub fn build_index(
    corpus: &Corpus,
    fields: FieldSelector,
    prep: &PrepConfig,
) -> Result<InvertedIndex, Bm25Error> {
    if corpus.is_empty() {
        return Err(Bm25Error::EmptyCorpus);
    }
    let tokenized: Vec<Vec<String>> = corpus
        .documents
        .par_iter()
        .map(|doc| preprocess(&fields.text_of(doc), prep))
        .collect();

    let mut postings: BTreeMap<String, Vec<Posting>> = BTreeMap::new();
    let mut doc_len = Vec::with_capacity(corpus.len());
    for (i, tokens) in tokenized.into_iter().enumerate() {
        doc_len.push(tokens.len() as u32);
        let mut counts: BTreeMap<String, u32> = BTreeMap::new();
        for token in tokens {
            *counts.entry(token).or_insert(0) += 1;
        }
        for (term, tf) in counts {
            postings.entry(term).or_default().push(Posting { doc: i as u32, tf });
        }
    }
    let doc_ids = corpus.iter().map(|d| d.doc_id.clone()).collect();
    Ok(InvertedIndex::assemble(doc_ids, doc_len, postings, fields, prep.clone()))
}

/// Saturated, length-normalised term frequency weight for one query term.
fn term_weight(idf: f64, tf: f64, doc_len: f64, avgdl: f64, params: Bm25Params) -> f64 {
    if tf == 0.0 {
        return 0.0;
    }
    let norm = 1.0 - params.b + params.b * doc_len / avgdl;
    idf * tf * (params.k1 + 1.0) / (tf + params.k1 * norm)
}

/// `ln((N − n + 0.5) / (n + 0.5) + 1)`.
pub fn idf_value(n_docs: usize, doc_freq: usize) -> f64 {
    let n = n_docs as f64;
    let df = doc_freq as f64;
    ((n - df + 0.5) / (df + 0.5) + 1.0).ln()
}

impl InvertedIndex {
    fn assemble(
        doc_ids: Vec<String>,
        doc_len: Vec<u32>,
        postings: BTreeMap<String, Vec<Posting>>,
        fields: FieldSelector,
        prep: PrepConfig,
    ) -> Self {
        let total: u64 = doc_len.iter().map(|&l| l as u64).sum();
        let avgdl = total as f64 / doc_len.len() as f64;
        let doc_lookup = doc_ids
            .iter()
            .enumerate()
            .map(|(i, id)| (id.clone(), i as u32))
            .collect();
        InvertedIndex {
            doc_ids,
            doc_lookup,
            doc_len,
            postings,
            avgdl,
            fields,
            prep,
        }
    }

    pub fn n_docs(&self) -> usize {
        self.doc_ids.len()
    }

    pub fn avgdl(&self) -> f64 {
        self.avgdl
    }

    pub fn fields(&self) -> FieldSelector {
        self.fields
    }

    pub fn prep_config(&self) -> &PrepConfig {
        &self.prep
    }

    pub fn doc_ids(&self) -> &[String] {
        &self.doc_ids
    }

    pub fn doc_len(&self, doc_id: &str) -> Option<u32> {
        self.doc_lookup.get(doc_id).map(|&i| self.doc_len[i as usize])
    }

    /// n(q): the number of documents containing `term`.
    pub fn doc_freq(&self, term: &str) -> usize {
        self.postings.get(term).map_or(0, Vec::len)
    }

    pub fn postings(&self, term: &str) -> &[Posting] {
        self.postings.get(term).map_or(&[], Vec::as_slice)
    }

    pub fn terms(&self) -> impl Iterator<Item = &str> {
        self.postings.keys().map(String::as_str)
    }

    /// Term frequency of `term` in `doc_id`.
    pub fn term_freq(&self, term: &str, doc_id: &str) -> u32 {
        let Some(&doc) = self.doc_lookup.get(doc_id) else {
            return 0;
        };
        let list = self.postings(term);
        list.binary_search_by_key(&doc, |p| p.doc)
            .map_or(0, |i| list[i].tf)
    }

    pub fn idf(&self, term: &str) -> f64 {
        idf_value(self.n_docs(), self.doc_freq(term))
    }

    /// Preprocess raw query text with the index's own configuration.
    pub fn tokenize_query(&self, text: &str) -> Vec<String> {
        preprocess(text, &self.prep)
    }

    pub fn score_document(
        &self,
        query_tokens: &[String],
        doc_id: &str,
        params: Bm25Params,
    ) -> Result<f64, Bm25Error> {
        let &doc = self
            .doc_lookup
            .get(doc_id)
            .ok_or_else(|| Bm25Error::UnknownDocument(doc_id.to_string()))?;
        let len = self.doc_len[doc as usize] as f64;
        let mut score = 0.0;
        for term in query_tokens {
            let tf = self.term_freq(term, doc_id) as f64;
            score += term_weight(self.idf(term), tf, len, self.avgdl, params);
        }
        Ok(score)
    }

    /// Top `k` documents by BM25 score. Documents matching no query term are omitted.
    pub fn search(&self, query_tokens: &[String], k: usize, params: Bm25Params) -> Vec<ScoredDoc> {
        if k == 0 {
            return Vec::new();
        }
        let mut scores: HashMap<u32, f64> = HashMap::new();
        for term in query_tokens {
            let idf = self.idf(term);
            for p in self.postings(term) {
                let len = self.doc_len[p.doc as usize] as f64;
                *scores.entry(p.doc).or_insert(0.0) +=
                    term_weight(idf, p.tf as f64, len, self.avgdl, params);
            }
        }
        let hits = scores
            .into_iter()
            .filter(|&(_, s)| s > 0.0)
            .map(|(doc, s)| ScoredDoc::new(self.doc_ids[doc as usize].clone(), s))
            .collect();
        top_k(hits, k)
    }

    pub fn save(&self, path: &Path) -> Result<(), Bm25Error> {
        let mut out = BufWriter::new(fs::File::create(path)?);
        self.write_to(&mut out)?;
        out.flush()?;
        Ok(())
    }

    /// Line-oriented text encoding, starting with [`INDEX_MAGIC`].
    pub fn write_to<W: Write>(&self, out: &mut W) -> Result<(), Bm25Error> {
        for id in &self.doc_ids {
            if id.is_empty() || id.chars().any(char::is_whitespace) {
                return Err(Bm25Error::InvalidDocId(id.clone()));
            }
        }
        let p = &self.prep;
        writeln!(out, "{INDEX_MAGIC}")?;
        writeln!(out, "fields {}", self.fields)?;
        writeln!(
            out,
            "prep {} {} {} {} {} {}",
            p.lowercase as u8,
            p.strip_urls_emails as u8,
            p.strip_non_ascii as u8,
            p.strip_special as u8,
            p.remove_stopwords as u8,
            p.stem as u8
        )?;
        writeln!(out, "stopwords {}", p.stopwords.len())?;
        for w in &p.stopwords {
            writeln!(out, "{w}")?;
        }
        writeln!(out, "docs {}", self.doc_ids.len())?;
        for (id, len) in self.doc_ids.iter().zip(&self.doc_len) {
            writeln!(out, "{id} {len}")?;
        }
        writeln!(out, "terms {}", self.postings.len())?;
        for (term, list) in &self.postings {
            write!(out, "{term}")?;
            for posting in list {
                write!(out, " {}:{}", posting.doc, posting.tf)?;
            }
            writeln!(out)?;
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<InvertedIndex, Bm25Error> {
        let file = fs::File::open(path)?;
        Self::read_from(BufReader::new(file))
    }

    pub fn read_from<R: BufRead>(input: R) -> Result<InvertedIndex, Bm25Error> {
        let mut lines = IndexLines {
            inner: input.lines(),
            line: 0,
        };
        let magic = lines.next_line()?;
        if magic != INDEX_MAGIC {
            return Err(lines.error("missing index header"));
        }
        let fields_line = lines.next_line()?;
        let fields: FieldSelector = lines
            .keyed(&fields_line, "fields")?
            .parse()
            .map_err(|_| lines.error("bad field selector"))?;

        let prep_line = lines.next_line()?;
        let flags: Vec<bool> = lines
            .keyed(&prep_line, "prep")?
            .split(' ')
            .map(|f| match f {
                "0" => Ok(false),
                "1" => Ok(true),
                _ => Err(lines.error("bad prep flag")),
            })
            .collect::<Result<_, _>>()?;
        if flags.len() != 6 {
            return Err(lines.error("expected six prep flags"));
        }

        let count_line = lines.next_line()?;
        let n_stop = lines.count(&count_line, "stopwords")?;
        let mut stopwords = std::collections::BTreeSet::new();
        for _ in 0..n_stop {
            stopwords.insert(lines.next_line()?);
        }
        let prep = PrepConfig {
            lowercase: flags[0],
            strip_urls_emails: flags[1],
            strip_non_ascii: flags[2],
            strip_special: flags[3],
            remove_stopwords: flags[4],
            stem: flags[5],
            stopwords,
        };

        let count_line = lines.next_line()?;
        let n_docs = lines.count(&count_line, "docs")?;
        if n_docs == 0 {
            return Err(lines.error("index has no documents"));
        }
        let mut doc_ids = Vec::with_capacity(n_docs);
        let mut doc_len = Vec::with_capacity(n_docs);
        for _ in 0..n_docs {
            let line = lines.next_line()?;
            let (id, len) = line
                .split_once(' ')
                .ok_or_else(|| lines.error("expected `doc_id length`"))?;
            doc_ids.push(id.to_string());
            doc_len.push(len.parse().map_err(|_| lines.error("bad document length"))?);
        }

        let count_line = lines.next_line()?;
        let n_terms = lines.count(&count_line, "terms")?;
        let mut postings = BTreeMap::new();
        for _ in 0..n_terms {
            let line = lines.next_line()?;
            let mut parts = line.split(' ');
            let term = parts.next().unwrap_or_default().to_string();
            let mut list = Vec::new();
            for entry in parts {
                let (doc, tf) = entry
                    .split_once(':')
                    .ok_or_else(|| lines.error("expected `doc:tf`"))?;
                let doc: u32 = doc.parse().map_err(|_| lines.error("bad posting doc"))?;
                let tf: u32 = tf.parse().map_err(|_| lines.error("bad posting tf"))?;
                if doc as usize >= n_docs || tf == 0 {
                    return Err(lines.error("posting out of range"));
                }
                list.push(Posting { doc, tf });
            }
            if term.is_empty() || list.is_empty() {
                return Err(lines.error("empty postings line"));
            }
            postings.insert(term, list);
        }
        Ok(InvertedIndex::assemble(doc_ids, doc_len, postings, fields, prep))
    }
}

struct IndexLines<R> {
    inner: io::Lines<R>,
    line: usize,
}

impl<R: BufRead> IndexLines<R> {
    fn next_line(&mut self) -> Result<String, Bm25Error> {
        self.line += 1;
        match self.inner.next() {
            Some(l) => Ok(l?),
            None => Err(self.error("unexpected end of file")),
        }
    }

    fn error(&self, reason: &str) -> Bm25Error {
        Bm25Error::MalformedIndex {
            line: self.line,
            reason: reason.to_string(),
        }
    }

    fn keyed<'a>(&self, line: &'a str, key: &str) -> Result<&'a str, Bm25Error> {
        line.strip_prefix(key)
            .and_then(|rest| rest.strip_prefix(' '))
            .ok_or_else(|| self.error(&format!("expected `{key}` line")))
    }

    fn count(&self, line: &str, key: &str) -> Result<usize, Bm25Error> {
        self.keyed(line, key)?
            .parse()
            .map_err(|_| self.error(&format!("bad `{key}` count")))
    }
}
