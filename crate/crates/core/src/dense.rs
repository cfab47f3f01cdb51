//! Vector-space retrieval over externally supplied embeddings.
//!
//! Two store kinds share one text format: word-level stores map terms to
//! vectors and are pooled into bag-of-embeddings representations;
//! document-level stores hold one precomputed vector per document and per
//! topic field (keyed `topicid:field`).
//!
//! Bags are treated as spherical Gaussians. Similarity between two of them is
//! the expected-likelihood kernel
//!
//! ```text
//! ∫ N(x; μa, σa²I) N(x; μb, σb²I) dx = (2π(σa² + σb²))^(−d/2) · exp(−‖μa − μb‖² / (2(σa² + σb²)))
//! ```

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use indexmap::IndexMap;
use rayon::prelude::*;
use thiserror::Error;

use crate::bm25::FieldSelector;
use crate::corpus::Corpus;
use crate::eval::{Topic, TopicField};
use crate::ranking::{top_k, ScoredDoc};
use crate::textprep::{preprocess, PrepConfig};

/// Variance given to every word unless overridden.
pub const DEFAULT_WORD_VARIANCE: f64 = 1.0;

#[derive(Debug, Error)]
pub enum DenseError {
    #[error("file not found: {0}")]
    MissingFile(PathBuf),
    #[error("malformed embedding header: {0}")]
    MalformedHeader(String),
    #[error("malformed embedding row at line {0}")]
    MalformedLine(usize),
    #[error("dimension mismatch{}: expected {expected}, found {found}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    DimensionMismatch {
        expected: usize,
        found: usize,
        line: Option<usize>,
    },
    #[error("duplicate embedding id `{0}`")]
    DuplicateId(String),
    #[error("header announces {declared} vectors, file has {found}")]
    CountMismatch { declared: usize, found: usize },
    #[error("variance must be positive, got {0}")]
    NonPositiveVariance(f64),
    #[error("no vector for `{0}` in the document-level store")]
    MissingTopicVector(String),
    #[error("operation needs a {0} store")]
    WrongStoreKind(StoreKind),
    #[error("unknown similarity metric `{0}`")]
    UnknownMetric(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl DenseError {
    pub fn name(&self) -> &'static str {
        match self {
            DenseError::MissingFile(_) => "MissingFile",
            DenseError::MalformedHeader(_) => "MalformedHeader",
            DenseError::MalformedLine(_) => "MalformedLine",
            DenseError::DimensionMismatch { .. } => "DimensionMismatch",
            DenseError::DuplicateId(_) => "DuplicateId",
            DenseError::CountMismatch { .. } => "CountMismatch",
            DenseError::NonPositiveVariance(_) => "NonPositiveVariance",
            DenseError::MissingTopicVector(_) => "MissingTopicVector",
            DenseError::WrongStoreKind(_) => "WrongStoreKind",
            DenseError::UnknownMetric(_) => "UnknownMetric",
            DenseError::Io(_) => "Io",
        }
    }
}

fn dim_check(expected: usize, found: usize) -> Result<(), DenseError> {
    if expected == found {
        Ok(())
    } else {
        Err(DenseError::DimensionMismatch {
            expected,
            found,
            line: None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StoreKind {
    Word,
    Document,
}

impl fmt::Display for StoreKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StoreKind::Word => "word-level",
            StoreKind::Document => "document-level",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingStore {
    dim: usize,
    kind: StoreKind,
    vectors: IndexMap<String, Vec<f64>>,
}

impl EmbeddingStore {
    pub fn new(dim: usize, kind: StoreKind) -> Self {
        EmbeddingStore {
            dim,
            kind,
            vectors: IndexMap::new(),
        }
    }

    pub fn insert(&mut self, id: impl Into<String>, vector: Vec<f64>) -> Result<(), DenseError> {
        dim_check(self.dim, vector.len())?;
        let id = id.into();
        if self.vectors.contains_key(&id) {
            return Err(DenseError::DuplicateId(id));
        }
        self.vectors.insert(id, vector);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> StoreKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&[f64]> {
        self.vectors.get(id).map(Vec::as_slice)
    }

    /// Entries in file order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.vectors.iter().map(|(k, v)| (k.as_str(), v.as_slice()))
    }

    pub fn save(&self, path: &Path) -> Result<(), DenseError> {
        let mut out = BufWriter::new(fs::File::create(path)?);
        self.write_to(&mut out)?;
        out.flush()?;
        Ok(())
    }

    /// Header `count dim`, then `id v1 … v_dim` per entry in insertion order.
    pub fn write_to<W: Write>(&self, out: &mut W) -> io::Result<()> {
        writeln!(out, "{} {}", self.vectors.len(), self.dim)?;
        for (id, vector) in &self.vectors {
            out.write_all(id.as_bytes())?;
            for v in vector {
                write!(out, " {v}")?;
            }
            writeln!(out)?;
        }
        Ok(())
    }

    pub fn read_from<R: BufRead>(input: R, kind: StoreKind) -> Result<EmbeddingStore, DenseError> {
        let mut lines = input.lines();
        let header = lines
            .next()
            .transpose()?
            .ok_or_else(|| DenseError::MalformedHeader("empty file".into()))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        let parse = |s: &str| s.parse::<usize>().ok();
        let (count, dim) = match fields.as_slice() {
            [c, d] => match (parse(c), parse(d)) {
                (Some(c), Some(d)) if d > 0 => (c, d),
                _ => return Err(DenseError::MalformedHeader(header.clone())),
            },
            _ => return Err(DenseError::MalformedHeader(header.clone())),
        };

        let mut store = EmbeddingStore::new(dim, kind);
        for (i, line) in lines.enumerate() {
            let line = line?;
            let number = i + 2;
            let mut parts = line.split_whitespace();
            let Some(id) = parts.next() else {
                continue;
            };
            let vector: Vec<f64> = parts
                .map(|p| p.parse::<f64>().ok().filter(|v| v.is_finite()))
                .collect::<Option<_>>()
                .ok_or(DenseError::MalformedLine(number))?;
            if vector.len() != dim {
                return Err(DenseError::DimensionMismatch {
                    expected: dim,
                    found: vector.len(),
                    line: Some(number),
                });
            }
            store.insert(id, vector)?;
        }
        if store.len() != count {
            return Err(DenseError::CountMismatch {
                declared: count,
                found: store.len(),
            });
        }
        Ok(store)
    }
}

/// Read an embedding file of the given kind.
pub fn load_embeddings(path: &Path, kind: StoreKind) -> Result<EmbeddingStore, DenseError> {
    let file = fs::File::open(path).map_err(|e| match e.kind() {
        io::ErrorKind::NotFound => DenseError::MissingFile(path.to_path_buf()),
        _ => DenseError::Io(e),
    })?;
    EmbeddingStore::read_from(BufReader::new(file), kind)
}

/// Spherical Gaussian: mean vector and a single variance.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianEmbedding {
    pub mean: Vec<f64>,
    pub variance: f64,
}

impl GaussianEmbedding {
    pub fn new(mean: Vec<f64>, variance: f64) -> Result<Self, DenseError> {
        if !(variance > 0.0 && variance.is_finite()) {
            return Err(DenseError::NonPositiveVariance(variance));
        }
        Ok(GaussianEmbedding { mean, variance })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }
}

/// Per-word variances for bag construction.
#[derive(Debug, Clone, PartialEq)]
pub struct WordVariances {
    pub default: f64,
    pub per_term: HashMap<String, f64>,
}

impl Default for WordVariances {
    fn default() -> Self {
        WordVariances {
            default: DEFAULT_WORD_VARIANCE,
            per_term: HashMap::new(),
        }
    }
}

impl WordVariances {
    pub fn uniform(variance: f64) -> Result<Self, DenseError> {
        if !(variance > 0.0 && variance.is_finite()) {
            return Err(DenseError::NonPositiveVariance(variance));
        }
        Ok(WordVariances {
            default: variance,
            per_term: HashMap::new(),
        })
    }

    pub fn of(&self, term: &str) -> f64 {
        self.per_term.get(term).copied().unwrap_or(self.default)
    }
}

/// Mean of the in-vocabulary token vectors; the zero vector when none are known.
pub fn embed_bag(tokens: &[String], store: &EmbeddingStore) -> Vec<f64> {
    bag(tokens, store, &WordVariances::default()).mean
}

/// Bag of spherical Gaussians collapsed to one: means and variances are both averaged.
pub fn embed_bag_gaussian(
    tokens: &[String],
    store: &EmbeddingStore,
    variances: &WordVariances,
) -> GaussianEmbedding {
    bag(tokens, store, variances)
}

fn bag(tokens: &[String], store: &EmbeddingStore, variances: &WordVariances) -> GaussianEmbedding {
    let mut mean = vec![0.0; store.dim()];
    let mut variance = 0.0;
    let mut count = 0usize;
    for token in tokens {
        if let Some(v) = store.get(token) {
            for (m, x) in mean.iter_mut().zip(v) {
                *m += x;
            }
            variance += variances.of(token);
            count += 1;
        }
    }
    if count == 0 {
        return GaussianEmbedding {
            mean,
            variance: variances.default,
        };
    }
    let n = count as f64;
    mean.iter_mut().for_each(|m| *m /= n);
    GaussianEmbedding {
        mean,
        variance: variance / n,
    }
}

fn dot(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

fn norm(u: &[f64]) -> f64 {
    dot(u, u).sqrt()
}

/// Cosine similarity; zero when either vector has zero norm.
pub fn cosine(u: &[f64], v: &[f64]) -> Result<f64, DenseError> {
    dim_check(u.len(), v.len())?;
    let denom = norm(u) * norm(v);
    if denom == 0.0 {
        return Ok(0.0);
    }
    Ok(dot(u, v) / denom)
}

/// Natural log of [`gaussian_overlap`], finite for any dimension.
pub fn gaussian_log_overlap(a: &GaussianEmbedding, b: &GaussianEmbedding) -> Result<f64, DenseError> {
    dim_check(a.dim(), b.dim())?;
    for v in [a.variance, b.variance] {
        if !(v > 0.0) {
            return Err(DenseError::NonPositiveVariance(v));
        }
    }
    let total = a.variance + b.variance;
    let dist2: f64 = a.mean.iter().zip(&b.mean).map(|(x, y)| (x - y) * (x - y)).sum();
    let d = a.dim() as f64;
    Ok(-0.5 * d * (2.0 * std::f64::consts::PI * total).ln() - dist2 / (2.0 * total))
}

/// Expected-likelihood kernel between two spherical Gaussians.
pub fn gaussian_overlap(a: &GaussianEmbedding, b: &GaussianEmbedding) -> Result<f64, DenseError> {
    gaussian_log_overlap(a, b).map(f64::exp)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TopicVector {
    pub topic_id: u32,
    pub field: TopicField,
    pub embedding: GaussianEmbedding,
}

impl TopicVector {
    pub fn vector(&self) -> &[f64] {
        &self.embedding.mean
    }
}

/// Key under which a document-level store holds a topic field vector.
pub fn topic_key(topic_id: u32, field: TopicField) -> String {
    format!("{topic_id}:{field}")
}

/// Embed one topic field. `average` is the component-wise mean of the
/// query, question and narrative vectors (variances averaged alike).
pub fn topic_vector(
    topic: &Topic,
    store: &EmbeddingStore,
    prep: &PrepConfig,
    field: TopicField,
    variances: &WordVariances,
) -> Result<TopicVector, DenseError> {
    let embedding = match field {
        TopicField::Average => {
            let parts = TopicField::NAMED
                .iter()
                .map(|&f| single_field(topic, store, prep, f, variances))
                .collect::<Result<Vec<_>, _>>()?;
            average(&parts)
        }
        _ => single_field(topic, store, prep, field, variances)?,
    };
    Ok(TopicVector {
        topic_id: topic.topic_id,
        field,
        embedding,
    })
}

fn single_field(
    topic: &Topic,
    store: &EmbeddingStore,
    prep: &PrepConfig,
    field: TopicField,
    variances: &WordVariances,
) -> Result<GaussianEmbedding, DenseError> {
    match store.kind() {
        StoreKind::Word => {
            let text = topic.text(field).unwrap_or_default();
            Ok(embed_bag_gaussian(&preprocess(&text, prep), store, variances))
        }
        StoreKind::Document => {
            let key = topic_key(topic.topic_id, field);
            let v = store
                .get(&key)
                .ok_or(DenseError::MissingTopicVector(key))?;
            Ok(GaussianEmbedding {
                mean: v.to_vec(),
                variance: variances.default,
            })
        }
    }
}

fn average(parts: &[GaussianEmbedding]) -> GaussianEmbedding {
    let n = parts.len() as f64;
    let dim = parts.first().map_or(0, GaussianEmbedding::dim);
    let mut mean = vec![0.0; dim];
    for p in parts {
        for (m, x) in mean.iter_mut().zip(&p.mean) {
            *m += x;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n);
    GaussianEmbedding {
        mean,
        variance: parts.iter().map(|p| p.variance).sum::<f64>() / n,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Cosine,
    /// Log of the expected-likelihood kernel; ranks identically to the kernel itself.
    Gaussian,
}

impl FromStr for Metric {
    type Err = DenseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "cosine" => Ok(Metric::Cosine),
            "gaussian" => Ok(Metric::Gaussian),
            other => Err(DenseError::UnknownMetric(other.to_string())),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::Cosine => "cosine",
            Metric::Gaussian => "gaussian",
        })
    }
}

/// Candidate documents for dense search, in a fixed order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DocVectors {
    ids: Vec<String>,
    embeddings: Vec<GaussianEmbedding>,
}

impl DocVectors {
    pub fn push(&mut self, id: impl Into<String>, embedding: GaussianEmbedding) {
        self.ids.push(id.into());
        self.embeddings.push(embedding);
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &GaussianEmbedding)> {
        self.ids.iter().map(String::as_str).zip(&self.embeddings)
    }

    /// Bag-of-embeddings vectors for every corpus document.
    pub fn from_corpus_bags(
        corpus: &Corpus,
        fields: FieldSelector,
        store: &EmbeddingStore,
        prep: &PrepConfig,
        variances: &WordVariances,
    ) -> Result<DocVectors, DenseError> {
        if store.kind() != StoreKind::Word {
            return Err(DenseError::WrongStoreKind(StoreKind::Word));
        }
        let embeddings = corpus
            .documents
            .par_iter()
            .map(|doc| embed_bag_gaussian(&preprocess(&fields.text_of(doc), prep), store, variances))
            .collect();
        Ok(DocVectors {
            ids: corpus.iter().map(|d| d.doc_id.clone()).collect(),
            embeddings,
        })
    }

    /// Precomputed vectors for the corpus documents. Documents without a
    /// vector are skipped; the second value counts them.
    pub fn from_document_store(
        corpus: &Corpus,
        store: &EmbeddingStore,
        variance: f64,
    ) -> Result<(DocVectors, usize), DenseError> {
        if store.kind() != StoreKind::Document {
            return Err(DenseError::WrongStoreKind(StoreKind::Document));
        }
        let mut out = DocVectors::default();
        let mut missing = 0;
        for doc in corpus.iter() {
            match store.get(&doc.doc_id) {
                Some(v) => out.push(doc.doc_id.clone(), GaussianEmbedding::new(v.to_vec(), variance)?),
                None => missing += 1,
            }
        }
        Ok((out, missing))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseHits {
    pub hits: Vec<ScoredDoc>,
    /// Set when the query vector was all zeros and nothing was ranked.
    pub zero_query: bool,
}

/// Exhaustive top-`k` search by `metric`, ties broken by doc id.
pub fn dense_search(
    docs: &DocVectors,
    query: &GaussianEmbedding,
    k: usize,
    metric: Metric,
) -> Result<DenseHits, DenseError> {
    if let Some(first) = docs.embeddings.first() {
        dim_check(first.dim(), query.dim())?;
    }
    if query.mean.iter().all(|&x| x == 0.0) {
        return Ok(DenseHits {
            hits: Vec::new(),
            zero_query: true,
        });
    }
    let scored = docs
        .ids
        .par_iter()
        .zip(&docs.embeddings)
        .map(|(id, emb)| {
            let score = match metric {
                Metric::Cosine => cosine(&emb.mean, &query.mean)?,
                Metric::Gaussian => gaussian_log_overlap(emb, query)?,
            };
            Ok(ScoredDoc::new(id.clone(), score))
        })
        .collect::<Result<Vec<_>, DenseError>>()?;
    Ok(DenseHits {
        hits: top_k(scored, k),
        zero_query: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn store(entries: &[(&str, &[f64])]) -> EmbeddingStore {
        let mut s = EmbeddingStore::new(entries[0].1.len(), StoreKind::Word);
        for (id, v) in entries {
            s.insert(*id, v.to_vec()).unwrap();
        }
        s
    }

    fn toks(t: &[&str]) -> Vec<String> {
        t.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn load_well_formed() {
        let text = "2 3\na 1 2 3\nb 0.5 -1 0\n";
        let s = EmbeddingStore::read_from(text.as_bytes(), StoreKind::Word).unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s.dim(), 3);
        assert_eq!(s.get("b"), Some(&[0.5, -1.0, 0.0][..]));
    }

    #[test]
    fn load_errors() {
        let short = "2 3\na 1 2 3\nb 1 2\n";
        assert!(matches!(
            EmbeddingStore::read_from(short.as_bytes(), StoreKind::Word),
            Err(DenseError::DimensionMismatch { line: Some(3), .. })
        ));
        let dup = "2 2\na 1 2\na 3 4\n";
        assert!(matches!(
            EmbeddingStore::read_from(dup.as_bytes(), StoreKind::Word),
            Err(DenseError::DuplicateId(id)) if id == "a"
        ));
        assert!(matches!(
            EmbeddingStore::read_from("two 3\n".as_bytes(), StoreKind::Word),
            Err(DenseError::MalformedHeader(_))
        ));
        assert!(matches!(
            EmbeddingStore::read_from("1 2\na 1 x\n".as_bytes(), StoreKind::Word),
            Err(DenseError::MalformedLine(2))
        ));
        assert!(matches!(
            EmbeddingStore::read_from("3 2\na 1 2\n".as_bytes(), StoreKind::Word),
            Err(DenseError::CountMismatch { declared: 3, found: 1 })
        ));
    }

    #[test]
    fn bag_means() {
        let s = store(&[("t1", &[1.0, 0.0]), ("t2", &[0.0, 1.0])]);
        assert_eq!(embed_bag(&toks(&["t1"]), &s), [1.0, 0.0]);
        assert_eq!(embed_bag(&toks(&["t1", "t2"]), &s), [0.5, 0.5]);
        assert_eq!(embed_bag(&toks(&["zz", "yy"]), &s), [0.0, 0.0]);
        assert_eq!(embed_bag(&[], &s), [0.0, 0.0]);
    }

    #[test]
    fn bag_variance_averages() {
        let s = store(&[("t1", &[1.0]), ("t2", &[3.0])]);
        let mut variances = WordVariances::default();
        variances.per_term.insert("t1".into(), 3.0);
        let g = embed_bag_gaussian(&toks(&["t1", "t2", "oov"]), &s, &variances);
        assert_eq!(g.mean, [2.0]);
        assert_eq!(g.variance, 2.0);
    }

    #[test]
    fn cosine_values() {
        assert!((cosine(&[3.0, 4.0], &[3.0, 4.0]).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(cosine(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 0.0);
        assert!((cosine(&[1.0, 1.0], &[1.0, 0.0]).unwrap() - 0.70711).abs() < 1e-5);
        assert_eq!(cosine(&[0.0, 0.0], &[1.0, 0.0]).unwrap(), 0.0);
        assert!(matches!(
            cosine(&[1.0], &[1.0, 2.0]),
            Err(DenseError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn overlap_basics() {
        let a = GaussianEmbedding::new(vec![0.3], 0.5).unwrap();
        let same = gaussian_overlap(&a, &a).unwrap();
        assert!((same - (2.0 * std::f64::consts::PI).powf(-0.5)).abs() < 1e-12);
        let b = GaussianEmbedding::new(vec![1.3], 0.5).unwrap();
        assert!(gaussian_overlap(&a, &b).unwrap() < same);
        assert_eq!(gaussian_overlap(&a, &b).unwrap(), gaussian_overlap(&b, &a).unwrap());
        assert!(matches!(
            GaussianEmbedding::new(vec![0.0], 0.0),
            Err(DenseError::NonPositiveVariance(_))
        ));
        let bad = GaussianEmbedding {
            mean: vec![0.0],
            variance: -1.0,
        };
        assert!(gaussian_overlap(&a, &bad).is_err());
    }

    #[test]
    fn topic_average_of_field_vectors() {
        let mut s = EmbeddingStore::new(2, StoreKind::Document);
        s.insert("7:query", vec![0.0, 0.0]).unwrap();
        s.insert("7:question", vec![3.0, 0.0]).unwrap();
        s.insert("7:narrative", vec![0.0, 3.0]).unwrap();
        let topic = Topic {
            topic_id: 7,
            query: "q".into(),
            question: "q?".into(),
            narrative: "n".into(),
        };
        let prep = PrepConfig::default();
        let v = WordVariances::default();
        let avg = topic_vector(&topic, &s, &prep, TopicField::Average, &v).unwrap();
        assert_eq!(avg.vector(), [1.0, 1.0]);
        let err = topic_vector(&topic, &s, &prep, TopicField::Combined, &v).unwrap_err();
        assert!(matches!(err, DenseError::MissingTopicVector(k) if k == "7:combined"));
    }

    #[test]
    fn topic_query_on_word_store_is_a_bag() {
        let s = store(&[("viru", &[1.0, 2.0]), ("mask", &[3.0, 0.0])]);
        let topic = Topic {
            topic_id: 1,
            query: "virus masks".into(),
            question: "q".into(),
            narrative: "n".into(),
        };
        let prep = PrepConfig::default();
        let tv = topic_vector(&topic, &s, &prep, TopicField::Query, &WordVariances::default()).unwrap();
        assert_eq!(tv.vector(), embed_bag(&preprocess(&topic.query, &prep), &s));
    }

    fn unit_docs(vectors: &[(&str, Vec<f64>)]) -> DocVectors {
        let mut docs = DocVectors::default();
        for (id, v) in vectors {
            docs.push(*id, GaussianEmbedding::new(v.clone(), 1.0).unwrap());
        }
        docs
    }

    #[test]
    fn search_orders_by_cosine() {
        let docs = unit_docs(&[
            ("a", vec![0.9, (1.0f64 - 0.81).sqrt()]),
            ("b", vec![0.1, (1.0f64 - 0.01).sqrt()]),
            ("c", vec![0.5, (1.0f64 - 0.25).sqrt()]),
        ]);
        let query = GaussianEmbedding::new(vec![1.0, 0.0], 1.0).unwrap();
        let hits = dense_search(&docs, &query, 2, Metric::Cosine).unwrap().hits;
        let ids: Vec<_> = hits.iter().map(|h| h.doc_id.as_str()).collect();
        assert_eq!(ids, ["a", "c"]);
        let all = dense_search(&docs, &query, 10, Metric::Cosine).unwrap().hits;
        assert_eq!(all.len(), 3);
    }

    #[test]
    fn exact_match_ranks_first() {
        let docs = unit_docs(&[("a", vec![1.0, 0.0]), ("b", vec![0.0, 1.0])]);
        let query = GaussianEmbedding::new(vec![0.0, 1.0], 1.0).unwrap();
        let hits = dense_search(&docs, &query, 1, Metric::Cosine).unwrap().hits;
        assert_eq!(hits[0].doc_id, "b");
        assert!((hits[0].score - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_query_flags_and_returns_nothing() {
        let docs = unit_docs(&[("a", vec![1.0, 0.0])]);
        let query = GaussianEmbedding::new(vec![0.0, 0.0], 1.0).unwrap();
        let result = dense_search(&docs, &query, 5, Metric::Gaussian).unwrap();
        assert!(result.zero_query);
        assert!(result.hits.is_empty());
    }

    #[test]
    fn search_dimension_mismatch() {
        let docs = unit_docs(&[("a", vec![1.0, 0.0])]);
        let query = GaussianEmbedding::new(vec![1.0], 1.0).unwrap();
        assert!(dense_search(&docs, &query, 1, Metric::Cosine).is_err());
    }
}
