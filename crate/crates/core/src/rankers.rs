//! Rankers behind one trait, looked up by name at run time.
//!
//! A [`RankerRegistry`] maps names to factories; each factory pulls what it
//! needs from [`RankerInputs`] and fails with [`RankError::MissingInput`]
//! otherwise. `bm25`, `bag` and `dense` are registered by default.

use std::collections::BTreeMap;

use rayon::prelude::*;
use thiserror::Error;

use crate::bm25::{Bm25Error, Bm25Params, FieldSelector, InvertedIndex};
use crate::corpus::Corpus;
use crate::dense::{
    dense_search, topic_vector, DenseError, DocVectors, EmbeddingStore, Metric, StoreKind, WordVariances,
};
use crate::eval::{EvalError, RankedRun, Topic, TopicField};
use crate::ranking::ScoredDoc;
use crate::textprep::PrepConfig;

#[derive(Debug, Error)]
pub enum RankError {
    #[error("unknown ranker `{0}`")]
    UnknownRanker(String),
    #[error("ranker `{ranker}` needs {input}")]
    MissingInput { ranker: &'static str, input: &'static str },
    #[error("ranker `{ranker}` does not support topic field `{field}`")]
    UnsupportedField { ranker: &'static str, field: TopicField },
    #[error(transparent)]
    Bm25(#[from] Bm25Error),
    #[error(transparent)]
    Dense(#[from] DenseError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

impl RankError {
    pub fn name(&self) -> &'static str {
        match self {
            RankError::UnknownRanker(_) => "UnknownRanker",
            RankError::MissingInput { .. } => "MissingInput",
            RankError::UnsupportedField { .. } => "UnsupportedField",
            RankError::Bm25(e) => e.name(),
            RankError::Dense(e) => e.name(),
            RankError::Eval(e) => e.name(),
        }
    }
}

pub trait Ranker: Send + Sync {
    fn name(&self) -> &'static str;

    /// Top `k` documents for one topic field, best first.
    fn rank(&self, topic: &Topic, field: TopicField, k: usize) -> Result<Vec<ScoredDoc>, RankError>;
}

/// Everything a factory may draw on. Unused parts may be left `None`.
#[derive(Debug, Clone)]
pub struct RankerInputs<'a> {
    pub corpus: Option<&'a Corpus>,
    pub index: Option<&'a InvertedIndex>,
    pub embeddings: Option<&'a EmbeddingStore>,
    pub bm25: Bm25Params,
    pub metric: Metric,
    pub variances: WordVariances,
    pub fields: FieldSelector,
    pub prep: PrepConfig,
}

impl Default for RankerInputs<'_> {
    fn default() -> Self {
        RankerInputs {
            corpus: None,
            index: None,
            embeddings: None,
            bm25: Bm25Params::default(),
            metric: Metric::Cosine,
            variances: WordVariances::default(),
            fields: FieldSelector::default(),
            prep: PrepConfig::default(),
        }
    }
}

pub type RankerFactory = for<'a> fn(&RankerInputs<'a>) -> Result<Box<dyn Ranker + 'a>, RankError>;

pub struct RankerRegistry {
    factories: BTreeMap<&'static str, RankerFactory>,
}

impl RankerRegistry {
    pub fn empty() -> Self {
        RankerRegistry {
            factories: BTreeMap::new(),
        }
    }

    /// Replaces any factory already registered under `name`.
    pub fn register(&mut self, name: &'static str, factory: RankerFactory) {
        self.factories.insert(name, factory);
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.factories.keys().copied()
    }

    pub fn build<'a>(&self, name: &str, inputs: &RankerInputs<'a>) -> Result<Box<dyn Ranker + 'a>, RankError> {
        let factory = self
            .factories
            .get(name)
            .ok_or_else(|| RankError::UnknownRanker(name.to_string()))?;
        factory(inputs)
    }
}

impl Default for RankerRegistry {
    fn default() -> Self {
        let mut r = Self::empty();
        r.register("bm25", Bm25Ranker::factory);
        r.register("bag", BagRanker::factory);
        r.register("dense", DenseRanker::factory);
        r
    }
}

/// Lexical ranking over a persisted inverted index.
pub struct Bm25Ranker<'a> {
    index: &'a InvertedIndex,
    params: Bm25Params,
}

impl<'a> Bm25Ranker<'a> {
    pub fn new(index: &'a InvertedIndex, params: Bm25Params) -> Self {
        Bm25Ranker { index, params }
    }

    fn factory<'b>(inputs: &RankerInputs<'b>) -> Result<Box<dyn Ranker + 'b>, RankError> {
        let index = inputs.index.ok_or(RankError::MissingInput {
            ranker: "bm25",
            input: "an inverted index",
        })?;
        Ok(Box::new(Bm25Ranker::new(index, inputs.bm25)))
    }
}

impl Ranker for Bm25Ranker<'_> {
    fn name(&self) -> &'static str {
        "bm25"
    }

    fn rank(&self, topic: &Topic, field: TopicField, k: usize) -> Result<Vec<ScoredDoc>, RankError> {
        // `average` only exists in embedding space
        let text = topic
            .text(field)
            .ok_or(RankError::UnsupportedField { ranker: "bm25", field })?;
        Ok(self.index.search(&self.index.tokenize_query(&text), k, self.params))
    }
}

/// Bag of word embeddings: documents and topics are averaged word vectors.
pub struct BagRanker<'a> {
    store: &'a EmbeddingStore,
    docs: DocVectors,
    prep: PrepConfig,
    variances: WordVariances,
    metric: Metric,
}

impl<'a> BagRanker<'a> {
    pub fn new(
        corpus: &Corpus,
        store: &'a EmbeddingStore,
        fields: FieldSelector,
        prep: PrepConfig,
        variances: WordVariances,
        metric: Metric,
    ) -> Result<Self, RankError> {
        let docs = DocVectors::from_corpus_bags(corpus, fields, store, &prep, &variances)?;
        Ok(BagRanker {
            store,
            docs,
            prep,
            variances,
            metric,
        })
    }

    fn factory<'b>(inputs: &RankerInputs<'b>) -> Result<Box<dyn Ranker + 'b>, RankError> {
        let corpus = inputs.corpus.ok_or(RankError::MissingInput {
            ranker: "bag",
            input: "a corpus",
        })?;
        let store = inputs.embeddings.ok_or(RankError::MissingInput {
            ranker: "bag",
            input: "word embeddings",
        })?;
        Ok(Box::new(BagRanker::new(
            corpus,
            store,
            inputs.fields,
            inputs.prep.clone(),
            inputs.variances.clone(),
            inputs.metric,
        )?))
    }
}

impl Ranker for BagRanker<'_> {
    fn name(&self) -> &'static str {
        "bag"
    }

    fn rank(&self, topic: &Topic, field: TopicField, k: usize) -> Result<Vec<ScoredDoc>, RankError> {
        let q = topic_vector(topic, self.store, &self.prep, field, &self.variances)?;
        Ok(dense_search(&self.docs, &q.embedding, k, self.metric)?.hits)
    }
}

/// Precomputed document and topic vectors from an external encoder.
pub struct DenseRanker<'a> {
    store: &'a EmbeddingStore,
    docs: DocVectors,
    variances: WordVariances,
    metric: Metric,
}

impl<'a> DenseRanker<'a> {
    /// Corpus documents absent from the store are never retrieved.
    pub fn new(
        corpus: &Corpus,
        store: &'a EmbeddingStore,
        variances: WordVariances,
        metric: Metric,
    ) -> Result<Self, RankError> {
        if store.kind() != StoreKind::Document {
            return Err(DenseError::WrongStoreKind(StoreKind::Document).into());
        }
        let (docs, _missing) = DocVectors::from_document_store(corpus, store, variances.default)?;
        Ok(DenseRanker {
            store,
            docs,
            variances,
            metric,
        })
    }

    fn factory<'b>(inputs: &RankerInputs<'b>) -> Result<Box<dyn Ranker + 'b>, RankError> {
        let corpus = inputs.corpus.ok_or(RankError::MissingInput {
            ranker: "dense",
            input: "a corpus",
        })?;
        let store = inputs.embeddings.ok_or(RankError::MissingInput {
            ranker: "dense",
            input: "a document vector file",
        })?;
        Ok(Box::new(DenseRanker::new(
            corpus,
            store,
            inputs.variances.clone(),
            inputs.metric,
        )?))
    }
}

impl Ranker for DenseRanker<'_> {
    fn name(&self) -> &'static str {
        "dense"
    }

    fn rank(&self, topic: &Topic, field: TopicField, k: usize) -> Result<Vec<ScoredDoc>, RankError> {
        let prep = PrepConfig::whitespace_only(); // unused for document stores
        let q = topic_vector(topic, self.store, &prep, field, &self.variances)?;
        Ok(dense_search(&self.docs, &q.embedding, k, self.metric)?.hits)
    }
}

/// Rank every topic at depth `k`. Topics are processed in parallel; the run
/// is keyed by topic id, and topics with no hits get an empty entry.
pub fn run_topics(
    ranker: &dyn Ranker,
    topics: &[Topic],
    field: TopicField,
    k: usize,
    run_tag: &str,
) -> Result<RankedRun, RankError> {
    let ranked = topics
        .par_iter()
        .map(|t| Ok((t.topic_id, ranker.rank(t, field, k)?)))
        .collect::<Result<Vec<_>, RankError>>()?;
    let mut run = RankedRun::new(run_tag);
    run.per_topic.extend(ranked);
    Ok(run)
}
