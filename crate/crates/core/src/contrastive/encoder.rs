use std::io::BufRead;
use std::path::Path;

use indexmap::IndexMap;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::ContrastiveError;
use crate::dense::{load_embeddings, EmbeddingStore, StoreKind};

/// Trainable token-embedding table; documents are encoded by mean pooling.
#[derive(Debug, Clone, PartialEq)]
pub struct EncoderState {
    vocab: IndexMap<String, usize>,
    table: Vec<f64>,
    dim: usize,
}

impl EncoderState {
    /// Rows drawn uniformly from `[-scale, scale]`, in vocabulary order.
    pub fn random<I, S>(terms: I, dim: usize, scale: f64, seed: u64) -> Result<Self, ContrastiveError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        if dim == 0 {
            return Err(ContrastiveError::InvalidConfig("dim must be positive".into()));
        }
        let mut vocab = IndexMap::new();
        for term in terms {
            let next = vocab.len();
            vocab.entry(term.into()).or_insert(next);
        }
        if vocab.is_empty() {
            return Err(ContrastiveError::EmptyVocabulary);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let table = (0..vocab.len() * dim)
            .map(|_| rng.random_range(-scale..=scale))
            .collect();
        Ok(EncoderState { vocab, table, dim })
    }

    /// Rows supplied explicitly, in vocabulary order.
    pub fn from_rows<S: Into<String>>(rows: Vec<(S, Vec<f64>)>) -> Result<Self, ContrastiveError> {
        let dim = rows.first().map(|(_, v)| v.len()).ok_or(ContrastiveError::EmptyVocabulary)?;
        let mut vocab = IndexMap::new();
        let mut table = Vec::with_capacity(rows.len() * dim);
        for (term, row) in rows {
            if row.len() != dim {
                return Err(ContrastiveError::DimensionMismatch {
                    expected: dim,
                    found: row.len(),
                });
            }
            let term = term.into();
            if vocab.contains_key(&term) {
                return Err(ContrastiveError::InvalidConfig(format!("duplicate term `{term}`")));
            }
            vocab.insert(term, vocab.len());
            table.extend(row);
        }
        Ok(EncoderState { vocab, table, dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vocab_size(&self) -> usize {
        self.vocab.len()
    }

    pub fn index_of(&self, term: &str) -> Option<usize> {
        self.vocab.get(term).copied()
    }

    pub fn row(&self, index: usize) -> &[f64] {
        &self.table[index * self.dim..(index + 1) * self.dim]
    }

    pub(super) fn row_mut(&mut self, index: usize) -> &mut [f64] {
        &mut self.table[index * self.dim..(index + 1) * self.dim]
    }

    /// Row indices of the in-vocabulary tokens, with repetition.
    pub fn token_rows(&self, tokens: &[String]) -> Vec<usize> {
        tokens.iter().filter_map(|t| self.index_of(t)).collect()
    }

    /// Mean of the rows of in-vocabulary tokens; zero vector when none are known.
    pub fn encode(&self, tokens: &[String]) -> Vec<f64> {
        let rows = self.token_rows(tokens);
        let mut out = vec![0.0; self.dim];
        if rows.is_empty() {
            return out;
        }
        for &r in &rows {
            for (o, x) in out.iter_mut().zip(self.row(r)) {
                *o += x;
            }
        }
        let n = rows.len() as f64;
        out.iter_mut().for_each(|o| *o /= n);
        out
    }

    /// Word-level store with the same rows, usable for bag-of-embeddings retrieval.
    pub fn to_store(&self) -> EmbeddingStore {
        let mut store = EmbeddingStore::new(self.dim, StoreKind::Word);
        for (term, &i) in &self.vocab {
            store
                .insert(term.clone(), self.row(i).to_vec())
                .expect("vocabulary terms are unique and rows share one dimension");
        }
        store
    }

    pub fn from_store(store: &EmbeddingStore) -> Result<Self, ContrastiveError> {
        Self::from_rows(store.iter().map(|(t, v)| (t, v.to_vec())).collect())
    }

    /// Checkpoint in the embedding-file format: `vocab_size dim`, then `term v1 … v_dim`.
    pub fn save(&self, path: &Path) -> Result<(), ContrastiveError> {
        Ok(self.to_store().save(path)?)
    }

    pub fn load(path: &Path) -> Result<Self, ContrastiveError> {
        Self::from_store(&load_embeddings(path, StoreKind::Word)?)
    }

    pub fn read_from<R: BufRead>(input: R) -> Result<Self, ContrastiveError> {
        Self::from_store(&EmbeddingStore::read_from(input, StoreKind::Word)?)
    }
}
