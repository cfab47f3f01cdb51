use std::collections::{BTreeMap, VecDeque};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::loss::{info_nce_grad_with, ScoreFn};
use super::pairs::{augment, make_pair, PairConfig};
use super::{ContrastiveError, EncoderState, DEFAULT_QUEUE_CAPACITY};

/// Fixed-capacity FIFO of detached key vectors from earlier batches.
#[derive(Debug, Clone, PartialEq)]
pub struct NegativeQueue {
    capacity: usize,
    entries: VecDeque<Vec<f64>>,
}

impl NegativeQueue {
    pub fn new(capacity: usize) -> Self {
        NegativeQueue {
            capacity,
            entries: VecDeque::with_capacity(capacity),
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Append, evicting the oldest entries beyond capacity.
    pub fn push(&mut self, key: Vec<f64>) {
        if self.capacity == 0 {
            return;
        }
        if self.entries.len() == self.capacity {
            self.entries.pop_front();
        }
        self.entries.push_back(key);
    }

    /// Oldest first.
    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.entries.iter().map(Vec::as_slice)
    }
}

impl Default for NegativeQueue {
    fn default() -> Self {
        Self::new(DEFAULT_QUEUE_CAPACITY)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContrastiveBatch {
    /// (query tokens, key tokens) per positive pair.
    pub pairs: Vec<(Vec<String>, Vec<String>)>,
    pub temperature: f64,
    pub score: ScoreFn,
}

impl ContrastiveBatch {
    pub fn new(pairs: Vec<(Vec<String>, Vec<String>)>, temperature: f64) -> Self {
        ContrastiveBatch {
            pairs,
            temperature,
            score: ScoreFn::Dot,
        }
    }
}

fn add_scaled(acc: &mut [f64], v: &[f64], scale: f64) {
    for (a, x) in acc.iter_mut().zip(v) {
        *a += scale * x;
    }
}

/// One gradient-descent step on the mean InfoNCE loss of `batch`.
///
/// Each query is contrasted with its own key, every other key in the batch
/// and every queued key. Gradients flow through the mean-pooling encoder into
/// the table rows of in-vocabulary tokens; queued keys receive none. After the
/// update, this batch's keys (as encoded before the update) are queued.
/// Returns the mean loss before the update.
pub fn train_step(
    state: &mut EncoderState,
    batch: &ContrastiveBatch,
    queue: &mut NegativeQueue,
    lr: f64,
) -> Result<f64, ContrastiveError> {
    let b = batch.pairs.len();
    if b == 0 || b - 1 + queue.len() == 0 {
        return Err(ContrastiveError::DegenerateBatch);
    }
    if !(batch.temperature > 0.0) {
        return Err(ContrastiveError::NonPositiveTemperature(batch.temperature));
    }

    let query_rows: Vec<Vec<usize>> = batch.pairs.iter().map(|(q, _)| state.token_rows(q)).collect();
    let key_rows: Vec<Vec<usize>> = batch.pairs.iter().map(|(_, k)| state.token_rows(k)).collect();
    let queries: Vec<Vec<f64>> = batch.pairs.iter().map(|(q, _)| state.encode(q)).collect();
    let keys: Vec<Vec<f64>> = batch.pairs.iter().map(|(_, k)| state.encode(k)).collect();

    let dim = state.dim();
    let inv_b = 1.0 / b as f64;
    let mut d_queries = vec![vec![0.0; dim]; b];
    let mut d_keys = vec![vec![0.0; dim]; b];
    let mut total_loss = 0.0;

    for j in 0..b {
        let negatives: Vec<&[f64]> = (0..b)
            .filter(|&m| m != j)
            .map(|m| keys[m].as_slice())
            .chain(queue.iter())
            .collect();
        let grad = info_nce_grad_with(batch.score, &queries[j], &keys[j], &negatives, batch.temperature)?;
        total_loss += grad.loss;
        add_scaled(&mut d_queries[j], &grad.query, inv_b);
        add_scaled(&mut d_keys[j], &grad.positive, inv_b);
        let in_batch = (0..b).filter(|&m| m != j);
        for (m, g) in in_batch.zip(&grad.negatives) {
            add_scaled(&mut d_keys[m], g, inv_b);
        }
    }

    // Mean pooling: each occurrence of a row receives grad / count.
    let mut table_grad: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for (rows, grad) in query_rows.iter().zip(&d_queries).chain(key_rows.iter().zip(&d_keys)) {
        if rows.is_empty() {
            continue;
        }
        let share = 1.0 / rows.len() as f64;
        for &r in rows {
            add_scaled(table_grad.entry(r).or_insert_with(|| vec![0.0; dim]), grad, share);
        }
    }
    for (r, g) in table_grad {
        add_scaled(state.row_mut(r), &g, -lr);
    }

    for key in keys {
        queue.push(key);
    }
    Ok(total_loss * inv_b)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub dim: usize,
    pub steps: usize,
    pub batch_size: usize,
    pub lr: f64,
    pub temperature: f64,
    pub queue_capacity: usize,
    pub score: ScoreFn,
    pub pairs: PairConfig,
    /// Half-width of the uniform initialisation range.
    pub init_scale: f64,
    /// Seed for the table initialisation; pair sampling uses `pairs.seed`.
    pub init_seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            dim: 32,
            steps: 200,
            batch_size: 32,
            lr: 0.5,
            temperature: 0.5,
            queue_capacity: DEFAULT_QUEUE_CAPACITY,
            // raw dot products let norms grow without bound under plain SGD
            score: ScoreFn::Cosine,
            pairs: PairConfig::crop(),
            init_scale: 0.1,
            init_seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub state: EncoderState,
    pub queue: NegativeQueue,
    /// Mean batch loss per step.
    pub losses: Vec<f64>,
}

/// Train an encoder from scratch over tokenized documents.
///
/// The vocabulary is every token of the documents in first-seen order. Each
/// step samples `batch_size` distinct documents of at least two tokens,
/// builds one positive pair from each, augments both views and takes one
/// [`train_step`].
pub fn train(documents: &[Vec<String>], config: &TrainConfig) -> Result<TrainOutcome, ContrastiveError> {
    config.pairs.validate()?;
    if config.batch_size == 0 {
        return Err(ContrastiveError::InvalidConfig("batch_size must be positive".into()));
    }
    if !(config.lr > 0.0) {
        return Err(ContrastiveError::InvalidConfig("lr must be positive".into()));
    }
    let eligible: Vec<&Vec<String>> = documents.iter().filter(|d| d.len() >= 2).collect();
    if eligible.is_empty() {
        return Err(ContrastiveError::EmptyVocabulary);
    }
    let terms = documents.iter().flatten().cloned();
    let mut state = EncoderState::random(terms, config.dim, config.init_scale, config.init_seed)?;
    let mut queue = NegativeQueue::new(config.queue_capacity);
    let mut rng = ChaCha8Rng::seed_from_u64(config.pairs.seed);
    let batch_size = config.batch_size.min(eligible.len());

    let mut losses = Vec::with_capacity(config.steps);
    for _ in 0..config.steps {
        let picks = rand::seq::index::sample(&mut rng, eligible.len(), batch_size);
        let mut pairs = Vec::with_capacity(batch_size);
        for i in picks.iter() {
            let (q, k) = make_pair(eligible[i], &config.pairs, &mut rng)?;
            pairs.push((augment(&q, &config.pairs, &mut rng), augment(&k, &config.pairs, &mut rng)));
        }
        let batch = ContrastiveBatch {
            pairs,
            temperature: config.temperature,
            score: config.score,
        };
        losses.push(train_step(&mut state, &batch, &mut queue, config.lr)?);
    }
    Ok(TrainOutcome { state, queue, losses })
}
