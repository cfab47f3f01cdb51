use std::collections::BTreeMap;

use serde::Serialize;

use super::{Grade, Qrels, RankedRun};

/// A per-topic measure and its mean over the run's topics.
/// Unjudged documents count as non-relevant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricReport {
    pub per_topic: BTreeMap<u32, f64>,
    pub mean: f64,
}

impl MetricReport {
    fn from_per_topic(per_topic: BTreeMap<u32, f64>) -> Self {
        let mean = if per_topic.is_empty() {
            0.0
        } else {
            per_topic.values().sum::<f64>() / per_topic.len() as f64
        };
        MetricReport { per_topic, mean }
    }
}

/// Fraction of the top `k` that is judged at `min_grade` or above. The
/// denominator is always `k`, even when fewer documents were retrieved.
pub fn precision_at_k(run: &RankedRun, qrels: &Qrels, k: usize, min_grade: Grade) -> MetricReport {
    let k = k.max(1);
    let per_topic = run
        .per_topic
        .iter()
        .map(|(&topic, hits)| {
            let relevant = hits
                .iter()
                .take(k)
                .filter(|h| qrels.is_relevant(topic, &h.doc_id, min_grade))
                .count();
            (topic, relevant as f64 / k as f64)
        })
        .collect();
    MetricReport::from_per_topic(per_topic)
}

/// Mean of precision at each relevant retrieved rank, over all relevant documents for the topic.
pub fn average_precision(run: &RankedRun, qrels: &Qrels, min_grade: Grade) -> MetricReport {
    let per_topic = run
        .per_topic
        .iter()
        .map(|(&topic, hits)| {
            let total = qrels.relevant_count(topic, min_grade);
            if total == 0 {
                return (topic, 0.0);
            }
            let mut found = 0usize;
            let mut sum = 0.0;
            for (i, hit) in hits.iter().enumerate() {
                if qrels.is_relevant(topic, &hit.doc_id, min_grade) {
                    found += 1;
                    sum += found as f64 / (i + 1) as f64;
                }
            }
            (topic, sum / total as f64)
        })
        .collect();
    MetricReport::from_per_topic(per_topic)
}
