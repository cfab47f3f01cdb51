//! Ranker agreement: how many of the top-k documents two runs share per
//! topic, summarised by the mean and sample standard deviation over topics.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;

use serde::Serialize;

use super::{EvalError, RankedRun};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OverlapStats {
    pub pair_label: String,
    pub per_topic_counts: BTreeMap<u32, usize>,
    pub mean: f64,
    /// Sample standard deviation (n − 1 divisor).
    pub std: f64,
}

/// Per-topic size of the intersection of both runs' top-`k` doc id sets.
pub fn intersect_at_k(a: &RankedRun, b: &RankedRun, k: usize) -> Result<BTreeMap<u32, usize>, EvalError> {
    if !a.topics().eq(b.topics()) {
        return Err(EvalError::TopicMismatch);
    }
    Ok(a.per_topic
        .iter()
        .map(|(&topic, hits)| {
            let top_a: HashSet<&str> = hits.iter().take(k).map(|h| h.doc_id.as_str()).collect();
            let shared = b
                .hits(topic)
                .iter()
                .take(k)
                .filter(|h| top_a.contains(h.doc_id.as_str()))
                .count();
            (topic, shared)
        })
        .collect())
}

pub fn overlap_stats(counts: &BTreeMap<u32, usize>, label: &str) -> Result<OverlapStats, EvalError> {
    let n = counts.len();
    if n < 2 {
        return Err(EvalError::TooFewTopics(n));
    }
    let values: Vec<f64> = counts.values().map(|&c| c as f64).collect();
    let mean = values.iter().sum::<f64>() / n as f64;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
    Ok(OverlapStats {
        pair_label: label.to_string(),
        per_topic_counts: counts.clone(),
        mean,
        std: var.sqrt(),
    })
}

/// Pairwise comparison table for two or more runs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatsReport {
    pub k: usize,
    pub rows: Vec<OverlapStats>,
}

/// Every unordered pair of runs, in argument order: (0,1), (0,2), …, (1,2), …
pub fn compare_runs(runs: &[RankedRun], k: usize) -> Result<StatsReport, EvalError> {
    let mut rows = Vec::new();
    for i in 0..runs.len() {
        for j in i + 1..runs.len() {
            let counts = intersect_at_k(&runs[i], &runs[j], k)?;
            let label = format!("{}-{}", runs[i].run_tag, runs[j].run_tag);
            rows.push(overlap_stats(&counts, &label)?);
        }
    }
    Ok(StatsReport { k, rows })
}

impl StatsReport {
    pub fn to_text(&self) -> String {
        let width = self
            .rows
            .iter()
            .map(|r| r.pair_label.len())
            .max()
            .unwrap_or(0)
            .max("pair".len());
        let topics = self.rows.first().map_or(0, |r| r.per_topic_counts.len());
        let mut out = String::new();
        let _ = writeln!(out, "# top-{} overlap over {} topics", self.k, topics);
        let _ = writeln!(out, "{:<width$}  {:>10}  {:>10}", "pair", "mean", "std");
        for row in &self.rows {
            let _ = writeln!(out, "{:<width$}  {:>10.3}  {:>10.3}", row.pair_label, row.mean, row.std);
        }
        let _ = writeln!(out);
        let _ = writeln!(out, "# per-topic counts");
        let _ = write!(out, "{:>6}", "topic");
        for row in &self.rows {
            let _ = write!(out, "  {:>w$}", row.pair_label, w = row.pair_label.len().max(3));
        }
        let _ = writeln!(out);
        if let Some(first) = self.rows.first() {
            for topic in first.per_topic_counts.keys() {
                let _ = write!(out, "{topic:>6}");
                for row in &self.rows {
                    let _ = write!(
                        out,
                        "  {:>w$}",
                        row.per_topic_counts[topic],
                        w = row.pair_label.len().max(3)
                    );
                }
                let _ = writeln!(out);
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("stats report serializes");
        s.push('\n');
        s
    }
}
