use std::collections::{BTreeMap, HashSet};
use std::io::{BufRead, Write};

use crate::ranking::ScoredDoc;

use super::EvalError;

/// A system's ranked output, per topic, in rank order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RankedRun {
    pub run_tag: String,
    pub per_topic: BTreeMap<u32, Vec<ScoredDoc>>,
}

impl RankedRun {
    pub fn new(run_tag: impl Into<String>) -> Self {
        RankedRun {
            run_tag: run_tag.into(),
            per_topic: BTreeMap::new(),
        }
    }

    /// Longest per-topic list.
    pub fn depth(&self) -> usize {
        self.per_topic.values().map(Vec::len).max().unwrap_or(0)
    }

    pub fn topics(&self) -> impl Iterator<Item = u32> + '_ {
        self.per_topic.keys().copied()
    }

    pub fn hits(&self, topic: u32) -> &[ScoredDoc] {
        self.per_topic.get(&topic).map_or(&[], Vec::as_slice)
    }

    /// Give every listed topic an entry, empty if it had no hits. A run file
    /// cannot express a topic with zero results, so readers call this before
    /// comparing runs over a known topic set.
    pub fn cover_topics(&mut self, topics: impl IntoIterator<Item = u32>) {
        for t in topics {
            self.per_topic.entry(t).or_default();
        }
    }

    /// Distinct doc ids and non-increasing finite scores within each topic.
    pub fn validate(&self) -> Result<(), EvalError> {
        for (&topic, hits) in &self.per_topic {
            let mut seen = HashSet::new();
            for (i, hit) in hits.iter().enumerate() {
                if !hit.score.is_finite() {
                    return Err(EvalError::ScoreOrder(topic));
                }
                if !seen.insert(hit.doc_id.as_str()) {
                    return Err(EvalError::DuplicateDocument {
                        topic,
                        doc_id: hit.doc_id.clone(),
                    });
                }
                if i > 0 && hit.score > hits[i - 1].score {
                    return Err(EvalError::ScoreOrder(topic));
                }
            }
        }
        Ok(())
    }
}

fn is_token(s: &str) -> bool {
    !s.is_empty() && !s.chars().any(char::is_whitespace)
}

/// One line per hit: `topic_id Q0 doc_id rank score run_tag`.
pub fn write_run<W: Write>(run: &RankedRun, mut out: W) -> Result<(), EvalError> {
    run.validate()?;
    if !run.per_topic.values().all(Vec::is_empty) && !is_token(&run.run_tag) {
        return Err(EvalError::InvalidToken(run.run_tag.clone()));
    }
    for (topic, hits) in &run.per_topic {
        for (rank, hit) in hits.iter().enumerate() {
            if !is_token(&hit.doc_id) {
                return Err(EvalError::InvalidToken(hit.doc_id.clone()));
            }
            writeln!(
                out,
                "{topic} Q0 {} {} {} {}",
                hit.doc_id,
                rank + 1,
                hit.score,
                run.run_tag
            )?;
        }
    }
    Ok(())
}

pub fn read_run<R: BufRead>(input: R) -> Result<RankedRun, EvalError> {
    let mut run_tag: Option<String> = None;
    let mut rows: BTreeMap<u32, Vec<(usize, ScoredDoc)>> = BTreeMap::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        let number = i + 1;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        let [topic, _q0, doc_id, rank, score, tag] = fields.as_slice() else {
            return Err(EvalError::MalformedLine(number));
        };
        let topic: u32 = topic.parse().map_err(|_| EvalError::MalformedLine(number))?;
        let rank: usize = rank.parse().map_err(|_| EvalError::MalformedLine(number))?;
        let score: f64 = score.parse().map_err(|_| EvalError::MalformedLine(number))?;
        match &run_tag {
            None => run_tag = Some(tag.to_string()),
            Some(t) if t != tag => return Err(EvalError::MalformedLine(number)),
            Some(_) => {}
        }
        rows.entry(topic)
            .or_default()
            .push((rank, ScoredDoc::new(*doc_id, score)));
    }

    let mut run = RankedRun::new(run_tag.unwrap_or_default());
    for (topic, mut hits) in rows {
        hits.sort_by_key(|(rank, _)| *rank);
        if hits.iter().enumerate().any(|(i, (rank, _))| *rank != i + 1) {
            return Err(EvalError::RankGap(topic));
        }
        run.per_topic
            .insert(topic, hits.into_iter().map(|(_, hit)| hit).collect());
    }
    run.validate()?;
    Ok(run)
}
