use std::collections::BTreeMap;
use std::path::Path;

use super::{read_file, EvalError};

/// Relevance grade: 0 irrelevant, 1 partially relevant, 2 relevant.
pub type Grade = u8;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Qrels {
    pub judgments: BTreeMap<(u32, String), Grade>,
    /// Judgments replaced by a later row for the same (topic, doc) pair.
    pub overwritten: usize,
}

impl Qrels {
    pub fn grade(&self, topic: u32, doc_id: &str) -> Option<Grade> {
        // BTreeMap<(u32, String), _> cannot be probed with a borrowed tuple.
        self.judgments.get(&(topic, doc_id.to_string())).copied()
    }

    pub fn is_relevant(&self, topic: u32, doc_id: &str, min_grade: Grade) -> bool {
        self.grade(topic, doc_id).is_some_and(|g| g >= min_grade)
    }

    pub fn relevant_count(&self, topic: u32, min_grade: Grade) -> usize {
        self.judgments
            .range((topic, String::new())..)
            .take_while(|((t, _), _)| *t == topic)
            .filter(|(_, &g)| g >= min_grade)
            .count()
    }

    pub fn len(&self) -> usize {
        self.judgments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.judgments.is_empty()
    }
}

pub fn load_qrels(path: &Path) -> Result<Qrels, EvalError> {
    parse_qrels(&read_file(path)?)
}

/// Rows of `topic iteration doc grade`, comma- or whitespace-separated. A
/// leading header row is skipped.
pub fn parse_qrels(text: &str) -> Result<Qrels, EvalError> {
    let mut qrels = Qrels::default();
    let mut first = true;
    for (i, line) in text.lines().enumerate() {
        let number = i + 1;
        let fields: Vec<&str> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|f| !f.is_empty())
            .collect();
        if fields.is_empty() {
            continue;
        }
        let was_first = std::mem::replace(&mut first, false);
        let Ok(topic) = fields[0].parse::<u32>() else {
            if was_first {
                continue;
            }
            return Err(EvalError::MalformedLine(number));
        };
        if fields.len() != 4 {
            return Err(EvalError::MalformedLine(number));
        }
        let grade = match fields[3].parse::<i64>() {
            Ok(g @ 0..=2) => g as Grade,
            _ => return Err(EvalError::BadGrade(fields[3].to_string())),
        };
        if qrels
            .judgments
            .insert((topic, fields[2].to_string()), grade)
            .is_some()
        {
            qrels.overwritten += 1;
        }
    }
    Ok(qrels)
}
