use std::fmt;
use std::str::FromStr;

use rand::Rng;

use super::ContrastiveError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairMethod {
    /// Inverse cloze task: a removed span is the query, the rest is the key.
    Ict,
    /// Two independently drawn spans of the same passage.
    Crop,
}

impl fmt::Display for PairMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PairMethod::Ict => "ict",
            PairMethod::Crop => "crop",
        })
    }
}

impl FromStr for PairMethod {
    type Err = ContrastiveError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ict" => Ok(PairMethod::Ict),
            "crop" => Ok(PairMethod::Crop),
            other => Err(ContrastiveError::InvalidConfig(format!("unknown pair method `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairConfig {
    pub method: PairMethod,
    /// Fraction of the passage covered by the ICT query span or by each crop.
    pub span_fraction: f64,
    /// Per-token deletion probability applied by [`augment`].
    pub delete_prob: f64,
    pub seed: u64,
}

impl PairConfig {
    pub fn ict() -> Self {
        PairConfig {
            method: PairMethod::Ict,
            span_fraction: 0.1,
            delete_prob: 0.0,
            seed: 0,
        }
    }

    pub fn crop() -> Self {
        PairConfig {
            method: PairMethod::Crop,
            span_fraction: 0.5,
            delete_prob: 0.0,
            seed: 0,
        }
    }

    pub fn for_method(method: PairMethod) -> Self {
        match method {
            PairMethod::Ict => Self::ict(),
            PairMethod::Crop => Self::crop(),
        }
    }

    pub fn validate(&self) -> Result<(), ContrastiveError> {
        if !(self.span_fraction > 0.0 && self.span_fraction < 1.0) {
            return Err(ContrastiveError::InvalidConfig(format!(
                "span_fraction {} outside (0, 1)",
                self.span_fraction
            )));
        }
        if !(0.0..1.0).contains(&self.delete_prob) {
            return Err(ContrastiveError::InvalidConfig(format!(
                "delete_prob {} outside [0, 1)",
                self.delete_prob
            )));
        }
        Ok(())
    }
}

fn span_len(len: usize, fraction: f64) -> usize {
    ((fraction * len as f64).round() as usize).clamp(1, len)
}

/// Remove a random contiguous span to serve as the query; the remaining
/// tokens, in order, are the key. The span never covers the whole passage.
pub fn make_ict_pair<R: Rng + ?Sized>(
    tokens: &[String],
    config: &PairConfig,
    rng: &mut R,
) -> Result<(Vec<String>, Vec<String>), ContrastiveError> {
    let len = tokens.len();
    if len < 2 {
        return Err(ContrastiveError::TooShort(len));
    }
    let span = span_len(len, config.span_fraction).min(len - 1);
    let start = rng.random_range(0..=len - span);
    let query = tokens[start..start + span].to_vec();
    let key = tokens[..start]
        .iter()
        .chain(&tokens[start + span..])
        .cloned()
        .collect();
    Ok((query, key))
}

/// Two independently drawn spans of equal length; they may overlap.
pub fn make_crop_pair<R: Rng + ?Sized>(
    tokens: &[String],
    config: &PairConfig,
    rng: &mut R,
) -> Result<(Vec<String>, Vec<String>), ContrastiveError> {
    let len = tokens.len();
    if len < 2 {
        return Err(ContrastiveError::TooShort(len));
    }
    let span = span_len(len, config.span_fraction);
    let a = rng.random_range(0..=len - span);
    let b = rng.random_range(0..=len - span);
    Ok((tokens[a..a + span].to_vec(), tokens[b..b + span].to_vec()))
}

pub fn make_pair<R: Rng + ?Sized>(
    tokens: &[String],
    config: &PairConfig,
    rng: &mut R,
) -> Result<(Vec<String>, Vec<String>), ContrastiveError> {
    match config.method {
        PairMethod::Ict => make_ict_pair(tokens, config, rng),
        PairMethod::Crop => make_crop_pair(tokens, config, rng),
    }
}

/// Delete each token independently with `delete_prob`, keeping one
/// uniformly chosen token if everything would be deleted.
pub fn augment<R: Rng + ?Sized>(tokens: &[String], config: &PairConfig, rng: &mut R) -> Vec<String> {
    if tokens.is_empty() {
        return Vec::new();
    }
    let kept: Vec<String> = tokens
        .iter()
        .filter(|_| !rng.random_bool(config.delete_prob))
        .cloned()
        .collect();
    if kept.is_empty() {
        return vec![tokens[rng.random_range(0..tokens.len())].clone()];
    }
    kept
}
