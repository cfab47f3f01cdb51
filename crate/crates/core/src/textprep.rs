//! Text cleaning and tokenization shared by documents and queries.
//!
//! The pipeline runs in a fixed order: lowercase, strip e-mail addresses and
//! URLs, strip non-ASCII characters, turn special characters into spaces,
//! split on whitespace, drop stopwords, stem. Every step can be switched off
//! through [`PrepConfig`].
//!
//! URLs are spans starting with `http://`, `https://` or `www.` and running to
//! the next whitespace. E-mail addresses are `local@domain` where the domain
//! contains at least one dot.

use std::collections::BTreeSet;
use std::fs;
use std::io;
use std::path::Path;
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::porter;

/// Bundled English stopword list, one term per line.
pub const BUNDLED_STOPWORDS: &str = include_str!("../data/stopwords_en.txt");

static URL_RE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)(?:https?://|www\.)\S+").expect("url regex"));
static EMAIL_RE: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"(?i)[a-z0-9._%+\-]+@[a-z0-9\-]+(?:\.[a-z0-9\-]+)+").expect("email regex")
});

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrepConfig {
    pub lowercase: bool,
    pub strip_urls_emails: bool,
    pub strip_non_ascii: bool,
    pub strip_special: bool,
    pub remove_stopwords: bool,
    pub stem: bool,
    pub stopwords: BTreeSet<String>,
}

impl Default for PrepConfig {
    fn default() -> Self {
        PrepConfig {
            lowercase: true,
            strip_urls_emails: true,
            strip_non_ascii: true,
            strip_special: true,
            remove_stopwords: true,
            stem: true,
            stopwords: parse_stopwords(BUNDLED_STOPWORDS),
        }
    }
}

impl PrepConfig {
    /// Every step disabled: plain whitespace tokenization.
    pub fn whitespace_only() -> Self {
        PrepConfig {
            lowercase: false,
            strip_urls_emails: false,
            strip_non_ascii: false,
            strip_special: false,
            remove_stopwords: false,
            stem: false,
            stopwords: BTreeSet::new(),
        }
    }

    pub fn with_stopword_file(mut self, path: &Path) -> io::Result<Self> {
        self.stopwords = parse_stopwords(&fs::read_to_string(path)?);
        Ok(self)
    }
}

/// Parse a stopword list: one term per line, blank lines ignored.
pub fn parse_stopwords(text: &str) -> BTreeSet<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(str::to_lowercase)
        .collect()
}

/// Run the cleaning pipeline over `text` and return its tokens.
pub fn preprocess(text: &str, config: &PrepConfig) -> Vec<String> {
    let mut text = if config.lowercase {
        text.to_lowercase()
    } else {
        text.to_string()
    };

    if config.strip_urls_emails {
        text = EMAIL_RE.replace_all(&text, " ").into_owned();
        text = URL_RE.replace_all(&text, " ").into_owned();
    }
    if config.strip_non_ascii {
        text.retain(|c| c.is_ascii());
    }
    if config.strip_special {
        text = text
            .chars()
            .map(|c| if c.is_alphanumeric() || c.is_whitespace() { c } else { ' ' })
            .collect();
    }

    text.split_whitespace()
        .filter(|t| !(config.remove_stopwords && config.stopwords.contains(*t)))
        .map(|t| if config.stem { porter::stem(t) } else { t.to_string() })
        .filter(|t| !t.is_empty())
        .collect()
}
