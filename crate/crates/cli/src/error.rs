use std::fmt;
use std::io;

use cordir::bm25::Bm25Error;
use cordir::contrastive::ContrastiveError;
use cordir::corpus::CorpusError;
use cordir::dense::DenseError;
use cordir::eval::EvalError;
use cordir::rankers::RankError;

/// A command failure: the error's name, its message and the exit status.
#[derive(Debug)]
pub struct Failure {
    pub name: &'static str,
    pub message: String,
    pub code: u8,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure {
            name: "UsageError",
            message: message.into(),
            code: 2,
        }
    }

    fn module(name: &'static str, err: impl fmt::Display) -> Self {
        Failure {
            name,
            message: err.to_string(),
            code: 1,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "error [{}]: {}", self.name, self.message)
    }
}

macro_rules! from_module {
    ($($t:ty),*) => {$(
        impl From<$t> for Failure {
            fn from(e: $t) -> Self {
                Failure::module(e.name(), e)
            }
        }
    )*};
}

from_module!(Bm25Error, ContrastiveError, CorpusError, DenseError, EvalError, RankError);

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::module("Io", e)
    }
}
