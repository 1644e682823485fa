use thiserror::Error;

use crate::syntax::ParseError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("group mismatch: {0}")]
    GroupMismatch(String),

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("malformed word: {0}")]
    MalformedWord(String),

    #[error("element has infinite order modulo the center")]
    InfiniteCentralPower,

    #[error("central power is trivial; no primitive root exists")]
    TrivialCentralPower,

    #[error("bound case mismatch: {0}")]
    CaseMismatch(String),

    #[error(transparent)]
    Parse(#[from] ParseError),
}
