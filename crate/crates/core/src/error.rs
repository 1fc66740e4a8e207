use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid degree sequence: {0}")]
    InvalidDegrees(String),
    #[error("integer overflow while computing {0}")]
    Overflow(&'static str),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("malformed path: {0}")]
    MalformedPath(String),
    #[error("malformed labelling: {0}")]
    MalformedLabels(String),
    #[error("urn exhausted: {requested} draws requested from {available} balls")]
    UrnExhausted { requested: u128, available: u128 },
    #[error("attempt budget exhausted after {attempts} attempts")]
    Budget { attempts: u64 },
    #[error("inadmissible weight sequence: {0}")]
    Inadmissible(String),
    #[error("map is disconnected: vertex {0} unreachable")]
    Disconnected(usize),
    #[error("not a correspondence: {0}")]
    NotCorrespondence(String),
    #[error("regime mismatch: {0}")]
    Regime(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
