use thiserror::Error;

use crate::table::Triple;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid automaton: {0}")]
    InvalidAutomaton(String),

    /// A reachable local configuration has no table entry.
    #[error("missing transition for ({}, {}, {}) at t={t}, p={p}", .names.0, .names.1, .names.2)]
    MissingTransition {
        triple: Triple,
        names: (String, String, String),
        t: usize,
        p: i64,
    },

    #[error("local mapping has no value for ({}, {}, {})", .0.0, .0.1, .0.2)]
    DomainMiss((String, String, String)),

    #[error("invalid mapping: {0}")]
    InvalidMapping(String),

    #[error("induced relation is not deterministic ({0} conflicting triples)")]
    NonDeterministic(usize),

    #[error("mapping is not compliant: {0}")]
    NonCompliant(String),

    #[error("unknown sequence kind `{0}`")]
    UnknownSequence(String),

    #[error("invalid sequence parameters: {0}")]
    SequenceParams(String),

    #[error("enumeration space too large: {0}")]
    SpaceTooLarge(String),

    #[error("seed automaton does not have the expected shape: {0}")]
    SeedShape(String),

    #[error("corrupt checkpoint: {0}")]
    Checkpoint(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
