use thiserror::Error;

use crate::term::Violation;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("{line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("invalid term: {}", fmt_violations(.0))]
    Invalid(Vec<Violation>),
    #[error("rank undefined: not scattered")]
    NotScattered,
    #[error("not a C'-term: {0}")]
    NotCPrime(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("oracle refuses: combined size {size} exceeds bound {bound}")]
    OracleRefused { size: usize, bound: usize },
    #[error("structural error: {0}")]
    Structural(String),
}

fn fmt_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;
