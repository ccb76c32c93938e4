use std::fmt;

use thiserror::Error;

/// One failed scenario invariant.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub field: String,
    pub value: String,
    pub constraint: String,
}

impl Violation {
    pub(crate) fn new(field: &str, value: impl fmt::Display, constraint: impl Into<String>) -> Self {
        Self {
            field: field.to_string(),
            value: value.to_string(),
            constraint: constraint.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}: {}", self.field, self.value, self.constraint)
    }
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed config at `{key}`: {message}")]
    MalformedConfig { key: String, message: String },

    #[error("invalid scenario: {}", join_violations(.0))]
    InvalidScenario(Vec<Violation>),

    #[error("cost table row {row}: {message}")]
    CostTable { row: usize, message: String },

    #[error("battery age {age} yr is not below its {life}-yr life; a replacement should have been scheduled")]
    OutOfLife { age: u32, life: u32 },

    #[error("{0}")]
    Domain(String),

    #[error("unknown scenario variant `{0}`")]
    UnknownVariant(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
