use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("malformed rank-set description: {0}")]
    MalformedDescription(String),
    #[error("notation is not a limit")]
    NotALimit,
    #[error("level mismatch: {0} vs {1}")]
    LevelMismatch(usize, usize),
    #[error("the predecessor map is undefined on level 0")]
    LevelZero,
    #[error("{what} cap exceeded: {size} > {cap}")]
    CapExceeded { what: &'static str, size: usize, cap: usize },
    #[error("not a path: {0}")]
    NotAPath(String),
    #[error("no witness level: the automorphism is trivial on the truncation")]
    TrivialAutomorphism,
    #[error("the rank formula does not cover identity elements")]
    IdentityElement,
    #[error("invalid tree: {0}")]
    InvalidTree(String),
    #[error("invalid structure: {0}")]
    InvalidStructure(String),
    #[error("invariant `{invariant}` violated: {detail}")]
    Invariant { invariant: String, detail: String },
    #[error("inconsistent build: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
