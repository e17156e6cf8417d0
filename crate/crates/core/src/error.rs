use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the core library.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied argument or structure violates a precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("item index {index} out of range for {n_items} items")]
    IndexOutOfRange { index: usize, n_items: usize },

    #[error("empty pair support")]
    EmptySupport,

    /// A distribution's support does not match what the model expects for the view.
    #[error("support mismatch: {0}")]
    SupportMismatch(String),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("zero total count")]
    ZeroTotal,

    #[error("degenerate feature matrix: median pairwise distance is zero")]
    DegenerateFeatures,

    #[error("insufficient view-specific dimensions: need K >= 4, got K = {0}")]
    InsufficientViewDims(usize),

    #[error("need at least {needed} labeled items for k = {k}, have {have}")]
    TooFewLabeled {
        k: usize,
        needed: usize,
        have: usize,
    },

    /// The optimizer produced a non-finite cost or gradient.
    #[error("non-finite {block} at iteration {iteration}")]
    NonFiniteCost {
        iteration: usize,
        block: &'static str,
    },

    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
