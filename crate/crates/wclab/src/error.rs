use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum WcError {
    #[error("mismatched group specs: {0} vs {1}")]
    MismatchedSpecs(String, String),

    #[error("point {point} out of range (action has {n} points)")]
    PointOutOfRange { point: usize, n: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("not a permutation: {0}")]
    NotAPermutation(String),

    #[error("group relation violated: {0}")]
    RelationViolated(String),

    #[error("window is not symmetric: {0}")]
    NonSymmetricWindow(String),

    #[error("missing local-rule entry for pattern {0}")]
    MissingRuleEntry(String),

    #[error("improper partial coloring: points {0} and {1} share color {2}")]
    ImproperPartial(usize, usize, usize),

    #[error("graph error: {0}")]
    Graph(String),

    #[error("girth generation failed after {attempts} attempts (tree too small for requested girth?)")]
    GirthGenerationFailed { attempts: u64 },

    #[error("unsupported inclusion: {0}")]
    UnsupportedInclusion(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, WcError>;
