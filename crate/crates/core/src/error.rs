use thiserror::Error;

/// Errors raised by the core library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoreError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid gap defect: {0}")]
    InvalidDefect(String),

    #[error("invalid region: {0}")]
    InvalidRegion(String),

    #[error("invalid tolerance configuration: {0}")]
    InvalidTolerance(String),

    #[error("unknown center id {0}")]
    UnknownId(usize),

    #[error("point {0:?} lies outside the editable region")]
    OutsideRegion(Vec<f64>),

    #[error("empty search region")]
    EmptySearch,

    #[error("block size {n} is below the minimum {min}")]
    SizeTooSmall { n: usize, min: usize },

    #[error("unsupported gap direction: {0}")]
    UnsupportedGap(String),

    #[error("split failed: {0}")]
    Split(String),

    #[error("family member {0:?} is missing from the patch")]
    MissingMember(Vec<i64>),

    #[error("stage {stage} leaves an overlapping configuration ({violations} violation(s), worst squared distance {worst})")]
    StageOverlap { stage: usize, violations: usize, worst: f64 },

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("cannot reach target width: {0}")]
    CannotReachTarget(String),

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error("no admissible block: {0}")]
    NoAdmissibleBlock(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for CoreError {
    fn from(e: std::io::Error) -> Self {
        CoreError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CoreError>;
