use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty dataset")]
    EmptyDataset,

    #[error("line {line}: malformed label {label:?} (expected 0 or 1)")]
    MalformedLabel { line: usize, label: String },

    #[error("line {line}: genotype value {value:?} not in {{0,1,2}}")]
    BadGenotype { line: usize, value: String },

    #[error("duplicate SNP identifier {0:?}")]
    DuplicateSnp(String),

    #[error("label/column mismatch: {0}")]
    LabelMismatch(String),

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("density {0} outside [0, 1]")]
    InvalidDensity(f64),

    #[error("class {0} is empty; mining needs at least one case and one control")]
    EmptyClass(&'static str),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("instance too large for brute-force enumeration: {0}")]
    TooLarge(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
