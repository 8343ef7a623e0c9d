use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {op}: {detail}")]
    DimensionMismatch { op: &'static str, detail: String },

    #[error("representation does not have the expected block structure (deviation {deviation:e} > tolerance {tol:e})")]
    StructureViolation { deviation: f64, tol: f64 },

    #[error("row count {rows} is not divisible by {blocks}")]
    IndivisibleRows { rows: usize, blocks: usize },

    #[error("constraint matrix is not of full row rank (sigma_min = {sigma_min:e}, tolerance = {tol:e})")]
    RankDeficientConstraint { sigma_min: f64, tol: f64 },

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("perturbed constraint matrix lost full row rank")]
    RankLostUnderPerturbation,

    #[error("malformed file: {0}")]
    MalformedFile(String),

    #[error("unsupported format version {found} (expected {expected})")]
    UnknownFormatVersion { found: u32, expected: u32 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn dims(op: &'static str, detail: impl Into<String>) -> Self {
        Error::DimensionMismatch {
            op,
            detail: detail.into(),
        }
    }
}
