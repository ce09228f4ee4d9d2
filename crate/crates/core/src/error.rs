use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("unsupported image format: {0}")]
    UnsupportedFormat(String),
    #[error("malformed image: {0}")]
    Malformed(String),
    #[error("short read: expected {expected} payload bytes, got {got}")]
    ShortRead { expected: usize, got: usize },
    #[error("image dimensions {width}x{height} overflow")]
    DimensionOverflow { width: usize, height: usize },
    #[error("plane of {rows}x{cols} does not fit in {side}x{side}")]
    PlaneTooLarge { rows: usize, cols: usize, side: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("m exceeds n-2 (m = {m}, n = {n})")]
    TruncationOrder { m: u32, n: u32 },
    #[error("{0} has zero norm")]
    ZeroNorm(&'static str),
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error("invalid gate: {0}")]
    InvalidGate(String),
    #[error("circuit width {width} exceeds simulator guard of {limit} qubits")]
    WidthGuard { width: usize, limit: usize },
    #[error("circuit structure violation: {0}")]
    Structure(String),
    #[error("wrong truncation mode: {0}")]
    WrongMode(&'static str),
    #[error("invalid partition: {0}")]
    Partition(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
