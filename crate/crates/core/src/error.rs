use thiserror::Error;

/// Errors reported by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported modulation order {0} (expected 4, 16 or 64)")]
    UnsupportedOrder(usize),
    #[error("length {len} is not a multiple of {multiple}")]
    LengthNotMultiple { len: usize, multiple: usize },
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("invalid channel parameters: {0}")]
    InvalidChannel(String),
    #[error("differential reference symbol has zero magnitude")]
    ZeroReference,
    #[error("alist parse error at line {line}: {msg}")]
    Alist { line: usize, msg: String },
    #[error("parity-check matrix is rank deficient: rank {rank} < {rows} rows")]
    RankDeficient { rank: usize, rows: usize },
    #[error("invalid parity-check matrix: {0}")]
    InvalidMatrix(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("csv error at line {line}: {msg}")]
    Csv { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
