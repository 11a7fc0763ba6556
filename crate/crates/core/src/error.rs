use std::path::PathBuf;

/// Errors produced by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch in {op}: expected {expected}, found {found}")]
    DimensionMismatch {
        op: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("vectors and matrices must have at least one element")]
    Empty,

    #[error("label {label} out of range for {num_classes} classes")]
    LabelOutOfRange { label: usize, num_classes: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("jitter shift ({dx}, {dy}) exceeds the allowed {max} pixels")]
    ShiftTooLarge { dx: i32, dy: i32, max: i32 },

    #[error("{path}: {source}")]
    Idx {
        path: PathBuf,
        #[source]
        source: IdxError,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Structural problems found while decoding an IDX container.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IdxError {
    #[error("bad magic number at offset 0: expected {expected:#010x}, found {found:#010x}")]
    BadMagic { expected: u32, found: u32 },

    #[error("truncated at offset {offset}: needed {needed} more bytes, {available} available")]
    Truncated {
        offset: usize,
        needed: usize,
        available: usize,
    },

    #[error("unexpected dimension at offset {offset}: expected {expected}, found {found}")]
    BadDimension {
        offset: usize,
        expected: u32,
        found: u32,
    },

    #[error("label {label} at offset {offset} is not a digit (expected 0..=9)")]
    BadLabel { offset: usize, label: u8 },

    #[error("{images} images paired with {labels} labels")]
    CountMismatch { images: usize, labels: usize },

    #[error("{trailing} trailing bytes after offset {offset}")]
    TrailingBytes { offset: usize, trailing: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
