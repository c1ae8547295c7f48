//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Requested allocation or parameter exceeds a hard capacity limit.
    #[error("capacity: {0}")]
    Capacity(String),

    /// An index or shifted index falls outside a table's range.
    #[error("out of range: {0}")]
    OutOfRange(String),

    /// A parameter violates an operation's domain.
    #[error("domain: {0}")]
    Domain(String),

    /// A Hall–Petresco coefficient fails its filtration-level membership.
    #[error("invalid coefficient: {0}")]
    InvalidCoefficient(String),

    /// Table file does not start with the expected magic bytes.
    #[error("bad magic bytes in table file")]
    BadMagic,

    /// Table file carries an unsupported format version.
    #[error("unsupported table format version {0}")]
    BadVersion(u32),

    /// Table file carries an unknown kind tag.
    #[error("unknown table kind tag {0}")]
    BadKind(u8),

    /// Payload shorter or longer than the header promises.
    #[error("table payload length mismatch: expected {expected} bytes, got {got}")]
    Truncated { expected: u64, got: u64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
