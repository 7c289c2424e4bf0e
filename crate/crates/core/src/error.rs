use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("UnreachableState: {0} has the wrong permutation parity")]
    UnreachableState(String),

    #[error("IdOutOfRange: {id} (node count {limit})")]
    IdOutOfRange { id: u64, limit: u32 },

    #[error("InvalidState: {0}")]
    InvalidState(String),

    #[error("InvalidParams: {0}")]
    InvalidParams(String),

    #[error("SessionTerminated: session already finished")]
    SessionTerminated,

    #[error("BadMagic: expected {expected:?}")]
    BadMagic { expected: &'static str },

    #[error("BadChecksum: payload does not match trailer")]
    BadChecksum,

    #[error("VersionMismatch: found version {found}, expected {expected}")]
    VersionMismatch { found: u16, expected: u16 },

    #[error("Malformed: {0}")]
    Malformed(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    /// Stable short name, used by the CLI and HTTP layers.
    pub fn code(&self) -> &'static str {
        match self {
            Error::UnreachableState(_) => "UnreachableState",
            Error::IdOutOfRange { .. } => "IdOutOfRange",
            Error::InvalidState(_) => "InvalidState",
            Error::InvalidParams(_) => "InvalidParams",
            Error::SessionTerminated => "SessionTerminated",
            Error::BadMagic { .. } => "BadMagic",
            Error::BadChecksum => "BadChecksum",
            Error::VersionMismatch { .. } => "VersionMismatch",
            Error::Malformed(_) => "Malformed",
            Error::Io(_) => "Io",
        }
    }
}
