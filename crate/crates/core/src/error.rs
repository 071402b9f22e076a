use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}:{line}: {msg}")]
    ConfigFile {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("reflection unreachable: wavelength {wavelength:.4} A exceeds 2d = {two_d:.4} A")]
    ReflectionUnreachable { wavelength: f64, two_d: f64 },

    #[error("phase matching unreachable: {0}")]
    PhaseMatching(String),

    #[error("stream not time-ordered at index {index}")]
    UnorderedStream { index: usize },

    #[error("region of interest overlaps the sidebands: {0}")]
    RoiOverlap(String),

    #[error("fit failed: {0}")]
    Fit(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("malformed list-mode data: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by the caller's configuration or arguments
    /// rather than by the data being processed.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Config(_)
                | Error::ConfigFile { .. }
                | Error::ReflectionUnreachable { .. }
                | Error::PhaseMatching(_)
                | Error::RoiOverlap(_)
        )
    }
}
