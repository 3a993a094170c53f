//! File formats, tree export, synthetic data and the command implementations
//! behind the `isct` binary. The algorithms live in [`isct_core`].

pub mod cli;
pub mod export;
pub mod io;
pub mod synth;

pub use isct_core as core;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },
    #[error("{path}: no sequences found")]
    NoSequences { path: String },
    #[error("malformed tree JSON: {0}")]
    TreeJson(#[from] serde_json::Error),
    #[error(transparent)]
    Core(#[from] isct_core::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
