use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    Geometry(String),

    /// Configuration problem; the message names the offending key.
    #[error("{0}")]
    Config(String),

    #[error("dimension mismatch: state has {got} bath spins, couplings have {expected}")]
    Dimension { expected: usize, got: usize },

    #[error("n_phases = {n_phases} aliases coherence orders up to ±{n_spins}; need at least {min}")]
    Aliasing {
        n_phases: usize,
        n_spins: usize,
        min: usize,
    },

    #[error("dense oracle limited to {cap} bath spins, got {n_spins}")]
    OracleTooLarge { n_spins: usize, cap: usize },

    #[error("FID value {0} outside [-1, 1]")]
    FidDomain(f64),

    #[error("intensity spectrum not normalized (sum = {0})")]
    Unnormalized(f64),

    #[error("need at least {needed} samples, found {found}")]
    TooFewSamples { needed: usize, found: usize },

    #[error("not equilibrated within grid: trace never reaches {0}")]
    NotEquilibrated(f64),

    #[error("size {size} is not a multiple of the ring size {ring}")]
    SizeNotMultiple { size: usize, ring: usize },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {msg}")]
    Parse { path: PathBuf, msg: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by bad user input rather than I/O.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Io { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
