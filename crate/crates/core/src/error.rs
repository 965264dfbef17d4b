use thiserror::Error;

/// Errors raised by the core library.
///
/// Row-level problems found while parsing are not errors: they are collected
/// in the ingest report so that one bad row does not abort a run.
#[derive(Debug, Error)]
pub enum Error {
    #[error("schema error: {0}")]
    Schema(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("reference table is empty")]
    EmptyTable,

    #[error("cannot expand category `{category}`: table aggregate is zero but target is {target}")]
    AbsentMass { category: String, target: f64 },

    #[error("no usable distributions to aggregate ({missing} missing)")]
    EmptyAggregate { missing: usize },

    #[error("no authors in corpus")]
    EmptyCorpus,

    #[error("table `{0}` is required by this strategy but was not provided")]
    MissingTable(&'static str),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
