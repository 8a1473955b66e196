use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("unknown variable label `{0}`")]
    UnknownLabel(String),

    #[error("subset must not be empty")]
    EmptySubset,

    #[error("subsets overlap on `{0}`")]
    OverlappingSubsets(String),

    #[error("parameter domain violated: {0}")]
    ParameterDomain(String),

    #[error("matrix is not symmetric (max asymmetry {0:.3e})")]
    NotSymmetric(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPsd(f64),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("experiment too large: {0}")]
    ExperimentTooLarge(String),

    #[error("row count {rows} exceeds the elimination guard of {limit}")]
    RowExplosion { rows: usize, limit: usize },

    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),

    #[error("symbol sets differ: {0}")]
    SymbolMismatch(String),

    #[error("system has no rows")]
    EmptySystem,

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
