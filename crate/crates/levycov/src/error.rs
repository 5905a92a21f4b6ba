use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("quadrature did not converge: {0}")]
    QuadratureNonConvergence(String),
    #[error("series cap exceeded in {stream} stream after {terms} terms")]
    SeriesCapExceeded { stream: &'static str, terms: usize },
    #[error("one-sided jumps with index >= 1 are not summable; use symmetric mode or an index below 1")]
    OneSidedInfiniteVariation,
    #[error("class membership check failed: {0}; pass force to run anyway")]
    ClassMembership(String),
    #[error("degenerate regression: {0}")]
    DegenerateRegression(String),
}

pub type Result<T> = std::result::Result<T, Error>;
