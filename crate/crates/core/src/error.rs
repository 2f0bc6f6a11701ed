use thiserror::Error;

/// Errors raised by the analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("state is not a fixed point (field residual {residual:e})")]
    NotFixedPoint { residual: f64 },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("no positive root: {0}")]
    NoPositiveRoot(String),

    #[error("no sign change over bracket [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },

    #[error("{branch} never crossed the reference section (terminus: {terminus})")]
    NoSectionCrossing { branch: String, terminus: String },

    #[error("newton iteration diverged after {iterations} iterations")]
    NewtonDivergence { iterations: usize },

    #[error("undecided: {0}")]
    Undecided(String),
}

pub type Result<T> = std::result::Result<T, Error>;
