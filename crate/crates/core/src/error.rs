use thiserror::Error;

use crate::pfl::PflDefect;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("negative radicand {0}")]
    NegativeRadicand(String),
    #[error("fractional-linear map has zero determinant")]
    Singular,
    #[error("evaluation at the pole {0}")]
    Pole(String),
    #[error("invalid piecewise function: {0}")]
    InvalidPfl(PflDefect),
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("invalid polygon: {0}")]
    InvalidPolygon(String),
    #[error("invalid guard plan: {0}")]
    InvalidPlan(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

impl From<PflDefect> for Error {
    fn from(d: PflDefect) -> Self {
        Error::InvalidPfl(d)
    }
}
