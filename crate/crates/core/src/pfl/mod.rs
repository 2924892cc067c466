//! Increasing piecewise fractional-linear functions and the monotone maps
//! they generate under composition, minimum and iteration.

use std::fmt;

mod envelope;
mod function;
mod infpow;
mod monomap;
mod region;

pub use function::Pfl;
pub use infpow::{attracting_points, inf_power};
pub use monomap::{MonoMap, Piece};
pub use region::{line_region, Cmp, Interval, IntervalSet};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PflDefect {
    /// `pieces.len()` must be one more than `breaks.len()`.
    PieceCount { breaks: usize, pieces: usize },
    /// Breakpoints must be strictly increasing.
    UnsortedBreaks(usize),
    /// Piece with determinant ≤ 0.
    NotIncreasing(usize),
    /// Pole inside the closure of a piece's interval.
    PoleInPiece(usize),
    /// Adjacent pieces disagree at their common breakpoint.
    Discontinuous(usize),
    /// The first and last pieces must be affine.
    NonAffineEnd,
}

impl fmt::Display for PflDefect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PflDefect::PieceCount { breaks, pieces } => {
                write!(f, "{pieces} pieces for {breaks} breakpoints")
            }
            PflDefect::UnsortedBreaks(i) => write!(f, "breakpoint {i} is not above its predecessor"),
            PflDefect::NotIncreasing(i) => write!(f, "piece {i} is not increasing"),
            PflDefect::PoleInPiece(i) => write!(f, "piece {i} has a pole in its interval"),
            PflDefect::Discontinuous(i) => write!(f, "discontinuity at breakpoint {i}"),
            PflDefect::NonAffineEnd => write!(f, "unbounded end pieces must be affine"),
        }
    }
}
