//! The decision procedure: path table, tight-path minima, refutation search
//! and witness extraction.

mod decide;
mod emit;
mod instance;
mod reach;
mod table;

pub use decide::{decide, solve, Analysis, Evidence, Verdict};
pub use instance::{Constraint, Instance, Literal, Variable};
pub use reach::{Reach, Route};
pub use table::{round_count, Origin, PathTable, PieceStats};
