//! Exact decision procedure for two-variable constraint systems over
//! piecewise fractional-linear functions, with certificates.

pub mod certify;
pub mod error;
pub mod exact;
pub mod fixtures;
pub mod format;
pub mod gallery;
pub mod gen;
pub mod oracle;
pub mod pfl;
pub mod solver;

pub use error::{Error, Result};
