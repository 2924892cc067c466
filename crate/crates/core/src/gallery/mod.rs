//! Art-gallery front end: polygons, guard plans, and their reduction to
//! constraint instances.

pub mod enumerate;
pub mod geometry;
pub mod nook;
pub mod plan;
pub mod reduce;
