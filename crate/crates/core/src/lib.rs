//! Aspect-ratio universality of generic rectangular layouts.
//!
//! The crate classifies layouts (sliceable, one-sided, aspect-ratio class),
//! realizes aspect-ratio assignments exactly for sliceable layouts, works with
//! transversal structures of extended duals, and recognizes the duals of
//! one-sided sliceable layouts with a constructive witness layout.
//!
//! All geometry uses exact rational arithmetic. Combinatorial analyses run on
//! a rank-compressed integer grid derived from the rational coordinates.

pub mod classify;
pub mod cli;
pub mod dualgraph;
pub mod enumerate;
pub mod error;
pub mod exec;
pub mod geometry;
pub mod realize;
pub mod recognize;
pub mod render;
pub mod transversal;

pub use error::{Error, Result};
pub use geometry::{Layout, Orientation, Rational, Rect};
