//! Continuous-contact meeting times and two-hop relay delay for mobile nodes
//! on a disc of area `πn`.
//!
//! Two mobility models are provided: truncated Lévy flights (with an antipodal
//! wrap at the boundary) and i.i.d. relocation with straight-line motion. A
//! pair of nodes meets the first time their distance drops to the transmission
//! range, checked continuously inside every slot rather than only at slot ends.

pub mod analytics;
pub mod cli;
pub mod error;
pub mod experiments;
pub mod flight;
pub mod geometry;
pub mod report;
pub mod streams;
pub mod world;

pub use error::{Error, Result};
