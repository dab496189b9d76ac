//! Critical points of the oriented area on configuration spaces of
//! equilateral polygonal linkages with an odd number of edges.
//!
//! - [`config`]: configurations, winding numbers, the three-fold embedding.
//! - [`area`]: the signed area `A` and the decorated area `S`.
//! - [`catalog`]: enumeration and realization of the cyclic critical pairs.
//! - [`morse`]: projected Hessians, numeric Morse indices, critical search.
//! - [`topology`]: Betti numbers and the perfectness check.
//! - [`render`], [`cli`]: SVG output and the command-line front end.

pub mod area;
pub mod catalog;
pub mod cli;
pub mod config;
pub mod error;
pub mod json;
pub mod morse;
pub mod render;
pub mod topology;

pub use error::{Error, Result};
