//! Adaptive local exploration of attributed graphs.
//!
//! Neighbors of a focus node are ranked by how much their neighborhood
//! feature distributions diverge from the whole graph (surprise) and how
//! closely they match what a session has visited so far (interest).

pub mod bench;
pub mod cli;
pub mod dataset;
pub mod error;
pub mod explorer;
pub mod graph;
pub mod histogram;
pub mod profile;
pub mod ranking;
pub mod service;
pub mod weights;

pub use error::{Error, Result};
