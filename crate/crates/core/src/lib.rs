//! Consensus analysis for networks of identical passifiable SIMO agents on
//! weighted digraphs: spectral gain thresholds (sufficient and, for double
//! integrators, exact), gain-region boundary tracing, synchronous-trajectory
//! prediction, and closed-loop simulation.

pub mod cli;
pub mod digraph;
pub mod error;
pub mod gains;
pub mod linalg;
pub mod netfile;
pub mod passify;
pub mod poly;
pub mod presets;
pub mod region;
pub mod sim;
pub mod svg;

pub use error::{Error, Result};
