//! Local graph clustering with push-based approximate PageRank.

#[cfg(feature = "cli")]
pub mod cli;
pub mod connectivity;
pub mod error;
pub mod eval;
pub mod generators;
pub mod graph;
pub mod io;
pub mod nibble;
pub mod oracles;
pub mod pagerank;
mod spectral;
mod sum;
pub mod sweep;

pub use error::{Error, Result};
pub use graph::{VertexSet, WeightedGraph};
pub use nibble::{NibbleMode, NibbleParams, NibbleResult};
pub use pagerank::{PageRankParams, PushStats, SparseMass};
pub use sweep::{LsCurve, SweepProfile};
