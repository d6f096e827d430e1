//! Regularity partitions for graphs without long half-graphs.
//!
//! The crate is organised bottom-up:
//!
//! * [`graph`] and [`bitset`]: dense bit-row graphs and vertex-set kernels.
//! * [`generators`]: seeded graph families and small-graph enumeration.
//! * [`stability`]: half-graph and special-tree witness search, tree bounds,
//!   traces and VC dimension.
//! * [`excellence`]: majority opinions, goodness, excellence relative to a
//!   witness family, and an exact brute-force oracle.
//! * [`partition`]: size sequences, excellent-subset extraction, random
//!   refinement and the full partition pipeline.
//! * [`regularity`]: pairwise uniformity certificates, the regularity oracle
//!   and partition reports.

pub mod bitset;
pub mod error;
pub mod excellence;
pub mod generators;
pub mod graph;
pub mod partition;
pub mod rational;
pub mod regularity;
pub mod stability;

pub use bitset::VertexSet;
pub use error::{Error, Result};
pub use graph::{load_edge_list, Graph, GraphBuilder};
pub use rational::{parse_rational, Rational};
