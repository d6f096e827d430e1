//! The partition pipeline.
//!
//! Greedy extraction of excellent pieces at `ε/4`, randomized refinement
//! of each piece to the base size at `ε/3`, round-robin distribution of
//! the leftover vertices, and a closing certification of every pair.

mod extract;
mod params;
mod pipeline;
mod refine;

pub use extract::{
    extract_excellent, extract_unsized, Extraction, FamilySplitter, OracleSplitter, SplitRecord, Splitter,
};
pub use params::{
    check_admissible, compute_constants, make_params, theorem_bound, PipelineConfig, PipelineParams,
    SizeSequence, TheoremBound,
};
pub use pipeline::{greedy_cover, stable_partition, tsr_exponent, tsr_partition, Cover, TreeBoundMode};
pub use refine::{distribute_remainder, random_refine, Refinement};

use serde::Serialize;

use crate::bitset::VertexSet;
use crate::regularity::PieceProvenance;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Partition {
    /// Ordered by smallest member.
    pub pieces: Vec<VertexSet>,
    /// `(vertex, piece)` for every remainder vertex.
    pub remainder: Vec<(usize, usize)>,
    pub seed: u64,
    pub provenance: Vec<PieceProvenance>,
}

impl Partition {
    /// Disjoint nonempty pieces covering `0..n`, sizes within one of each other.
    pub fn check_invariants(&self, n: usize) -> bool {
        let mut seen = VertexSet::new(n);
        for p in &self.pieces {
            if p.is_empty() || p.universe() != n || !seen.is_disjoint(p) {
                return false;
            }
            seen.union_with(p);
        }
        let min = self.pieces.iter().map(|p| p.len()).min().unwrap_or(0);
        let max = self.pieces.iter().map(|p| p.len()).max().unwrap_or(0);
        seen.len() == n && max - min <= 1
    }

    pub fn len(&self) -> usize {
        self.pieces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }
}
