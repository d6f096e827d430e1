//! Edge-stability witnesses: half-graphs, full special trees, and the set
//! systems of traces they control.

mod half_graph;
mod special_tree;
mod vc;

pub use half_graph::{find_half_graph, max_half_graph_length, HalfGraphWitness};
pub use special_tree::{
    empirical_tree_bound, find_special_tree, SpecialTreeWitness, TreeBound, TreeConvention,
};
pub use vc::{binomial_prefix_sum, sauer_check, vc_dimension};

use serde::Serialize;

use crate::error::{Error, Result};

/// Search-tree nodes allowed before a search gives up.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum SearchOutcome<W> {
    Found(W),
    /// The search space was exhausted: no witness exists.
    CertifiedAbsent,
    /// The node budget ran out first. Never to be read as absence.
    Inconclusive { nodes_explored: u64 },
}

impl<W> SearchOutcome<W> {
    pub fn is_found(&self) -> bool {
        matches!(self, SearchOutcome::Found(_))
    }

    pub fn is_absent(&self) -> bool {
        matches!(self, SearchOutcome::CertifiedAbsent)
    }

    pub fn witness(&self) -> Option<&W> {
        match self {
            SearchOutcome::Found(w) => Some(w),
            _ => None,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            SearchOutcome::Found(_) => "Found",
            SearchOutcome::CertifiedAbsent => "CertifiedAbsent",
            SearchOutcome::Inconclusive { .. } => "Inconclusive",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchResult<W> {
    pub outcome: SearchOutcome<W>,
    pub nodes_explored: u64,
}

/// Budget accounting shared by the searches.
pub(crate) struct Budget {
    limit: u64,
    used: u64,
}

pub(crate) struct OutOfBudget;

impl Budget {
    pub(crate) fn new(limit: u64) -> Self {
        Budget { limit, used: 0 }
    }

    #[inline]
    pub(crate) fn tick(&mut self) -> std::result::Result<(), OutOfBudget> {
        self.used += 1;
        if self.used > self.limit {
            Err(OutOfBudget)
        } else {
            Ok(())
        }
    }

    pub(crate) fn used(&self) -> u64 {
        self.used
    }
}

/// Strict upper bound on special-tree height in a `k`-edge-stable graph: `2^(k+2) - 2`.
pub fn tree_bound_from_k(k: u32) -> Result<u64> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be >= 1".into()));
    }
    if k > 56 {
        return Err(Error::Overflow("tree bound 2^(k+2) - 2"));
    }
    Ok((1u64 << (k + 2)) - 2)
}

/// Edge-stability implied by the absence of height-`h` special trees: `2^(h+1)`.
pub fn stability_from_tree(h: u32) -> Result<u64> {
    if h == 0 {
        return Err(Error::InvalidParameter("height must be >= 1".into()));
    }
    if h > 62 {
        return Err(Error::Overflow("edge stability 2^(h+1)"));
    }
    Ok(1u64 << (h + 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tree_bound_arithmetic() {
        assert_eq!(tree_bound_from_k(1).unwrap(), 6);
        assert_eq!(tree_bound_from_k(2).unwrap(), 14);
        assert_eq!(tree_bound_from_k(3).unwrap(), 30);
        assert!(tree_bound_from_k(0).is_err());
        assert!(matches!(tree_bound_from_k(57), Err(Error::Overflow(_))));
        assert!(tree_bound_from_k(56).is_ok());
    }

    #[test]
    fn stability_arithmetic() {
        assert_eq!(stability_from_tree(3).unwrap(), 16);
        assert_eq!(stability_from_tree(1).unwrap(), 4);
        assert_eq!(stability_from_tree(6).unwrap(), 128);
        assert!(stability_from_tree(63).is_err());
    }
}
