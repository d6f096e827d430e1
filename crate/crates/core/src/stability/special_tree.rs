use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use super::{Budget, OutOfBudget, SearchOutcome, SearchResult};
use crate::bitset::VertexSet;
use crate::graph::Graph;

/// Whether a leaf may coincide with one of its ancestor nodes.
///
/// Under `Coincident` only the listed edge constraints apply, so a leaf on a
/// 0-branch may be the node itself (no loops means `¬R(v, v)`). `Strict`
/// additionally requires every leaf to differ from its ancestors, which
/// rules out the degenerate trees built from that loop-free reading.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TreeConvention {
    #[default]
    Strict,
    Coincident,
}

/// Nodes `b_ρ` (`|ρ| < h`) and leaves `a_η` (`|η| = h`), keyed by binary strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpecialTreeWitness {
    pub height: u32,
    pub nodes: BTreeMap<String, usize>,
    pub leaves: BTreeMap<String, usize>,
}

impl SpecialTreeWitness {
    /// Check all `2^h * h` leaf/ancestor constraints against `g`.
    pub fn verify(&self, g: &Graph, convention: TreeConvention) -> bool {
        let h = self.height as usize;
        if h == 0 || h > 40 {
            return false;
        }
        if self.nodes.len() != (1 << h) - 1 || self.leaves.len() != 1 << h {
            return false;
        }
        let in_range = |v: &usize| *v < g.n();
        if !self.nodes.values().all(in_range) || !self.leaves.values().all(in_range) {
            return false;
        }
        if !self.nodes.keys().all(|k| k.len() < h && is_binary(k))
            || !self.leaves.keys().all(|k| k.len() == h && is_binary(k))
        {
            return false;
        }
        for (eta, &a) in &self.leaves {
            for m in 0..h {
                let Some(&b) = self.nodes.get(&eta[..m]) else {
                    return false;
                };
                let want = &eta[m..=m] == "1";
                if g.has_edge(a, b) != want {
                    return false;
                }
                if convention == TreeConvention::Strict && a == b {
                    return false;
                }
            }
        }
        true
    }
}

fn is_binary(s: &str) -> bool {
    s.bytes().all(|c| c == b'0' || c == b'1')
}

/// Bound on memo size, in stored words.
const MEMO_WORDS: usize = 8 << 20;

struct TreeSearch<'g> {
    g: &'g Graph,
    convention: TreeConvention,
    budget: Budget,
    memo: HashMap<(u32, Vec<u64>), Option<usize>>,
    memo_words: usize,
}

impl TreeSearch<'_> {
    /// Split `leaves` by adjacency to `b` into the 1-side and 0-side.
    fn split(&self, leaves: &VertexSet, b: usize) -> (VertexSet, VertexSet) {
        let row = self.g.row(b);
        let ones: Vec<u64> = leaves.words().iter().zip(row).map(|(x, r)| x & r).collect();
        let zeros: Vec<u64> = leaves.words().iter().zip(row).map(|(x, r)| x & !r).collect();
        let n = self.g.n();
        let mut zeros = VertexSet::from_words(n, zeros);
        if self.convention == TreeConvention::Strict {
            zeros.remove(b);
        }
        (VertexSet::from_words(n, ones), zeros)
    }

    /// Whether a full tree of height `h` has all its leaves inside `leaves`.
    fn exists(&mut self, leaves: &VertexSet, h: u32) -> Result<bool, OutOfBudget> {
        if leaves.len() < 1 << h {
            return Ok(false);
        }
        match h {
            0 => Ok(true),
            1 => {
                self.budget.tick()?;
                Ok(self.exists_height_one(leaves))
            }
            _ => Ok(self.find_root(leaves, h)?.is_some()),
        }
    }

    /// Height one asks for some `b` with a neighbour and a non-neighbour in
    /// `L` (non-neighbour distinct from `b` under the strict convention).
    /// Fixing `a0 ∈ L`, no such `b` exists exactly when every neighbour of
    /// `a0` sees all of `L` (but itself), `b = a0` does not split, and every
    /// vertex of `L` has the degree of `a0`.
    fn exists_height_one(&self, leaves: &VertexSet) -> bool {
        let g = self.g;
        let a0 = leaves.first().expect("nonempty");
        let occ = leaves.occupied_words();
        let size = leaves.len();
        let strict = self.convention == TreeConvention::Strict;
        for b in g.neighbors(a0).iter() {
            let seen = g.count_in_words(b, leaves, &occ);
            let need = if strict && leaves.contains(b) { size - 1 } else { size };
            if seen < need {
                return true;
            }
        }
        let own = g.count_in_words(a0, leaves, &occ);
        if own > 0 && (!strict || own < size - 1) {
            return true;
        }
        let d0 = g.degree(a0);
        leaves.iter().any(|a| g.degree(a) != d0)
    }

    /// First node vertex (in id order) rooting a height-`h` tree over `leaves`.
    fn find_root(&mut self, leaves: &VertexSet, h: u32) -> Result<Option<usize>, OutOfBudget> {
        let key = (h, leaves.words().to_vec());
        if let Some(&hit) = self.memo.get(&key) {
            return Ok(hit);
        }
        let need = 1usize << (h - 1);
        let mut found = None;
        for b in self.g.neighborhood_of(leaves).iter() {
            self.budget.tick()?;
            let (ones, zeros) = self.split(leaves, b);
            if ones.len() < need || zeros.len() < need {
                continue;
            }
            // the smaller side usually fails faster
            let (first, second) = if ones.len() <= zeros.len() {
                (&ones, &zeros)
            } else {
                (&zeros, &ones)
            };
            if self.exists(first, h - 1)? && self.exists(second, h - 1)? {
                found = Some(b);
                break;
            }
        }
        if self.memo_words + key.1.len() <= MEMO_WORDS {
            self.memo_words += key.1.len();
            self.memo.insert(key, found);
        }
        Ok(found)
    }

    fn root_for(&mut self, leaves: &VertexSet, h: u32) -> Result<Option<usize>, OutOfBudget> {
        if h >= 2 {
            return self.find_root(leaves, h);
        }
        for b in self.g.neighborhood_of(leaves).iter() {
            let (ones, zeros) = self.split(leaves, b);
            if !ones.is_empty() && !zeros.is_empty() {
                return Ok(Some(b));
            }
        }
        Ok(None)
    }

    fn build(
        &mut self,
        leaves: &VertexSet,
        h: u32,
        prefix: &mut String,
        out: &mut SpecialTreeWitness,
    ) -> Result<(), OutOfBudget> {
        if h == 0 {
            out.leaves.insert(prefix.clone(), leaves.first().expect("nonempty"));
            return Ok(());
        }
        let b = self.root_for(leaves, h)?.expect("subtree known to exist");
        out.nodes.insert(prefix.clone(), b);
        let (ones, zeros) = self.split(leaves, b);
        for (bit, side) in [('0', &zeros), ('1', &ones)] {
            prefix.push(bit);
            self.build(side, h - 1, prefix, out)?;
            prefix.pop();
        }
        Ok(())
    }
}

/// Exact, budgeted search for a full special tree of height `h`.
///
/// Each subtree is represented by the set of vertices still eligible as its
/// leaves; choosing a node splits that set by adjacency, and a branch dies
/// as soon as either side is too small to hold its `2^(h-1)` leaves.
/// Height-one subproblems are decided by a degree argument instead of a scan.
pub fn find_special_tree(
    g: &Graph,
    h: u32,
    budget: u64,
    convention: TreeConvention,
) -> SearchResult<SpecialTreeWitness> {
    assert!(h >= 1, "tree height must be >= 1");
    let mut search = TreeSearch {
        g,
        convention,
        budget: Budget::new(budget),
        memo: HashMap::new(),
        memo_words: 0,
    };
    let all = g.vertices();
    let outcome = match search.exists(&all, h) {
        Ok(true) => {
            let explored = search.budget.used();
            search.budget = Budget::new(u64::MAX);
            let mut w = SpecialTreeWitness {
                height: h,
                nodes: BTreeMap::new(),
                leaves: BTreeMap::new(),
            };
            if search.build(&all, h, &mut String::new(), &mut w).is_err() {
                unreachable!("reconstruction runs without a budget");
            }
            assert!(w.verify(g, convention), "special-tree reconstruction failed to verify");
            return SearchResult {
                outcome: SearchOutcome::Found(w),
                nodes_explored: explored,
            };
        }
        Ok(false) => SearchOutcome::CertifiedAbsent,
        Err(OutOfBudget) => SearchOutcome::Inconclusive {
            nodes_explored: budget,
        },
    };
    SearchResult {
        outcome,
        nodes_explored: search.budget.used().min(budget),
    }
}

/// Result of scanning heights `1..=cap` for the first certified absence.
#[derive(Clone, Debug, Serialize)]
pub struct TreeBound {
    /// Smallest certified-absent height, if any.
    pub t: Option<u32>,
    pub convention: TreeConvention,
    pub levels: Vec<(u32, SearchResult<SpecialTreeWitness>)>,
}

impl TreeBound {
    /// The outcome at the last height tried.
    pub fn last(&self) -> &SearchResult<SpecialTreeWitness> {
        &self.levels.last().expect("at least one level").1
    }

    /// The tallest tree found on the way.
    pub fn tallest_witness(&self) -> Option<&SpecialTreeWitness> {
        self.levels.iter().rev().find_map(|(_, r)| r.outcome.witness())
    }
}

/// Smallest `t <= cap` at which the search certifies that no height-`t`
/// tree exists. Stops at the first Inconclusive level.
pub fn empirical_tree_bound(
    g: &Graph,
    cap: u32,
    budget: u64,
    convention: TreeConvention,
) -> TreeBound {
    assert!(cap >= 1, "cap must be >= 1");
    let mut levels = Vec::new();
    let mut t = None;
    for h in 1..=cap {
        let r = find_special_tree(g, h, budget, convention);
        let stop = !r.outcome.is_found();
        if r.outcome.is_absent() {
            t = Some(h);
        }
        levels.push((h, r));
        if stop {
            break;
        }
    }
    TreeBound {
        t,
        convention,
        levels,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{
        all_graphs, erdos_renyi, half_graph, special_tree_example, union_of_cliques,
    };
    use crate::rational::Rational;
    use crate::stability::{find_half_graph, DEFAULT_BUDGET};

    /// Assign nodes and leaves in breadth-first order over all vertices.
    fn brute_force_has_tree(g: &Graph, h: u32, conv: TreeConvention) -> bool {
        let h = h as usize;
        let node_count = (1 << h) - 1;
        let mut nodes = vec![0usize; node_count];
        fn leaves_ok(g: &Graph, h: usize, nodes: &[usize], conv: TreeConvention) -> bool {
            // each leaf needs some vertex fitting its ancestor path
            (0..1usize << h).all(|eta| {
                (0..g.n()).any(|a| {
                    let mut idx = 0;
                    for m in 0..h {
                        let bit = eta >> (h - 1 - m) & 1 == 1;
                        let b = nodes[idx];
                        if g.has_edge(a, b) != bit || (conv == TreeConvention::Strict && a == b) {
                            return false;
                        }
                        idx = 2 * idx + 1 + bit as usize;
                    }
                    true
                })
            })
        }
        fn rec(g: &Graph, h: usize, i: usize, nodes: &mut Vec<usize>, conv: TreeConvention) -> bool {
            if i == nodes.len() {
                return leaves_ok(g, h, nodes, conv);
            }
            for v in 0..g.n() {
                nodes[i] = v;
                if rec(g, h, i + 1, nodes, conv) {
                    return true;
                }
            }
            false
        }
        rec(g, h, 0, &mut nodes, conv)
    }

    #[test]
    fn worked_example_tree() {
        let g = special_tree_example();
        for conv in [TreeConvention::Strict, TreeConvention::Coincident] {
            let r = find_special_tree(&g, 2, DEFAULT_BUDGET, conv);
            assert!(r.outcome.witness().unwrap().verify(&g, conv));
        }
    }

    #[test]
    fn complete_graph_conventions() {
        let k5 = union_of_cliques(&[5]).unwrap();
        let strict = find_special_tree(&k5, 1, DEFAULT_BUDGET, TreeConvention::Strict);
        assert!(strict.outcome.is_absent());
        let loose = find_special_tree(&k5, 1, DEFAULT_BUDGET, TreeConvention::Coincident);
        assert!(loose.outcome.is_found());
    }

    #[test]
    fn three_triangles() {
        let g = union_of_cliques(&[3, 3, 3]).unwrap();
        assert!(find_special_tree(&g, 1, DEFAULT_BUDGET, TreeConvention::Strict).outcome.is_found());
        assert!(find_special_tree(&g, 2, DEFAULT_BUDGET, TreeConvention::Strict).outcome.is_absent());
        let tb = empirical_tree_bound(&g, 4, DEFAULT_BUDGET, TreeConvention::Strict);
        assert_eq!(tb.t, Some(2));
        assert!(tb.last().outcome.is_absent());
    }

    #[test]
    fn empty_graph_bound_is_one() {
        let tb = empirical_tree_bound(&Graph::empty(6), 3, DEFAULT_BUDGET, TreeConvention::Strict);
        assert_eq!(tb.t, Some(1));
    }

    #[test]
    fn dense_random_graph_has_height_two_tree() {
        let g = erdos_renyi(200, Rational::new(1, 2), 7).unwrap();
        let r = find_special_tree(&g, 2, DEFAULT_BUDGET, TreeConvention::Strict);
        assert!(r.outcome.witness().unwrap().verify(&g, TreeConvention::Strict));
    }

    #[test]
    fn half_graphs_grow_trees() {
        let g = half_graph(8).unwrap();
        let r = find_special_tree(&g, 3, DEFAULT_BUDGET, TreeConvention::Strict);
        assert!(r.outcome.is_found());
    }

    #[test]
    fn budget_exhaustion_is_inconclusive() {
        let g = erdos_renyi(60, Rational::new(1, 2), 1).unwrap();
        let r = find_special_tree(&g, 4, 3, TreeConvention::Strict);
        assert!(matches!(r.outcome, SearchOutcome::Inconclusive { .. }));
    }

    #[test]
    fn tampered_witness_fails_verification() {
        let g = special_tree_example();
        let r = find_special_tree(&g, 2, DEFAULT_BUDGET, TreeConvention::Strict);
        let mut w = r.outcome.witness().unwrap().clone();
        let a = w.leaves["11"];
        w.leaves.insert("10".into(), a);
        assert!(!w.verify(&g, TreeConvention::Strict));
    }

    #[test]
    fn agrees_with_enumeration_on_small_graphs() {
        for n in 1..=5 {
            for g in all_graphs(n) {
                for conv in [TreeConvention::Strict, TreeConvention::Coincident] {
                    for h in 1..=2 {
                        let r = find_special_tree(&g, h, DEFAULT_BUDGET, conv);
                        assert_eq!(r.outcome.is_found(), brute_force_has_tree(&g, h, conv));
                    }
                }
            }
        }
    }

    #[test]
    fn absence_bounds_half_graph_length() {
        // no height-h tree means no half-graph of length 2^(h+1)
        for n in 1..=7 {
            for g in all_graphs(n) {
                for h in 1..=2u32 {
                    let tree = find_special_tree(&g, h, DEFAULT_BUDGET, TreeConvention::Strict);
                    if tree.outcome.is_absent() {
                        let k = 1usize << (h + 1);
                        assert!(!find_half_graph(&g, k, DEFAULT_BUDGET).outcome.is_found());
                    }
                }
            }
        }
    }

    #[test]
    fn search_is_deterministic() {
        let g = erdos_renyi(80, Rational::new(1, 2), 11).unwrap();
        let a = find_special_tree(&g, 3, DEFAULT_BUDGET, TreeConvention::Strict);
        let b = find_special_tree(&g, 3, DEFAULT_BUDGET, TreeConvention::Strict);
        assert_eq!(a, b);
    }
}
