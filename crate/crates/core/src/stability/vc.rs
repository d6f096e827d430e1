use std::collections::HashSet;

use crate::bitset::VertexSet;
use crate::error::{Error, Result};
use crate::graph::Graph;

const MAX_VC_CAP: usize = 6;
const MAX_VC_SET: usize = 128;

/// `Σ_{i<=k} C(m, i)`, saturating.
pub fn binomial_prefix_sum(m: usize, k: usize) -> u128 {
    let mut total: u128 = 0;
    let mut term: u128 = 1;
    for i in 0..=k.min(m) {
        total = total.saturating_add(term);
        // C(m, i+1) = C(m, i) * (m - i) / (i + 1)
        term = term.saturating_mul((m - i) as u128) / (i as u128 + 1);
    }
    total
}

/// Largest `d <= cap` such that some `d`-subset of `A` is shattered by the
/// traces `N(b) ∩ A` and their complements in `A`.
///
/// Elements are grouped by their membership column over the family; two
/// elements with the same column never lie in a shattered set together. A
/// depth-first search then extends subsets one column at a time, keeping
/// for each of the `2^d` patterns the family members that realise it.
pub fn vc_dimension(g: &Graph, a_set: &VertexSet, cap: usize) -> Result<usize> {
    if a_set.is_empty() {
        return Err(Error::InvalidParameter("vc_dimension needs a nonempty set".into()));
    }
    if cap > MAX_VC_CAP {
        return Err(Error::InvalidParameter(format!("vc cap must be <= {MAX_VC_CAP}")));
    }
    if a_set.len() > MAX_VC_SET {
        return Err(Error::InvalidParameter(format!(
            "vc_dimension supports |A| <= {MAX_VC_SET}"
        )));
    }
    if cap == 0 {
        return Ok(0);
    }
    let elems = a_set.to_vec();
    let full: u128 = if elems.len() == 128 { u128::MAX } else { (1u128 << elems.len()) - 1 };
    let mut family: HashSet<u128> = HashSet::new();
    for b in 0..g.n() {
        let mask = elems
            .iter()
            .enumerate()
            .filter(|&(_, &a)| g.has_edge(a, b))
            .fold(0u128, |m, (i, _)| m | 1 << i);
        family.insert(mask);
        family.insert(full & !mask);
    }
    let mut family: Vec<u128> = family.into_iter().collect();
    family.sort_unstable();
    let words = family.len().div_ceil(64);
    let mut columns: Vec<Vec<u64>> = (0..elems.len())
        .map(|i| {
            let mut col = vec![0u64; words];
            for (f, &t) in family.iter().enumerate() {
                if t >> i & 1 == 1 {
                    col[f / 64] |= 1 << (f % 64);
                }
            }
            col
        })
        .collect();
    columns.sort_unstable();
    columns.dedup();
    let mut all = vec![u64::MAX; words];
    if family.len() % 64 != 0 {
        all[words - 1] = (1 << (family.len() % 64)) - 1;
    }
    let mut search = Shatter {
        columns: &columns,
        words,
        cap,
        best: 0,
    };
    search.extend(0, 0, &all);
    Ok(search.best)
}

struct Shatter<'c> {
    columns: &'c [Vec<u64>],
    words: usize,
    cap: usize,
    best: usize,
}

impl Shatter<'_> {
    /// `cells` holds `2^depth` family masks, one per pattern. Returns true
    /// once `cap` is reached.
    fn extend(&mut self, start: usize, depth: usize, cells: &[u64]) -> bool {
        for i in start..self.columns.len() {
            if depth + (self.columns.len() - i) <= self.best {
                return false;
            }
            let col = &self.columns[i];
            let mut next = Vec::with_capacity(cells.len() * 2);
            let mut ok = true;
            for cell in cells.chunks(self.words) {
                let inside = cell.iter().zip(col).map(|(c, m)| c & m);
                let before = next.len();
                next.extend(inside);
                let outside = cell.iter().zip(col).map(|(c, m)| c & !m);
                next.extend(outside);
                let (with, without) = next[before..].split_at(self.words);
                if with.iter().all(|&w| w == 0) || without.iter().all(|&w| w == 0) {
                    ok = false;
                    break;
                }
            }
            if !ok {
                continue;
            }
            self.best = self.best.max(depth + 1);
            if self.best == self.cap || self.extend(i + 1, depth + 1, &next) {
                return true;
            }
        }
        false
    }
}

/// Whether the number of distinct traces on `A` is within the bound for a
/// `k`-edge-stable graph. Stability is the caller's claim, not checked here.
pub fn sauer_check(g: &Graph, a_set: &VertexSet, k: usize) -> bool {
    g.trace_count(a_set) as u128 <= binomial_prefix_sum(a_set.len(), k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{complete_multipartite, erdos_renyi, half_graph, union_of_cliques};
    use crate::rational::Rational;

    /// Every subset of `A` up to `cap`, every pattern, directly.
    fn naive_vc(g: &Graph, a: &[usize], cap: usize) -> usize {
        let mut best = 0;
        for mask in 1u32..1 << a.len() {
            let s: Vec<usize> = (0..a.len()).filter(|i| mask >> i & 1 == 1).map(|i| a[i]).collect();
            if s.len() > cap || s.len() <= best {
                continue;
            }
            let mut seen = std::collections::HashSet::new();
            for b in 0..g.n() {
                let row: Vec<bool> = s.iter().map(|&x| g.has_edge(x, b)).collect();
                seen.insert(row.iter().map(|&e| !e).collect::<Vec<_>>());
                seen.insert(row);
            }
            if seen.len() == 1 << s.len() {
                best = s.len();
            }
        }
        best
    }

    #[test]
    fn matches_naive_shattering() {
        for seed in 0..30 {
            let g = erdos_renyi(12, Rational::new(1, 2), seed).unwrap();
            let a: Vec<usize> = (0..9).collect();
            let set = VertexSet::from_vertices(12, a.iter().copied());
            for cap in [2, 4, 6] {
                assert_eq!(vc_dimension(&g, &set, cap).unwrap(), naive_vc(&g, &a, cap), "seed {seed}");
            }
        }
        let g = union_of_cliques(&[4, 4, 4]).unwrap();
        let a: Vec<usize> = (0..12).collect();
        assert_eq!(vc_dimension(&g, &g.vertices(), 6).unwrap(), naive_vc(&g, &a, 6));
    }

    #[test]
    fn binomial_sums() {
        assert_eq!(binomial_prefix_sum(5, 2), 16);
        assert_eq!(binomial_prefix_sum(3, 5), 8);
        assert_eq!(binomial_prefix_sum(10, 0), 1);
    }

    #[test]
    fn empty_graph_shatters_singletons() {
        let g = Graph::empty(5);
        assert_eq!(vc_dimension(&g, &g.vertices(), 6).unwrap(), 1);
    }

    #[test]
    fn bipartite_bound() {
        let g = complete_multipartite(&[3, 3]).unwrap();
        let d = vc_dimension(&g, &g.vertices(), 6).unwrap();
        assert!(d <= 4);
        assert_eq!(d, 1);
    }

    #[test]
    fn half_graph_a_side_shatters_a_pair() {
        let g = half_graph(6).unwrap();
        let a = VertexSet::from_vertices(12, 0..6);
        assert!(vc_dimension(&g, &a, 6).unwrap() >= 2);
    }

    #[test]
    fn parameter_errors() {
        let g = Graph::empty(3);
        assert!(vc_dimension(&g, &VertexSet::new(3), 2).is_err());
        assert!(vc_dimension(&g, &g.vertices(), 7).is_err());
    }

    #[test]
    fn sauer_on_stable_graphs() {
        let g = union_of_cliques(&[4, 4]).unwrap();
        for a in [g.vertices(), VertexSet::from_vertices(8, [0, 1, 4]), VertexSet::singleton(8, 2)] {
            assert!(sauer_check(&g, &a, 3));
        }
        let k5 = union_of_cliques(&[5]).unwrap();
        assert_eq!(k5.trace_count(&k5.vertices()), 5);
        assert!(sauer_check(&k5, &k5.vertices(), 2));
    }

    #[test]
    fn sauer_can_fail_without_stability() {
        let g = erdos_renyi(60, Rational::new(1, 2), 2).unwrap();
        // 60 traces on 60 points exceed the 1 + 60 bound only if enough are distinct
        let a = g.vertices();
        let bound = binomial_prefix_sum(60, 1);
        assert_eq!(sauer_check(&g, &a, 1), g.trace_count(&a) as u128 <= bound);
    }
}
