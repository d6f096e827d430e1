use serde::Serialize;

use super::{Budget, OutOfBudget, SearchOutcome, SearchResult};
use crate::bitset::VertexSet;
use crate::graph::Graph;

/// Distinct vertices `a_1..a_k`, `b_1..b_k` with `R(a_i, b_j)` iff `i < j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HalfGraphWitness {
    pub a: Vec<usize>,
    pub b: Vec<usize>,
}

impl HalfGraphWitness {
    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    /// Re-check every pattern constraint and distinctness against `g`.
    pub fn verify(&self, g: &Graph) -> bool {
        let k = self.a.len();
        if self.b.len() != k {
            return false;
        }
        let mut all: Vec<usize> = self.a.iter().chain(&self.b).copied().collect();
        if all.iter().any(|&v| v >= g.n()) {
            return false;
        }
        all.sort_unstable();
        all.dedup();
        if all.len() != 2 * k {
            return false;
        }
        (0..k).all(|i| (0..k).all(|j| g.has_edge(self.a[i], self.b[j]) == (i < j)))
    }

    /// The witness restricted to its first `k` pairs.
    pub fn prefix(&self, k: usize) -> HalfGraphWitness {
        HalfGraphWitness {
            a: self.a[..k].to_vec(),
            b: self.b[..k].to_vec(),
        }
    }
}

struct HalfGraphSearch<'g> {
    g: &'g Graph,
    k: usize,
    budget: Budget,
    a: Vec<usize>,
    b: Vec<usize>,
}

impl HalfGraphSearch<'_> {
    /// `a_cand`: unused vertices non-adjacent to every chosen `b`.
    /// `b_cand`: unused vertices adjacent to every chosen `a`.
    fn extend(
        &mut self,
        a_cand: &VertexSet,
        b_cand: &VertexSet,
    ) -> std::result::Result<bool, OutOfBudget> {
        let depth = self.a.len();
        if depth == self.k {
            return Ok(true);
        }
        let left = self.k - depth - 1;
        for a in a_cand {
            self.budget.tick()?;
            let na = self.g.neighbors(a);
            let mut b_opts = b_cand.difference(&na);
            b_opts.remove(a);
            if b_opts.is_empty() {
                continue;
            }
            let b_next = b_cand.intersection(&na);
            if b_next.len() < left {
                continue;
            }
            let mut a_base = a_cand.clone();
            a_base.remove(a);
            self.a.push(a);
            for b in &b_opts {
                self.budget.tick()?;
                let mut a_next = a_base.difference(&self.g.neighbors(b));
                a_next.remove(b);
                if a_next.len() < left {
                    continue;
                }
                self.b.push(b);
                if self.extend(&a_next, &b_next)? {
                    return Ok(true);
                }
                self.b.pop();
            }
            self.a.pop();
        }
        Ok(false)
    }
}

/// Exact, budgeted backtracking search for a half-graph of length `k`.
///
/// Pairs `(a_i, b_i)` are chosen in order; the candidate sets for later
/// positions are narrowed by bit-row intersections so every partial
/// assignment already satisfies all constraints among its members.
pub fn find_half_graph(g: &Graph, k: usize, budget: u64) -> SearchResult<HalfGraphWitness> {
    assert!(k >= 1, "half-graph length must be >= 1");
    let mut search = HalfGraphSearch {
        g,
        k,
        budget: Budget::new(budget),
        a: Vec::with_capacity(k),
        b: Vec::with_capacity(k),
    };
    if g.n() < 2 * k {
        return SearchResult {
            outcome: SearchOutcome::CertifiedAbsent,
            nodes_explored: 0,
        };
    }
    let all = g.vertices();
    let outcome = match search.extend(&all, &all) {
        Ok(true) => {
            let w = HalfGraphWitness {
                a: search.a.clone(),
                b: search.b.clone(),
            };
            debug_assert!(w.verify(g));
            SearchOutcome::Found(w)
        }
        Ok(false) => SearchOutcome::CertifiedAbsent,
        Err(OutOfBudget) => SearchOutcome::Inconclusive {
            nodes_explored: search.budget.used(),
        },
    };
    SearchResult {
        outcome,
        nodes_explored: search.budget.used().min(budget),
    }
}

/// Largest `k <= cap` with a half-graph of length `k`, together with the
/// outcome at every level tried (the last entry is the first non-Found level,
/// unless `cap` itself was reached).
pub fn max_half_graph_length(
    g: &Graph,
    cap: usize,
    budget: u64,
) -> (usize, Vec<(usize, SearchResult<HalfGraphWitness>)>) {
    assert!(cap >= 1, "cap must be >= 1");
    let mut best = 0;
    let mut levels = Vec::new();
    for k in 1..=cap {
        let r = find_half_graph(g, k, budget);
        let found = r.outcome.is_found();
        levels.push((k, r));
        if !found {
            break;
        }
        best = k;
    }
    (best, levels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{complete_multipartite, half_graph, union_of_cliques};
    use crate::stability::DEFAULT_BUDGET;

    /// Plain enumeration over ordered 2k-tuples; independent of the search.
    fn brute_force_has_half_graph(g: &Graph, k: usize) -> bool {
        fn rec(g: &Graph, k: usize, a: &mut Vec<usize>, b: &mut Vec<usize>) -> bool {
            if a.len() == k && b.len() == k {
                let w = HalfGraphWitness {
                    a: a.clone(),
                    b: b.clone(),
                };
                return w.verify(g);
            }
            for v in 0..g.n() {
                if a.contains(&v) || b.contains(&v) {
                    continue;
                }
                if a.len() < k {
                    a.push(v);
                    if rec(g, k, a, b) {
                        return true;
                    }
                    a.pop();
                } else {
                    b.push(v);
                    if rec(g, k, a, b) {
                        return true;
                    }
                    b.pop();
                }
            }
            false
        }
        rec(g, k, &mut Vec::new(), &mut Vec::new())
    }

    #[test]
    fn finds_the_planted_labeling() {
        let g = half_graph(5).unwrap();
        let r = find_half_graph(&g, 5, DEFAULT_BUDGET);
        let w = r.outcome.witness().expect("found");
        assert!(w.verify(&g));
        assert_eq!(w.len(), 5);
        // b_1 sees nothing, so it can stand in for a_5
        assert_eq!(w.a[..4], [0, 1, 2, 3]);
    }

    #[test]
    fn certified_absences() {
        let g = union_of_cliques(&[3, 3, 3]).unwrap();
        assert!(find_half_graph(&g, 3, DEFAULT_BUDGET).outcome.is_absent());
        assert!(!brute_force_has_half_graph(&g, 3));
        let k6 = union_of_cliques(&[6]).unwrap();
        assert!(find_half_graph(&k6, 2, DEFAULT_BUDGET).outcome.is_absent());
    }

    #[test]
    fn max_length_examples() {
        let (len, levels) = max_half_graph_length(&half_graph(4).unwrap(), 6, DEFAULT_BUDGET);
        assert_eq!(len, 4);
        assert!(levels.last().unwrap().1.outcome.is_absent());

        let (len, _) = max_half_graph_length(&union_of_cliques(&[5]).unwrap(), 3, DEFAULT_BUDGET);
        assert_eq!(len, 0);

        let (len, _) = max_half_graph_length(&union_of_cliques(&[3, 3]).unwrap(), 3, DEFAULT_BUDGET);
        assert_eq!(len, 1);
    }

    #[test]
    fn clique_families_have_small_half_graphs() {
        let three = union_of_cliques(&[3, 3, 3]).unwrap();
        assert_eq!(max_half_graph_length(&three, 4, DEFAULT_BUDGET).0, 2);
        let two = union_of_cliques(&[4, 4]).unwrap();
        assert_eq!(max_half_graph_length(&two, 4, DEFAULT_BUDGET).0, 1);
        let multi = complete_multipartite(&[3, 3, 3]).unwrap();
        assert_eq!(max_half_graph_length(&multi, 4, DEFAULT_BUDGET).0, 1);
    }

    #[test]
    fn budget_exhaustion_is_inconclusive() {
        let g = union_of_cliques(&[4, 4, 4, 4]).unwrap();
        let r = find_half_graph(&g, 3, 5);
        assert!(matches!(r.outcome, SearchOutcome::Inconclusive { .. }));
    }

    #[test]
    fn agrees_with_enumeration_on_small_graphs() {
        for n in 2..=6 {
            for g in crate::generators::all_graphs(n) {
                for k in 1..=3 {
                    let fast = find_half_graph(&g, k, DEFAULT_BUDGET);
                    assert_eq!(
                        fast.outcome.is_found(),
                        brute_force_has_half_graph(&g, k),
                        "n={n} k={k} {:?}",
                        g.edges().collect::<Vec<_>>()
                    );
                    if let Some(w) = fast.outcome.witness() {
                        assert!(w.verify(&g));
                        // prefixes of witnesses are witnesses
                        for j in 1..k {
                            assert!(w.prefix(j).verify(&g));
                        }
                    }
                }
            }
        }
    }
}
