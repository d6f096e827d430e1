use super::{check_nonempty, ExcellenceVerdict, SplitWitness, WitnessSource};
use crate::bitset::VertexSet;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rational::{check_epsilon, Rational};

pub const ORACLE_MAX_N: usize = 16;

/// Exact excellence by enumeration of every nonempty ε-good subset.
///
/// Written against plain adjacency masks and its own threshold arithmetic
/// so that it shares no counting code with the engine it checks.
#[derive(Clone, Debug)]
pub struct ExcellenceOracle {
    n: usize,
    adj: Vec<u32>,
    num: i64,
    den: i64,
    good: Vec<u32>,
}

impl ExcellenceOracle {
    pub fn new(g: &Graph, eps: Rational) -> Result<Self> {
        check_epsilon(eps)?;
        let n = g.n();
        if n > ORACLE_MAX_N {
            return Err(Error::OracleScaleExceeded {
                size: n,
                max: ORACLE_MAX_N,
            });
        }
        let adj = (0..n)
            .map(|u| (0..n).filter(|&v| g.has_edge(u, v)).fold(0u32, |m, v| m | 1 << v))
            .collect();
        let mut oracle = ExcellenceOracle {
            n,
            adj,
            num: *eps.numer(),
            den: *eps.denom(),
            good: Vec::new(),
        };
        oracle.good = (1u32..1 << n).filter(|&m| oracle.is_good(m)).collect();
        Ok(oracle)
    }

    /// `count < ε * size`
    fn below(&self, count: u32, size: u32) -> bool {
        (count as i64) * self.den < self.num * size as i64
    }

    pub fn is_good(&self, set: u32) -> bool {
        let size = set.count_ones();
        (0..self.n).all(|v| {
            let ones = (self.adj[v] & set).count_ones();
            self.below(ones, size) || self.below(size - ones, size)
        })
    }

    /// All nonempty good sets, in increasing mask order.
    pub fn good_sets(&self) -> &[u32] {
        &self.good
    }

    /// `t(a, B)`, or `None` when `a` splits `B`.
    pub fn opinion(&self, a: usize, b_set: u32) -> Option<bool> {
        let size = b_set.count_ones();
        let ones = (self.adj[a] & b_set).count_ones();
        if self.below(size - ones, size) {
            Some(true)
        } else if self.below(ones, size) {
            Some(false)
        } else {
            None
        }
    }

    /// Sizes of `{a ∈ A : t(a, B) = 1}` and `{a ∈ A : t(a, B) = 0}`.
    pub fn classes(&self, a_set: u32, b_set: u32) -> (u32, u32) {
        let mut ones = 0;
        let mut zeros = 0;
        for a in 0..self.n {
            if a_set >> a & 1 == 1 {
                match self.opinion(a, b_set) {
                    Some(true) => ones += 1,
                    Some(false) => zeros += 1,
                    None => {}
                }
            }
        }
        (ones, zeros)
    }

    /// Whether good `B` witnesses that `A` is not excellent.
    pub fn splits(&self, a_set: u32, b_set: u32) -> bool {
        let size = a_set.count_ones();
        let (ones, zeros) = self.classes(a_set, b_set);
        !self.below(ones, size) && !self.below(zeros, size)
    }

    pub fn is_excellent(&self, a_set: u32) -> bool {
        self.good.iter().all(|&b| !self.splits(a_set, b))
    }

    /// Exact verdict; the witness is the good set with the smallest mask.
    pub fn verdict(&self, a_set: &VertexSet) -> ExcellenceVerdict {
        let a = mask_of(a_set);
        match self.good.iter().find(|&&b| self.splits(a, b)) {
            None => ExcellenceVerdict::ExcellentExact,
            Some(&b) => {
                let (ones, zeros) = self.classes(a, b);
                ExcellenceVerdict::NotExcellentExact {
                    witness: SplitWitness {
                        source: WitnessSource::Exhaustive,
                        members: VertexSet::from_vertices(self.n, (0..self.n).filter(|v| b >> v & 1 == 1)),
                        ones: ones as usize,
                        zeros: zeros as usize,
                    },
                }
            }
        }
    }
}

/// Bit mask of a set in a graph with at most 32 vertices.
pub fn mask_of(set: &VertexSet) -> u32 {
    assert!(set.universe() <= 32);
    set.iter().fold(0, |m, v| m | 1 << v)
}

/// Exact excellence of `A` against every nonempty ε-good subset of `G`.
pub fn brute_force_excellent(g: &Graph, a_set: &VertexSet, eps: Rational) -> Result<ExcellenceVerdict> {
    check_nonempty(a_set, "A")?;
    Ok(ExcellenceOracle::new(g, eps)?.verdict(a_set))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::excellence::{excellent_wrt, is_good};
    use crate::generators::{all_graphs, half_graph, union_of_cliques};

    #[test]
    fn singletons_are_excellent() {
        for g in all_graphs(8).into_iter().step_by(97) {
            let oracle = ExcellenceOracle::new(&g, Rational::new(3, 10)).unwrap();
            for v in 0..8 {
                assert!(oracle.verdict(&VertexSet::singleton(8, v)).is_excellent());
            }
        }
    }

    #[test]
    fn half_graph_a_side_is_not_excellent() {
        let g = half_graph(4).unwrap();
        let a_side = VertexSet::from_vertices(8, 0..4);
        let v = brute_force_excellent(&g, &a_side, Rational::new(2, 5)).unwrap();
        let w = v.witness().expect("not excellent");
        // golden: the smallest good witness is {b_3}, splitting 2 / 2
        assert_eq!(w.members.to_vec(), vec![6]);
        assert_eq!((w.ones, w.zeros), (2, 2));
        assert!(w.verify(&g, &a_side, Rational::new(2, 5)));
    }

    #[test]
    fn clique_is_excellent() {
        // a vertex disagrees with the rest of its clique about itself; at
        // 3/10 that single dissent already reaches the threshold
        let g = union_of_cliques(&[3, 3]).unwrap();
        let a = VertexSet::from_vertices(6, 0..3);
        let v = brute_force_excellent(&g, &a, Rational::new(2, 5)).unwrap();
        assert_eq!(v, ExcellenceVerdict::ExcellentExact);
        let v = brute_force_excellent(&g, &a, Rational::new(3, 10)).unwrap();
        assert_eq!(v.witness().unwrap().members.to_vec(), vec![0]);
    }

    #[test]
    fn scale_guard() {
        let g = Graph::empty(17);
        assert!(matches!(
            ExcellenceOracle::new(&g, Rational::new(1, 5)),
            Err(Error::OracleScaleExceeded { .. })
        ));
    }

    #[test]
    fn agrees_with_engine_on_small_graphs() {
        for eps in [Rational::new(1, 5), Rational::new(3, 10), Rational::new(2, 5)] {
            for g in all_graphs(5) {
                let oracle = ExcellenceOracle::new(&g, eps).unwrap();
                for a in 1u32..32 {
                    let a_set = VertexSet::from_vertices(5, (0..5).filter(|v| a >> v & 1 == 1));
                    assert_eq!(oracle.is_good(a), is_good(&g, &a_set, eps).unwrap().good);
                    if oracle.is_excellent(a) {
                        assert!(oracle.is_good(a));
                    }
                    for &b in oracle.good_sets() {
                        let b_set = VertexSet::from_vertices(5, (0..5).filter(|v| b >> v & 1 == 1));
                        let engine = excellent_wrt(&g, &a_set, &b_set, eps).unwrap();
                        assert_eq!(engine.is_excellent(), !oracle.splits(a, b));
                    }
                }
            }
        }
    }
}
