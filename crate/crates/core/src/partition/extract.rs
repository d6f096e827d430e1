use std::collections::BTreeMap;

use serde::Serialize;

use crate::bitset::VertexSet;
use crate::error::{Error, Result};
use crate::excellence::family::split_witness_in;
use crate::excellence::{ExcellenceOracle, SplitWitness, WitnessFamily};
use crate::graph::Graph;
use crate::rational::{lt_frac, Rational};
use crate::stability::{SpecialTreeWitness, TreeConvention};

use super::params::{PipelineParams, SizeSequence};

/// Source of witnesses against excellence at a fixed threshold.
pub trait Splitter {
    fn threshold(&self) -> Rational;
    /// A good set splitting `a_set`, or `None` when `a_set` counts as excellent.
    fn split(&mut self, a_set: &VertexSet) -> Option<SplitWitness>;
}

/// Witnesses drawn from a [`WitnessFamily`]; each call samples from its own stream.
pub struct FamilySplitter<'a> {
    pub g: &'a Graph,
    pub family: &'a WitnessFamily,
    pub eps: Rational,
    pub seed: u64,
    pub stream: u64,
}

impl Splitter for FamilySplitter<'_> {
    fn threshold(&self) -> Rational {
        self.eps
    }

    fn split(&mut self, a_set: &VertexSet) -> Option<SplitWitness> {
        self.stream = self.stream.wrapping_add(1);
        split_witness_in(self.g, a_set, self.eps, self.family, self.seed, self.stream)
    }
}

/// Exact witnesses from the brute-force oracle.
pub struct OracleSplitter<'a> {
    pub oracle: &'a ExcellenceOracle,
    pub eps: Rational,
}

impl Splitter for OracleSplitter<'_> {
    fn threshold(&self) -> Rational {
        self.eps
    }

    fn split(&mut self, a_set: &VertexSet) -> Option<SplitWitness> {
        self.oracle.verdict(a_set).witness().cloned()
    }
}

/// One split node visited during the descent.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SplitRecord {
    pub path: String,
    pub size: usize,
    pub witness: SplitWitness,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Extraction {
    pub piece: VertexSet,
    /// Length of the binary path to the returned node.
    pub depth: usize,
    pub path: String,
    pub splits: Vec<SplitRecord>,
}

struct Node {
    witness: SplitWitness,
    classes: [VertexSet; 2],
}

struct Descent<'s, S: Splitter> {
    g: &'s Graph,
    splitter: &'s mut S,
    t: usize,
    sizes: Option<&'s SizeSequence>,
    nodes: BTreeMap<String, Node>,
    splits: Vec<SplitRecord>,
}

impl<S: Splitter> Descent<'_, S> {
    fn visit(&mut self, set: VertexSet, path: &mut String) -> Option<(VertexSet, String)> {
        let depth = path.len();
        let Some(witness) = self.splitter.split(&set) else {
            return Some((set, path.clone()));
        };
        let eps = self.splitter.threshold();
        let members = &witness.members;
        let occ = members.occupied_words();
        let mut classes = [VertexSet::new(self.g.n()), VertexSet::new(self.g.n())];
        for a in &set {
            let ones = self.g.count_in_words(a, members, &occ);
            let bit = lt_frac(members.len() - ones, eps, members.len());
            classes[bit as usize].insert(a);
        }
        self.splits.push(SplitRecord {
            path: path.clone(),
            size: set.len(),
            witness: witness.clone(),
        });
        self.nodes.insert(
            path.clone(),
            Node {
                witness,
                classes: classes.clone(),
            },
        );
        if depth + 1 >= self.t {
            return None;
        }
        for (bit, class) in ["0", "1"].into_iter().zip(classes) {
            let child = match self.sizes.and_then(|s| s.get(depth + 1)) {
                Some(size) => class.take_first(size),
                None => class,
            };
            path.push_str(bit);
            let found = self.visit(child, path);
            path.pop();
            if found.is_some() {
                return found;
            }
        }
        None
    }

    /// Assemble a height-`t` special tree from a fully split descent: leaves
    /// from the depth-`t` classes, each node from its witness minus the
    /// vertices that disagree with a descendant leaf.
    fn tree(&self, convention: TreeConvention) -> Option<SpecialTreeWitness> {
        let t = self.t;
        let mut leaves = BTreeMap::new();
        for eta in (0..1usize << t).map(|x| format!("{x:0t$b}")) {
            let parent = &self.nodes[&eta[..t - 1]];
            let class = &parent.classes[(eta.as_bytes()[t - 1] - b'0') as usize];
            let ancestors: Vec<&VertexSet> =
                (0..t).map(|m| &self.nodes[&eta[..m]].witness.members).collect();
            let a = class
                .iter()
                .find(|&v| ancestors.iter().all(|b| !b.contains(v)))
                .or_else(|| class.first())?;
            leaves.insert(eta, a);
        }
        let mut nodes = BTreeMap::new();
        for (rho, node) in &self.nodes {
            let below: Vec<(&String, &usize)> =
                leaves.iter().filter(|(eta, _)| eta.starts_with(rho.as_str())).collect();
            let b_set = &node.witness.members;
            let b = b_set.iter().find(|&b| {
                below.iter().all(|(eta, &a)| {
                    let want = eta.as_bytes()[rho.len()] == b'1';
                    let distinct = convention == TreeConvention::Coincident || a != b;
                    distinct && self.g.has_edge(a, b) == want
                })
            })?;
            nodes.insert(rho.clone(), b);
        }
        let w = SpecialTreeWitness {
            height: t as u32,
            nodes,
            leaves,
        };
        w.verify(self.g, convention).then_some(w)
    }
}

fn descend<S: Splitter>(
    g: &Graph,
    root: VertexSet,
    t: u32,
    sizes: Option<&SizeSequence>,
    splitter: &mut S,
    convention: TreeConvention,
) -> Result<Extraction> {
    let mut d = Descent {
        g,
        splitter,
        t: t as usize,
        sizes,
        nodes: BTreeMap::new(),
        splits: Vec::new(),
    };
    let mut path = String::new();
    match d.visit(root, &mut path) {
        Some((piece, path)) => Ok(Extraction {
            piece,
            depth: path.len(),
            path,
            splits: d.splits,
        }),
        None => Err(Error::TreeBoundContradiction {
            t,
            witness: d.tree(convention).map(Box::new),
        }),
    }
}

/// `ceil(1/ε^t)` as an integer, saturating.
pub(crate) fn inverse_power(eps: Rational, t: u32) -> usize {
    let mut acc = Rational::from_integer(1);
    let inv = eps.recip();
    for _ in 0..t {
        acc *= inv;
        if acc > Rational::from_integer(1 << 40) {
            return usize::MAX;
        }
    }
    acc.ceil().to_integer() as usize
}

/// An `α`-excellent subset of `A` whose size is a term of `sizes`.
///
/// The descent starts from the first `s_0` members of `A`, splits each
/// non-excellent node by its witness, and trims both classes to the next
/// size. Splitting every node down to depth `t` would assemble a special
/// tree of height `t`, so running out of nodes is reported as a
/// contradiction of the tree bound together with the reconstructed tree.
pub fn extract_excellent<S: Splitter>(
    g: &Graph,
    a_set: &VertexSet,
    params: &PipelineParams,
    sizes: &SizeSequence,
    splitter: &mut S,
) -> Result<Extraction> {
    let eps = splitter.threshold();
    let need = sizes.first().max(inverse_power(eps, params.t));
    if a_set.len() < need {
        return Err(Error::Precondition(format!(
            "extraction needs |A| >= max(s_0, 1/eps^t) = {need}, got {}",
            a_set.len()
        )));
    }
    descend(
        g,
        a_set.take_first(sizes.first()),
        params.t,
        Some(sizes),
        splitter,
        params.config.convention,
    )
}

/// The unsized descent: children keep their whole opinion class, so the
/// result has size at least `ε^depth |A|`.
pub fn extract_unsized<S: Splitter>(
    g: &Graph,
    a_set: &VertexSet,
    t: u32,
    splitter: &mut S,
    convention: TreeConvention,
) -> Result<Extraction> {
    if a_set.is_empty() || t == 0 {
        return Err(Error::Precondition("extraction needs a nonempty set and t >= 1".into()));
    }
    descend(g, a_set.clone(), t, None, splitter, convention)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::excellence::{ExcellenceOracle, SamplerConfig};
    use crate::generators::{planted_half_graph, union_of_cliques};
    use crate::partition::params::{make_params, PipelineConfig};

    #[test]
    fn clique_root_is_kept_whole() {
        let g = union_of_cliques(&[1000, 300, 400]).unwrap();
        let (p, s) = make_params(30000, Rational::new(1, 5), 2, PipelineConfig::default()).unwrap();
        let family = WitnessFamily::new(Some(SamplerConfig::default()));
        let mut sp = FamilySplitter {
            g: &g,
            family: &family,
            eps: p.alpha,
            seed: 1,
            stream: 0,
        };
        let ext = extract_excellent(&g, &VertexSet::from_vertices(g.n(), 0..1000), &p, &s, &mut sp).unwrap();
        assert_eq!(ext.piece.len(), 740);
        assert_eq!(ext.depth, 0);
    }

    #[test]
    fn planted_half_graph_forces_a_split() {
        let base = union_of_cliques(&[400, 400]).unwrap();
        let planted = planted_half_graph(&base, 4, 4).unwrap();
        let g = planted.graph;
        let (p, s) = make_params(30000, Rational::new(1, 5), 2, PipelineConfig::default()).unwrap();
        let family = WitnessFamily::new(None);
        let mut sp = FamilySplitter {
            g: &g,
            family: &family,
            eps: p.alpha,
            seed: 1,
            stream: 0,
        };
        let ext = extract_excellent(&g, &g.vertices(), &p, &s, &mut sp).unwrap();
        assert!(ext.depth >= 1);
        assert_eq!(ext.piece.len(), s.get(ext.depth).unwrap());
        assert!(ext.splits[0].witness.verify(&g, &g.vertices().take_first(740), p.alpha));
        assert!(split_witness_in(&g, &ext.piece, p.alpha, &family, 1, 99).is_none());
    }

    #[test]
    fn long_planted_half_graph_contradicts_t_two() {
        // a half-graph of length 60 carries special trees of height 2, so
        // the descent runs out of depth and hands back a verified tree
        let base = union_of_cliques(&[400, 400]).unwrap();
        let g = planted_half_graph(&base, 60, 4).unwrap().graph;
        let (p, s) = make_params(30000, Rational::new(1, 5), 2, PipelineConfig::default()).unwrap();
        let family = WitnessFamily::new(None);
        let mut sp = FamilySplitter {
            g: &g,
            family: &family,
            eps: p.alpha,
            seed: 1,
            stream: 0,
        };
        match extract_excellent(&g, &g.vertices(), &p, &s, &mut sp) {
            Err(Error::TreeBoundContradiction { t: 2, witness: Some(w) }) => {
                assert!(w.verify(&g, TreeConvention::Strict))
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn undersized_input_is_rejected() {
        let g = union_of_cliques(&[100]).unwrap();
        let (p, s) = make_params(30000, Rational::new(1, 5), 2, PipelineConfig::default()).unwrap();
        let family = WitnessFamily::singletons_only();
        let mut sp = FamilySplitter {
            g: &g,
            family: &family,
            eps: p.alpha,
            seed: 0,
            stream: 0,
        };
        assert!(matches!(
            extract_excellent(&g, &g.vertices(), &p, &s, &mut sp),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn exhausted_descent_rebuilds_a_tree() {
        // with t = 1 any split contradicts the bound; the root witness and
        // its two classes form a height-1 tree
        let g = union_of_cliques(&[3, 3]).unwrap();
        let eps = Rational::new(1, 5);
        let oracle = ExcellenceOracle::new(&g, eps).unwrap();
        let mut sp = OracleSplitter { oracle: &oracle, eps };
        let err = extract_unsized(&g, &g.vertices(), 1, &mut sp, TreeConvention::Strict).unwrap_err();
        match err {
            Error::TreeBoundContradiction { t: 1, witness: Some(w) } => {
                assert!(w.verify(&g, TreeConvention::Strict))
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn inverse_powers() {
        assert_eq!(inverse_power(Rational::new(1, 20), 2), 400);
        assert_eq!(inverse_power(Rational::new(3, 10), 2), 12);
        assert_eq!(inverse_power(Rational::new(1, 5), 1), 5);
    }
}
