use std::cell::RefCell;
use std::collections::HashMap;

use rand::seq::index::sample;
use serde::Serialize;

use super::{check_nonempty, goodness_from_counts, opinion_classes, SplitWitness, WitnessSource};
use crate::bitset::VertexSet;
use crate::error::{Error, Result};
use crate::generators::rng_for;
use crate::graph::Graph;
use crate::rational::{check_epsilon, lt_frac, Rational};

/// Random candidate subsets of the set under test: `per_size` draws for each
/// of at most `max_sizes` sizes spread over `ceil(ε|A|) ..= ceil(|A|/4)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SamplerConfig {
    pub per_size: usize,
    pub max_sizes: usize,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            per_size: 64,
            max_sizes: 8,
        }
    }
}

impl SamplerConfig {
    pub(crate) fn sizes(&self, len: usize, eps: Rational) -> Vec<usize> {
        let lo = ceil_mul(eps, len).max(2);
        let hi = len.div_ceil(4);
        if hi < lo || self.max_sizes == 0 {
            return Vec::new();
        }
        let span = hi - lo + 1;
        let count = span.min(self.max_sizes);
        let mut out: Vec<usize> = if count == 1 {
            vec![lo]
        } else {
            (0..count).map(|i| lo + i * (span - 1) / (count - 1)).collect()
        };
        out.dedup();
        out
    }
}

/// `ceil(eps * len)`.
pub(crate) fn ceil_mul(eps: Rational, len: usize) -> usize {
    let num = *eps.numer() as i128 * len as i128;
    let den = *eps.denom() as i128;
    ((num + den - 1) / den) as usize
}

/// The candidate good sets scanned when judging excellence: every
/// singleton, then the explicit sets in insertion order, then samples.
#[derive(Debug, Default)]
pub struct WitnessFamily {
    pub singletons: bool,
    explicit: Vec<VertexSet>,
    pub sampler: Option<SamplerConfig>,
    goodness: RefCell<HashMap<(usize, Rational), bool>>,
}

impl WitnessFamily {
    pub fn singletons_only() -> Self {
        WitnessFamily {
            singletons: true,
            ..Default::default()
        }
    }

    pub fn new(sampler: Option<SamplerConfig>) -> Self {
        WitnessFamily {
            singletons: true,
            sampler,
            ..Default::default()
        }
    }

    pub fn with_sets(g: &Graph, sets: Vec<VertexSet>, sampler: Option<SamplerConfig>) -> Result<Self> {
        let mut f = WitnessFamily::new(sampler);
        for s in sets {
            if s.universe() != g.n() || s.is_empty() {
                return Err(Error::InvalidParameter(
                    "explicit witness sets must be nonempty subsets of the graph".into(),
                ));
            }
            f.explicit.push(s);
        }
        Ok(f)
    }

    pub fn push(&mut self, set: VertexSet) {
        debug_assert!(!set.is_empty());
        self.explicit.push(set);
    }

    pub fn explicit(&self) -> &[VertexSet] {
        &self.explicit
    }

    fn explicit_is_good(&self, g: &Graph, i: usize, eps: Rational) -> bool {
        if let Some(&hit) = self.goodness.borrow().get(&(i, eps)) {
            return hit;
        }
        let set = &self.explicit[i];
        let good = goodness_from_counts(&g.neighbor_counts(set), set.len(), eps).good;
        self.goodness.borrow_mut().insert((i, eps), good);
        good
    }
}

fn stream_of(set: &VertexSet) -> u64 {
    set.words()
        .iter()
        .fold(0xcbf2_9ce4_8422_2325u64, |h, &w| (h ^ w).wrapping_mul(0x1000_0000_01b3))
}

/// First family member that is ε-good and splits `A` into two opinion
/// classes of size at least `ε|A|`, in scan order. Samples are drawn from a
/// stream derived from `seed` and `A`.
pub fn find_split_witness(
    g: &Graph,
    a_set: &VertexSet,
    eps: Rational,
    family: &WitnessFamily,
    seed: u64,
) -> Result<Option<SplitWitness>> {
    check_epsilon(eps)?;
    check_nonempty(a_set, "A")?;
    Ok(split_witness_in(g, a_set, eps, family, seed, stream_of(a_set)))
}

pub(crate) fn split_witness_in(
    g: &Graph,
    a_set: &VertexSet,
    eps: Rational,
    family: &WitnessFamily,
    seed: u64,
    stream: u64,
) -> Option<SplitWitness> {
    let size = a_set.len();
    if family.singletons {
        let counts = g.neighbor_counts(a_set);
        for (b, &c) in counts.iter().enumerate() {
            let ones = c as usize;
            let zeros = size - ones;
            if !lt_frac(ones, eps, size) && !lt_frac(zeros, eps, size) {
                return Some(SplitWitness {
                    source: WitnessSource::Singleton(b),
                    members: VertexSet::singleton(g.n(), b),
                    ones,
                    zeros,
                });
            }
        }
    }
    // classes first: the goodness check is the expensive part
    for (i, b_set) in family.explicit.iter().enumerate() {
        let classes = opinion_classes(g, a_set, b_set, eps);
        if classes.splits(eps) && family.explicit_is_good(g, i, eps) {
            return Some(SplitWitness {
                source: WitnessSource::Explicit(i),
                members: b_set.clone(),
                ones: classes.ones,
                zeros: classes.zeros,
            });
        }
    }
    let sampler = family.sampler.as_ref()?;
    let elems = a_set.to_vec();
    let mut rng = rng_for(seed, stream);
    let mut index = 0;
    for m in sampler.sizes(size, eps) {
        for _ in 0..sampler.per_size {
            let b_set = VertexSet::from_vertices(g.n(), sample(&mut rng, size, m).iter().map(|i| elems[i]));
            let classes = opinion_classes(g, a_set, &b_set, eps);
            if classes.splits(eps)
                && goodness_from_counts(&g.neighbor_counts(&b_set), m, eps).good
            {
                return Some(SplitWitness {
                    source: WitnessSource::Sampled(index),
                    members: b_set,
                    ones: classes.ones,
                    zeros: classes.zeros,
                });
            }
            index += 1;
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::excellence::ExcellenceOracle;
    use crate::generators::{half_graph, union_of_cliques};

    #[test]
    fn sampler_sizes() {
        let cfg = SamplerConfig::default();
        assert_eq!(cfg.sizes(740, Rational::new(1, 20)), vec![37, 58, 79, 100, 121, 142, 163, 185]);
        assert_eq!(cfg.sizes(37, Rational::new(1, 15)), vec![3, 4, 5, 6, 7, 8, 9, 10]);
        assert!(cfg.sizes(4, Rational::new(2, 5)).is_empty());
    }

    #[test]
    fn first_singleton_in_scan_order() {
        let h = half_graph(5).unwrap();
        let a_side = VertexSet::from_vertices(10, 0..5);
        let w = find_split_witness(&h, &a_side, Rational::new(2, 5), &WitnessFamily::singletons_only(), 0)
            .unwrap()
            .unwrap();
        // b_1, b_2 split 0/5 and 1/4; b_3 is the first balanced enough
        assert_eq!(w.source, WitnessSource::Singleton(7));
        assert!(w.verify(&h, &a_side, Rational::new(2, 5)));
    }

    #[test]
    fn cliques_resist_the_full_family() {
        let g = union_of_cliques(&[5, 5]).unwrap();
        let eps = Rational::new(3, 10);
        let clique = VertexSet::from_vertices(10, 0..5);
        let family = WitnessFamily::with_sets(
            &g,
            vec![VertexSet::from_vertices(10, 5..10), clique.clone()],
            Some(SamplerConfig::default()),
        )
        .unwrap();
        assert!(find_split_witness(&g, &clique, eps, &family, 3).unwrap().is_none());
        let oracle = ExcellenceOracle::new(&g, eps).unwrap();
        assert!(oracle.verdict(&clique).is_excellent());
    }

    #[test]
    fn singletons_never_split() {
        let g = half_graph(4).unwrap();
        let family = WitnessFamily::with_sets(&g, vec![g.vertices()], Some(SamplerConfig::default())).unwrap();
        for v in 0..8 {
            let a = VertexSet::singleton(8, v);
            assert!(find_split_witness(&g, &a, Rational::new(1, 5), &family, 1).unwrap().is_none());
        }
    }

    #[test]
    fn explicit_witnesses_must_be_good() {
        // {a_1, a_4} is split by b_2 and b_3, so it may not serve as a witness
        let h = half_graph(4).unwrap();
        let eps = Rational::new(2, 5);
        let bad = VertexSet::from_vertices(8, [0, 3]);
        let family = WitnessFamily {
            singletons: false,
            explicit: vec![bad],
            sampler: None,
            goodness: Default::default(),
        };
        let target = VertexSet::from_vertices(8, [4, 5, 6, 7]);
        assert!(find_split_witness(&h, &target, eps, &family, 0).unwrap().is_none());
    }

    #[test]
    fn scan_is_deterministic() {
        let g = crate::generators::erdos_renyi(40, Rational::new(1, 2), 5).unwrap();
        let family = WitnessFamily {
            singletons: false,
            explicit: Vec::new(),
            sampler: Some(SamplerConfig::default()),
            goodness: Default::default(),
        };
        let a = VertexSet::from_vertices(40, 0..24);
        let x = find_split_witness(&g, &a, Rational::new(1, 5), &family, 9).unwrap();
        let y = find_split_witness(&g, &a, Rational::new(1, 5), &family, 9).unwrap();
        assert_eq!(x, y);
    }
}
