//! Majority opinions, goodness and excellence.
//!
//! A set `A` is ε-good when every vertex sees a lopsided split of it, and
//! ε-excellent when every ε-good `B` imposes a lopsided split of `A` through
//! the majority opinions `t(a, B)`. Deciding excellence exactly quantifies
//! over all good sets, so the engine works relative to a [`WitnessFamily`]
//! and keeps the exact quantifier in [`ExcellenceOracle`] for small graphs.

pub(crate) mod family;
mod oracle;

pub use family::{find_split_witness, SamplerConfig, WitnessFamily};
pub use oracle::{brute_force_excellent, mask_of, ExcellenceOracle, ORACLE_MAX_N};

use serde::Serialize;

use crate::bitset::VertexSet;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rational::{check_epsilon, lt_frac, serialize_rational, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Majority {
    Zero,
    One,
    Split,
}

impl Majority {
    pub fn value(self) -> Option<bool> {
        match self {
            Majority::Zero => Some(false),
            Majority::One => Some(true),
            Majority::Split => None,
        }
    }

    /// Majority over a set of `size` elements, `ones` of which vote 1.
    #[inline]
    pub fn of_counts(ones: usize, size: usize, eps: Rational) -> Majority {
        if lt_frac(size - ones, eps, size) {
            Majority::One
        } else if lt_frac(ones, eps, size) {
            Majority::Zero
        } else {
            Majority::Split
        }
    }
}

/// How one vertex divides a set.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OpinionSummary {
    pub majority: Majority,
    /// Members voting 1, i.e. adjacent to the vertex.
    pub ones: usize,
    pub zeros: usize,
    /// Dissenters from the majority; the smaller class when split.
    pub exceptions: usize,
    /// `ε|A|`.
    #[serde(serialize_with = "serialize_rational")]
    pub threshold: Rational,
}

impl OpinionSummary {
    pub(crate) fn from_counts(ones: usize, size: usize, eps: Rational) -> Self {
        let zeros = size - ones;
        let majority = Majority::of_counts(ones, size, eps);
        let exceptions = match majority {
            Majority::One => zeros,
            Majority::Zero => ones,
            Majority::Split => ones.min(zeros),
        };
        OpinionSummary {
            majority,
            ones,
            zeros,
            exceptions,
            threshold: eps * Rational::from_integer(size as i64),
        }
    }
}

pub(crate) fn check_nonempty(set: &VertexSet, what: &str) -> Result<()> {
    if set.is_empty() {
        return Err(Error::Precondition(format!("{what} must be nonempty")));
    }
    Ok(())
}

/// The split of `A` induced by `b`; `b` may belong to `A` (it never
/// neighbours itself, so it votes 0).
pub fn opinion(g: &Graph, b: usize, a_set: &VertexSet, eps: Rational) -> Result<OpinionSummary> {
    check_epsilon(eps)?;
    check_nonempty(a_set, "A")?;
    Ok(OpinionSummary::from_counts(g.count_in(b, a_set), a_set.len(), eps))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GoodnessCheck {
    pub good: bool,
    /// A splitting vertex with the largest minority class, lowest id first.
    pub worst: Option<usize>,
    pub worst_minority: usize,
}

/// Goodness from precomputed counts `|N(v) ∩ A|`.
pub(crate) fn goodness_from_counts(counts: &[u32], size: usize, eps: Rational) -> GoodnessCheck {
    let mut worst = None;
    let mut worst_minority = 0;
    for (v, &c) in counts.iter().enumerate() {
        let c = c as usize;
        let minority = c.min(size - c);
        if !lt_frac(minority, eps, size) && (worst.is_none() || minority > worst_minority) {
            worst = Some(v);
            worst_minority = minority;
        }
    }
    GoodnessCheck {
        good: worst.is_none(),
        worst,
        worst_minority,
    }
}

/// Whether no vertex of the graph splits `A`.
pub fn is_good(g: &Graph, a_set: &VertexSet, eps: Rational) -> Result<GoodnessCheck> {
    check_epsilon(eps)?;
    check_nonempty(a_set, "A")?;
    Ok(goodness_from_counts(&g.neighbor_counts(a_set), a_set.len(), eps))
}

/// `t(a, B)`: the majority value of `B` as seen from `a`. Defined only for
/// good `B`, which is checked.
pub fn set_opinion(g: &Graph, a: usize, b_set: &VertexSet, eps: Rational) -> Result<bool> {
    let check = is_good(g, b_set, eps)?;
    if let Some(splitter) = check.worst {
        return Err(Error::OpinionUndefined {
            epsilon: eps.to_string(),
            splitter,
        });
    }
    Ok(Majority::of_counts(g.count_in(a, b_set), b_set.len(), eps)
        .value()
        .expect("good sets have a majority"))
}

/// Opinion classes of `A` under `B`: how many `a` have `t(a, B) = 1`,
/// `= 0`, or no majority (possible only when `B` is not good).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct OpinionClasses {
    pub ones: usize,
    pub zeros: usize,
    pub undefined: usize,
}

impl OpinionClasses {
    /// Both classes reach `ε|A|`.
    pub fn splits(&self, eps: Rational) -> bool {
        let size = self.ones + self.zeros + self.undefined;
        !lt_frac(self.ones, eps, size) && !lt_frac(self.zeros, eps, size)
    }
}

pub(crate) fn opinion_classes(
    g: &Graph,
    a_set: &VertexSet,
    b_set: &VertexSet,
    eps: Rational,
) -> OpinionClasses {
    let occ = b_set.occupied_words();
    let size = b_set.len();
    let mut out = OpinionClasses::default();
    for a in a_set {
        match Majority::of_counts(g.count_in_words(a, b_set, &occ), size, eps) {
            Majority::One => out.ones += 1,
            Majority::Zero => out.zeros += 1,
            Majority::Split => out.undefined += 1,
        }
    }
    out
}

/// Where a splitting witness came from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "index")]
pub enum WitnessSource {
    Singleton(usize),
    Explicit(usize),
    Sampled(usize),
    Given,
    Exhaustive,
}

/// A good set `B` dividing `A` into two classes of size at least `ε|A|`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SplitWitness {
    pub source: WitnessSource,
    pub members: VertexSet,
    pub ones: usize,
    pub zeros: usize,
}

impl SplitWitness {
    /// Re-check goodness of `B` and both class sizes from scratch.
    pub fn verify(&self, g: &Graph, a_set: &VertexSet, eps: Rational) -> bool {
        if self.members.is_empty() || a_set.is_empty() {
            return false;
        }
        let good = goodness_from_counts(&g.neighbor_counts(&self.members), self.members.len(), eps);
        if !good.good {
            return false;
        }
        let classes = opinion_classes(g, a_set, &self.members, eps);
        classes.ones == self.ones && classes.zeros == self.zeros && classes.splits(eps)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict")]
pub enum ExcellenceVerdict {
    ExcellentWrtFamily,
    NotExcellent { witness: SplitWitness },
    ExcellentExact,
    NotExcellentExact { witness: SplitWitness },
}

impl ExcellenceVerdict {
    pub fn is_excellent(&self) -> bool {
        matches!(
            self,
            ExcellenceVerdict::ExcellentWrtFamily | ExcellenceVerdict::ExcellentExact
        )
    }

    pub fn witness(&self) -> Option<&SplitWitness> {
        match self {
            ExcellenceVerdict::NotExcellent { witness }
            | ExcellenceVerdict::NotExcellentExact { witness } => Some(witness),
            _ => None,
        }
    }
}

/// Excellence of `A` against the single good set `B`.
pub fn excellent_wrt(
    g: &Graph,
    a_set: &VertexSet,
    b_set: &VertexSet,
    eps: Rational,
) -> Result<ExcellenceVerdict> {
    check_nonempty(a_set, "A")?;
    check_nonempty(b_set, "B")?;
    let check = is_good(g, b_set, eps)?;
    if let Some(splitter) = check.worst {
        return Err(Error::OpinionUndefined {
            epsilon: eps.to_string(),
            splitter,
        });
    }
    let classes = opinion_classes(g, a_set, b_set, eps);
    Ok(if classes.splits(eps) {
        ExcellenceVerdict::NotExcellent {
            witness: SplitWitness {
                source: WitnessSource::Given,
                members: b_set.clone(),
                ones: classes.ones,
                zeros: classes.zeros,
            },
        }
    } else {
        ExcellenceVerdict::ExcellentWrtFamily
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{complete_multipartite, half_graph, union_of_cliques};
    use proptest::prelude::*;

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn opinion_examples() {
        let k4 = union_of_cliques(&[4]).unwrap();
        let o = opinion(&k4, 0, &k4.vertices(), r(3, 10)).unwrap();
        assert_eq!(o.majority, Majority::One);
        assert_eq!(o.exceptions, 1);

        let h = half_graph(5).unwrap();
        let a_side = VertexSet::from_vertices(10, 0..5);
        // b_3 has id 7 and neighbours a_1, a_2
        let o = opinion(&h, 7, &a_side, r(2, 5)).unwrap();
        assert_eq!(o.majority, Majority::Split);
        assert_eq!((o.ones, o.zeros), (2, 3));

        for b in 0..10 {
            let single = VertexSet::singleton(10, 3);
            assert_ne!(opinion(&h, b, &single, r(1, 5)).unwrap().majority, Majority::Split);
        }
    }

    #[test]
    fn goodness_examples() {
        let h = half_graph(5).unwrap();
        for v in 0..10 {
            assert!(is_good(&h, &VertexSet::singleton(10, v), r(3, 10)).unwrap().good);
        }
        let g = union_of_cliques(&[4, 4]).unwrap();
        assert!(is_good(&g, &VertexSet::from_vertices(8, 0..4), r(3, 10)).unwrap().good);

        let pair = VertexSet::from_vertices(10, [0, 4]);
        let check = is_good(&h, &pair, r(2, 5)).unwrap();
        assert!(!check.good);
        // b_2, b_3, b_4, b_5 (ids 6..=9) all split {a_1, a_5}; b_2 is the first
        assert_eq!(check.worst, Some(6));
        assert_eq!(check.worst_minority, 1);
        assert!(h.has_edge(0, 7) && !h.has_edge(4, 7));
    }

    #[test]
    fn set_opinion_examples() {
        let h = half_graph(5).unwrap();
        let b5 = VertexSet::singleton(10, 9);
        assert!(set_opinion(&h, 0, &b5, r(1, 5)).unwrap());
        assert!(!set_opinion(&h, 4, &b5, r(1, 5)).unwrap());
        let k33 = complete_multipartite(&[3, 3]).unwrap();
        let y = VertexSet::from_vertices(6, 3..6);
        assert!(set_opinion(&k33, 0, &y, r(3, 10)).unwrap());
        let bad = VertexSet::from_vertices(10, [0, 4]);
        assert!(matches!(
            set_opinion(&h, 9, &bad, r(2, 5)),
            Err(Error::OpinionUndefined { .. })
        ));
    }

    #[test]
    fn excellent_wrt_examples() {
        let h = half_graph(5).unwrap();
        let a_side = VertexSet::from_vertices(10, 0..5);
        let v = excellent_wrt(&h, &a_side, &VertexSet::singleton(10, 7), r(2, 5)).unwrap();
        let w = v.witness().unwrap();
        assert_eq!((w.ones, w.zeros), (2, 3));
        assert!(w.verify(&h, &a_side, r(2, 5)));

        let g = union_of_cliques(&[4, 4, 4]).unwrap();
        let clique = VertexSet::from_vertices(12, 0..4);
        for a in 0..4 {
            let v = excellent_wrt(&g, &clique, &VertexSet::singleton(12, a), r(3, 10)).unwrap();
            assert!(v.is_excellent());
        }
        let one = VertexSet::singleton(12, 5);
        for b in 0..12 {
            assert!(excellent_wrt(&g, &one, &VertexSet::singleton(12, b), r(1, 5))
                .unwrap()
                .is_excellent());
        }
    }

    #[test]
    fn goodness_is_not_inherited_by_subsets() {
        // a_2 splits the b-side of half_graph(6) as 4 / 2; pairing the smaller
        // side with two from the larger gives a balanced subset
        let h = half_graph(6).unwrap();
        let eps = r(3, 10);
        let a = VertexSet::from_vertices(12, [6, 7, 8, 9, 10, 11]);
        let o = opinion(&h, 1, &a, eps).unwrap();
        assert_eq!((o.ones, o.zeros), (4, 2));
        // a balanced subset of size 2 * 2 is split by the same vertex
        let sub = VertexSet::from_vertices(12, [6, 7, 10, 11]);
        assert_eq!(opinion(&h, 1, &sub, eps).unwrap().majority, Majority::Split);
        assert!(!is_good(&h, &sub, eps).unwrap().good);

        let g = union_of_cliques(&[9, 1]).unwrap();
        let big = VertexSet::from_vertices(10, 0..10);
        assert!(is_good(&g, &big, eps).unwrap().good);
        let balanced = VertexSet::from_vertices(10, [0, 9]);
        assert!(!is_good(&g, &balanced, eps).unwrap().good);
    }

    proptest! {
        #[test]
        fn opinion_classes_partition_the_set(
            seed in 0u64..500,
            b in 0usize..12,
            mask in 1u32..(1 << 12),
        ) {
            let g = crate::generators::erdos_renyi(12, r(1, 2), seed).unwrap();
            let a = VertexSet::from_vertices(12, (0..12).filter(|i| mask >> i & 1 == 1));
            let o = opinion(&g, b, &a, r(1, 5)).unwrap();
            prop_assert_eq!(o.ones + o.zeros, a.len());
            prop_assert!(o.exceptions <= a.len() / 2);
            if o.majority != Majority::Split {
                prop_assert!(lt_frac(o.exceptions, r(1, 5), a.len()));
            }
        }
    }
}
