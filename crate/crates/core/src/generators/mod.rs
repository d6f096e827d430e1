//! Seeded constructions of the graph families used by tests and benchmarks.
//!
//! All randomness comes from ChaCha8, so a seed reproduces the same graph on
//! every platform.

mod enumerate;

pub use enumerate::{all_graphs, canonical_code, oracle_corpus};

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Graph, GraphBuilder};
use crate::rational::Rational;

pub(crate) fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Vertex ids of the standard half-graph layout: `a_i = i - 1`, `b_j = k + j - 1`.
pub fn half_graph(k: usize) -> Result<Graph> {
    if k == 0 {
        return Err(Error::InvalidParameter("half-graph length must be >= 1".into()));
    }
    let mut b = GraphBuilder::new(2 * k);
    for i in 0..k {
        for j in i + 1..k {
            b.add_edge(i, k + j);
        }
    }
    Ok(b.build())
}

/// Disjoint cliques with consecutive vertex ids.
pub fn union_of_cliques(sizes: &[usize]) -> Result<Graph> {
    check_sizes(sizes)?;
    let n = sizes.iter().sum();
    let mut b = GraphBuilder::new(n);
    let mut start = 0;
    for &s in sizes {
        for u in start..start + s {
            for v in u + 1..start + s {
                b.add_edge(u, v);
            }
        }
        start += s;
    }
    Ok(b.build())
}

pub fn complete_multipartite(sizes: &[usize]) -> Result<Graph> {
    check_sizes(sizes)?;
    let n = sizes.iter().sum();
    let part: Vec<usize> = sizes
        .iter()
        .enumerate()
        .flat_map(|(i, &s)| std::iter::repeat(i).take(s))
        .collect();
    let mut b = GraphBuilder::new(n);
    for u in 0..n {
        for v in u + 1..n {
            if part[u] != part[v] {
                b.add_edge(u, v);
            }
        }
    }
    Ok(b.build())
}

fn check_sizes(sizes: &[usize]) -> Result<()> {
    if sizes.is_empty() {
        return Err(Error::InvalidParameter("size list is empty".into()));
    }
    if sizes.contains(&0) {
        return Err(Error::InvalidParameter("part sizes must be >= 1".into()));
    }
    Ok(())
}

/// G(n, p): every unordered pair, in lexicographic order, is kept with probability `p`.
pub fn erdos_renyi(n: usize, p: Rational, seed: u64) -> Result<Graph> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be >= 1".into()));
    }
    if p < Rational::from_integer(0) || p > Rational::from_integer(1) {
        return Err(Error::InvalidParameter(format!("p must lie in [0, 1], got {p}")));
    }
    let (num, den) = (*p.numer() as u64, *p.denom() as u64);
    let mut rng = rng_for(seed, 0);
    let mut b = GraphBuilder::new(n);
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_range(0..den) < num {
                b.add_edge(u, v);
            }
        }
    }
    Ok(b.build())
}

/// Clique sizes drawn uniformly from `min..=max` until they sum to `n`; a short
/// tail is folded into the last clique.
pub fn random_clique_sizes(n: usize, min: usize, max: usize, seed: u64) -> Result<Vec<usize>> {
    if min == 0 || min > max || n < min {
        return Err(Error::InvalidParameter(format!(
            "need 1 <= min <= max and n >= min (n={n}, min={min}, max={max})"
        )));
    }
    let mut rng = rng_for(seed, 1);
    let mut sizes = Vec::new();
    let mut left = n;
    while left > 0 {
        let s = rng.gen_range(min..=max).min(left);
        if left - s < min && left - s > 0 {
            sizes.push(left);
            break;
        }
        sizes.push(s);
        left -= s;
    }
    Ok(sizes)
}

/// Vertex layout of [`special_tree_example`].
pub mod special_tree_layout {
    pub const B_ROOT: usize = 0;
    pub const B_0: usize = 1;
    pub const B_1: usize = 2;
    pub const A_00: usize = 3;
    pub const A_01: usize = 4;
    pub const A_10: usize = 5;
    pub const A_11: usize = 6;
}

/// The height-2 special tree on seven vertices, with only the four required edges.
pub fn special_tree_example() -> Graph {
    use special_tree_layout::*;
    Graph::from_edges(
        7,
        &[(B_ROOT, A_11), (B_ROOT, A_10), (B_1, A_11), (B_0, A_01)],
    )
    .expect("static edge list is valid")
}

#[derive(Clone, Debug, Serialize)]
pub struct PlantedHalfGraph {
    #[serde(skip)]
    pub graph: Graph,
    pub a: Vec<usize>,
    pub b: Vec<usize>,
}

/// Rewire `2k` randomly chosen vertices of `base` into a half-graph of length `k`.
///
/// Only the `k²` pairs `(a_i, b_j)` are overwritten; every other adjacency is
/// left exactly as in `base`.
pub fn planted_half_graph(base: &Graph, k: usize, seed: u64) -> Result<PlantedHalfGraph> {
    if k == 0 {
        return Err(Error::InvalidParameter("half-graph length must be >= 1".into()));
    }
    if base.n() < 2 * k {
        return Err(Error::InvalidParameter(format!(
            "base graph has {} vertices, planting length {k} needs {}",
            base.n(),
            2 * k
        )));
    }
    let mut rng = rng_for(seed, 2);
    let chosen = sample(&mut rng, base.n(), 2 * k).into_vec();
    let (a, b) = chosen.split_at(k);
    let mut builder = GraphBuilder::from(base);
    for (i, &ai) in a.iter().enumerate() {
        for (j, &bj) in b.iter().enumerate() {
            builder.set_edge(ai, bj, i < j);
        }
    }
    Ok(PlantedHalfGraph {
        graph: builder.build(),
        a: a.to_vec(),
        b: b.to_vec(),
    })
}

/// A generator family with its parameters; `build` is a pure function of the parameters.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum GraphFamily {
    HalfGraph { k: usize },
    Cliques { sizes: Vec<usize> },
    RandomCliques { n: usize, min: usize, max: usize, seed: u64 },
    Multipartite { sizes: Vec<usize> },
    Gnp { n: usize, p_num: i64, p_den: i64, seed: u64 },
    Planted { base: Box<GraphFamily>, k: usize, seed: u64 },
    SpecialTreeExample,
}

impl GraphFamily {
    pub fn build(&self) -> Result<Graph> {
        match self {
            GraphFamily::HalfGraph { k } => half_graph(*k),
            GraphFamily::Cliques { sizes } => union_of_cliques(sizes),
            GraphFamily::RandomCliques { n, min, max, seed } => {
                union_of_cliques(&random_clique_sizes(*n, *min, *max, *seed)?)
            }
            GraphFamily::Multipartite { sizes } => complete_multipartite(sizes),
            GraphFamily::Gnp {
                n,
                p_num,
                p_den,
                seed,
            } => {
                if *p_den <= 0 {
                    return Err(Error::InvalidParameter("p denominator must be positive".into()));
                }
                erdos_renyi(*n, Rational::new(*p_num, *p_den), *seed)
            }
            GraphFamily::Planted { base, k, seed } => {
                Ok(planted_half_graph(&base.build()?, *k, *seed)?.graph)
            }
            GraphFamily::SpecialTreeExample => Ok(special_tree_example()),
        }
    }
}
