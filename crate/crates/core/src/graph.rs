//! Dense bit-row graphs and the set kernels everything else is built on.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::io::BufRead;

use crate::bitset::{words_for, VertexSet, WORD};
use crate::error::{Error, Result};
use crate::rational::Rational;

/// A finite simple graph on `0..n`: symmetric, irreflexive, immutable once built.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    stride: usize,
    rows: Vec<u64>,
    degrees: Vec<u32>,
}

/// Mutable staging area for a [`Graph`].
#[derive(Clone)]
pub struct GraphBuilder {
    n: usize,
    stride: usize,
    rows: Vec<u64>,
}

impl GraphBuilder {
    pub fn new(n: usize) -> Self {
        let stride = words_for(n);
        GraphBuilder {
            n,
            stride,
            rows: vec![0; n * stride],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn set_edge(&mut self, u: usize, v: usize, present: bool) {
        assert!(u < self.n && v < self.n, "vertex out of range");
        assert_ne!(u, v, "self-loops are not allowed");
        let (iu, bu) = (u * self.stride + v / WORD, 1u64 << (v % WORD));
        let (iv, bv) = (v * self.stride + u / WORD, 1u64 << (u % WORD));
        if present {
            self.rows[iu] |= bu;
            self.rows[iv] |= bv;
        } else {
            self.rows[iu] &= !bu;
            self.rows[iv] &= !bv;
        }
    }

    pub fn add_edge(&mut self, u: usize, v: usize) {
        self.set_edge(u, v, true);
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.rows[u * self.stride + v / WORD] >> (v % WORD) & 1 == 1
    }

    pub fn build(self) -> Graph {
        let degrees = self
            .rows
            .chunks(self.stride.max(1))
            .take(self.n)
            .map(|r| r.iter().map(|w| w.count_ones()).sum())
            .collect();
        Graph {
            n: self.n,
            stride: self.stride,
            rows: self.rows,
            degrees,
        }
    }
}

impl From<&Graph> for GraphBuilder {
    fn from(g: &Graph) -> Self {
        GraphBuilder {
            n: g.n,
            stride: g.stride,
            rows: g.rows.clone(),
        }
    }
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        GraphBuilder::new(n).build()
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut b = GraphBuilder::new(n);
        for (i, &(u, v)) in edges.iter().enumerate() {
            if u == v {
                return Err(Error::SelfLoop { line: i + 1, vertex: u });
            }
            if u >= n || v >= n {
                return Err(Error::VertexOutOfRange {
                    line: i + 1,
                    id: u.max(v),
                    n,
                });
            }
            b.add_edge(u, v);
        }
        Ok(b.build())
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn row(&self, v: usize) -> &[u64] {
        &self.rows[v * self.stride..(v + 1) * self.stride]
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.rows[u * self.stride + v / WORD] >> (v % WORD) & 1 == 1
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.degrees[v] as usize
    }

    pub fn edge_count(&self) -> usize {
        self.degrees.iter().map(|&d| d as usize).sum::<usize>() / 2
    }

    pub fn vertices(&self) -> VertexSet {
        VertexSet::full(self.n)
    }

    pub fn neighbors(&self, v: usize) -> VertexSet {
        VertexSet::from_words(self.n, self.row(v).to_vec())
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .filter(move |&v| v > u)
                .map(move |v| (u, v))
                .collect::<Vec<_>>()
        })
    }

    /// `|N(v) ∩ set|`.
    #[inline]
    pub fn count_in(&self, v: usize, set: &VertexSet) -> usize {
        self.row(v)
            .iter()
            .zip(set.words())
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    /// `|N(v) ∩ set|` touching only the listed words of `set`.
    #[inline]
    pub(crate) fn count_in_words(&self, v: usize, set: &VertexSet, occupied: &[usize]) -> usize {
        let row = self.row(v);
        let words = set.words();
        occupied
            .iter()
            .map(|&i| (row[i] & words[i]).count_ones() as usize)
            .sum()
    }

    /// `|N(v) ∩ set|` for every vertex `v` of the graph.
    pub fn neighbor_counts(&self, set: &VertexSet) -> Vec<u32> {
        let occupied = set.occupied_words();
        (0..self.n)
            .map(|v| self.count_in_words(v, set, &occupied) as u32)
            .collect()
    }

    /// Union of the neighbourhoods of the members of `set`.
    pub fn neighborhood_of(&self, set: &VertexSet) -> VertexSet {
        let mut words = vec![0u64; self.stride];
        for a in set {
            for (w, r) in words.iter_mut().zip(self.row(a)) {
                *w |= r;
            }
        }
        VertexSet::from_words(self.n, words)
    }

    /// Number of ordered adjacent pairs `(a, b)` with `a ∈ a_side`, `b ∈ b_side`.
    pub fn cross_edges(&self, a_side: &VertexSet, b_side: &VertexSet) -> usize {
        let occupied = b_side.occupied_words();
        a_side
            .iter()
            .map(|a| self.count_in_words(a, b_side, &occupied))
            .sum()
    }

    /// `e(A, B) / (|A| |B|)`, counting ordered pairs with `a ≠ b`.
    pub fn density(&self, a_side: &VertexSet, b_side: &VertexSet) -> Result<Rational> {
        if a_side.is_empty() || b_side.is_empty() {
            return Err(Error::EmptySide);
        }
        let e = self.cross_edges(a_side, b_side) as i64;
        Ok(Rational::new(e, (a_side.len() * b_side.len()) as i64))
    }

    /// `{a ∈ A : R(a, b)}` for polarity `true`, `{a ∈ A : ¬R(a, b)}` for `false`.
    pub fn trace(&self, b: usize, set: &VertexSet, polarity: bool) -> VertexSet {
        let words = self
            .row(b)
            .iter()
            .zip(set.words())
            .map(|(&r, &s)| if polarity { r & s } else { !r & s })
            .collect();
        VertexSet::from_words(self.n, words)
    }

    /// Number of distinct positive traces `N(b) ∩ A` over all `b`.
    pub fn trace_count(&self, set: &VertexSet) -> usize {
        let occupied = set.occupied_words();
        let words = set.words();
        let mut seen: HashSet<Vec<u64>> = HashSet::new();
        for b in 0..self.n {
            let row = self.row(b);
            seen.insert(occupied.iter().map(|&i| row[i] & words[i]).collect());
        }
        seen.len()
    }

    /// Check the two structural invariants, symmetry and irreflexivity.
    pub fn check_invariants(&self) -> bool {
        (0..self.n).all(|u| {
            !self.has_edge(u, u) && self.neighbors(u).iter().all(|v| self.has_edge(v, u))
        })
    }

    /// Serialize as `n <count>` followed by sorted `u v` lines with `u < v`.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::with_capacity(16 + self.edge_count() * 12);
        let _ = writeln!(out, "n {}", self.n);
        for (u, v) in self.edges() {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }

    pub fn from_edge_list(text: &str) -> Result<Self> {
        load_edge_list(text.as_bytes())
    }
}

impl std::fmt::Debug for Graph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Graph {{ n: {}, edges: {} }}", self.n, self.edge_count())
    }
}

/// Parse the whitespace edge-list format.
///
/// Lines are `u v` with 0-based ids. Lines starting with `#` and blank lines
/// are skipped. An optional leading `n <count>` line fixes the vertex count;
/// otherwise it is one more than the largest id seen.
pub fn load_edge_list<R: BufRead>(reader: R) -> Result<Graph> {
    let mut declared: Option<usize> = None;
    let mut seen_data = false;
    let mut edges = Vec::new();
    let mut max_id: Option<usize> = None;

    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        if tokens[0] == "n" {
            if seen_data {
                return Err(Error::Parse {
                    line: lineno,
                    message: "vertex-count header must precede all edges".into(),
                });
            }
            if tokens.len() != 2 {
                return Err(Error::Parse {
                    line: lineno,
                    message: "expected `n <count>`".into(),
                });
            }
            declared = Some(parse_id(tokens[1], lineno)?);
            seen_data = true;
            continue;
        }
        seen_data = true;
        if tokens.len() != 2 {
            return Err(Error::Parse {
                line: lineno,
                message: format!("expected two vertex ids, found {} tokens", tokens.len()),
            });
        }
        let u = parse_id(tokens[0], lineno)?;
        let v = parse_id(tokens[1], lineno)?;
        if u == v {
            return Err(Error::SelfLoop {
                line: lineno,
                vertex: u,
            });
        }
        if let Some(n) = declared {
            if u >= n || v >= n {
                return Err(Error::VertexOutOfRange {
                    line: lineno,
                    id: u.max(v),
                    n,
                });
            }
        }
        max_id = Some(max_id.map_or(u.max(v), |m: usize| m.max(u).max(v)));
        edges.push((u, v));
    }

    let n = declared.unwrap_or_else(|| max_id.map_or(0, |m| m + 1));
    let mut b = GraphBuilder::new(n);
    for (u, v) in edges {
        b.add_edge(u, v);
    }
    Ok(b.build())
}

fn parse_id(token: &str, line: usize) -> Result<usize> {
    token.parse().map_err(|_| Error::Parse {
        line,
        message: format!("not a vertex id: {token:?}"),
    })
}
