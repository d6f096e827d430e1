//! Exhaustive small-graph enumeration up to isomorphism, and the fixed
//! oracle corpus.

use std::collections::HashSet;

use super::{complete_multipartite, erdos_renyi, half_graph, planted_half_graph, special_tree_example, union_of_cliques};
use crate::graph::{Graph, GraphBuilder};
use crate::rational::Rational;

const MAX_ENUM: usize = 8;

/// Canonical code of a graph with at most 11 vertices: the smallest
/// upper-triangle bit code over all relabelings that list vertices by
/// non-increasing degree.
pub fn canonical_code(g: &Graph) -> u64 {
    let n = g.n();
    assert!(n <= 11, "canonical codes are limited to 11 vertices");
    let adj: Vec<u32> = (0..n)
        .map(|u| (0..n).filter(|&v| g.has_edge(u, v)).fold(0, |m, v| m | 1 << v))
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| std::cmp::Reverse(adj[v].count_ones()));
    let mut classes: Vec<(usize, usize)> = Vec::new();
    let mut start = 0;
    for i in 1..=n {
        if i == n || adj[order[i]].count_ones() != adj[order[start]].count_ones() {
            classes.push((start, i));
            start = i;
        }
    }
    let mut best = u64::MAX;
    permute_classes(&mut order, &classes, 0, &adj, &mut best);
    best
}

fn permute_classes(
    order: &mut Vec<usize>,
    classes: &[(usize, usize)],
    class: usize,
    adj: &[u32],
    best: &mut u64,
) {
    if class == classes.len() {
        *best = (*best).min(code_of(order, adj));
        return;
    }
    let (lo, hi) = classes[class];
    heap_permute(order, lo, hi, hi - lo, &mut |o| {
        permute_classes(o, classes, class + 1, adj, best)
    });
}

fn heap_permute(
    order: &mut Vec<usize>,
    lo: usize,
    hi: usize,
    k: usize,
    visit: &mut dyn FnMut(&mut Vec<usize>),
) {
    if k <= 1 {
        visit(order);
        return;
    }
    for i in 0..k {
        heap_permute(order, lo, hi, k - 1, visit);
        let j = if k % 2 == 0 { lo + i } else { lo };
        if i + 1 < k {
            order.swap(j, lo + k - 1);
        }
    }
}

fn code_of(order: &[usize], adj: &[u32]) -> u64 {
    let n = order.len();
    let mut code = 0u64;
    let mut bit = 0;
    for i in 0..n {
        for j in i + 1..n {
            if adj[order[i]] >> order[j] & 1 == 1 {
                code |= 1 << bit;
            }
            bit += 1;
        }
    }
    code
}

fn from_code(n: usize, code: u64) -> Graph {
    let mut b = GraphBuilder::new(n);
    let mut bit = 0;
    for i in 0..n {
        for j in i + 1..n {
            if code >> bit & 1 == 1 {
                b.add_edge(i, j);
            }
            bit += 1;
        }
    }
    b.build()
}

/// One representative of every isomorphism class of graphs on `n` vertices
/// (`n <= 8`), grown vertex by vertex from the classes on `n - 1` vertices.
pub fn all_graphs(n: usize) -> Vec<Graph> {
    assert!(n <= MAX_ENUM, "exhaustive enumeration is limited to {MAX_ENUM} vertices");
    if n == 0 {
        return vec![Graph::empty(0)];
    }
    let mut reps: Vec<Graph> = vec![Graph::empty(1)];
    for m in 2..=n {
        let mut seen = HashSet::new();
        let mut next = Vec::new();
        for g in &reps {
            for mask in 0u32..(1 << (m - 1)) {
                let mut b = GraphBuilder::new(m);
                for (u, v) in g.edges() {
                    b.add_edge(u, v);
                }
                for u in 0..m - 1 {
                    if mask >> u & 1 == 1 {
                        b.add_edge(u, m - 1);
                    }
                }
                let h = b.build();
                let code = canonical_code(&h);
                if seen.insert(code) {
                    next.push(from_code(m, code));
                }
            }
        }
        reps = next;
    }
    reps
}

/// The fixed 200-graph corpus (all on at most 10 vertices) used by the
/// excellence oracle suites: every family plus seeded random graphs.
pub fn oracle_corpus() -> Vec<(String, Graph)> {
    let mut out: Vec<(String, Graph)> = Vec::new();
    for k in 1..=5 {
        out.push((format!("half-graph-{k}"), half_graph(k).unwrap()));
    }
    let clique_sizes: &[&[usize]] = &[
        &[1], &[2], &[3], &[4], &[5], &[8], &[2, 2], &[3, 3], &[4, 4], &[5, 5], &[3, 3, 3],
        &[2, 2, 2, 2], &[2, 3, 4], &[1, 2, 3, 4], &[3, 3, 4], &[2, 2, 2], &[1, 1, 1, 1, 1],
        &[2, 8], &[1, 9],
    ];
    for s in clique_sizes {
        out.push((format!("cliques-{s:?}"), union_of_cliques(s).unwrap()));
    }
    let parts: &[&[usize]] = &[
        &[1, 1], &[2, 2], &[3, 3], &[4, 4], &[5, 5], &[2, 2, 2], &[3, 3, 3], &[1, 2, 3],
        &[2, 3, 4], &[1, 1, 1, 1], &[2, 2, 2, 2], &[1, 9],
    ];
    for s in parts {
        out.push((format!("multipartite-{s:?}"), complete_multipartite(s).unwrap()));
    }
    out.push(("special-tree-example".into(), special_tree_example()));
    for n in 1..=10 {
        out.push((format!("empty-{n}"), Graph::empty(n)));
    }
    for (i, (n, k)) in [(8, 2), (9, 3), (10, 3), (10, 4), (8, 4), (10, 5)].into_iter().enumerate() {
        let base = erdos_renyi(n, Rational::new(1, 2), 100 + i as u64).unwrap();
        out.push((
            format!("planted-{n}-{k}"),
            planted_half_graph(&base, k, i as u64).unwrap().graph,
        ));
    }
    let ps = [Rational::new(1, 5), Rational::new(1, 2), Rational::new(4, 5)];
    let mut seed = 0u64;
    while out.len() < 200 {
        let n = 4 + (seed as usize % 7);
        let p = ps[(seed / 7) as usize % 3];
        out.push((format!("gnp-{n}-{p}-{seed}"), erdos_renyi(n, p, seed).unwrap()));
        seed += 1;
    }
    out
}
