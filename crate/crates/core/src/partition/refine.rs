use rand::seq::SliceRandom;
use serde::Serialize;

use crate::bitset::VertexSet;
use crate::error::{Error, Result};
use crate::excellence::family::split_witness_in;
use crate::excellence::WitnessFamily;
use crate::generators::rng_for;
use crate::graph::Graph;
use crate::rational::Rational;

/// Vertices that split the piece most evenly drive the stratification.
const PIVOTS: usize = 8;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Refinement {
    pub parts: Vec<VertexSet>,
    /// Attempts used, the successful one included; 0 when no shuffle was needed.
    pub attempts: u32,
    /// Failing sub-piece count per unsuccessful attempt.
    pub failures: Vec<usize>,
}

/// Split a piece into `|piece| / c` parts of size exactly `c`, each with no
/// splitting witness in `family` at threshold `zeta`.
///
/// Each attempt shuffles the piece, stably sorts it by adjacency to a few
/// pivot vertices and deals the result round-robin, so every pivot's trace
/// is spread evenly over the parts. Failed certifications trigger a fresh
/// shuffle, at most `max_retries` times.
#[allow(clippy::too_many_arguments)]
pub fn random_refine(
    g: &Graph,
    piece: &VertexSet,
    c: usize,
    zeta: Rational,
    family: &WitnessFamily,
    seed: u64,
    stream: u64,
    max_retries: u32,
) -> Result<Refinement> {
    if c == 0 || piece.is_empty() || piece.len() % c != 0 {
        return Err(Error::Precondition(format!(
            "piece size {} is not a positive multiple of {c}",
            piece.len()
        )));
    }
    let r = piece.len() / c;
    let certify = |part: &VertexSet, k: u64| {
        split_witness_in(g, part, zeta, family, seed, stream.wrapping_mul(1 << 20).wrapping_add(k))
    };
    if r == 1 {
        return match certify(piece, 0) {
            None => Ok(Refinement {
                parts: vec![piece.clone()],
                attempts: 0,
                failures: Vec::new(),
            }),
            Some(w) => Err(Error::RefinementExhausted {
                piece: stream as usize,
                attempts: 0,
                failing: piece.to_vec(),
                witness_size: w.members.len(),
            }),
        };
    }

    let counts = g.neighbor_counts(piece);
    let size = piece.len();
    let mut pivots: Vec<(usize, usize)> = counts
        .iter()
        .enumerate()
        .map(|(v, &k)| (v, (k as usize).min(size - k as usize)))
        .filter(|&(_, m)| m > 0)
        .collect();
    pivots.sort_by_key(|&(v, m)| (std::cmp::Reverse(m), v));
    pivots.truncate(PIVOTS);
    let key = |a: usize| {
        pivots
            .iter()
            .fold(0u32, |k, &(b, _)| k << 1 | g.has_edge(a, b) as u32)
    };

    let mut rng = rng_for(seed, stream);
    let mut failures = Vec::new();
    let mut last_failure = None;
    let mut serial = 1u64;
    for attempt in 1..=max_retries + 1 {
        let mut order = piece.to_vec();
        order.shuffle(&mut rng);
        order.sort_by_key(|&a| key(a));
        let mut parts = vec![VertexSet::new(g.n()); r];
        for (i, a) in order.into_iter().enumerate() {
            parts[i % r].insert(a);
        }
        let mut failed = 0;
        for part in &parts {
            if let Some(w) = certify(part, serial) {
                failed += 1;
                last_failure.get_or_insert((part.to_vec(), w.members.len()));
            }
            serial += 1;
        }
        if failed == 0 {
            return Ok(Refinement {
                parts,
                attempts: attempt,
                failures,
            });
        }
        failures.push(failed);
        if attempt <= max_retries {
            last_failure = None;
        }
    }
    let (failing, witness_size) = last_failure.expect("a failing part was recorded");
    Err(Error::RefinementExhausted {
        piece: stream as usize,
        attempts: max_retries + 1,
        failing,
        witness_size,
    })
}

/// Remainder vertices, in increasing order, go to pieces `0, 1, 2, ...`
/// cyclically. Returns the index of the piece that received each vertex.
pub fn distribute_remainder(
    pieces: &mut [VertexSet],
    remainder: &VertexSet,
    s0: usize,
) -> Result<Vec<(usize, usize)>> {
    if remainder.len() >= s0.max(1) && !remainder.is_empty() {
        return Err(Error::Precondition(format!(
            "remainder of {} vertices is not below s_0 = {s0}",
            remainder.len()
        )));
    }
    if pieces.is_empty() {
        return if remainder.is_empty() {
            Ok(Vec::new())
        } else {
            Err(Error::Precondition("no pieces to receive the remainder".into()))
        };
    }
    let mut placed = Vec::with_capacity(remainder.len());
    for (i, v) in remainder.iter().enumerate() {
        let target = i % pieces.len();
        pieces[target].insert(v);
        placed.push((v, target));
    }
    Ok(placed)
}
