use std::time::Instant;

use serde::Serialize;

use crate::bitset::VertexSet;
use crate::error::{Error, Result};
use crate::excellence::family::split_witness_in;
use crate::excellence::WitnessFamily;
use crate::graph::Graph;
use crate::rational::{check_epsilon, to_f64, Rational};
use crate::regularity::{
    canonical_order, verify_partition, GraphStats, PartitionReport, PieceProvenance, PieceRecord, RetryStats,
    Timing, TreeBoundRecord, TreeLevel, TsrRecord, VerdictSection,
};
use crate::stability::{find_half_graph, find_special_tree, tree_bound_from_k, SearchOutcome};

use super::extract::{extract_excellent, Extraction, FamilySplitter};
use super::params::{check_admissible, make_params, theorem_bound, PipelineConfig, PipelineParams, SizeSequence};
use super::refine::{distribute_remainder, random_refine};
use super::Partition;

// keep the random streams of the three stages apart
const EXTRACT_SALT: u64 = 0x9e37_79b9_7f4a_7c15;
const REFINE_SALT: u64 = 0xbf58_476d_1ce4_e5b9;
const CERTIFY_SALT: u64 = 0x94d0_49bb_1331_11eb;

/// Where the tree bound `t` comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TreeBoundMode {
    /// Smallest height at which the search certifies that no tree exists.
    Auto,
    /// Taken on trust.
    Fixed(u32),
    /// Derived from the absence of a half-graph of length `k`.
    FromK(u32),
}

fn resolve_tree_bound(g: &Graph, eps: Rational, mode: TreeBoundMode, config: &PipelineConfig) -> Result<TreeBoundRecord> {
    let convention = config.convention;
    match mode {
        TreeBoundMode::Fixed(t) => {
            check_admissible(eps, t)?;
            Ok(TreeBoundRecord {
                mode: "fixed",
                t,
                certified: false,
                convention,
                levels: Vec::new(),
            })
        }
        TreeBoundMode::FromK(k) => {
            let t = u32::try_from(tree_bound_from_k(k)?).map_err(|_| Error::Overflow("tree bound"))?;
            check_admissible(eps, t)?;
            let r = find_half_graph(g, k as usize, config.budget);
            match r.outcome {
                SearchOutcome::Found(_) => Err(Error::Precondition(format!(
                    "the graph contains a half-graph of length {k}"
                ))),
                SearchOutcome::Inconclusive { nodes_explored } => Err(Error::BudgetExhausted {
                    stage: "half-graph search",
                    nodes: nodes_explored,
                }),
                SearchOutcome::CertifiedAbsent => Ok(TreeBoundRecord {
                    mode: "from-k",
                    t,
                    certified: true,
                    convention,
                    levels: Vec::new(),
                }),
            }
        }
        TreeBoundMode::Auto => {
            let mut levels = Vec::new();
            for h in 1..=config.tree_cap {
                let r = find_special_tree(g, h, config.budget, convention);
                levels.push(TreeLevel {
                    height: h,
                    outcome: r.outcome.label(),
                    nodes_explored: r.nodes_explored,
                });
                match r.outcome {
                    SearchOutcome::CertifiedAbsent => {
                        return Ok(TreeBoundRecord {
                            mode: "auto",
                            t: h,
                            certified: true,
                            convention,
                            levels,
                        })
                    }
                    SearchOutcome::Inconclusive { nodes_explored } => {
                        return Err(Error::BudgetExhausted {
                            stage: "special-tree search",
                            nodes: nodes_explored,
                        })
                    }
                    SearchOutcome::Found(w) => {
                        if check_admissible(eps, h + 1).is_err() {
                            return Err(Error::NotStable {
                                height: h,
                                epsilon: eps.to_string(),
                                witness: Box::new(w),
                            });
                        }
                    }
                }
            }
            Err(Error::Precondition(format!(
                "special trees exist at every height up to the cap {}",
                config.tree_cap
            )))
        }
    }
}

/// The first pass: excellent pieces at `α` until fewer than `s_0` vertices remain.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Cover {
    pub pieces: Vec<Extraction>,
    pub remainder: VertexSet,
}

/// Extract excellent pieces from the remaining vertices until fewer than
/// `s_0` are left. Every piece joins `family` as soon as it is produced.
pub fn greedy_cover(
    g: &Graph,
    params: &PipelineParams,
    sizes: &SizeSequence,
    family: &mut WitnessFamily,
) -> Result<Cover> {
    let mut remaining = g.vertices();
    let mut pieces = Vec::new();
    while remaining.len() >= sizes.first() {
        let mut splitter = FamilySplitter {
            g,
            family,
            eps: params.alpha,
            seed: params.config.seed ^ EXTRACT_SALT,
            stream: (pieces.len() as u64) << 32,
        };
        let ext = extract_excellent(g, &remaining, params, sizes, &mut splitter)?;
        remaining.difference_with(&ext.piece);
        family.push(ext.piece.clone());
        pieces.push(ext);
    }
    Ok(Cover {
        pieces,
        remainder: remaining,
    })
}

/// Equitable partition of `g` into pieces certified excellent, followed by
/// a check of every pair at `ε`.
///
/// A failed check is reported in the returned report, not as an error, so
/// the partition stays available for inspection.
pub fn stable_partition(
    g: &Graph,
    eps: Rational,
    mode: TreeBoundMode,
    config: PipelineConfig,
) -> Result<(Partition, PartitionReport)> {
    check_epsilon(eps)?;
    if g.n() == 0 {
        return Err(Error::Precondition("the graph is empty".into()));
    }
    let mut timing = Timing::default();

    let start = Instant::now();
    let tree_bound = resolve_tree_bound(g, eps, mode, &config).map_err(|e| e.at_stage("tree bound"))?;
    timing.record("tree bound", start);

    let (params, sizes) = make_params(g.n(), eps, tree_bound.t, config).map_err(|e| e.at_stage("parameters"))?;
    let bound = theorem_bound(eps, params.t)?;
    let seed = params.config.seed;
    let mut family = WitnessFamily::new(params.config.sampler.clone());

    let start = Instant::now();
    let cover = greedy_cover(g, &params, &sizes, &mut family).map_err(|e| e.at_stage("extraction"))?;
    timing.record("extraction", start);

    let start = Instant::now();
    let mut finals = Vec::new();
    let mut provenance = Vec::new();
    let mut retries = RetryStats::default();
    let mut events = Vec::new();
    for (idx, ext) in cover.pieces.iter().enumerate() {
        let refine = |zeta, stream| {
            random_refine(
                g,
                &ext.piece,
                params.c,
                zeta,
                &family,
                seed ^ REFINE_SALT,
                stream,
                params.config.max_retries,
            )
        };
        // A piece may carry a minority just below α|piece| that cannot be
        // spread at most one per part; such parts are only ε-excellent.
        let refined = match refine(params.beta, idx as u64) {
            Err(Error::RefinementExhausted {
                attempts,
                witness_size,
                ..
            }) => {
                events.push(format!(
                    "piece {idx}: refinement at epsilon/3 failed after {attempts} attempts \
                     (witness of size {witness_size}); parts certified at epsilon instead"
                ));
                retries.relaxed.push(idx);
                retries.total_attempts += attempts as u64;
                refine(eps, idx as u64 | 1 << 40)
            }
            other => other,
        }
        .map_err(|e| e.at_stage("refinement"))?;
        retries.pieces_refined += 1;
        retries.total_attempts += refined.attempts as u64;
        retries.max_attempts = retries.max_attempts.max(refined.attempts);
        retries.failed_parts += refined.failures.iter().map(|&f| f as u64).sum::<u64>();
        for (part, set) in refined.parts.into_iter().enumerate() {
            family.push(set.clone());
            finals.push(set);
            provenance.push(PieceProvenance {
                extracted_from: idx,
                depth: ext.depth,
                path: ext.path.clone(),
                part,
                refine_attempts: refined.attempts,
                received: Vec::new(),
            });
        }
    }
    timing.record("refinement", start);

    let start = Instant::now();
    let placed = distribute_remainder(&mut finals, &cover.remainder, sizes.first())
        .map_err(|e| e.at_stage("distribution"))?;
    for &(v, i) in &placed {
        provenance[i].received.push(v);
    }
    timing.record("distribution", start);

    // final pieces join the family before any of them is certified
    let start = Instant::now();
    for p in &finals {
        family.push(p.clone());
    }
    let order = canonical_order(&finals);
    let mut rank = vec![0; finals.len()];
    for (new, &old) in order.iter().enumerate() {
        rank[old] = new;
    }
    let pieces: Vec<VertexSet> = order.iter().map(|&i| finals[i].clone()).collect();
    let provenance: Vec<PieceProvenance> = order.iter().map(|&i| provenance[i].clone()).collect();
    let remainder: Vec<(usize, usize)> = placed.iter().map(|&(v, i)| (v, rank[i])).collect();
    let mut excellence_failures = Vec::new();
    for (i, p) in pieces.iter().enumerate() {
        if let Some(w) = split_witness_in(g, p, eps, &family, seed ^ CERTIFY_SALT, i as u64) {
            events.push(format!(
                "piece {i} is split at epsilon by a witness of size {} ({} / {})",
                w.members.len(),
                w.ones,
                w.zeros
            ));
            excellence_failures.push(i);
        }
    }
    timing.record("certification", start);

    let start = Instant::now();
    let verification = verify_partition(g, &pieces, eps, Some(&bound)).map_err(|e| e.at_stage("verification"))?;
    timing.record("verification", start);

    let passed = verification.verdict && excellence_failures.is_empty();
    let partition = Partition {
        pieces,
        remainder,
        seed,
        provenance,
    };
    debug_assert!(partition.check_invariants(g.n()));
    let verdict = VerdictSection {
        graph: GraphStats {
            n: g.n(),
            edges: g.edge_count(),
        },
        params,
        sizes: sizes.0,
        tree_bound,
        pieces: partition
            .pieces
            .iter()
            .enumerate()
            .map(|(index, p)| PieceRecord {
                index,
                size: p.len(),
                members: p.to_vec(),
            })
            .collect(),
        provenance: partition.provenance.clone(),
        retries,
        excellence_failures,
        events,
        verification,
        tsr: None,
        passed,
    };
    Ok((partition, PartitionReport { verdict, timing }))
}

/// `2^(k+3) - 7`.
pub fn tsr_exponent(k: u32) -> Result<u64> {
    if k > 58 {
        return Err(Error::Overflow("bound exponent"));
    }
    Ok((1u64 << (k + 3)) - 7)
}

/// Partition whose pairs are `ε`-regular with density below `ε` or above
/// `1 - ε`: the stable pipeline at `ε²/2`, since `sqrt(2 ε²/2) = ε`.
///
/// With `k` the tree bound follows from the absence of a half-graph of
/// length `k`; without it the bound is certified from the graph.
pub fn tsr_partition(
    g: &Graph,
    eps: Rational,
    k: Option<u32>,
    config: PipelineConfig,
) -> Result<(Partition, PartitionReport)> {
    check_epsilon(eps)?;
    let eps_prime = eps * eps / 2;
    let mode = k.map_or(TreeBoundMode::Auto, TreeBoundMode::FromK);
    let exponent = k.map(tsr_exponent).transpose()?;
    let (partition, mut report) = stable_partition(g, eps_prime, mode, config)?;
    report.verdict.tsr = Some(TsrRecord {
        epsilon: eps.into(),
        epsilon_prime: eps_prime.into(),
        k,
        exponent,
        log10_nominal_bound: exponent.map(|e| e as f64 * (4.0 / to_f64(eps)).log10()),
    });
    Ok((partition, report))
}
