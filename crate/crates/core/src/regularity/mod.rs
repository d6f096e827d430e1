//! Pairwise uniformity certificates, the regularity consequence with its
//! exact small-scale oracle, and partition reports.

mod oracle;
mod report;

pub use oracle::{brute_force_regular, RegularityCheck, REGULARITY_MAX_SIDE};
pub use report::{
    GraphStats, PartitionReport, PieceProvenance, PieceRecord, RetryStats, Timing, TreeBoundRecord, TreeLevel,
    TsrRecord, VerdictSection,
};

use serde::Serialize;

use crate::bitset::VertexSet;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::partition::TheoremBound;
use crate::rational::{check_epsilon, lt_frac, serialize_rational, Rational, RationalRepr, SqrtRational};

/// Outcome of the nested exception count for a pair `(A, B)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UniformityCertificate {
    /// The passing truth value, `None` when neither value passes.
    pub truth: Option<u8>,
    /// Rows `a` with at least `ε|B|` entries disagreeing with 1, resp. 0.
    pub row_exceptions_one: usize,
    pub row_exceptions_zero: usize,
    /// `ε|A|` and `ε|B|`.
    #[serde(serialize_with = "serialize_rational")]
    pub row_threshold: Rational,
    #[serde(serialize_with = "serialize_rational")]
    pub column_threshold: Rational,
    /// `e(A, B)`, a by-product of the row counts.
    pub cross_edges: usize,
}

impl UniformityCertificate {
    pub fn passed(&self) -> bool {
        self.truth.is_some()
    }

    /// Exceptional rows for the passing truth value.
    pub fn row_exceptions(&self) -> Option<usize> {
        self.truth.map(|t| {
            if t == 1 {
                self.row_exceptions_one
            } else {
                self.row_exceptions_zero
            }
        })
    }
}

fn uniformity_from_rows(
    rows: impl Iterator<Item = usize>,
    a_len: usize,
    b_len: usize,
    eps: Rational,
) -> UniformityCertificate {
    let mut ex_one = 0;
    let mut ex_zero = 0;
    let mut cross = 0;
    for ones in rows {
        cross += ones;
        if !lt_frac(b_len - ones, eps, b_len) {
            ex_one += 1;
        }
        if !lt_frac(ones, eps, b_len) {
            ex_zero += 1;
        }
    }
    let truth = if lt_frac(ex_one, eps, a_len) {
        Some(1)
    } else if lt_frac(ex_zero, eps, a_len) {
        Some(0)
    } else {
        None
    };
    let len = |x: usize| Rational::from_integer(x as i64);
    UniformityCertificate {
        truth,
        row_exceptions_one: ex_one,
        row_exceptions_zero: ex_zero,
        row_threshold: eps * len(a_len),
        column_threshold: eps * len(b_len),
        cross_edges: cross,
    }
}

/// Whether, for some truth value `t` (1 tried first), all but `< ε|A|` rows
/// of `A` have fewer than `ε|B|` entries in `B` disagreeing with `t`.
pub fn pair_uniformity(
    g: &Graph,
    a_set: &VertexSet,
    b_set: &VertexSet,
    eps: Rational,
) -> Result<UniformityCertificate> {
    check_epsilon(eps)?;
    if a_set.is_empty() || b_set.is_empty() {
        return Err(Error::EmptySide);
    }
    if !a_set.is_disjoint(b_set) {
        return Err(Error::Precondition("pair sides must be disjoint".into()));
    }
    let occ = b_set.occupied_words();
    let rows = a_set.iter().map(|a| g.count_in_words(a, b_set, &occ));
    Ok(uniformity_from_rows(rows, a_set.len(), b_set.len(), eps))
}

/// `sqrt(2ε)`, symbolic.
pub fn zeta_of(eps: Rational) -> Result<SqrtRational> {
    check_epsilon(eps)?;
    Ok(SqrtRational::new(eps * 2))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegularConsequence {
    pub zeta: f64,
    #[serde(serialize_with = "serialize_rational")]
    pub density: Rational,
    /// Density below `ζ` for truth 0, above `1 - ζ` for truth 1.
    pub extreme: bool,
}

/// The extreme-density half of the regularity consequence of a passed
/// certificate. A failure here is an internal error, never a verdict.
pub fn regular_consequence(
    g: &Graph,
    a_set: &VertexSet,
    b_set: &VertexSet,
    eps: Rational,
    cert: &UniformityCertificate,
) -> Result<RegularConsequence> {
    let zeta = zeta_of(eps)?;
    let truth = cert
        .truth
        .ok_or_else(|| Error::Precondition("certificate did not pass".into()))?;
    let density = g.density(a_set, b_set)?;
    let extreme = extreme_density(density, truth, zeta);
    if !extreme {
        return Err(Error::Invariant(format!(
            "uniform pair with truth {truth} has density {density}, not within sqrt(2 eps) of {truth}"
        )));
    }
    Ok(RegularConsequence {
        zeta: zeta.to_f64(),
        density,
        extreme,
    })
}

fn extreme_density(density: Rational, truth: u8, zeta: SqrtRational) -> bool {
    if truth == 1 {
        zeta.exceeds(Rational::from_integer(1) - density)
    } else {
        zeta.exceeds(density)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairRecord {
    pub i: usize,
    pub j: usize,
    pub density: RationalRepr,
    pub uniform: bool,
    pub truth: Option<u8>,
    pub row_exceptions: usize,
    /// Extreme density at `sqrt(2ε)`; `None` for failed pairs.
    pub extreme: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundRecord {
    pub pieces: usize,
    pub exact: RationalRepr,
    pub nominal: RationalRepr,
    pub within_exact: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verification {
    pub pieces: usize,
    pub min_size: usize,
    pub max_size: usize,
    pub equitable: bool,
    pub pairs_checked: usize,
    pub failing_pairs: usize,
    pub pairs: Vec<PairRecord>,
    pub bound: Option<BoundRecord>,
    /// Every pair uniform, sizes equitable, and the count within the bound.
    pub verdict: bool,
}

/// Pieces sorted by smallest member; empty pieces last.
pub fn canonical_order(pieces: &[VertexSet]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..pieces.len()).collect();
    idx.sort_by_key(|&i| (pieces[i].first().unwrap_or(usize::MAX), i));
    idx
}

/// Check every pair of pieces, equitability and the piece-count bound.
/// Pieces are considered in canonical order, so the verdict does not depend
/// on how they were listed.
pub fn verify_partition(
    g: &Graph,
    pieces: &[VertexSet],
    eps: Rational,
    bound: Option<&TheoremBound>,
) -> Result<Verification> {
    check_epsilon(eps)?;
    if pieces.iter().any(|p| p.is_empty() || p.universe() != g.n()) {
        return Err(Error::Precondition("pieces must be nonempty subsets of the graph".into()));
    }
    let mut covered = VertexSet::new(g.n());
    for p in pieces {
        if !covered.is_disjoint(p) {
            return Err(Error::Precondition("pieces overlap".into()));
        }
        covered.union_with(p);
    }
    if covered.len() != g.n() {
        return Err(Error::Precondition(format!(
            "pieces cover {} of {} vertices",
            covered.len(),
            g.n()
        )));
    }
    let order = canonical_order(pieces);
    let sorted: Vec<&VertexSet> = order.iter().map(|&i| &pieces[i]).collect();
    let zeta = zeta_of(eps)?;
    let occupied: Vec<Vec<usize>> = sorted.iter().map(|p| p.occupied_words()).collect();
    let mut pairs = Vec::new();
    let mut failing = 0;
    for i in 0..sorted.len() {
        let a_set = sorted[i];
        for j in i + 1..sorted.len() {
            let b_set = sorted[j];
            let rows = a_set.iter().map(|a| g.count_in_words(a, b_set, &occupied[j]));
            let cert = uniformity_from_rows(rows, a_set.len(), b_set.len(), eps);
            let density = Rational::new(cert.cross_edges as i64, (a_set.len() * b_set.len()) as i64);
            let extreme = cert.truth.map(|t| extreme_density(density, t, zeta));
            if extreme == Some(false) {
                return Err(Error::Invariant(format!(
                    "pair ({i}, {j}) is uniform but its density {density} is not extreme"
                )));
            }
            if !cert.passed() {
                failing += 1;
            }
            pairs.push(PairRecord {
                i,
                j,
                density: density.into(),
                uniform: cert.passed(),
                truth: cert.truth,
                row_exceptions: cert.row_exceptions().unwrap_or(cert.row_exceptions_one.min(cert.row_exceptions_zero)),
                extreme,
            });
        }
    }
    let min_size = sorted.iter().map(|p| p.len()).min().unwrap_or(0);
    let max_size = sorted.iter().map(|p| p.len()).max().unwrap_or(0);
    let equitable = max_size - min_size <= 1;
    let bound = bound.map(|b| BoundRecord {
        pieces: pieces.len(),
        exact: b.exact.clone(),
        nominal: b.nominal.clone(),
        within_exact: b.admits(pieces.len()),
    });
    let verdict = failing == 0 && equitable && bound.as_ref().is_none_or(|b| b.within_exact);
    Ok(Verification {
        pieces: pieces.len(),
        min_size,
        max_size,
        equitable,
        pairs_checked: pairs.len(),
        failing_pairs: failing,
        pairs,
        bound,
        verdict,
    })
}
