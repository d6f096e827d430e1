use serde::Serialize;

use super::Verification;
use crate::partition::PipelineParams;
use crate::rational::RationalRepr;
use crate::stability::TreeConvention;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GraphStats {
    pub n: usize,
    pub edges: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TreeLevel {
    pub height: u32,
    pub outcome: &'static str,
    pub nodes_explored: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TreeBoundRecord {
    /// `auto`, `fixed` or `from-k`.
    pub mode: &'static str,
    pub t: u32,
    /// False when the bound was supplied rather than established by search.
    pub certified: bool,
    pub convention: TreeConvention,
    pub levels: Vec<TreeLevel>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PieceRecord {
    pub index: usize,
    pub size: usize,
    pub members: Vec<usize>,
}

/// Where a final piece came from.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PieceProvenance {
    /// Index of the first-pass excellent piece it was cut from.
    pub extracted_from: usize,
    /// Descent depth and path of that piece.
    pub depth: usize,
    pub path: String,
    pub part: usize,
    pub refine_attempts: u32,
    /// Remainder vertices added at the end.
    pub received: Vec<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct RetryStats {
    pub pieces_refined: usize,
    pub total_attempts: u64,
    pub max_attempts: u32,
    /// Failed sub-piece certifications over all discarded attempts.
    pub failed_parts: u64,
    /// Pieces whose parts could only be certified at `ε` instead of `ε/3`.
    pub relaxed: Vec<usize>,
}

/// Parameters of the two-stage run that targets regularity directly.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TsrRecord {
    pub epsilon: RationalRepr,
    /// `ε²/2`, the threshold handed to the stable pipeline.
    pub epsilon_prime: RationalRepr,
    pub k: Option<u32>,
    /// `2^(k+3) - 7`, the exponent of the nominal bound `(4/ε)^e`.
    pub exponent: Option<u64>,
    pub log10_nominal_bound: Option<f64>,
}

/// Everything that must be reproducible from the graph and the seed.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerdictSection {
    pub graph: GraphStats,
    pub params: PipelineParams,
    pub sizes: Vec<usize>,
    pub tree_bound: TreeBoundRecord,
    pub pieces: Vec<PieceRecord>,
    pub provenance: Vec<PieceProvenance>,
    pub retries: RetryStats,
    /// Final pieces (canonical index) with a splitting witness at `ε`.
    pub excellence_failures: Vec<usize>,
    pub events: Vec<String>,
    pub verification: Verification,
    pub tsr: Option<TsrRecord>,
    pub passed: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Timing {
    /// Wall-clock milliseconds per stage, in execution order.
    pub stages: Vec<(String, f64)>,
}

impl Timing {
    pub fn record(&mut self, stage: &str, start: std::time::Instant) {
        self.stages.push((stage.to_string(), start.elapsed().as_secs_f64() * 1e3));
    }

    pub fn total_ms(&self) -> f64 {
        self.stages.iter().map(|(_, ms)| ms).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PartitionReport {
    pub verdict: VerdictSection,
    pub timing: Timing,
}

impl PartitionReport {
    pub fn passed(&self) -> bool {
        self.verdict.passed
    }

    /// Deterministic JSON of the verdict section alone.
    pub fn verdict_json(&self) -> String {
        serde_json::to_string_pretty(&self.verdict).expect("report serializes")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
