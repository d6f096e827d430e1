use crate::stability::SpecialTreeWitness;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: self-loop on vertex {vertex}")]
    SelfLoop { line: usize, vertex: usize },

    #[error("line {line}: vertex id {id} out of range for n = {n}")]
    VertexOutOfRange { line: usize, id: usize, n: usize },

    #[error("empty side")]
    EmptySide,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("opinion undefined: the set is not {epsilon}-good (vertex {splitter} splits it)")]
    OpinionUndefined { epsilon: String, splitter: usize },

    #[error("oracle scale exceeded: {size} > {max}")]
    OracleScaleExceeded { size: usize, max: usize },

    #[error("epsilon too large for tree bound: need {epsilon} < 1/2^{t}")]
    EpsilonTooLarge { epsilon: String, t: u32 },

    #[error("insufficient n for the size condition: {detail}")]
    InsufficientN { n: usize, detail: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("arithmetic overflow while computing {0}")]
    Overflow(&'static str),

    #[error(
        "graph is not stable enough: a special tree of height {height} was found and no admissible tree bound exists for epsilon {epsilon}"
    )]
    NotStable {
        height: u32,
        epsilon: String,
        witness: Box<SpecialTreeWitness>,
    },

    #[error("search budget exhausted during {stage} after {nodes} nodes")]
    BudgetExhausted { stage: &'static str, nodes: u64 },

    #[error(
        "extraction descended past the tree bound t = {t}; the certified bound is contradicted"
    )]
    TreeBoundContradiction {
        t: u32,
        witness: Option<Box<SpecialTreeWitness>>,
    },

    #[error(
        "random refinement of piece {piece} exhausted {attempts} attempts; sub-piece {failing:?} is split by a witness of size {witness_size}"
    )]
    RefinementExhausted {
        piece: usize,
        attempts: u32,
        failing: Vec<usize>,
        witness_size: usize,
    },

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn at_stage(self, stage: &'static str) -> Self {
        match self {
            e @ Error::Stage { .. } => e,
            e => Error::Stage {
                stage,
                source: Box::new(e),
            },
        }
    }

    /// The innermost error, skipping stage tags.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            e => e,
        }
    }

    /// Process exit status for this error: 1 when a run completed but a
    /// guaranteed property failed, 2 for input or parameter problems, 3 when a
    /// search budget ran out.
    pub fn exit_code(&self) -> i32 {
        match self.root() {
            Error::BudgetExhausted { .. } => 3,
            Error::RefinementExhausted { .. }
            | Error::TreeBoundContradiction { .. }
            | Error::Invariant(_) => 1,
            _ => 2,
        }
    }
}
