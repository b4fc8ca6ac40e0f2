use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("graph has no vertices")]
    EmptyGraph,
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("edge ({u}, {v}) references a vertex outside 0..{n}")]
    VertexOutOfRange { u: usize, v: usize, n: usize },
    #[error("graph is disconnected: vertex {0} is unreachable from vertex 0")]
    Disconnected(usize),
    #[error("median axiom fails at triple {triple:?}: interval triple-intersection is {meet:?}")]
    NotMedian {
        triple: (usize, usize, usize),
        meet: Vec<usize>,
    },
    #[error("operation requires a validated median graph")]
    NotValidated,
    #[error("exhaustive validation refused: {vertices} vertices exceeds the cap of {cap}")]
    ValidationBudget { vertices: usize, cap: usize },
    #[error("halfspace of edge ({0}, {1}) is not convex")]
    NonConvexHalfspace(usize, usize),
    #[error("maximum clique exceeds the configured cap of {0}")]
    CliqueCap(usize),
    #[error("vertex {0} out of range")]
    NoSuchVertex(usize),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("search budget exceeded: {0}")]
    Budget(String),
    #[error("family does not cover point {0}")]
    NotACover(usize),
    #[error("S({0}, l, l) is empty")]
    EmptySSet(usize),
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invariant(msg: impl Into<String>) -> Self {
        Error::Invariant(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}
