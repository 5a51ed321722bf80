use num_bigint::BigInt;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("edge ({0}, {1}) must point from a lower to a higher vertex")]
    EdgeOrientation(usize, usize),
    #[error("edge ({i}, {j}) leaves the vertex range 1..={max}")]
    VertexRange { i: usize, j: usize, max: usize },
    #[error("graph needs at least two vertices and one edge")]
    EmptyGraph,
    #[error("composition part {0} is zero")]
    ZeroPart(usize),
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("netflow vector sums to {0}, not 0")]
    NonzeroSum(BigInt),
    #[error("netflow has {found} free entries, graph needs {expected}")]
    NetflowLength { expected: usize, found: usize },
    #[error("netflow entry a_{0} is negative")]
    NegativeNetflow(usize),
    #[error("vertex {0} has no outgoing edge")]
    MissingOutgoingEdge(usize),
    #[error("vertex {0} has no incoming edge")]
    MissingIncomingEdge(usize),
    #[error("listing flows stopped: more than {cap} flows")]
    EnumerationCapExceeded { cap: usize },
    #[error("flow polytope has dimension {actual}, below the generic dimension {expected}")]
    DegenerateDimension { expected: usize, actual: usize },
    #[error("edges ({0}, {1}) and ({2}, {3}) cannot be reduced")]
    EdgesNotComposable(usize, usize, usize, usize),
    #[error("vertex {0} has no incoming edges to reduce")]
    NoIncomingEdges(usize),
    #[error("tree shape mismatch: {0}")]
    TreeShapeMismatch(String),
    #[error("netflow mismatch: {0}")]
    NetflowMismatch(String),
    #[error("parse error: {0}")]
    Parse(String),
}
