use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("graph must have at least one vertex")]
    EmptyGraph,
    #[error("vertex {vertex} out of range 1..={n}")]
    InvalidVertex { vertex: usize, n: usize },
    #[error("loop at vertex {0}")]
    Loop(usize),
    #[error("duplicate edge {{{0}, {1}}}")]
    DuplicateEdge(usize, usize),
    #[error("{{{0}, {1}}} is not an edge of the base graph")]
    NotAnEdge(usize, usize),
    #[error("graph is disconnected; its Jacobian is not a finite group")]
    Disconnected,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("{vertices} vertices at level {level} exceed the limit of {limit}")]
    SizeGuard {
        level: u32,
        vertices: u128,
        limit: usize,
    },
    #[error("brute-force enumeration refused: {edges} edges exceed the limit of {limit}")]
    EnumerationGuard { edges: usize, limit: usize },
    #[error("sublevel {k} exceeds level {m}")]
    SublevelTooLarge { k: u32, m: u32 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("insufficient or non-conforming data: {reason}; residuals {residuals:?}")]
    NonConformingFit {
        reason: String,
        residuals: Vec<i128>,
    },
    #[error("level {level} is disconnected although level 1 is connected")]
    ConnectivityViolation { level: u32 },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}
