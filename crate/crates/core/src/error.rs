//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by graph construction, pseudometric builders, audits, and
/// the integrator.
#[derive(Debug, Error)]
pub enum Error {
    #[error("graph must have at least two vertices, got {0}")]
    TooFewVertices(usize),

    #[error("edge ({0}, {1}) is a self-loop")]
    SelfLoop(usize, usize),

    #[error("edge ({0}, {1}) references a vertex outside 1..={2}")]
    VertexOutOfRange(usize, usize, usize),

    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),

    #[error("graph is disconnected: vertices {unreachable:?} are unreachable from vertex 1")]
    Disconnected { unreachable: Vec<usize> },

    #[error("invalid path choice: {0}")]
    InvalidPathChoice(String),

    #[error("exhaustive path search is capped at {cap} vertices, graph has {n}")]
    ExhaustiveCapExceeded { n: usize, cap: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("sampler region is not contained in the required domain: {0}")]
    IncompatibleSampler(String),

    #[error("state became non-finite at t = {time}")]
    NonFiniteState { time: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
