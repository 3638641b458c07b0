use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A report names a neighbour the buyer does not actually have.
    /// Reports may drop edges but never invent them.
    #[error("buyer {buyer} reports neighbour {neighbor} outside her true neighbour set")]
    InventedNeighbor { buyer: String, neighbor: String },

    #[error("buyer {buyer} reports a negative valuation")]
    NegativeValuation { buyer: String },

    #[error("node {node} is not a participant of the effective graph")]
    NotParticipant { node: String },

    #[error("no buyer participates in the auction")]
    NoParticipants,

    /// A verification routine refused an input that would make its
    /// exhaustive enumeration blow up.
    #[error("{check} refused: size {actual} exceeds the guard limit {limit}")]
    SizeGuard {
        check: &'static str,
        limit: usize,
        actual: usize,
    },

    #[error("invalid generator configuration: {0}")]
    GeneratorConfig(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("edge {a}-{b} is asymmetric: {a} lists {b} but {b} does not list {a}")]
    AsymmetricEdge { a: String, b: String },

    #[error("duplicate node id {id}")]
    DuplicateId { id: String },

    #[error("node {id} references unknown neighbour {neighbor}")]
    UnknownNeighbor { id: String, neighbor: String },

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid rational literal {literal:?}: {reason}")]
    BadRational { literal: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
