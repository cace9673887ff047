use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("line {line}, column {column}: unknown vertex `{name}`")]
    UnknownVertex {
        line: usize,
        column: usize,
        name: String,
    },

    #[error("hyperarc {arc} has an empty {side}")]
    EmptySide { arc: usize, side: &'static str },

    #[error("hyperarc {arc} references vertex {vertex}, but only {n_vertices} vertices exist")]
    VertexOutOfRange {
        arc: usize,
        vertex: u32,
        n_vertices: usize,
    },

    #[error("invalid degree sequence: {0}")]
    DegreeSequence(String),

    #[error("at least two hyperarcs are needed to propose a shuffle, found {0}")]
    TooFewArcs(usize),

    #[error("initial hypergraph is not in the space {0}")]
    NotInSpace(String),

    #[error("{what} has {found}, above the limit of {limit}")]
    SizeLimit {
        what: &'static str,
        found: usize,
        limit: usize,
    },

    #[error("invalid space `{0}`: expected a subset of the letters s, d, m")]
    InvalidSpace(String),

    #[error("sample {index} is not a member of the enumerated space")]
    SampleOutsideSpace { index: usize },

    #[error("chain transition leaves the enumerated space from state {0}")]
    ClosureViolation(usize),

    #[error("{0}")]
    Analysis(String),
}

pub type Result<T> = std::result::Result<T, Error>;
