use thiserror::Error;

use crate::trees::{VertexRef, Violation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid multiset: {0}")]
    InvalidMultiset(String),

    #[error("invalid word: {0}")]
    InvalidWord(String),

    #[error("malformed tree text at byte {offset}: {message}")]
    TreeSyntax { offset: usize, message: String },

    #[error("invalid tree: {0}")]
    InvalidTree(Violation),

    #[error("no vertex at path {0}")]
    InvalidPath(VertexRef),

    #[error("vertex at {0} is tied with a cyclic neighbour and has no class")]
    Unclassified(VertexRef),

    #[error("position {0} is not a double cyclic ascent or descent")]
    NotDoubleCyclic(usize),

    #[error("word is not quasi-Stirling: {0}")]
    NotQuasiStirling(String),

    #[error("unknown vertex identity {0}")]
    UnknownVertex(String),

    #[error("action postcondition violated at {path}: {message}")]
    ActionPostcondition { path: VertexRef, message: String },

    #[error("coefficient overflow")]
    Overflow,

    #[error("family `{0}` is not a tree family")]
    NotTreeFamily(String),

    #[error("unknown family `{0}`")]
    UnknownFamily(String),

    #[error("usage: {0}")]
    Usage(String),

    #[error("verification failed: {0}")]
    Verification(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
