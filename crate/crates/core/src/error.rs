use thiserror::Error;

use crate::dsl::ParseError;
use crate::term::Position;

/// Errors raised by the term, parsing, semantics and harness layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("position `{0}` is not a position of the term")]
    PositionOutOfRange(Position),

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("signature error: {0}")]
    Signature(String),

    #[error("term contains a loop; the basic semantics is only defined on loop-free terms")]
    ContainsLoop,

    #[error("position `{0}` is not in the frontier of the term")]
    NotInFrontier(Position),

    #[error("resource limit exceeded: {what} ({size} > {cap})")]
    ResourceLimit {
        what: &'static str,
        size: usize,
        cap: usize,
    },

    #[error("no accepted trace exists at this bound")]
    EmptySemantics,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
