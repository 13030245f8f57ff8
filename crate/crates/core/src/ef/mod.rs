//! Ehrenfeucht-Fraisse games, rooted-graph extensions and closures.

mod closure;
mod game;
mod lookahead;
mod rooted;

pub use closure::*;
pub use game::*;
pub use lookahead::*;
pub use rooted::*;

use thiserror::Error;

use crate::canon::CanonError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EfError {
    #[error("type ({v}, {e}) is exactly balanced at this alpha; use a more precise alpha")]
    Tie { v: usize, e: usize },
    #[error("{what} is {size}, cap {cap}")]
    TooLarge { what: &'static str, size: usize, cap: usize },
    #[error("invalid rooted graph: {0}")]
    BadRootedGraph(String),
    #[error("not an extension: {0}")]
    NotExtension(String),
    #[error("tuple lengths differ: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("game search exceeded {0} stored positions")]
    StateSpace(usize),
    #[error("Spoiler wins with {spoiler_at} rounds but not with {duplicator_at}")]
    NotMonotone { spoiler_at: usize, duplicator_at: usize },
    #[error("{0}")]
    Domain(String),
    #[error("schedule term too large")]
    Overflow,
    #[error(transparent)]
    Canon(#[from] CanonError),
}
