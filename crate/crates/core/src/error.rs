use std::io;

use thiserror::Error;

use crate::grid::BlockIndex;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid boundary specification: {0}")]
    Boundary(String),

    #[error("invalid grid parameters: {0}")]
    GridParams(String),

    #[error("grid invariant violated: {0}")]
    Invariant(String),

    #[error("level {level} out of range (finest level is {finest})")]
    LevelOutOfRange { level: usize, finest: usize },

    #[error("unknown field `{0}`")]
    UnknownField(String),

    #[error("ghost node of block {block:?} at local {local:?} is not covered by any source")]
    UncoveredGhost { block: BlockIndex, local: [i32; 3] },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid adaptation parameters: {0}")]
    AdaptParams(String),

    #[error("invalid cycle configuration: {0}")]
    CycleConfig(String),

    #[error("unsupported boundary combination {0} for {1}")]
    UnsupportedBoundary(String, String),

    #[error("unknown {kind} `{name}`")]
    UnknownStrategy { kind: &'static str, name: String },

    #[error("kernel built for `{kernel}` does not match the `{stencil}` stencil")]
    IncompatibleKernel { kernel: String, stencil: String },

    #[error("screened lattice Green's function has a non-decaying root (|r| = {0})")]
    NonDecayingRoot(f64),

    #[error("quadrature did not converge: achieved {achieved:e}, requested {requested:e}")]
    Quadrature { achieved: f64, requested: f64 },

    #[error("malformed LGF table file: {0}")]
    TableFormat(String),

    #[error("adapted grid exceeds the budget of {limit} blocks")]
    BlockBudget { limit: usize },

    #[error(transparent)]
    Io(#[from] io::Error),
}
