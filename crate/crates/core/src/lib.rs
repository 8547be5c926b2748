//! Adaptive multigrid Poisson solver on block-structured multiresolution grids.
//!
//! The composite grid is a forest of cubic node-centred blocks with a 2:1
//! level balance. Leaves are smoothed with compact Mehrstellen stencils of order
//! 2, 4 or 6, cycled with full-approximation-scheme V-cycles, and the base level
//! is solved exactly by FFT convolution with a lattice Green's function that
//! matches the stencil. Periodic and unbounded axes can be mixed (PPP, UPP, UUP, UUU).

pub mod adapt;
pub mod bc;
pub mod error;
pub mod ghost;
pub mod grid;
pub mod interp;
pub mod mg;
pub mod spectral;
pub mod stencil;
pub mod transfer;

#[cfg(any(test, feature = "oracles"))]
pub mod oracles;

pub use adapt::{adapt, AdaptDiagnostics, AdaptParams};
pub use bc::{AxisBc, BoundarySpec};
pub use error::{Error, Result};
pub use ghost::{fill_ghosts, GhostPlan, JumpFill};
pub use grid::{BlockIndex, CompositeGrid, FieldId, GridParams, Shape, Topology};
pub use mg::{solve, CoarseSolver, CycleConfig, CycleRecord, MeanTracker, Multigrid, SolveReport, Workspace};
pub use spectral::{build_kernel, CompatMode, DirectSolver, LgfSource};
pub use stencil::StencilSet;
