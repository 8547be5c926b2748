//! Batch front end for the amrmg solver: manufactured cases, error studies,
//! the kernel-compatibility experiment and the vortex-tube problem.

pub mod cases;
pub mod compat;
pub mod config;
pub mod metrics;
pub mod run;
pub mod special;
pub mod study;
pub mod vortex;
