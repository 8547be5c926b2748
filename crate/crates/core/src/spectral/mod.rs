//! Level-0 direct solver: operator symbols, lattice Green's functions,
//! boundary-dependent kernels and the FFT convolution.

pub mod direct;
pub mod fft;
pub mod kernel;
pub mod lgf;
pub mod symbol;

pub use direct::{check_compat, direct_solve, CompatMode, DirectSolver};
pub use kernel::{build_kernel, KernelBuilder, KernelRegistry, KernelSpec, LgfSource};
pub use lgf::{lgf_free_1d, lgf_screened_1d, lgf_table_nd, LgfTable};
pub use symbol::{mehrstellen, DiscreteOperator, Mehrstellen, OperatorRegistry, WideCentral};
