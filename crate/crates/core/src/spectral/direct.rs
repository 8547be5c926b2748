//! FFT convolution solve on the full base level.

use num_complex::Complex64;

use super::fft::Fft3;
use super::kernel::KernelSpec;
use crate::error::{Error, Result};

/// What to do when the kernel does not invert the multigrid stencil.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum CompatMode {
    #[default]
    Error,
    Warn,
}

/// Checks that `kernel` was built from the Mehrstellen operator of order `stencil_order`.
pub fn check_compat(kernel: &KernelSpec, stencil_order: usize, mode: CompatMode) -> Result<()> {
    let expected = format!("mehrstellen{stencil_order}");
    if kernel.operator == expected {
        return Ok(());
    }
    match mode {
        CompatMode::Error => Err(Error::IncompatibleKernel { kernel: kernel.operator.clone(), stencil: expected }),
        CompatMode::Warn => {
            log::warn!("kernel `{}` does not match the `{expected}` stencil", kernel.operator);
            Ok(())
        }
    }
}

/// A kernel with its transform plans.
pub struct DirectSolver {
    kernel: KernelSpec,
    fft: Fft3,
}

impl DirectSolver {
    pub fn new(kernel: KernelSpec) -> Self {
        let fft = Fft3::new(kernel.padded);
        DirectSolver { kernel, fft }
    }

    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }

    /// Solves on the `n³` base level, input and output x fastest.
    pub fn solve(&self, f0: &[f64], zero_mean: bool) -> Vec<f64> {
        let n = self.kernel.n;
        assert_eq!(f0.len(), n * n * n, "base-level field has the wrong size");
        let [px, py, pz] = self.kernel.padded;
        let mut buf = vec![Complex64::default(); px * py * pz];
        for z in 0..n {
            for y in 0..n {
                for x in 0..n {
                    buf[x + px * (y + py * z)] = Complex64::new(f0[x + n * (y + n * z)], 0.0);
                }
            }
        }
        self.fft.forward(&mut buf);
        for (v, m) in buf.iter_mut().zip(&self.kernel.multiplier) {
            *v *= *m;
        }
        self.fft.inverse(&mut buf);
        let scale = 1.0 / (px * py * pz) as f64;
        let mut u = vec![0.0; n * n * n];
        for z in 0..n {
            for y in 0..n {
                for x in 0..n {
                    u[x + n * (y + n * z)] = buf[x + px * (y + py * z)].re * scale;
                }
            }
        }
        if zero_mean {
            subtract_mean(&mut u);
        }
        u
    }
}

/// Removes the arithmetic mean, summing in a fixed order.
pub fn subtract_mean(u: &mut [f64]) {
    let mean = u.iter().sum::<f64>() / u.len() as f64;
    for v in u.iter_mut() {
        *v -= mean;
    }
}

/// One-shot convenience wrapper around [`DirectSolver`].
pub fn direct_solve(f0: &[f64], kernel: &KernelSpec, zero_mean: bool) -> Vec<f64> {
    DirectSolver::new(kernel.clone()).solve(f0, zero_mean)
}
