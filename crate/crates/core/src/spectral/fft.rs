//! Three-dimensional complex FFT assembled from one-dimensional transforms.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

pub struct Fft3 {
    dims: [usize; 3],
    forward: [Arc<dyn Fft<f64>>; 3],
    inverse: [Arc<dyn Fft<f64>>; 3],
}

impl Fft3 {
    pub fn new(dims: [usize; 3]) -> Self {
        let mut planner = FftPlanner::new();
        let forward = dims.map(|n| planner.plan_fft(n, FftDirection::Forward));
        let inverse = dims.map(|n| planner.plan_fft(n, FftDirection::Inverse));
        Fft3 { dims, forward, inverse }
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn len(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Unnormalised forward transform, data x fastest.
    pub fn forward(&self, data: &mut [Complex64]) {
        for axis in 0..3 {
            self.axis(data, axis, &self.forward[axis]);
        }
    }

    /// Unnormalised inverse transform.
    pub fn inverse(&self, data: &mut [Complex64]) {
        for axis in 0..3 {
            self.axis(data, axis, &self.inverse[axis]);
        }
    }

    /// Transforms only the listed axes.
    pub fn forward_axes(&self, data: &mut [Complex64], axes: &[usize]) {
        for &axis in axes {
            self.axis(data, axis, &self.forward[axis]);
        }
    }

    fn axis(&self, data: &mut [Complex64], axis: usize, plan: &Arc<dyn Fft<f64>>) {
        let [nx, ny, nz] = self.dims;
        if self.dims[axis] == 1 {
            return;
        }
        let mut scratch = vec![Complex64::default(); plan.get_inplace_scratch_len()];
        match axis {
            0 => plan.process_with_scratch(data, &mut scratch),
            1 => {
                let mut buf = vec![Complex64::default(); nx * ny];
                for z in 0..nz {
                    let slab = &mut data[z * nx * ny..(z + 1) * nx * ny];
                    for y in 0..ny {
                        for x in 0..nx {
                            buf[x * ny + y] = slab[x + nx * y];
                        }
                    }
                    plan.process_with_scratch(&mut buf, &mut scratch);
                    for y in 0..ny {
                        for x in 0..nx {
                            slab[x + nx * y] = buf[x * ny + y];
                        }
                    }
                }
            }
            _ => {
                let mut buf = vec![Complex64::default(); nx * nz];
                for y in 0..ny {
                    for z in 0..nz {
                        for x in 0..nx {
                            buf[x * nz + z] = data[x + nx * (y + ny * z)];
                        }
                    }
                    plan.process_with_scratch(&mut buf, &mut scratch);
                    for z in 0..nz {
                        for x in 0..nx {
                            data[x + nx * (y + ny * z)] = buf[x * nz + z];
                        }
                    }
                }
            }
        }
    }
}
