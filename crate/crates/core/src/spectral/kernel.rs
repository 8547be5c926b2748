//! Spectral multipliers of the level-0 direct solve, one builder per boundary combination.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::PathBuf;

use num_complex::Complex64;

use super::fft::Fft3;
use super::lgf::{lgf_free_1d, lgf_table_nd, screened_root, LgfTable};
use super::symbol::DiscreteOperator;
use crate::bc::BoundarySpec;
use crate::error::{Error, Result};

/// Real multiplier over the padded transform grid. Unbounded axes are doubled.
#[derive(Clone, Debug)]
pub struct KernelSpec {
    pub bc: BoundarySpec,
    /// Name of the operator the kernel inverts.
    pub operator: String,
    pub operator_order: Option<usize>,
    /// Base-level nodes per axis.
    pub n: usize,
    pub h: f64,
    pub padded: [usize; 3],
    pub multiplier: Vec<f64>,
}

impl KernelSpec {
    pub fn at(&self, m: [usize; 3]) -> f64 {
        let [px, py, _] = self.padded;
        self.multiplier[m[0] + px * (m[1] + py * m[2])]
    }
}

/// Where free-space tables come from; tables are cached at unit spacing.
#[derive(Clone, Debug)]
pub struct LgfSource {
    pub cache_dir: Option<PathBuf>,
    pub tol: f64,
}

impl Default for LgfSource {
    fn default() -> Self {
        LgfSource { cache_dir: None, tol: 1e-8 }
    }
}

impl LgfSource {
    pub fn with_cache(dir: impl Into<PathBuf>) -> Self {
        LgfSource { cache_dir: Some(dir.into()), ..Default::default() }
    }

    /// Unit-spacing table of `op` on `[0, extent]^dim`.
    pub fn table(&self, op: &dyn DiscreteOperator, dim: usize, extent: usize) -> Result<LgfTable> {
        let path = self
            .cache_dir
            .as_ref()
            .map(|d| d.join(format!("lgf_{dim}d_{}_{extent}.bin", op.name())));
        if let Some(p) = &path {
            if p.exists() {
                match LgfTable::read_from(p) {
                    Ok(t) if t.dim == dim && t.extent == extent && t.h == 1.0 => return Ok(t),
                    Ok(_) => log::warn!("ignoring mismatched LGF cache file {}", p.display()),
                    Err(e) => log::warn!("ignoring unreadable LGF cache file {}: {e}", p.display()),
                }
            }
        }
        log::info!("computing {dim}D lattice Green's function of {} up to |n| = {extent}", op.name());
        let t = lgf_table_nd(op, dim, extent, 1.0, self.tol)?;
        if let Some(p) = &path {
            if let Some(dir) = p.parent() {
                std::fs::create_dir_all(dir)?;
            }
            t.write_to(p)?;
        }
        Ok(t)
    }
}

pub trait KernelBuilder: Send + Sync {
    fn bc(&self) -> BoundarySpec;
    fn build(&self, op: &dyn DiscreteOperator, n: usize, h: f64, lgf: &LgfSource) -> Result<KernelSpec>;
}

fn theta(m: usize, len: usize) -> f64 {
    2.0 * PI * m as f64 / len as f64
}

/// Signed lattice offset of a padded index on a doubled axis.
fn signed(j: usize, len: usize) -> i64 {
    if j <= len / 2 {
        j as i64
    } else {
        j as i64 - len as i64
    }
}

fn spec(bc: BoundarySpec, op: &dyn DiscreteOperator, n: usize, h: f64, padded: [usize; 3], m: Vec<f64>) -> KernelSpec {
    KernelSpec {
        bc,
        operator: op.name().to_string(),
        operator_order: op.stencil_order(),
        n,
        h,
        padded,
        multiplier: m,
    }
}

pub struct PeriodicKernel;

impl KernelBuilder for PeriodicKernel {
    fn bc(&self) -> BoundarySpec {
        BoundarySpec::PPP
    }

    fn build(&self, op: &dyn DiscreteOperator, n: usize, h: f64, _: &LgfSource) -> Result<KernelSpec> {
        let mut m = vec![0.0; n * n * n];
        for z in 0..n {
            for y in 0..n {
                for x in 0..n {
                    if x == 0 && y == 0 && z == 0 {
                        continue;
                    }
                    let s = op.unit_symbol([theta(x, n), theta(y, n), theta(z, n)]);
                    m[x + n * (y + n * z)] = h * h / s;
                }
            }
        }
        Ok(spec(BoundarySpec::PPP, op, n, h, [n; 3], m))
    }
}

pub struct SlabKernel;

impl KernelBuilder for SlabKernel {
    fn bc(&self) -> BoundarySpec {
        BoundarySpec::UPP
    }

    fn build(&self, op: &dyn DiscreteOperator, n: usize, h: f64, _: &LgfSource) -> Result<KernelSpec> {
        if op.split_x(0.0, 0.0).is_none() {
            return Err(Error::UnsupportedBoundary("UPP".into(), op.name().to_string()));
        }
        let px = 2 * n;
        let fft = Fft3::new([px, 1, 1]);
        let mut m = vec![0.0; px * n * n];
        let mut line = vec![Complex64::default(); px];
        for z in 0..n {
            for y in 0..n {
                if y == 0 && z == 0 {
                    for (j, v) in line.iter_mut().enumerate() {
                        *v = Complex64::new(h * h * lgf_free_1d(signed(j, px), 1.0), 0.0);
                    }
                } else {
                    let (a, c) = op.split_x(theta(y, n), theta(z, n)).expect("checked above");
                    let (r, d) = screened_root(a, c)?;
                    for (j, v) in line.iter_mut().enumerate() {
                        let k = signed(j, px).unsigned_abs() as i32;
                        *v = Complex64::new(-h * h * r.powi(k) / d, 0.0);
                    }
                }
                fft.forward(&mut line);
                for (x, v) in line.iter().enumerate() {
                    m[x + px * (y + n * z)] = v.re;
                }
            }
        }
        Ok(spec(BoundarySpec::UPP, op, n, h, [px, n, n], m))
    }
}

pub struct ChannelKernel;

impl KernelBuilder for ChannelKernel {
    fn bc(&self) -> BoundarySpec {
        BoundarySpec::UUP
    }

    fn build(&self, op: &dyn DiscreteOperator, n: usize, h: f64, lgf: &LgfSource) -> Result<KernelSpec> {
        let p = 2 * n;
        let table = lgf.table(op, 2, n)?;
        let fft = Fft3::new([p, p, 1]);
        let mut plane = vec![Complex64::default(); p * p];
        for y in 0..p {
            for x in 0..p {
                let g = table.get(&[signed(x, p), signed(y, p)]).expect("table covers the doubled grid");
                plane[x + p * y] = Complex64::new(h * h * g, 0.0);
            }
        }
        fft.forward(&mut plane);
        let mut m = vec![0.0; p * p * n];
        for (x, v) in plane.iter().enumerate() {
            m[x] = v.re;
        }
        for z in 1..n {
            for y in 0..p {
                for x in 0..p {
                    let s = op.unit_symbol([theta(x, p), theta(y, p), theta(z, n)]);
                    m[x + p * (y + p * z)] = h * h / s;
                }
            }
        }
        Ok(spec(BoundarySpec::UUP, op, n, h, [p, p, n], m))
    }
}

pub struct FreeSpaceKernel;

impl KernelBuilder for FreeSpaceKernel {
    fn bc(&self) -> BoundarySpec {
        BoundarySpec::UUU
    }

    fn build(&self, op: &dyn DiscreteOperator, n: usize, h: f64, lgf: &LgfSource) -> Result<KernelSpec> {
        let p = 2 * n;
        let table = lgf.table(op, 3, n)?;
        let fft = Fft3::new([p; 3]);
        let mut data = vec![Complex64::default(); p * p * p];
        for z in 0..p {
            for y in 0..p {
                for x in 0..p {
                    let g = table
                        .get(&[signed(x, p), signed(y, p), signed(z, p)])
                        .expect("table covers the doubled grid");
                    data[x + p * (y + p * z)] = Complex64::new(h * h * g, 0.0);
                }
            }
        }
        fft.forward(&mut data);
        let m = data.iter().map(|v| v.re).collect();
        Ok(spec(BoundarySpec::UUU, op, n, h, [p; 3], m))
    }
}

/// Kernel builders keyed by boundary combination name.
pub struct KernelRegistry {
    builders: BTreeMap<String, Box<dyn KernelBuilder>>,
}

impl Default for KernelRegistry {
    fn default() -> Self {
        let mut r = KernelRegistry { builders: BTreeMap::new() };
        r.register(Box::new(PeriodicKernel));
        r.register(Box::new(SlabKernel));
        r.register(Box::new(ChannelKernel));
        r.register(Box::new(FreeSpaceKernel));
        r
    }
}

impl KernelRegistry {
    pub fn register(&mut self, b: Box<dyn KernelBuilder>) {
        self.builders.insert(b.bc().to_string(), b);
    }

    pub fn get(&self, bc: &BoundarySpec) -> Result<&dyn KernelBuilder> {
        self.builders
            .get(&bc.to_string())
            .map(|b| b.as_ref())
            .ok_or_else(|| Error::UnsupportedBoundary(bc.to_string(), "kernel registry".into()))
    }

    pub fn names(&self) -> Vec<String> {
        self.builders.keys().cloned().collect()
    }
}

/// Builds the level-0 kernel for `bc` from the default registry.
pub fn build_kernel(
    bc: BoundarySpec,
    op: &dyn DiscreteOperator,
    n: usize,
    h: f64,
    lgf: &LgfSource,
) -> Result<KernelSpec> {
    KernelRegistry::default().get(&bc)?.build(op, n, h, lgf)
}
