//! Lattice Green's functions of the x-split discrete Laplacians.
//!
//! Values are computed at unit spacing and rescaled: in three dimensions
//! `G_h = G_1 / h`, in two dimensions `G_h = G_1`, in one `G_h = h·G_1`.

use std::f64::consts::PI;
use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use rayon::prelude::*;

use super::symbol::DiscreteOperator;
use crate::error::{Error, Result};

/// Free 1D kernel, `ℒG = δ/h` for `ℒ = δ²/h²`.
pub fn lgf_free_1d(n: i64, h: f64) -> f64 {
    h * n.unsigned_abs() as f64 / 2.0
}

/// Decaying root `r` and `D = √(C(C − 4A))` of `A(u₊ − 2u + u₋) + C u = δ`.
pub fn screened_root(a: f64, c: f64) -> Result<(f64, f64)> {
    let disc = c * (c - 4.0 * a);
    if !(disc > 0.0) {
        return Err(Error::NonDecayingRoot(1.0));
    }
    let d = disc.sqrt();
    let r = 2.0 * a / (2.0 * a - c + d);
    if !(r.abs() < 1.0) {
        return Err(Error::NonDecayingRoot(r.abs()));
    }
    Ok((r, d))
}

/// Unit-spacing screened kernel `g(n) = −r^|n| / D`.
#[inline]
fn screened_unit(r: f64, d: f64, n: u64) -> f64 {
    -powu(r, n) / d
}

#[inline]
fn powu(r: f64, n: u64) -> f64 {
    if n == 0 {
        1.0
    } else if r > 0.0 {
        (n as f64 * r.ln()).exp()
    } else {
        r.powi(n.min(i32::MAX as u64) as i32)
    }
}

/// Screened 1D kernel of `op` for transverse wavenumbers `θ⊥ = k⊥ h ≠ 0`.
pub fn lgf_screened_1d(op: &dyn DiscreteOperator, theta_perp: [f64; 2], n: i64, h: f64) -> Result<f64> {
    let (a, c) = op
        .split_x(theta_perp[0], theta_perp[1])
        .ok_or_else(|| Error::UnsupportedBoundary("UPP".into(), op.name().to_string()))?;
    let (r, d) = screened_root(a, c)?;
    Ok(h * screened_unit(r, d, n.unsigned_abs()))
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else if n == 1 { z } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Composite Gauss-Legendre rule on `[a, b]` with `panels` equal panels.
fn composite(a: f64, b: f64, panels: usize, rule: &(Vec<f64>, Vec<f64>)) -> Vec<(f64, f64)> {
    let width = (b - a) / panels as f64;
    let mut out = Vec::with_capacity(panels * rule.0.len());
    for p in 0..panels {
        let lo = a + p as f64 * width;
        for (x, w) in rule.0.iter().zip(&rule.1) {
            out.push((lo + 0.5 * width * (x + 1.0), 0.5 * width * w));
        }
    }
    out
}

const BASE_POINTS: usize = 16;
const CHECK_POINTS: usize = 22;
const MAX_REFINEMENTS: usize = 4;

/// Tabulated Green's function on `[0, extent]^dim`, x fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct LgfTable {
    pub dim: usize,
    pub order: u32,
    pub extent: usize,
    pub h: f64,
    values: Vec<f64>,
}

impl LgfTable {
    pub fn from_values(dim: usize, order: u32, extent: usize, h: f64, values: Vec<f64>) -> Result<Self> {
        let expect = (extent + 1).pow(dim as u32);
        if values.len() != expect || !(1..=3).contains(&dim) {
            return Err(Error::TableFormat(format!(
                "dimension {dim}, extent {extent} needs {expect} values, got {}",
                values.len()
            )));
        }
        Ok(LgfTable { dim, order, extent, h, values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Value at lattice offset `n` (any signs); `None` beyond the extent.
    pub fn get(&self, n: &[i64]) -> Option<f64> {
        if n.len() != self.dim {
            return None;
        }
        let e = self.extent as u64 + 1;
        let mut idx = 0u64;
        for &v in n.iter().rev() {
            let a = v.unsigned_abs();
            if a >= e {
                return None;
            }
            idx = idx * e + a;
        }
        Some(self.values[idx as usize])
    }

    /// The same table at another spacing.
    pub fn rescaled(&self, h: f64) -> LgfTable {
        let factor = match self.dim {
            3 => self.h / h,
            2 => 1.0,
            _ => h / self.h,
        };
        LgfTable { h, values: self.values.iter().map(|v| v * factor).collect(), ..self.clone() }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(32 + 8 * self.values.len());
        out.extend_from_slice(b"LGFTABLE");
        out.extend_from_slice(&(self.dim as u32).to_le_bytes());
        out.extend_from_slice(&self.order.to_le_bytes());
        out.extend_from_slice(&(self.extent as u64).to_le_bytes());
        out.extend_from_slice(&self.h.to_le_bytes());
        for v in &self.values {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 32 || &bytes[..8] != b"LGFTABLE" {
            return Err(Error::TableFormat("missing LGFTABLE header".into()));
        }
        let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().unwrap());
        let dim = u32_at(8) as usize;
        let order = u32_at(12);
        let extent = u64::from_le_bytes(bytes[16..24].try_into().unwrap()) as usize;
        let h = f64::from_le_bytes(bytes[24..32].try_into().unwrap());
        let body = &bytes[32..];
        if body.len() % 8 != 0 {
            return Err(Error::TableFormat("body is not a whole number of f64 values".into()));
        }
        let values = body.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
        LgfTable::from_values(dim, order, extent, h, values)
    }

    pub fn write_to(&self, path: &Path) -> Result<()> {
        let mut f = fs::File::create(path)?;
        f.write_all(&self.to_bytes())?;
        Ok(())
    }

    pub fn read_from(path: &Path) -> Result<Self> {
        let mut bytes = Vec::new();
        fs::File::open(path)?.read_to_end(&mut bytes)?;
        Self::from_bytes(&bytes)
    }
}

fn split(op: &dyn DiscreteOperator, ty: f64, tz: f64) -> Result<(f64, f64)> {
    let (a, c) = op
        .split_x(ty, tz)
        .ok_or_else(|| Error::UnsupportedBoundary("free-space".into(), op.name().to_string()))?;
    screened_root(a, c)
}

fn order_tag(op: &dyn DiscreteOperator) -> u32 {
    op.stencil_order().unwrap_or(0) as u32
}

/// Three-dimensional unit-spacing values on the sorted wedge `a ≥ b ≥ c` for one `a`.
///
/// `G[a,b,c] = π⁻² ∫∫_{[0,π]²} g(a; k_y, k_z) cos(b k_y) cos(c k_z)`, evaluated on
/// the triangle `k_z ≤ k_y` after symmetrising, with the substitution
/// `k_y = s`, `k_z = sτ` that removes the origin singularity.
fn shell_3d(op: &dyn DiscreteOperator, a: usize, panels: usize, points: usize) -> Result<Vec<f64>> {
    let af = a as f64;
    // Beyond s_max the integrand is below 1e-18 of its peak.
    let mut s_max = PI;
    if a >= 8 {
        let mut s = 40.0 / af;
        while s < PI {
            let (r, _) = split(op, s, 0.0)?;
            if powu(r.abs(), a as u64) < 1e-18 {
                break;
            }
            s *= 1.2;
        }
        s_max = s.min(PI);
    }
    let osc = (s_max * af / 4.0).ceil() as usize;
    let ns = panels * osc.max(2);
    let rule = gauss_legendre(points);
    let sq = composite(0.0, s_max, ns, &rule);
    let tq = composite(0.0, 1.0, ns, &rule);

    let nb = a + 1;
    // cos(b k_y) depends on s only, so the τ sum is done first:
    // H[i, c] = Σ_j w_ij g_ij cos(c s_i τ_j).
    let mut h = vec![0.0; sq.len() * nb];
    let mut cy = vec![0.0; sq.len() * nb];
    let mut cz = vec![0.0; nb];
    for (i, &(s, ws)) in sq.iter().enumerate() {
        cos_multiples(s, &mut cy[i * nb..(i + 1) * nb]);
        let hi = &mut h[i * nb..(i + 1) * nb];
        for &(t, wt) in &tq {
            let kz = s * t;
            let (r, d) = split(op, s, kz)?;
            let w = ws * wt * s * screened_unit(r, d, a as u64);
            cos_multiples(kz, &mut cz);
            for (hc, c) in hi.iter_mut().zip(&cz) {
                *hc += w * c;
            }
        }
    }
    let mut out = vec![0.0; nb * nb];
    for i in 0..sq.len() {
        let hi = &h[i * nb..(i + 1) * nb];
        let ci = &cy[i * nb..(i + 1) * nb];
        for b in 0..nb {
            for c in 0..=b {
                out[b * nb + c] += ci[b] * hi[c] + ci[c] * hi[b];
            }
        }
    }
    for v in &mut out {
        *v /= PI * PI;
    }
    Ok(out)
}

/// `out[m] = cos(m x)` by the Chebyshev recurrence.
fn cos_multiples(x: f64, out: &mut [f64]) {
    let c1 = x.cos();
    for m in 0..out.len() {
        out[m] = match m {
            0 => 1.0,
            1 => c1,
            _ => 2.0 * c1 * out[m - 1] - out[m - 2],
        };
    }
}

fn converged_shell<F>(compute: F, tol: f64, scale: f64) -> Result<Vec<f64>>
where
    F: Fn(usize, usize) -> Result<Vec<f64>>,
{
    let mut worst = f64::INFINITY;
    for refine in 0..MAX_REFINEMENTS {
        let panels = 1 << refine;
        let lo = compute(panels, BASE_POINTS)?;
        let hi = compute(panels, CHECK_POINTS)?;
        worst = lo
            .iter()
            .zip(&hi)
            .map(|(x, y)| (x - y).abs() / y.abs().max(scale))
            .fold(0.0, f64::max);
        if worst <= tol {
            return Ok(hi);
        }
    }
    Err(Error::Quadrature { achieved: worst, requested: tol })
}

/// Free-space Green's function of `op` in two or three dimensions on
/// `[0, extent]^dim`, at spacing `h`. The 2D table is normalised by `G[0] = 0`.
pub fn lgf_table_nd(op: &dyn DiscreteOperator, dim: usize, extent: usize, h: f64, tol: f64) -> Result<LgfTable> {
    let unit = match dim {
        3 => table_3d(op, extent, tol)?,
        2 => table_2d(op, extent, tol)?,
        _ => return Err(Error::Precondition(format!("free-space tables exist for 2D and 3D, not {dim}D"))),
    };
    Ok(unit.rescaled(h))
}

fn table_3d(op: &dyn DiscreteOperator, extent: usize, tol: f64) -> Result<LgfTable> {
    let shells: Vec<Result<Vec<f64>>> = (0..=extent)
        .into_par_iter()
        .map(|a| converged_shell(|p, q| shell_3d(op, a, p, q), tol, 1e-3))
        .collect();
    let e = extent + 1;
    let mut values = vec![0.0; e * e * e];
    for (a, shell) in shells.into_iter().enumerate() {
        let shell = shell?;
        let nb = a + 1;
        for b in 0..nb {
            for c in 0..=b {
                let v = shell[b * nb + c];
                for p in permutations([a, b, c]) {
                    values[p[0] + e * (p[1] + e * p[2])] = v;
                }
            }
        }
    }
    LgfTable::from_values(3, order_tag(op), extent, 1.0, values)
}

fn permutations(v: [usize; 3]) -> [[usize; 3]; 6] {
    let [a, b, c] = v;
    [[a, b, c], [a, c, b], [b, a, c], [b, c, a], [c, a, b], [c, b, a]]
}

/// `G[a,b] = π⁻¹ ∫_0^π (g(a;k) cos(bk) − g(0;k)) dk` for all `b ≤ a`.
fn shell_2d(op: &dyn DiscreteOperator, a: usize, panels: usize, points: usize) -> Result<Vec<f64>> {
    let n = panels * ((PI * a.max(1) as f64 / 4.0).ceil() as usize).max(4);
    let q = composite(0.0, PI, n, &gauss_legendre(points));
    let mut out = vec![0.0; a + 1];
    for &(k, w) in &q {
        let (r, d) = split(op, k, 0.0)?;
        for (b, o) in out.iter_mut().enumerate() {
            let bk = b as f64 * k;
            // 1 − r^a cos(bk), cancellation-free for small k.
            let num = if r > 0.0 {
                let sh = (0.5 * bk).sin();
                -(a as f64 * r.ln()).exp_m1() * bk.cos() + 2.0 * sh * sh
            } else {
                1.0 - powu(r, a as u64) * bk.cos()
            };
            *o += w * num / d;
        }
    }
    Ok(out.into_iter().map(|v| v / PI).collect())
}

fn table_2d(op: &dyn DiscreteOperator, extent: usize, tol: f64) -> Result<LgfTable> {
    let shells: Vec<Result<Vec<f64>>> = (0..=extent)
        .into_par_iter()
        .map(|a| converged_shell(|p, q| shell_2d(op, a, p, q), tol, 1e-2))
        .collect();
    let e = extent + 1;
    let mut values = vec![0.0; e * e];
    for (a, shell) in shells.into_iter().enumerate() {
        for (b, v) in shell?.into_iter().enumerate() {
            values[a + e * b] = v;
            values[b + e * a] = v;
        }
    }
    LgfTable::from_values(2, order_tag(op), extent, 1.0, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::symbol::Mehrstellen;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(8);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(14)).sum();
        assert!((s - 2.0 / 15.0).abs() < 1e-14);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn free_kernel_satisfies_difference_equation() {
        let h = 0.3;
        assert_eq!(lgf_free_1d(0, h), 0.0);
        let lap = (lgf_free_1d(1, h) - 2.0 * lgf_free_1d(0, h) + lgf_free_1d(-1, h)) / (h * h);
        assert!((lap - 1.0 / h).abs() < 1e-12);
        assert!((lgf_free_1d(5, h) - 2.5 * h).abs() < 1e-15);
    }

    #[test]
    fn screened_kernel_decays_and_is_symmetric() {
        let op = Mehrstellen::new(4).unwrap();
        let h = 0.1;
        let t = [PI, PI];
        let g: Vec<f64> = (-6..=6).map(|n| lgf_screened_1d(&op, t, n, h).unwrap()).collect();
        for n in 0..6 {
            assert_eq!(g[n], g[12 - n]);
        }
        assert!(g[6].abs() > 1e3 * g[0].abs());
    }

    #[test]
    fn table_bytes_round_trip() {
        let t = LgfTable::from_values(2, 4, 2, 0.5, (0..9).map(|v| v as f64 * 0.1).collect()).unwrap();
        let back = LgfTable::from_bytes(&t.to_bytes()).unwrap();
        assert_eq!(back, t);
        assert_eq!(t.to_bytes().len(), 32 + 9 * 8);
        assert_eq!(t.get(&[-1, 2]), Some(0.7000000000000001));
        assert!(LgfTable::from_bytes(b"short").is_err());
    }
}
