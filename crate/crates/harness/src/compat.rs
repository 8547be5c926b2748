//! Base-level kernels that do not invert the multigrid stencil.

use std::fmt::Write as _;

use num_complex::Complex64;
use rustfft::FftPlanner;

use amrmg::spectral::CompatMode;
use amrmg::Result;

use crate::cases::Case;
use crate::config::Config;
use crate::run::{run_observed, RunSettings};

#[derive(Clone, Debug, PartialEq)]
pub struct CompatRow {
    pub m_kernel: usize,
    pub eps_r: f64,
    pub einf: f64,
    pub cycles: usize,
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompatRun {
    pub row: CompatRow,
    /// `(shell, amplitude)` of the base-level change during the last cycle.
    pub spectrum: Vec<(usize, f64)>,
}

pub const CSV_HEADER: &str = "m_kernel,eps_r,einf,cycles,converged";
pub const SPECTRUM_HEADER: &str = "shell,amplitude";

pub fn to_csv(runs: &[CompatRun]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{CSV_HEADER}");
    for r in runs {
        let r = &r.row;
        let _ = writeln!(s, "{},{:e},{:e},{},{}", r.m_kernel, r.eps_r, r.einf, r.cycles, r.converged);
    }
    s
}

pub fn spectrum_csv(spectrum: &[(usize, f64)]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{SPECTRUM_HEADER}");
    for (k, a) in spectrum {
        let _ = writeln!(s, "{k},{a:e}");
    }
    s
}

/// Root-mean-square Fourier amplitude of a periodic `n³` field per integer wavenumber shell.
pub fn shell_spectrum(values: &[f64], n: usize) -> Vec<(usize, f64)> {
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(n);
    let mut data: Vec<Complex64> = values.iter().map(|v| Complex64::new(*v, 0.0)).collect();
    let mut line = vec![Complex64::default(); n];
    for axis in 0..3 {
        let stride = n.pow(axis as u32);
        for base in 0..n * n * n {
            if (base / stride) % n != 0 {
                continue;
            }
            for (i, v) in line.iter_mut().enumerate() {
                *v = data[base + i * stride];
            }
            fft.process(&mut line);
            for (i, v) in line.iter().enumerate() {
                data[base + i * stride] = *v;
            }
        }
    }
    let signed = |i: usize| if i <= n / 2 { i as f64 } else { i as f64 - n as f64 };
    let shells = (3f64.sqrt() * n as f64 / 2.0).ceil() as usize + 1;
    let mut energy = vec![0.0; shells];
    let mut count = vec![0usize; shells];
    let norm = 1.0 / (n * n * n) as f64;
    for z in 0..n {
        for y in 0..n {
            for x in 0..n {
                let k = (signed(x).powi(2) + signed(y).powi(2) + signed(z).powi(2)).sqrt().round() as usize;
                energy[k] += (data[x + n * (y + n * z)] * norm).norm_sqr();
                count[k] += 1;
            }
        }
    }
    (0..shells).filter(|&k| count[k] > 0).map(|k| (k, (energy[k] / count[k] as f64).sqrt())).collect()
}

/// Solves `case` once per kernel order with compatibility checking downgraded to a warning.
pub fn run_compat(config: &Config, case: &dyn Case) -> Result<Vec<CompatRun>> {
    let eps = config.eps_r.values()[0];
    let mut runs = Vec::new();
    for &mk in &config.kernel_orders {
        let mut s = RunSettings::new(config, eps);
        s.kernel_order = mk;
        s.compat = CompatMode::Warn;
        let mut prev: Option<Vec<f64>> = None;
        let mut last_change: Vec<f64> = Vec::new();
        let out = run_observed(&s, case, &mut |g, u, _| {
            let cur = g.gather_level(0, u);
            if let Some(p) = &prev {
                last_change = cur.iter().zip(p).map(|(a, b)| a - b).collect();
            }
            prev = Some(cur);
        })?;
        let n = config.block_size * config.base_blocks;
        let spectrum = if last_change.is_empty() { Vec::new() } else { shell_spectrum(&last_change, n) };
        log::info!("kernel M={mk}, stencil M={}: E_inf={:e}, converged={}", config.m, out.einf, out.report.converged);
        runs.push(CompatRun {
            row: CompatRow {
                m_kernel: mk,
                eps_r: eps,
                einf: out.einf,
                cycles: out.report.cycles(),
                converged: out.report.converged,
            },
            spectrum,
        });
    }
    Ok(runs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_mode_lands_in_its_shell() {
        let n = 8;
        let mut v = vec![0.0; n * n * n];
        for z in 0..n {
            for y in 0..n {
                for x in 0..n {
                    v[x + n * (y + n * z)] = (2.0 * std::f64::consts::PI * 3.0 * x as f64 / n as f64).cos();
                }
            }
        }
        let s = shell_spectrum(&v, n);
        let peak = s.iter().max_by(|a, b| a.1.total_cmp(&b.1)).unwrap();
        assert_eq!(peak.0, 3);
        assert!(s.iter().filter(|(k, _)| *k != 3).all(|(_, a)| *a < 1e-14));
    }
}
