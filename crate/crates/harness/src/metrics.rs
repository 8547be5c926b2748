//! Error norms and log-log fits.

use amrmg::grid::{CompositeGrid, FieldId};

/// Maximum nodal error of `u` against `reference` over all leaf blocks, after adding `shift`.
pub fn einf(grid: &CompositeGrid, u: FieldId, reference: &dyn Fn([f64; 3]) -> f64, shift: f64) -> f64 {
    let shape = grid.shape();
    let b = shape.b as isize;
    let mut e: f64 = 0.0;
    for blk in grid.leaves() {
        let d = blk.field(u);
        for k in 0..b {
            for j in 0..b {
                for i in 0..b {
                    let v = d[shape.idx(i, j, k)] + shift;
                    let err = (v - reference(blk.position([i, j, k]))).abs();
                    // NaN has to win the max
                    if err.is_nan() || err > e {
                        e = err;
                    }
                }
            }
        }
    }
    e
}

/// Constant that aligns a solution with `reference` on the base level, for problems
/// determined up to a constant. `u` must hold synchronised base-level values.
pub fn mean_offset(grid: &CompositeGrid, u: FieldId, reference: &dyn Fn([f64; 3]) -> f64) -> f64 {
    let shape = grid.shape();
    let b = shape.b as isize;
    let mut sum = 0.0;
    let mut count = 0usize;
    for blk in &grid.level(0).blocks {
        let d = blk.field(u);
        for k in 0..b {
            for j in 0..b {
                for i in 0..b {
                    sum += reference(blk.position([i, j, k])) - d[shape.idx(i, j, k)];
                    count += 1;
                }
            }
        }
    }
    sum / count as f64
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;
    use amrmg::{BoundarySpec, GridParams};

    #[test]
    fn exact_samples_give_zero_and_shift_is_measured() {
        let params = GridParams::new(8, 1, BoundarySpec::PPP).unwrap();
        let mut g = CompositeGrid::uniform(params).unwrap();
        let u = g.add_field("u");
        let r = |p: [f64; 3]| p[0] + 2.0 * p[1] * p[2];
        g.fill_with(u, r);
        assert_eq!(einf(&g, u, &r, 0.0), 0.0);
        assert!((einf(&g, u, &r, 0.25) - 0.25).abs() < 1e-15);
        g.fill_with(u, |p| r(p) - 0.5);
        assert!((mean_offset(&g, u, &r) - 0.5).abs() < 1e-14);
    }

    #[test]
    fn slope_of_power_law() {
        let x = [1e-2, 1e-3, 1e-4];
        let y: Vec<f64> = x.iter().map(|v: &f64| 3.0 * v.powf(1.5)).collect();
        assert!((loglog_slope(&x, &y) - 1.5).abs() < 1e-12);
    }
}
