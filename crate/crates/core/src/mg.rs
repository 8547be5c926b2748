//! Full-approximation-scheme V-cycles on the composite grid.

use std::fmt::Write as _;
use std::sync::Mutex;
use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ghost::{fill_ghosts, fill_level, inject_level, GhostPlan, JumpFill};
use crate::grid::{CompositeGrid, FieldId};
use crate::spectral::DirectSolver;
use crate::stencil::{for_each_node, StencilSet};
use crate::transfer;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CycleConfig {
    pub eta1: usize,
    pub eta2: usize,
    /// Stencil order M.
    pub order: usize,
    /// Tolerance on the relative increment between cycles.
    pub tol: f64,
    pub max_cycles: usize,
    /// Remove the mean of the base-level solution (fully periodic problems).
    pub zero_mean: bool,
    /// Record wall time per cycle. Off keeps reports reproducible.
    pub timing: bool,
}

impl Default for CycleConfig {
    fn default() -> Self {
        CycleConfig { eta1: 3, eta2: 3, order: 4, tol: 1e-6, max_cycles: 20, zero_mean: false, timing: false }
    }
}

impl CycleConfig {
    pub fn validate(&self) -> Result<()> {
        if ![2, 4, 6].contains(&self.order) {
            return Err(Error::CycleConfig(format!("order {} is not one of 2, 4, 6", self.order)));
        }
        if !(self.tol > 0.0) {
            return Err(Error::CycleConfig(format!("tolerance must be positive, got {}", self.tol)));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CycleRecord {
    pub cycle: usize,
    pub res_inf: f64,
    pub cauchy: f64,
    pub res_integral: f64,
    pub seconds: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SolveReport {
    /// Residual ∞-norm of the initial guess.
    pub res0: f64,
    pub rows: Vec<CycleRecord>,
    pub converged: bool,
}

impl SolveReport {
    pub const CSV_HEADER: &'static str = "cycle,res_inf,cauchy,res_integral,seconds";

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{}", Self::CSV_HEADER);
        for r in &self.rows {
            let _ = writeln!(s, "{},{:e},{:e},{:e},{:e}", r.cycle, r.res_inf, r.cauchy, r.res_integral, r.seconds);
        }
        s
    }

    pub fn cycles(&self) -> usize {
        self.rows.len()
    }
}

/// Base-level solver used at the bottom of every cycle.
pub trait CoarseSolver: Send + Sync {
    fn name(&self) -> &str;
    /// Solves on the full base level, values x fastest.
    fn solve(&self, f0: &[f64], zero_mean: bool) -> Result<Vec<f64>>;
}

impl CoarseSolver for DirectSolver {
    fn name(&self) -> &str {
        &self.kernel().operator
    }

    fn solve(&self, f0: &[f64], zero_mean: bool) -> Result<Vec<f64>> {
        Ok(DirectSolver::solve(self, f0, zero_mean))
    }
}

/// Fields used by the cycle besides the solution.
/// Wraps a coarse solver and remembers the mean and largest magnitude of its last output.
pub struct MeanTracker<'a> {
    inner: &'a dyn CoarseSolver,
    last: Mutex<(f64, f64)>,
}

impl<'a> MeanTracker<'a> {
    pub fn new(inner: &'a dyn CoarseSolver) -> Self {
        MeanTracker { inner, last: Mutex::new((f64::NAN, f64::NAN)) }
    }

    /// `(mean, amplitude)` of the most recent base-level solution; NaN before the first solve.
    pub fn last(&self) -> (f64, f64) {
        *self.last.lock().expect("tracker lock")
    }
}

impl CoarseSolver for MeanTracker<'_> {
    fn name(&self) -> &str {
        self.inner.name()
    }

    fn solve(&self, f0: &[f64], zero_mean: bool) -> Result<Vec<f64>> {
        let u = self.inner.solve(f0, zero_mean)?;
        let mean = u.iter().sum::<f64>() / u.len() as f64;
        let amp = u.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        *self.last.lock().expect("tracker lock") = (mean, amp);
        Ok(u)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Workspace {
    pub u: FieldId,
    pub rhs: FieldId,
    pub res: FieldId,
    pub uhat: FieldId,
}

impl Workspace {
    /// Adds the scratch fields; `u` must already exist.
    pub fn new(grid: &mut CompositeGrid, u: FieldId) -> Self {
        Workspace {
            u,
            rhs: grid.add_field("mg.rhs"),
            res: grid.add_field("mg.res"),
            uhat: grid.add_field("mg.uhat"),
        }
    }
}

/// Everything a cycle needs that does not change during a solve.
pub struct Multigrid<'a> {
    pub config: CycleConfig,
    pub plan: GhostPlan,
    pub stencils: Vec<StencilSet>,
    pub coarse: &'a dyn CoarseSolver,
}

impl<'a> Multigrid<'a> {
    pub fn new(grid: &CompositeGrid, config: CycleConfig, coarse: &'a dyn CoarseSolver) -> Result<Self> {
        config.validate()?;
        let plan = GhostPlan::build(grid, config.order + 2)?;
        let stencils = (0..grid.num_levels())
            .map(|k| StencilSet::new(config.order, grid.params().h(k)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Multigrid { config, plan, stencils, coarse })
    }

    /// Writes `R_h f` into `rhs` on every block, after a composite ghost fill of `f`.
    pub fn prepare_rhs(&self, grid: &mut CompositeGrid, f: FieldId, rhs: FieldId) {
        fill_ghosts(grid, &self.plan, f);
        let shape = grid.shape();
        for k in 0..grid.num_levels() {
            let st = &self.stencils[k];
            grid.level_mut(k).blocks.par_iter_mut().for_each(|b| {
                let (out, fv) = b.field_pair_mut(rhs, f);
                st.correct_rhs(shape, fv, out);
            });
        }
    }

    /// One ghost refresh and Gauss-Seidel pass over every block of level `k`.
    ///
    /// Refined level-`k − 1` blocks are first overwritten with injected level-`k` values so
    /// that interpolated ghosts see the same data as the composite operator.
    pub fn smooth_sweep(&self, grid: &mut CompositeGrid, ws: &Workspace, k: usize) {
        if k > 0 {
            inject_level(grid, ws.u, k - 1);
        }
        fill_level(grid, &self.plan, ws.u, k, JumpFill::Interpolate);
        let shape = grid.shape();
        let params = *grid.params();
        let st = &self.stencils[k];
        grid.level_mut(k).blocks.par_iter_mut().for_each(|b| {
            let range = params.active_range(&b.index);
            let (u, f) = b.field_pair_mut(ws.u, ws.rhs);
            st.gauss_seidel(shape, u, f, range);
        });
    }

    fn level_residual(&self, grid: &mut CompositeGrid, ws: &Workspace, k: usize, leaves_only: bool) {
        let shape = grid.shape();
        let params = *grid.params();
        let st = &self.stencils[k];
        grid.level_mut(k).blocks.par_iter_mut().for_each(|b| {
            if leaves_only && !b.leaf {
                return;
            }
            let range = params.active_range(&b.index);
            let fields = b.fields_mut();
            let mut r = std::mem::take(&mut fields[ws.res.0]);
            st.residual(shape, &fields[ws.u.0], &fields[ws.rhs.0], &mut r, range);
            fields[ws.res.0] = r;
        });
    }

    /// Full weighting of the level-`k` residual into the refined level-`k − 1` blocks.
    fn restrict_residual(&self, grid: &mut CompositeGrid, ws: &Workspace, k: usize) {
        let shape = grid.shape();
        let (parents, children) = grid.split_adjacent_mut(k - 1);
        parents.blocks.par_iter_mut().filter(|p| !p.leaf).for_each(|p| {
            let idx = p.index;
            for c in idx.children() {
                let child = &children.blocks[children.slot(&c.ijk).expect("octet complete")];
                let octant = [0, 1, 2].map(|d| (c.ijk[d] - 2 * idx.ijk[d]) as usize);
                transfer::restrict_full_weighting(shape, child.field(ws.res), octant, p.field_mut(ws.res));
            }
        });
    }

    /// One V(η₁, η₂) cycle.
    pub fn v_cycle(&self, grid: &mut CompositeGrid, ws: &Workspace) -> Result<()> {
        let shape = grid.shape();
        let finest = grid.finest_level();
        for k in (1..=finest).rev() {
            for _ in 0..self.config.eta1 {
                self.smooth_sweep(grid, ws, k);
            }
            fill_level(grid, &self.plan, ws.u, k, JumpFill::Interpolate);
            self.level_residual(grid, ws, k, false);
            fill_level(grid, &self.plan, ws.res, k, JumpFill::Zero);
            inject_level(grid, ws.u, k - 1);
            self.restrict_residual(grid, ws, k);
            fill_level(grid, &self.plan, ws.u, k - 1, JumpFill::Interpolate);
            // Second restriction: fine residual ghosts at jumps now interpolate the coarse
            // leaf residual instead of reading zero.
            self.level_residual(grid, ws, k - 1, true);
            fill_level(grid, &self.plan, ws.res, k, JumpFill::Interpolate);
            self.restrict_residual(grid, ws, k);
            let st = &self.stencils[k - 1];
            grid.level_mut(k - 1).blocks.par_iter_mut().for_each(|p| {
                if !p.leaf {
                    let fields = p.fields_mut();
                    let mut lap = vec![0.0; shape.len()];
                    let b = shape.b as isize;
                    st.apply_lhs(shape, &fields[ws.u.0], &mut lap, [[0, b]; 3]);
                    let (r, rhs) = (&fields[ws.res.0], &fields[ws.rhs.0]);
                    let mut out = rhs.clone();
                    for_each_node(shape, [[0, b]; 3], |c| out[c] = r[c] + lap[c]);
                    fields[ws.rhs.0] = out;
                }
                let fields = p.fields_mut();
                let (u, uhat) = (fields[ws.u.0].clone(), &mut fields[ws.uhat.0]);
                uhat.copy_from_slice(&u);
            });
        }

        let f0 = grid.gather_level(0, ws.rhs);
        let u0 = self.coarse.solve(&f0, self.config.zero_mean)?;
        grid.scatter_level(0, ws.u, &u0);

        for k in 1..=finest {
            grid.level_mut(k - 1).blocks.par_iter_mut().for_each(|p| {
                let fields = p.fields_mut();
                let mut eps = std::mem::take(&mut fields[ws.res.0]);
                for (e, (u, h)) in eps.iter_mut().zip(fields[ws.u.0].iter().zip(&fields[ws.uhat.0])) {
                    *e = u - h;
                }
                fields[ws.res.0] = eps;
            });
            fill_level(grid, &self.plan, ws.res, k - 1, JumpFill::Interpolate);
            {
                let (parents, children) = grid.split_levels_mut(k);
                let parents: &crate::grid::Level = parents;
                children.blocks.par_iter_mut().for_each(|c| {
                    let idx = c.index;
                    let p = idx.parent().expect("level >= 1");
                    let parent = &parents.blocks[parents.slot(&p.ijk).expect("nested")];
                    let octant = [0, 1, 2].map(|d| (idx.ijk[d] - 2 * p.ijk[d]) as usize);
                    transfer::prolong_add(shape, parent.field(ws.res), octant, c.field_mut(ws.u));
                });
            }
            for _ in 0..self.config.eta2 {
                self.smooth_sweep(grid, ws, k);
            }
        }
        Ok(())
    }

    /// Composite residual on the leaves, evaluated on a synced copy of `u`.
    /// Returns (∞-norm, nodal integral).
    pub fn composite_residual(&self, grid: &mut CompositeGrid, ws: &Workspace) -> (f64, f64) {
        grid.copy_field(ws.u, ws.uhat);
        let scratch = Workspace { u: ws.uhat, ..*ws };
        fill_ghosts(grid, &self.plan, scratch.u);
        for k in 0..grid.num_levels() {
            self.level_residual(grid, &scratch, k, true);
        }
        residual_norms(grid, ws.res)
    }

    /// Iterates cycles from the current `u` until the relative increment drops below `tol`.
    pub fn solve(&self, grid: &mut CompositeGrid, ws: &Workspace, f: FieldId) -> Result<SolveReport> {
        self.solve_observed(grid, ws, f, &mut |_, _| {})
    }

    /// [`solve`](Self::solve) with a callback after every cycle.
    pub fn solve_observed(
        &self,
        grid: &mut CompositeGrid,
        ws: &Workspace,
        f: FieldId,
        observer: &mut dyn FnMut(&CompositeGrid, &CycleRecord),
    ) -> Result<SolveReport> {
        self.prepare_rhs(grid, f, ws.rhs);
        let (res0, _) = self.composite_residual(grid, ws);
        let mut report = SolveReport { res0, rows: Vec::new(), converged: false };
        let mut prev = leaf_values(grid, ws.u);
        for cycle in 1..=self.config.max_cycles {
            let start = Instant::now();
            self.v_cycle(grid, ws)?;
            let cur = leaf_values(grid, ws.u);
            let cauchy = relative_increment(&prev, &cur);
            let (res_inf, res_integral) = self.composite_residual(grid, ws);
            let seconds = if self.config.timing { start.elapsed().as_secs_f64() } else { 0.0 };
            log::debug!("cycle {cycle}: res {res_inf:e}, increment {cauchy:e}");
            let rec = CycleRecord { cycle, res_inf, cauchy, res_integral, seconds };
            observer(grid, &rec);
            report.rows.push(rec);
            prev = cur;
            if !(res_inf.is_finite() && cauchy.is_finite()) {
                log::warn!("iteration diverged at cycle {cycle}");
                break;
            }
            if cauchy < self.config.tol {
                report.converged = true;
                break;
            }
        }
        if !report.converged {
            log::warn!("no convergence after {} cycles", self.config.max_cycles);
        }
        Ok(report)
    }
}

/// Solves `Δu = f` on `grid` starting from the current `u`.
pub fn solve(
    grid: &mut CompositeGrid,
    u: FieldId,
    f: FieldId,
    config: &CycleConfig,
    coarse: &dyn CoarseSolver,
) -> Result<SolveReport> {
    let mg = Multigrid::new(grid, *config, coarse)?;
    let ws = Workspace::new(grid, u);
    mg.solve(grid, &ws, f)
}

/// Interior values of all leaf blocks, block order then node order.
pub fn leaf_values(grid: &CompositeGrid, f: FieldId) -> Vec<f64> {
    let shape = grid.shape();
    let b = shape.b as isize;
    let mut out = Vec::new();
    for blk in grid.leaves() {
        let d = blk.field(f);
        for_each_node(shape, [[0, b]; 3], |c| out.push(d[c]));
    }
    out
}

/// `max|new − old| / max|new|`, or the absolute increment when `new` vanishes.
pub fn relative_increment(old: &[f64], new: &[f64]) -> f64 {
    let diff = old.iter().zip(new).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let norm = new.iter().map(|v| v.abs()).fold(0.0, f64::max);
    if norm > 0.0 {
        diff / norm
    } else {
        diff
    }
}

/// ∞-norm and nodal integral `Σ r h³` of a residual field over the leaves.
pub fn residual_norms(grid: &CompositeGrid, r: FieldId) -> (f64, f64) {
    let shape = grid.shape();
    let b = shape.b as isize;
    let mut inf: f64 = 0.0;
    let mut integral = 0.0;
    for blk in grid.leaves() {
        let d = blk.field(r);
        let h3 = blk.h * blk.h * blk.h;
        let mut part = 0.0;
        for_each_node(shape, [[0, b]; 3], |c| {
            inf = inf.max(d[c].abs());
            part += d[c];
        });
        integral += part * h3;
    }
    (inf, integral)
}

/// Nodal integral `Σ r h³` over the leaves.
pub fn residual_integral(grid: &CompositeGrid, r: FieldId) -> f64 {
    residual_norms(grid, r).1
}
