//! One adapted solve of a case, with error measurement.

use amrmg::adapt::{adapt, AdaptDiagnostics, AdaptParams};
use amrmg::ghost::sync_down;
use amrmg::grid::{CompositeGrid, FieldId, GridParams};
use amrmg::spectral::{build_kernel, check_compat, mehrstellen, CompatMode, DirectSolver, LgfSource};
use amrmg::{CycleRecord, Error, MeanTracker, Multigrid, Result, SolveReport, Workspace};

use crate::cases::Case;
use crate::config::Config;
use crate::metrics::{einf, mean_offset};

/// Everything needed for one solve besides the case.
#[derive(Clone, Debug)]
pub struct RunSettings {
    pub config: Config,
    pub eps_r: f64,
    /// Order of the operator the base-level kernel inverts; the stencil order by default.
    pub kernel_order: usize,
    pub compat: CompatMode,
    pub lgf: LgfSource,
}

impl RunSettings {
    pub fn new(config: &Config, eps_r: f64) -> Self {
        let lgf = match &config.lgf_cache {
            Some(d) => LgfSource::with_cache(d),
            None => LgfSource::default(),
        };
        RunSettings { config: config.clone(), eps_r, kernel_order: config.m, compat: CompatMode::Error, lgf }
    }
}

#[derive(Debug)]
pub struct Outcome {
    pub report: SolveReport,
    pub einf: f64,
    pub blocks: usize,
    pub leaves: usize,
    pub finest_level: usize,
    pub adapt: AdaptDiagnostics,
    /// Mean of the last base-level direct solution.
    pub coarse_mean: f64,
    /// Largest magnitude of that solution.
    pub amplitude: f64,
}

/// Builds the adapted grid for `case`, with fields `u` (zero) and `f` (sampled source).
pub fn prepare_grid(s: &RunSettings, case: &dyn Case) -> Result<(CompositeGrid, AdaptDiagnostics, FieldId, FieldId)> {
    let c = &s.config;
    let bc = case.bc();
    if bc != c.boundary()? {
        return Err(Error::UnsupportedBoundary(c.bc.clone(), case.name().to_string()));
    }
    let params = GridParams::new(c.block_size, c.base_blocks, bc)?;
    let mut grid = CompositeGrid::uniform(params)?;
    let mut diag = AdaptDiagnostics::default();
    if c.max_level > 0 {
        let mut ap = AdaptParams::new(s.eps_r, c.order_w(), c.max_level)?;
        ap.max_blocks = c.max_blocks;
        if let Some(e) = c.eps_c {
            ap.eps_c = e;
            ap.validate()?;
        }
        let criterion = |p: [f64; 3]| case.criterion(p);
        let (g, d) = adapt(&grid, &criterion, &ap)?;
        grid = g;
        diag = d;
    }
    for s in &diag.suppressed {
        log::debug!("refinement of {:?} suppressed by {:?}", s.requested, s.blocked_by);
    }
    let u = grid.add_field("u");
    let f = grid.add_field("f");
    grid.fill_with(f, |p| case.f(p));
    Ok((grid, diag, u, f))
}

pub fn direct_solver(s: &RunSettings, grid: &CompositeGrid) -> Result<DirectSolver> {
    let params = grid.params();
    let op = mehrstellen(s.kernel_order)?;
    let kernel = build_kernel(params.boundary, op.as_ref(), params.nodes_per_axis(0), params.h0(), &s.lgf)?;
    check_compat(&kernel, s.config.m, s.compat)?;
    Ok(DirectSolver::new(kernel))
}

/// Adapts, solves and measures. `observer` sees the grid after every cycle.
pub fn run_observed(
    s: &RunSettings,
    case: &dyn Case,
    observer: &mut dyn FnMut(&CompositeGrid, FieldId, &CycleRecord),
) -> Result<Outcome> {
    let (mut grid, adapt, u, f) = prepare_grid(s, case)?;
    let solver = direct_solver(s, &grid)?;
    let mut cycle = s.config.cycle();
    cycle.zero_mean = grid.boundary().is_singular();
    let tracker = MeanTracker::new(&solver);
    let mg = Multigrid::new(&grid, cycle, &tracker)?;
    let ws = Workspace::new(&mut grid, u);
    let report = mg.solve_observed(&mut grid, &ws, f, &mut |g, rec| observer(g, u, rec))?;

    let synced = grid.add_field("eval");
    grid.copy_field(u, synced);
    sync_down(&mut grid, synced);
    let reference = |p: [f64; 3]| case.u_ref(p);
    let shift = if cycle.zero_mean { mean_offset(&grid, synced, &reference) } else { 0.0 };
    let e = einf(&grid, u, &reference, shift);

    let (coarse_mean, amplitude) = tracker.last();
    Ok(Outcome {
        report,
        einf: e,
        blocks: grid.block_count(),
        leaves: grid.leaves().count(),
        finest_level: grid.finest_level(),
        adapt,
        coarse_mean,
        amplitude,
    })
}

pub fn run(s: &RunSettings, case: &dyn Case) -> Result<Outcome> {
    run_observed(s, case, &mut |_, _, _| {})
}
