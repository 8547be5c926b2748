//! Detail coefficients, refinement/coarsening and 2:1 balancing.

use std::collections::{BTreeSet, HashMap};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{balance_requirements, BlockIndex, CompositeGrid, GridParams, Shape, Topology};
use crate::interp::lagrange_weights;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdaptParams {
    pub eps_r: f64,
    pub eps_c: f64,
    /// Interpolation order W used for the detail coefficient.
    pub order: usize,
    pub max_level: usize,
    /// Refinement stops with [`Error::BlockBudget`] once the grid holds more blocks.
    pub max_blocks: Option<usize>,
}

impl AdaptParams {
    /// Coarsening tolerance defaults to `eps_r / 100`.
    pub fn new(eps_r: f64, order: usize, max_level: usize) -> Result<Self> {
        let p = AdaptParams { eps_r, eps_c: eps_r / 100.0, order, max_level, max_blocks: None };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps_c >= 0.0 && self.eps_c < self.eps_r) {
            return Err(Error::AdaptParams(format!(
                "need 0 <= eps_c < eps_r, got eps_c = {}, eps_r = {}",
                self.eps_c, self.eps_r
            )));
        }
        if self.order < 2 || self.order % 2 != 0 {
            return Err(Error::AdaptParams(format!("order W = {} must be even and >= 2", self.order)));
        }
        Ok(())
    }
}

/// A refinement that was not performed because it would have put a block
/// above level 0 on an unbounded face.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Suppression {
    pub requested: BlockIndex,
    pub blocked_by: BlockIndex,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AdaptDiagnostics {
    pub suppressed: Vec<Suppression>,
    pub refined: usize,
    pub coarsened: usize,
}

/// Maximum absolute difference between the block's nodes and the order-`w`
/// interpolation of its even-index samples.
///
/// `valid` is the local index range `[lo, hi)` per axis holding valid data
/// (interior plus usable ghosts). Windows are shifted to stay inside it.
pub fn detail_coefficient(data: &[f64], shape: Shape, w: usize, valid: [[isize; 2]; 3]) -> Result<f64> {
    let b = shape.b as isize;
    let stencils: Vec<Vec<AxisStencil>> = (0..3)
        .map(|d| (0..b).map(|i| axis_stencil(i, w, valid[d])).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    let mut gamma: f64 = 0.0;
    for k in 0..b {
        let sz = &stencils[2][k as usize];
        for j in 0..b {
            let sy = &stencils[1][j as usize];
            for i in 0..b {
                let sx = &stencils[0][i as usize];
                if sx.exact && sy.exact && sz.exact {
                    continue;
                }
                let mut acc = 0.0;
                for (c, wz) in sz.weights.iter().enumerate() {
                    let kk = sz.start + 2 * c as isize;
                    for (bb, wy) in sy.weights.iter().enumerate() {
                        let jj = sy.start + 2 * bb as isize;
                        let wyz = wy * wz;
                        for (a, wx) in sx.weights.iter().enumerate() {
                            let ii = sx.start + 2 * a as isize;
                            acc += wx * wyz * data[shape.idx(ii, jj, kk)];
                        }
                    }
                }
                gamma = gamma.max((data[shape.idx(i, j, k)] - acc).abs());
            }
        }
    }
    Ok(gamma)
}

struct AxisStencil {
    start: isize,
    weights: Vec<f64>,
    exact: bool,
}

fn axis_stencil(i: isize, w: usize, valid: [isize; 2]) -> Result<AxisStencil> {
    if i.rem_euclid(2) == 0 {
        return Ok(AxisStencil { start: i, weights: vec![1.0], exact: true });
    }
    let span = 2 * (w as isize - 1);
    let mut start = i - (w as isize - 1);
    let lo_even = valid[0] + valid[0].rem_euclid(2);
    if start < lo_even {
        start = lo_even;
    }
    let hi_even = (valid[1] - 1) - (valid[1] - 1).rem_euclid(2);
    if start + span > hi_even {
        start = hi_even - span;
    }
    if start < lo_even {
        return Err(Error::Precondition(format!(
            "interpolation of order {w} needs {} even samples but only [{}, {}) is valid",
            w, valid[0], valid[1]
        )));
    }
    let nodes: Vec<f64> = (0..w).map(|m| (start + 2 * m as isize) as f64).collect();
    Ok(AxisStencil { start, weights: lagrange_weights(&nodes, i as f64), exact: false })
}

/// Valid index range of a block's ghosted samples: ghosts beyond an
/// unbounded face are excluded.
pub fn valid_range(params: &GridParams, b: &BlockIndex) -> [[isize; 2]; 3] {
    let g = crate::grid::GHOST_WIDTH as isize;
    let bs = params.block_size as isize;
    let n = params.blocks_per_axis(b.level);
    let mut r = [[-g, bs + g]; 3];
    for d in 0..3 {
        if params.boundary.is_unbounded(d) {
            if b.ijk[d] == 0 {
                r[d][0] = 0;
            }
            if b.ijk[d] == n - 1 {
                r[d][1] = bs;
            }
        }
    }
    r
}

/// Detail coefficient of an analytic criterion sampled on the block `b`.
pub fn block_detail(
    params: &GridParams,
    b: &BlockIndex,
    criterion: &(dyn Fn([f64; 3]) -> f64 + Sync),
    order: usize,
) -> Result<f64> {
    let shape = params.shape();
    let h = params.h(b.level);
    let bs = params.block_size as isize;
    let g = shape.g as isize;
    let ext = params.extent;
    let mut data = vec![0.0; shape.len()];
    for k in -g..bs + g {
        for j in -g..bs + g {
            for i in -g..bs + g {
                let p = [i, j, k];
                let x = [0, 1, 2].map(|d| {
                    let v = (b.ijk[d] as isize * bs + p[d]) as f64 * h;
                    if params.boundary.is_periodic(d) {
                        v.rem_euclid(ext)
                    } else {
                        v
                    }
                });
                data[shape.idx(i, j, k)] = criterion(x);
            }
        }
    }
    detail_coefficient(&data, shape, order, valid_range(params, b))
}

/// Blocks that must be refined, lowest level first, for `target` to be
/// refined while keeping the grid nested and balanced. Fails with the first
/// block whose refinement would touch an unbounded face.
fn refinement_closure(
    params: &GridParams,
    topo: &Topology,
    target: BlockIndex,
) -> std::result::Result<Vec<BlockIndex>, BlockIndex> {
    let mut planned: BTreeSet<BlockIndex> = BTreeSet::new();
    let mut stack = vec![target];
    let exists = |b: &BlockIndex, planned: &BTreeSet<BlockIndex>| {
        topo.contains(b) || b.parent().is_some_and(|p| planned.contains(&p))
    };
    while let Some(x) = stack.pop() {
        if planned.contains(&x) || topo.is_refined(&x) {
            continue;
        }
        if params.touches_unbounded(&x) {
            return Err(x);
        }
        planned.insert(x);
        if !exists(&x, &planned) {
            stack.push(x.parent().expect("base level always exists"));
        }
        for d in neighbour_offsets() {
            let c = [x.ijk[0] + d[0], x.ijk[1] + d[1], x.ijk[2] + d[2]];
            if let Some(w) = params.wrap(x.level, c) {
                let nb = BlockIndex::new(x.level, w);
                if !exists(&nb, &planned) {
                    stack.push(nb.parent().expect("base level always exists"));
                }
            }
        }
    }
    let mut out: Vec<BlockIndex> = planned.into_iter().collect();
    out.sort_by_key(|b| (b.level, b.ijk));
    Ok(out)
}

fn neighbour_offsets() -> impl Iterator<Item = [i32; 3]> {
    (0..27).filter(|&n| n != 13).map(|n| [n % 3 - 1, (n / 3) % 3 - 1, n / 9 - 1])
}

fn try_refine(params: &GridParams, topo: &mut Topology, b: BlockIndex, diag: &mut AdaptDiagnostics) -> bool {
    match refinement_closure(params, topo, b) {
        Ok(list) => {
            for x in &list {
                topo.refine(x);
            }
            diag.refined += list.len();
            !list.is_empty()
        }
        Err(blocker) => {
            log::debug!("refinement of {b:?} suppressed by unbounded-face block {blocker:?}");
            diag.suppressed.push(Suppression { requested: b, blocked_by: blocker });
            false
        }
    }
}

/// Adds the refinements needed for 2:1 balance, level-descending until a
/// fixed point. Requests that would refine an unbounded-face block are
/// suppressed and reported.
pub fn balance_topology(params: &GridParams, topo: &mut Topology) -> AdaptDiagnostics {
    let mut diag = AdaptDiagnostics::default();
    let mut blocked: BTreeSet<BlockIndex> = BTreeSet::new();
    loop {
        let mut changed = false;
        for level in (1..topo.levels.len()).rev() {
            let blocks: Vec<BlockIndex> =
                topo.levels[level].iter().map(|c| BlockIndex::new(level, *c)).collect();
            for b in blocks {
                for need in balance_requirements(params, &b) {
                    if topo.contains(&need) || blocked.contains(&need) {
                        continue;
                    }
                    let p = need.parent().expect("level >= 1");
                    if try_refine(params, topo, p, &mut diag) {
                        changed = true;
                    } else if !topo.contains(&need) {
                        blocked.insert(need);
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    diag
}

/// Grid-level 2:1 balancing. Fails if a suppressed request leaves the grid unbalanced.
pub fn enforce_two_to_one(grid: &CompositeGrid) -> Result<(CompositeGrid, AdaptDiagnostics)> {
    let mut topo = grid.topology().clone();
    let diag = balance_topology(grid.params(), &mut topo);
    if let Some(v) = topo.violations(grid.params()).into_iter().next() {
        return Err(Error::Invariant(format!(
            "{v} ({} balancing requests suppressed)",
            diag.suppressed.len()
        )));
    }
    Ok((grid.with_topology(topo)?, diag))
}

/// Refines leaves whose detail exceeds `eps_r` until a fixed point, then
/// coarsens octets whose children all fall below `eps_c`.
pub fn adapt_topology(
    params: &GridParams,
    topo: &Topology,
    criterion: &(dyn Fn([f64; 3]) -> f64 + Sync),
    ap: &AdaptParams,
) -> Result<(Topology, AdaptDiagnostics)> {
    ap.validate()?;
    let mut topo = topo.clone();
    let mut diag = AdaptDiagnostics::default();
    let mut cache: HashMap<BlockIndex, f64> = HashMap::new();
    let mut suppressed: BTreeSet<BlockIndex> = BTreeSet::new();

    let detail = |blocks: &[BlockIndex], cache: &mut HashMap<BlockIndex, f64>| -> Result<()> {
        let todo: Vec<BlockIndex> = blocks.iter().filter(|b| !cache.contains_key(b)).copied().collect();
        let vals: Vec<Result<f64>> =
            todo.par_iter().map(|b| block_detail(params, b, criterion, ap.order)).collect();
        for (b, v) in todo.into_iter().zip(vals) {
            cache.insert(b, v?);
        }
        Ok(())
    };

    loop {
        let leaves: Vec<BlockIndex> = topo
            .blocks()
            .filter(|b| b.level < ap.max_level && topo.is_leaf(b) && !suppressed.contains(b))
            .collect();
        detail(&leaves, &mut cache)?;
        let mut changed = false;
        for b in leaves {
            if cache[&b] > ap.eps_r && !topo.is_refined(&b) {
                let before = diag.suppressed.len();
                if try_refine(params, &mut topo, b, &mut diag) {
                    changed = true;
                } else if diag.suppressed.len() > before {
                    suppressed.insert(b);
                }
            }
        }
        if let Some(limit) = ap.max_blocks {
            if topo.block_count() > limit {
                return Err(Error::BlockBudget { limit });
            }
        }
        if !changed {
            break;
        }
    }

    loop {
        let mut changed = false;
        let parents: Vec<BlockIndex> = topo
            .blocks()
            .filter(|b| topo.is_refined(b) && b.children().iter().all(|c| topo.is_leaf(c)))
            .collect();
        let mut need: Vec<BlockIndex> = parents.clone();
        for p in &parents {
            need.extend(p.children());
        }
        detail(&need, &mut cache)?;
        for p in parents.into_iter().rev() {
            let small = p.children().iter().all(|c| cache[c] < ap.eps_c);
            if small && cache[&p] <= ap.eps_r && can_coarsen(params, &topo, &p) {
                topo.coarsen(&p);
                diag.coarsened += 1;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    Ok((topo, diag))
}

/// Whether removing the children of `p` keeps every finer block balanced.
fn can_coarsen(params: &GridParams, topo: &Topology, p: &BlockIndex) -> bool {
    if !p.children().iter().all(|c| topo.is_leaf(c)) {
        return false;
    }
    let kids: Vec<BlockIndex> = p.children().to_vec();
    let lvl = p.level + 1;
    for dz in -1..=2 {
        for dy in -1..=2 {
            for dx in -1..=2 {
                let c = [2 * p.ijk[0] + dx, 2 * p.ijk[1] + dy, 2 * p.ijk[2] + dz];
                let Some(w) = params.wrap(lvl, c) else { continue };
                let e = BlockIndex::new(lvl, w);
                if kids.contains(&e) || !topo.is_refined(&e) {
                    continue;
                }
                for x in e.children() {
                    if balance_requirements(params, &x).iter().any(|r| kids.contains(r)) {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// Adapts the grid to an analytic criterion. The returned grid carries the
/// same field names, zero-initialised.
pub fn adapt(
    grid: &CompositeGrid,
    criterion: &(dyn Fn([f64; 3]) -> f64 + Sync),
    ap: &AdaptParams,
) -> Result<(CompositeGrid, AdaptDiagnostics)> {
    let (topo, diag) = adapt_topology(grid.params(), grid.topology(), criterion, ap)?;
    Ok((grid.with_topology(topo)?, diag))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bc::BoundarySpec;

    fn block_data(shape: Shape, h: f64, f: impl Fn(f64, f64, f64) -> f64) -> Vec<f64> {
        let g = shape.g as isize;
        let b = shape.b as isize;
        let mut v = vec![0.0; shape.len()];
        for k in -g..b + g {
            for j in -g..b + g {
                for i in -g..b + g {
                    v[shape.idx(i, j, k)] = f(i as f64 * h, j as f64 * h, k as f64 * h);
                }
            }
        }
        v
    }

    fn full(shape: Shape) -> [[isize; 2]; 3] {
        let g = shape.g as isize;
        [[-g, shape.b as isize + g]; 3]
    }

    #[test]
    fn constant_and_low_degree_have_zero_detail() {
        let shape = Shape::new(16, 2);
        for w in [2usize, 4, 6] {
            let c = block_data(shape, 1.0 / 16.0, |_, _, _| 3.5);
            assert_eq!(detail_coefficient(&c, shape, w, full(shape)).unwrap(), 0.0);
            let p = block_data(shape, 1.0 / 16.0, |x, y, z| {
                x.powi(w as i32 - 1) + y.powi(w as i32 - 1) * z + 1.0
            });
            let gamma = detail_coefficient(&p, shape, w, full(shape)).unwrap();
            assert!(gamma <= 1e-12 * 4.0, "W={w}: {gamma}");
        }
    }

    #[test]
    fn missing_ghosts_are_a_precondition_violation() {
        let shape = Shape::new(8, 2);
        let v = block_data(shape, 0.1, |x, _, _| x);
        let r = detail_coefficient(&v, shape, 6, [[0, 8], [0, 8], [0, 8]]);
        assert!(matches!(r, Err(Error::Precondition(_))));
    }

    #[test]
    fn params_validation() {
        assert!(AdaptParams::new(1e-3, 3, 2).is_err());
        assert!(AdaptParams::new(1e-3, 4, 2).is_ok());
        let mut p = AdaptParams::new(1e-3, 4, 2).unwrap();
        p.eps_c = 1e-3;
        assert!(p.validate().is_err());
    }

    #[test]
    fn zero_criterion_leaves_grid_unchanged() {
        let gp = GridParams::new(8, 2, BoundarySpec::PPP).unwrap();
        let t = Topology::uniform(&gp);
        let ap = AdaptParams::new(1e-4, 4, 3).unwrap();
        let (out, diag) = adapt_topology(&gp, &t, &|_| 0.0, &ap).unwrap();
        assert_eq!(out, t);
        assert_eq!(diag, AdaptDiagnostics::default());
    }

    #[test]
    fn closure_inserts_intermediate_level() {
        let gp = GridParams::new(8, 4, BoundarySpec::PPP).unwrap();
        let mut t = Topology::uniform(&gp);
        let target = BlockIndex::new(1, [3, 3, 3]);
        let mut diag = AdaptDiagnostics::default();
        assert!(try_refine(&gp, &mut t, target, &mut diag));
        assert!(t.violations(&gp).is_empty());
        assert!(t.is_refined(&target));
        assert!(t.contains(&BlockIndex::new(1, [2, 2, 2])));
    }

    #[test]
    fn unbounded_face_blocks_refinement() {
        let gp = GridParams::new(8, 4, BoundarySpec::UUU).unwrap();
        let mut t = Topology::uniform(&gp);
        let mut diag = AdaptDiagnostics::default();
        assert!(!try_refine(&gp, &mut t, BlockIndex::new(0, [0, 2, 2]), &mut diag));
        assert_eq!(diag.suppressed.len(), 1);
        assert!(try_refine(&gp, &mut t, BlockIndex::new(0, [1, 1, 1]), &mut diag));
        assert!(!try_refine(&gp, &mut t, BlockIndex::new(1, [2, 2, 2]), &mut diag));
        assert!(t.violations(&gp).is_empty());
    }
}
