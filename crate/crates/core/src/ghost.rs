//! Ghost-layer plans and fills: same-level copies, periodic wraps and
//! interpolation across resolution jumps.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{two_blocks_mut, BlockIndex, CompositeGrid, FieldId, Level, Shape};
use crate::interp::equispaced_weights;
use crate::transfer;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GhostKind {
    Copy,
    PeriodicWrap,
    /// Leaf target next to a refined neighbour: the neighbour's interior holds injected fine values.
    CoarseFromFine,
    /// No same-level neighbour: interpolate from the parent level.
    FineFromCoarse,
    /// Beyond an unbounded face.
    External,
}

/// A box of ghost nodes `[lo, hi)` in target-local coordinates.
#[derive(Clone, Debug)]
pub struct GhostRegion {
    pub kind: GhostKind,
    pub lo: [isize; 3],
    pub hi: [isize; 3],
    /// Source slot in the same level for copy-like kinds.
    pub source: Option<usize>,
    /// Source local index = target local index + shift.
    pub shift: [isize; 3],
}

impl GhostRegion {
    pub fn node_count(&self) -> usize {
        (0..3).map(|d| (self.hi[d] - self.lo[d]) as usize).product()
    }
}

/// Copy of a coarse block's interior box into the gathered patch.
#[derive(Clone, Debug)]
struct PatchPiece {
    slot: usize,
    src_lo: [isize; 3],
    dst_lo: [usize; 3],
    size: [usize; 3],
}

#[derive(Clone, Debug)]
struct InterpRegion {
    lo: [isize; 3],
    hi: [isize; 3],
    /// Per axis and per node of the region: patch start index and weight-set id.
    axes: [Vec<(usize, usize)>; 3],
}

/// Coarse samples a block needs for its fine-from-coarse ghosts.
#[derive(Clone, Debug)]
struct InterpPatch {
    dims: [usize; 3],
    pieces: Vec<PatchPiece>,
    regions: Vec<InterpRegion>,
}

#[derive(Clone, Debug, Default)]
pub struct BlockGhosts {
    pub regions: Vec<GhostRegion>,
    patch: Option<InterpPatch>,
}

#[derive(Clone, Debug)]
pub struct GhostPlan {
    order: usize,
    weights: Vec<Vec<f64>>,
    levels: Vec<Vec<BlockGhosts>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JumpFill {
    Interpolate,
    /// Ghosts at resolution jumps are set to zero.
    Zero,
}

/// Local range along one axis for direction component `d`.
fn dir_range(b: isize, g: isize, d: i32) -> [isize; 2] {
    match d {
        -1 => [-g, 0],
        0 => [0, b],
        _ => [b, b + g],
    }
}

impl GhostPlan {
    /// Plans the ghost fill of every block for interpolation order `order` (= M + 2).
    pub fn build(grid: &CompositeGrid, order: usize) -> Result<Self> {
        if order < 2 || order % 2 != 0 {
            return Err(Error::Precondition(format!("interpolation order {order} must be even")));
        }
        let params = grid.params();
        let shape = grid.shape();
        let b = shape.b as isize;
        let g = shape.g as isize;
        let half = order as i64 / 2;
        let weights = vec![vec![1.0], equispaced_weights(-(half - 1), order, 0.5)];

        let mut levels = Vec::with_capacity(grid.num_levels());
        for k in 0..grid.num_levels() {
            let level = grid.level(k);
            let mut plans = Vec::with_capacity(level.len());
            for blk in &level.blocks {
                let idx = blk.index;
                let mut regions = Vec::with_capacity(26);
                for n in 0..27 {
                    if n == 13 {
                        continue;
                    }
                    let d = [n % 3 - 1, (n / 3) % 3 - 1, n / 9 - 1];
                    let lo = [0, 1, 2].map(|a| dir_range(b, g, d[a])[0]);
                    let hi = [0, 1, 2].map(|a| dir_range(b, g, d[a])[1]);
                    let raw = [idx.ijk[0] + d[0], idx.ijk[1] + d[1], idx.ijk[2] + d[2]];
                    let shift = d.map(|x| -(x as isize) * b);
                    let region = match params.wrap(k, raw) {
                        None => GhostRegion { kind: GhostKind::External, lo, hi, source: None, shift },
                        Some(w) => match level.slot(&w) {
                            Some(s) => {
                                let src_leaf = level.blocks[s].leaf;
                                let kind = if blk.leaf && !src_leaf {
                                    GhostKind::CoarseFromFine
                                } else if w != raw {
                                    GhostKind::PeriodicWrap
                                } else {
                                    GhostKind::Copy
                                };
                                GhostRegion { kind, lo, hi, source: Some(s), shift }
                            }
                            None => GhostRegion {
                                kind: GhostKind::FineFromCoarse,
                                lo,
                                hi,
                                source: None,
                                shift,
                            },
                        },
                    };
                    regions.push(region);
                }
                let patch = if regions.iter().any(|r| r.kind == GhostKind::FineFromCoarse) {
                    if k == 0 {
                        return Err(Error::UncoveredGhost { block: idx, local: [0; 3] });
                    }
                    Some(build_patch(grid, &idx, &regions, order)?)
                } else {
                    None
                };
                plans.push(BlockGhosts { regions, patch });
            }
            levels.push(plans);
        }
        Ok(GhostPlan { order, weights, levels })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn block(&self, level: usize, slot: usize) -> &BlockGhosts {
        &self.levels[level][slot]
    }

    /// Number of ghost nodes of each kind over the whole grid.
    pub fn kind_counts(&self) -> Vec<(GhostKind, usize)> {
        let kinds = [
            GhostKind::Copy,
            GhostKind::PeriodicWrap,
            GhostKind::CoarseFromFine,
            GhostKind::FineFromCoarse,
            GhostKind::External,
        ];
        kinds
            .iter()
            .map(|&kind| {
                let n = self
                    .levels
                    .iter()
                    .flatten()
                    .flat_map(|b| b.regions.iter())
                    .filter(|r| r.kind == kind)
                    .map(|r| r.node_count())
                    .sum();
                (kind, n)
            })
            .collect()
    }
}

fn coarse_stencil(p: i64, half: i64) -> (i64, usize) {
    if p.rem_euclid(2) == 0 {
        (p.div_euclid(2), 0)
    } else {
        (p.div_euclid(2) - (half - 1), 1)
    }
}

fn build_patch(
    grid: &CompositeGrid,
    idx: &BlockIndex,
    regions: &[GhostRegion],
    order: usize,
) -> Result<InterpPatch> {
    let params = grid.params();
    let bs = params.block_size as i64;
    let half = order as i64 / 2;
    let width = |set: usize| if set == 0 { 1 } else { order as i64 };
    let global = |d: usize, m: isize| idx.ijk[d] as i64 * bs + m as i64;

    let mut lo = [i64::MAX; 3];
    let mut hi = [i64::MIN; 3];
    for r in regions.iter().filter(|r| r.kind == GhostKind::FineFromCoarse) {
        for d in 0..3 {
            for m in r.lo[d]..r.hi[d] {
                let (s, set) = coarse_stencil(global(d, m), half);
                lo[d] = lo[d].min(s);
                hi[d] = hi[d].max(s + width(set));
            }
        }
    }
    let dims = [0, 1, 2].map(|d| (hi[d] - lo[d]) as usize);

    let coarse_level = idx.level - 1;
    let coarse = grid.level(coarse_level);
    let mut pieces = Vec::new();
    let cb_lo = lo.map(|v| v.div_euclid(bs));
    let cb_hi = [0, 1, 2].map(|d| (hi[d] - 1).div_euclid(bs));
    for cz in cb_lo[2]..=cb_hi[2] {
        for cy in cb_lo[1]..=cb_hi[1] {
            for cx in cb_lo[0]..=cb_hi[0] {
                let raw = [cx, cy, cz];
                let wrapped = params.wrap(coarse_level, raw.map(|v| v as i32));
                let slot = wrapped.and_then(|w| coarse.slot(&w));
                let mut src_lo = [0isize; 3];
                let mut dst_lo = [0usize; 3];
                let mut size = [0usize; 3];
                for d in 0..3 {
                    let a = lo[d].max(raw[d] * bs);
                    let e = hi[d].min(raw[d] * bs + bs);
                    src_lo[d] = (a - raw[d] * bs) as isize;
                    dst_lo[d] = (a - lo[d]) as usize;
                    size[d] = (e - a) as usize;
                }
                match slot {
                    Some(slot) => pieces.push(PatchPiece { slot, src_lo, dst_lo, size }),
                    None => {
                        return Err(Error::UncoveredGhost {
                            block: *idx,
                            local: [0, 1, 2].map(|d| (lo[d] + dst_lo[d] as i64) as i32),
                        })
                    }
                }
            }
        }
    }

    let mut iregions = Vec::new();
    for r in regions.iter().filter(|r| r.kind == GhostKind::FineFromCoarse) {
        let axes = [0, 1, 2].map(|d| {
            (r.lo[d]..r.hi[d])
                .map(|m| {
                    let (s, set) = coarse_stencil(global(d, m), half);
                    ((s - lo[d]) as usize, set)
                })
                .collect::<Vec<_>>()
        });
        iregions.push(InterpRegion { lo: r.lo, hi: r.hi, axes });
    }
    Ok(InterpPatch { dims, pieces, regions: iregions })
}

/// Copy-like regions of one block, reading interiors of the same level.
fn fill_copies(level: &mut Level, plans: &[BlockGhosts], shape: Shape, f: FieldId) {
    for (t, plan) in plans.iter().enumerate() {
        for r in &plan.regions {
            match r.kind {
                GhostKind::External => {
                    let data = level.blocks[t].field_mut(f);
                    for_box(r.lo, r.hi, |p| data[shape.idx3(p)] = 0.0);
                }
                GhostKind::Copy | GhostKind::PeriodicWrap | GhostKind::CoarseFromFine => {
                    let s = r.source.expect("copy regions have a source");
                    if s == t {
                        let data = level.blocks[t].field_mut(f);
                        for_box(r.lo, r.hi, |p| {
                            let q = [p[0] + r.shift[0], p[1] + r.shift[1], p[2] + r.shift[2]];
                            data[shape.idx3(p)] = data[shape.idx3(q)];
                        });
                    } else {
                        let (dst, src) = two_blocks_mut(&mut level.blocks, t, s);
                        let src = src.field(f);
                        let dst = dst.field_mut(f);
                        for_box(r.lo, r.hi, |p| {
                            let q = [p[0] + r.shift[0], p[1] + r.shift[1], p[2] + r.shift[2]];
                            dst[shape.idx3(p)] = src[shape.idx3(q)];
                        });
                    }
                }
                GhostKind::FineFromCoarse => {}
            }
        }
    }
}

fn fill_from_coarse(
    fine: &mut Level,
    coarse: &Level,
    plans: &[BlockGhosts],
    weights: &[Vec<f64>],
    shape: Shape,
    f: FieldId,
    jump: JumpFill,
) {
    let mut buf = Vec::new();
    for (t, plan) in plans.iter().enumerate() {
        let Some(patch) = &plan.patch else { continue };
        let data = fine.blocks[t].field_mut(f);
        if jump == JumpFill::Zero {
            for r in &patch.regions {
                for_box(r.lo, r.hi, |p| data[shape.idx3(p)] = 0.0);
            }
            continue;
        }
        let [nx, ny, nz] = patch.dims;
        buf.clear();
        buf.resize(nx * ny * nz, 0.0);
        for pc in &patch.pieces {
            let src = coarse.blocks[pc.slot].field(f);
            for k in 0..pc.size[2] {
                for j in 0..pc.size[1] {
                    let s0 = shape.idx(pc.src_lo[0], pc.src_lo[1] + j as isize, pc.src_lo[2] + k as isize);
                    let d0 = pc.dst_lo[0] + nx * ((pc.dst_lo[1] + j) + ny * (pc.dst_lo[2] + k));
                    buf[d0..d0 + pc.size[0]].copy_from_slice(&src[s0..s0 + pc.size[0]]);
                }
            }
        }
        for r in &patch.regions {
            for (kk, &(sz, wz)) in r.axes[2].iter().enumerate() {
                let wz = &weights[wz];
                for (jj, &(sy, wy)) in r.axes[1].iter().enumerate() {
                    let wy = &weights[wy];
                    for (ii, &(sx, wx)) in r.axes[0].iter().enumerate() {
                        let wx = &weights[wx];
                        let mut acc = 0.0;
                        for (c, a) in wz.iter().enumerate() {
                            for (bb, bw) in wy.iter().enumerate() {
                                let row = nx * ((sy + bb) + ny * (sz + c));
                                let mut line = 0.0;
                                for (q, w) in wx.iter().enumerate() {
                                    line += w * buf[row + sx + q];
                                }
                                acc += a * bw * line;
                            }
                        }
                        let p = [r.lo[0] + ii as isize, r.lo[1] + jj as isize, r.lo[2] + kk as isize];
                        data[shape.idx3(p)] = acc;
                    }
                }
            }
        }
    }
}

fn for_box(lo: [isize; 3], hi: [isize; 3], mut f: impl FnMut([isize; 3])) {
    for k in lo[2]..hi[2] {
        for j in lo[1]..hi[1] {
            for i in lo[0]..hi[0] {
                f([i, j, k]);
            }
        }
    }
}

/// Fills ghosts of level `k` from the current data of levels `k` and `k − 1`.
pub fn fill_level(grid: &mut CompositeGrid, plan: &GhostPlan, f: FieldId, k: usize, jump: JumpFill) {
    let shape = grid.shape();
    let plans = &plan.levels[k];
    fill_copies(grid.level_mut(k), plans, shape, f);
    if k > 0 {
        let (coarse, fine) = grid.split_levels_mut(k);
        fill_from_coarse(fine, coarse, plans, &plan.weights, shape, f, jump);
    }
}

/// Overwrites the interiors of refined level-`k` blocks with injected level-`k + 1` values.
pub fn inject_level(grid: &mut CompositeGrid, f: FieldId, k: usize) {
    let shape = grid.shape();
    let (parent_level, child_level) = grid.split_adjacent_mut(k);
    parent_level.blocks.par_iter_mut().filter(|b| !b.leaf).for_each(|p| {
        let idx = p.index;
        let data = p.field_mut(f);
        for c in idx.children() {
            let slot = child_level.slot(&c.ijk).expect("refined block has children");
            let octant = [0, 1, 2].map(|d| (c.ijk[d] - 2 * idx.ijk[d]) as usize);
            transfer::inject(shape, child_level.blocks[slot].field(f), octant, data);
        }
    });
}

/// Overwrites refined blocks' interiors with injected child values, finest first.
pub fn sync_down(grid: &mut CompositeGrid, f: FieldId) {
    for k in (0..grid.finest_level()).rev() {
        inject_level(grid, f, k);
    }
}

/// Composite fill: sync refined interiors, then fill every level.
pub fn fill_ghosts(grid: &mut CompositeGrid, plan: &GhostPlan, f: FieldId) {
    sync_down(grid, f);
    for k in 0..grid.num_levels() {
        fill_level(grid, plan, f, k, JumpFill::Interpolate);
    }
}
