//! Block-structured multiresolution grid: topology, block storage and named fields.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use crate::bc::BoundarySpec;
use crate::error::{Error, Result};

/// Ghost layer width shared by every field and every order.
pub const GHOST_WIDTH: usize = 2;
pub const DEFAULT_BLOCK_SIZE: usize = 16;

pub type Coords = [i32; 3];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BlockIndex {
    pub level: usize,
    pub ijk: Coords,
}

impl BlockIndex {
    pub fn new(level: usize, ijk: Coords) -> Self {
        BlockIndex { level, ijk }
    }

    pub fn parent(&self) -> Option<BlockIndex> {
        if self.level == 0 {
            return None;
        }
        Some(BlockIndex::new(self.level - 1, self.ijk.map(|c| c.div_euclid(2))))
    }

    pub fn children(&self) -> [BlockIndex; 8] {
        let mut out = [*self; 8];
        for (n, child) in out.iter_mut().enumerate() {
            let o = [(n & 1) as i32, ((n >> 1) & 1) as i32, ((n >> 2) & 1) as i32];
            *child = BlockIndex::new(
                self.level + 1,
                [2 * self.ijk[0] + o[0], 2 * self.ijk[1] + o[1], 2 * self.ijk[2] + o[2]],
            );
        }
        out
    }
}

/// Geometry shared by all blocks: block size, base resolution, extent and boundaries.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridParams {
    /// Nodes per block edge.
    pub block_size: usize,
    /// Base-level blocks per axis.
    pub base_blocks: usize,
    /// Edge length of the cubic domain.
    pub extent: f64,
    pub boundary: BoundarySpec,
}

impl GridParams {
    pub fn new(block_size: usize, base_blocks: usize, boundary: BoundarySpec) -> Result<Self> {
        let p = GridParams { block_size, base_blocks, extent: 1.0, boundary };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let b = self.block_size;
        if b % 2 != 0 || b < 2 * GHOST_WIDTH + 2 {
            return Err(Error::GridParams(format!(
                "block size {b} must be even and at least {}",
                2 * GHOST_WIDTH + 2
            )));
        }
        // Fine-from-coarse stencils of the highest order reach 5 coarse nodes
        // past a parent block; they must stay inside its neighbours.
        if b < 8 {
            return Err(Error::GridParams(format!("block size {b} below the minimum of 8")));
        }
        if self.base_blocks == 0 {
            return Err(Error::GridParams("base level needs at least one block".into()));
        }
        if !(self.extent > 0.0 && self.extent.is_finite()) {
            return Err(Error::GridParams(format!("invalid extent {}", self.extent)));
        }
        Ok(())
    }

    pub fn h0(&self) -> f64 {
        self.extent / (self.base_blocks * self.block_size) as f64
    }

    pub fn h(&self, level: usize) -> f64 {
        self.h0() / (1u64 << level) as f64
    }

    /// Blocks per axis at `level`.
    pub fn blocks_per_axis(&self, level: usize) -> i32 {
        (self.base_blocks << level) as i32
    }

    /// Nodes per axis at `level` when the level covers the whole domain.
    pub fn nodes_per_axis(&self, level: usize) -> usize {
        (self.base_blocks << level) * self.block_size
    }

    pub fn shape(&self) -> Shape {
        Shape::new(self.block_size, GHOST_WIDTH)
    }

    /// Wraps block coordinates on periodic axes; `None` outside an unbounded axis.
    pub fn wrap(&self, level: usize, c: Coords) -> Option<Coords> {
        let n = self.blocks_per_axis(level);
        let mut out = c;
        for d in 0..3 {
            if self.boundary.is_periodic(d) {
                out[d] = c[d].rem_euclid(n);
            } else if c[d] < 0 || c[d] >= n {
                return None;
            }
        }
        Some(out)
    }

    /// Local index range `[lo, hi)` per axis of nodes whose radius-one
    /// neighbourhood stays inside the domain.
    pub fn active_range(&self, b: &BlockIndex) -> [[isize; 2]; 3] {
        let n = self.blocks_per_axis(b.level);
        let bs = self.block_size as isize;
        let mut r = [[0, bs]; 3];
        for d in 0..3 {
            if self.boundary.is_unbounded(d) {
                if b.ijk[d] == 0 {
                    r[d][0] = 1;
                }
                if b.ijk[d] == n - 1 {
                    r[d][1] = bs - 1;
                }
            }
        }
        r
    }

    /// Whether the block touches a face whose boundary condition is unbounded.
    pub fn touches_unbounded(&self, b: &BlockIndex) -> bool {
        let n = self.blocks_per_axis(b.level);
        (0..3).any(|d| self.boundary.is_unbounded(d) && (b.ijk[d] == 0 || b.ijk[d] == n - 1))
    }
}

/// Index arithmetic for a block array of `(B + 2g)^3` values, x fastest.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Shape {
    pub b: usize,
    pub g: usize,
    pub n: usize,
}

impl Shape {
    pub fn new(b: usize, g: usize) -> Self {
        Shape { b, g, n: b + 2 * g }
    }

    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Flat index of local node `(i, j, k)`, each in `[-g, B + g)`.
    #[inline]
    pub fn idx(&self, i: isize, j: isize, k: isize) -> usize {
        let g = self.g as isize;
        let n = self.n as isize;
        ((i + g) + n * ((j + g) + n * (k + g))) as usize
    }

    #[inline]
    pub fn idx3(&self, p: [isize; 3]) -> usize {
        self.idx(p[0], p[1], p[2])
    }

    /// Flat offset of a displacement.
    #[inline]
    pub fn offset(&self, d: [isize; 3]) -> isize {
        let n = self.n as isize;
        d[0] + n * (d[1] + n * d[2])
    }

    pub fn is_interior(&self, p: [isize; 3]) -> bool {
        p.iter().all(|&c| c >= 0 && c < self.b as isize)
    }
}

/// Block sets per level, without field storage.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Topology {
    pub levels: Vec<BTreeSet<Coords>>,
}

impl Topology {
    pub fn uniform(params: &GridParams) -> Self {
        let n = params.blocks_per_axis(0);
        let mut base = BTreeSet::new();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    base.insert([i, j, k]);
                }
            }
        }
        Topology { levels: vec![base] }
    }

    pub fn contains(&self, b: &BlockIndex) -> bool {
        self.levels.get(b.level).is_some_and(|s| s.contains(&b.ijk))
    }

    pub fn finest_level(&self) -> usize {
        self.levels.len().saturating_sub(1)
    }

    pub fn is_refined(&self, b: &BlockIndex) -> bool {
        self.contains(&b.children()[0])
    }

    pub fn is_leaf(&self, b: &BlockIndex) -> bool {
        self.contains(b) && !self.is_refined(b)
    }

    pub fn block_count(&self) -> usize {
        self.levels.iter().map(|s| s.len()).sum()
    }

    pub fn leaf_count(&self) -> usize {
        self.blocks().filter(|b| self.is_leaf(b)).count()
    }

    /// All blocks, level-ascending then lexicographic.
    pub fn blocks(&self) -> impl Iterator<Item = BlockIndex> + '_ {
        self.levels
            .iter()
            .enumerate()
            .flat_map(|(l, s)| s.iter().map(move |c| BlockIndex::new(l, *c)))
    }

    /// Adds the eight children of `b`.
    pub fn refine(&mut self, b: &BlockIndex) {
        if self.levels.len() <= b.level + 1 {
            self.levels.resize_with(b.level + 2, BTreeSet::new);
        }
        for c in b.children() {
            self.levels[b.level + 1].insert(c.ijk);
        }
    }

    /// Removes the eight children of `b`; they must be leaves.
    pub fn coarsen(&mut self, b: &BlockIndex) {
        if let Some(set) = self.levels.get_mut(b.level + 1) {
            for c in b.children() {
                set.remove(&c.ijk);
            }
        }
        self.trim();
    }

    fn trim(&mut self) {
        while self.levels.len() > 1 && self.levels.last().is_some_and(|s| s.is_empty()) {
            self.levels.pop();
        }
    }

    /// Lists every violated grid invariant; empty when the topology is valid.
    pub fn violations(&self, params: &GridParams) -> Vec<String> {
        let mut out = Vec::new();
        let uniform = Topology::uniform(params);
        match self.levels.first() {
            Some(base) if *base == uniform.levels[0] => {}
            _ => out.push("base level does not tile the domain".to_string()),
        }
        for b in self.blocks() {
            let n = params.blocks_per_axis(b.level);
            if b.ijk.iter().any(|&c| c < 0 || c >= n) {
                out.push(format!("block {b:?} outside the level range"));
                continue;
            }
            if let Some(p) = b.parent() {
                if !self.contains(&p) {
                    out.push(format!("block {b:?} has no parent"));
                }
                for sib in p.children() {
                    if !self.contains(&sib) {
                        out.push(format!("block {b:?} is in an incomplete octet"));
                        break;
                    }
                }
                if params.touches_unbounded(&b) {
                    out.push(format!("block {b:?} above level 0 touches an unbounded face"));
                }
            }
            for need in balance_requirements(params, &b) {
                if !self.contains(&need) {
                    out.push(format!("2:1 balance violated between {b:?} and {need:?}"));
                }
            }
        }
        out
    }

    /// Text dump, one `level i j k` line per block.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        for b in self.blocks() {
            let _ = writeln!(s, "{} {} {} {}", b.level, b.ijk[0], b.ijk[1], b.ijk[2]);
        }
        s
    }

    pub fn parse_dump(text: &str) -> Result<Self> {
        let mut t = Topology::default();
        for (ln, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let v: Vec<i64> = line
                .split_whitespace()
                .map(|w| w.parse::<i64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::GridParams(format!("dump line {}: {e}", ln + 1)))?;
            if v.len() != 4 || v[0] < 0 {
                return Err(Error::GridParams(format!("dump line {}: expected `level i j k`", ln + 1)));
            }
            let level = v[0] as usize;
            if t.levels.len() <= level {
                t.levels.resize_with(level + 1, BTreeSet::new);
            }
            t.levels[level].insert([v[1] as i32, v[2] as i32, v[3] as i32]);
        }
        Ok(t)
    }
}

/// Level-(k−1) blocks that must exist for block `b` at level k to be 2:1 balanced.
///
/// These are the parent and its neighbours on the sides the child touches.
pub(crate) fn balance_requirements(params: &GridParams, b: &BlockIndex) -> Vec<BlockIndex> {
    let Some(p) = b.parent() else { return Vec::new() };
    let mut out = Vec::with_capacity(8);
    let side: [i32; 3] = [0, 1, 2].map(|d| if b.ijk[d] % 2 == 0 { -1 } else { 1 });
    for n in 0..8 {
        let d = [0, 1, 2].map(|a| if (n >> a) & 1 == 1 { side[a] } else { 0 });
        let c = [p.ijk[0] + d[0], p.ijk[1] + d[1], p.ijk[2] + d[2]];
        if let Some(w) = params.wrap(p.level, c) {
            let need = BlockIndex::new(p.level, w);
            if !out.contains(&need) {
                out.push(need);
            }
        }
    }
    out
}

/// Handle to a named field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FieldId(pub usize);

#[derive(Clone, Debug)]
pub struct Block {
    pub index: BlockIndex,
    pub origin: [f64; 3],
    pub h: f64,
    pub leaf: bool,
    data: Vec<Vec<f64>>,
}

impl Block {
    pub fn field(&self, f: FieldId) -> &[f64] {
        &self.data[f.0]
    }

    pub fn field_mut(&mut self, f: FieldId) -> &mut [f64] {
        &mut self.data[f.0]
    }

    /// Two distinct fields, the first mutable.
    pub fn field_pair_mut(&mut self, a: FieldId, b: FieldId) -> (&mut [f64], &[f64]) {
        assert_ne!(a, b, "field_pair_mut needs distinct fields");
        if a.0 < b.0 {
            let (lo, hi) = self.data.split_at_mut(b.0);
            (&mut lo[a.0], &hi[0])
        } else {
            let (lo, hi) = self.data.split_at_mut(a.0);
            (&mut hi[0], &lo[b.0])
        }
    }

    pub fn fields_mut(&mut self) -> &mut [Vec<f64>] {
        &mut self.data
    }

    /// Physical position of local node `p`.
    pub fn position(&self, p: [isize; 3]) -> [f64; 3] {
        [0, 1, 2].map(|d| self.origin[d] + p[d] as f64 * self.h)
    }
}

#[derive(Clone, Debug, Default)]
pub struct Level {
    map: BTreeMap<Coords, usize>,
    pub blocks: Vec<Block>,
}

impl Level {
    pub fn slot(&self, c: &Coords) -> Option<usize> {
        self.map.get(c).copied()
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }
}

/// The composite grid: a frozen topology plus per-block field storage.
#[derive(Clone, Debug)]
pub struct CompositeGrid {
    params: GridParams,
    topology: Topology,
    levels: Vec<Level>,
    names: Vec<String>,
}

impl CompositeGrid {
    pub fn uniform(params: GridParams) -> Result<Self> {
        params.validate()?;
        Self::from_topology(params, Topology::uniform(&params))
    }

    pub fn from_topology(params: GridParams, topology: Topology) -> Result<Self> {
        params.validate()?;
        if let Some(v) = topology.violations(&params).into_iter().next() {
            return Err(Error::Invariant(v));
        }
        let h0 = params.h0();
        let b = params.block_size as f64;
        let mut levels = Vec::with_capacity(topology.levels.len());
        for (l, set) in topology.levels.iter().enumerate() {
            let h = h0 / (1u64 << l) as f64;
            let mut level = Level::default();
            for c in set {
                let index = BlockIndex::new(l, *c);
                level.map.insert(*c, level.blocks.len());
                level.blocks.push(Block {
                    index,
                    origin: c.map(|x| x as f64 * b * h),
                    h,
                    leaf: !topology.is_refined(&index),
                    data: Vec::new(),
                });
            }
            levels.push(level);
        }
        Ok(CompositeGrid { params, topology, levels, names: Vec::new() })
    }

    /// Same topology with fresh zeroed fields of the same names.
    pub fn with_topology(&self, topology: Topology) -> Result<Self> {
        let mut g = Self::from_topology(self.params, topology)?;
        for n in &self.names {
            g.add_field(n);
        }
        Ok(g)
    }

    pub fn params(&self) -> &GridParams {
        &self.params
    }

    pub fn boundary(&self) -> BoundarySpec {
        self.params.boundary
    }

    pub fn shape(&self) -> Shape {
        self.params.shape()
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    pub fn finest_level(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn num_levels(&self) -> usize {
        self.levels.len()
    }

    pub fn level(&self, k: usize) -> &Level {
        &self.levels[k]
    }

    pub fn level_mut(&mut self, k: usize) -> &mut Level {
        &mut self.levels[k]
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    /// Level `k − 1` shared and level `k` mutable.
    pub fn split_levels_mut(&mut self, k: usize) -> (&Level, &mut Level) {
        let (lo, hi) = self.levels.split_at_mut(k);
        (&lo[k - 1], &mut hi[0])
    }

    /// Level `k` mutable and level `k + 1` shared.
    pub fn split_adjacent_mut(&mut self, k: usize) -> (&mut Level, &Level) {
        let (lo, hi) = self.levels.split_at_mut(k + 1);
        (&mut lo[k], &hi[0])
    }

    pub fn block(&self, b: &BlockIndex) -> Option<&Block> {
        let lvl = self.levels.get(b.level)?;
        lvl.slot(&b.ijk).map(|s| &lvl.blocks[s])
    }

    pub fn block_count(&self) -> usize {
        self.levels.iter().map(|l| l.len()).sum()
    }

    pub fn leaves(&self) -> impl Iterator<Item = &Block> {
        self.levels.iter().flat_map(|l| l.blocks.iter()).filter(|b| b.leaf)
    }

    /// Adds a zero-initialised field, or returns the existing one of that name.
    pub fn add_field(&mut self, name: &str) -> FieldId {
        if let Some(id) = self.field_id(name) {
            return id;
        }
        let len = self.shape().len();
        for lvl in &mut self.levels {
            for b in &mut lvl.blocks {
                b.data.push(vec![0.0; len]);
            }
        }
        self.names.push(name.to_string());
        FieldId(self.names.len() - 1)
    }

    pub fn field_id(&self, name: &str) -> Option<FieldId> {
        self.names.iter().position(|n| n == name).map(FieldId)
    }

    pub fn field(&self, name: &str) -> Result<FieldId> {
        self.field_id(name).ok_or_else(|| Error::UnknownField(name.to_string()))
    }

    pub fn field_names(&self) -> &[String] {
        &self.names
    }

    /// Bytes of field storage currently allocated.
    pub fn storage_bytes(&self) -> usize {
        self.block_count() * self.names.len() * self.shape().len() * std::mem::size_of::<f64>()
    }

    /// Sets interior and ghost nodes of every block from a function of position.
    pub fn fill_with(&mut self, f: FieldId, func: impl Fn([f64; 3]) -> f64 + Sync) {
        let shape = self.shape();
        let g = shape.g as isize;
        let b = shape.b as isize;
        for lvl in &mut self.levels {
            for blk in &mut lvl.blocks {
                let origin = blk.origin;
                let h = blk.h;
                let data = blk.field_mut(f);
                for k in -g..b + g {
                    for j in -g..b + g {
                        for i in -g..b + g {
                            let x = [
                                origin[0] + i as f64 * h,
                                origin[1] + j as f64 * h,
                                origin[2] + k as f64 * h,
                            ];
                            data[shape.idx(i, j, k)] = func(x);
                        }
                    }
                }
            }
        }
    }

    /// Copies interior values of `src` into `dst` on every block.
    pub fn copy_field(&mut self, src: FieldId, dst: FieldId) {
        if src == dst {
            return;
        }
        for lvl in &mut self.levels {
            for blk in &mut lvl.blocks {
                let (d, s) = blk.field_pair_mut(dst, src);
                d.copy_from_slice(s);
            }
        }
    }

    pub fn zero_field(&mut self, f: FieldId) {
        for lvl in &mut self.levels {
            for blk in &mut lvl.blocks {
                blk.field_mut(f).fill(0.0);
            }
        }
    }

    /// Ω_k: every block at level `k`.
    pub fn level_region(&self, k: usize) -> Result<BTreeSet<BlockIndex>> {
        if k > self.finest_level() {
            return Err(Error::LevelOutOfRange { level: k, finest: self.finest_level() });
        }
        Ok(self.levels[k].blocks.iter().map(|b| b.index).collect())
    }

    /// Ω_k \ Ω_{k+1}: the leaf blocks at level `k`.
    pub fn leaf_region(&self, k: usize) -> Result<BTreeSet<BlockIndex>> {
        if k > self.finest_level() {
            return Err(Error::LevelOutOfRange { level: k, finest: self.finest_level() });
        }
        Ok(self.levels[k].blocks.iter().filter(|b| b.leaf).map(|b| b.index).collect())
    }

    pub fn dump(&self) -> String {
        self.topology.dump()
    }

    /// See [`GridParams::active_range`].
    pub fn active_range(&self, b: &BlockIndex) -> [[isize; 2]; 3] {
        self.params.active_range(b)
    }

    /// Gathers the interiors of a full-coverage level into a flat array, x fastest.
    pub fn gather_level(&self, k: usize, f: FieldId) -> Vec<f64> {
        let nn = self.params.nodes_per_axis(k);
        let shape = self.shape();
        let bs = shape.b;
        let mut out = vec![0.0; nn * nn * nn];
        for blk in &self.levels[k].blocks {
            let data = blk.field(f);
            let o = blk.index.ijk.map(|c| c as usize * bs);
            for k3 in 0..bs {
                for j in 0..bs {
                    let dst = o[0] + nn * ((o[1] + j) + nn * (o[2] + k3));
                    let src = shape.idx(0, j as isize, k3 as isize);
                    out[dst..dst + bs].copy_from_slice(&data[src..src + bs]);
                }
            }
        }
        out
    }

    /// Inverse of [`gather_level`](Self::gather_level).
    pub fn scatter_level(&mut self, k: usize, f: FieldId, values: &[f64]) {
        let nn = self.params.nodes_per_axis(k);
        let shape = self.shape();
        let bs = shape.b;
        for blk in &mut self.levels[k].blocks {
            let o = blk.index.ijk.map(|c| c as usize * bs);
            let data = blk.field_mut(f);
            for k3 in 0..bs {
                for j in 0..bs {
                    let src = o[0] + nn * ((o[1] + j) + nn * (o[2] + k3));
                    let dst = shape.idx(0, j as isize, k3 as isize);
                    data[dst..dst + bs].copy_from_slice(&values[src..src + bs]);
                }
            }
        }
    }
}

/// Mutable access to two different blocks of one level.
pub(crate) fn two_blocks_mut(blocks: &mut [Block], a: usize, b: usize) -> (&mut Block, &Block) {
    assert_ne!(a, b);
    if a < b {
        let (lo, hi) = blocks.split_at_mut(b);
        (&mut lo[a], &hi[0])
    } else {
        let (lo, hi) = blocks.split_at_mut(a);
        (&mut hi[0], &lo[b])
    }
}
