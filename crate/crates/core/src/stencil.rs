//! Compact Mehrstellen Laplacians of order 2, 4 and 6 and their right-hand-side correctors.

use crate::error::{Error, Result};
use crate::grid::Shape;

pub const SUPPORTED_ORDERS: [usize; 3] = [2, 4, 6];

/// Left-hand coefficients by neighbour class (centre, face, edge, corner) and the denominator.
const LHS2: ([i32; 4], i32) = ([-6, 1, 0, 0], 1);
const LHS4: ([i32; 4], i32) = ([-24, 2, 1, 0], 6);
const LHS6: ([i32; 4], i32) = ([-128, 14, 3, 1], 30);

/// Right-hand coefficients by class (centre, face, edge, corner, axial distance two).
const RHS2: ([i32; 5], i32) = ([1, 0, 0, 0, 0], 1);
const RHS4: ([i32; 5], i32) = ([6, 1, 0, 0, 0], 12);
const RHS6: ([i32; 5], i32) = ([402, 40, 8, 0, -3], 720);

#[derive(Clone, Debug)]
pub struct StencilSet {
    order: usize,
    h: f64,
    /// Integer coefficients with offsets; multiplied by `lhs_scale`.
    lhs: Vec<([isize; 3], f64)>,
    lhs_scale: f64,
    rhs: Vec<([isize; 3], f64)>,
    rhs_scale: f64,
}

fn class_of(d: [isize; 3]) -> Option<usize> {
    let a = d.map(|x| x.abs());
    let nz = a.iter().filter(|&&x| x != 0).count();
    if a.iter().all(|&x| x <= 1) {
        Some(nz)
    } else if nz == 1 && a.iter().any(|&x| x == 2) {
        Some(4)
    } else {
        None
    }
}

fn table(coef: &[i32]) -> Vec<([isize; 3], f64)> {
    let mut out = Vec::new();
    for dz in -2..=2isize {
        for dy in -2..=2isize {
            for dx in -2..=2isize {
                let d = [dx, dy, dz];
                if let Some(c) = class_of(d) {
                    if c < coef.len() && coef[c] != 0 {
                        out.push((d, coef[c] as f64));
                    }
                }
            }
        }
    }
    out
}

impl StencilSet {
    pub fn new(order: usize, h: f64) -> Result<Self> {
        let (lhs, lden, rhs, rden) = match order {
            2 => (LHS2.0, LHS2.1, RHS2.0, RHS2.1),
            4 => (LHS4.0, LHS4.1, RHS4.0, RHS4.1),
            6 => (LHS6.0, LHS6.1, RHS6.0, RHS6.1),
            _ => return Err(Error::Precondition(format!("unsupported stencil order {order}"))),
        };
        if !(h > 0.0) {
            return Err(Error::Precondition(format!("spacing must be positive, got {h}")));
        }
        Ok(StencilSet {
            order,
            h,
            lhs: table(&lhs),
            lhs_scale: 1.0 / (lden as f64 * h * h),
            rhs: table(&rhs),
            rhs_scale: 1.0 / rden as f64,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Same order at another spacing.
    pub fn at_spacing(&self, h: f64) -> Self {
        StencilSet::new(self.order, h).expect("order already validated")
    }

    /// Integer left-hand coefficients and their common prefactor.
    pub fn lhs_entries(&self) -> (&[([isize; 3], f64)], f64) {
        (&self.lhs, self.lhs_scale)
    }

    pub fn rhs_entries(&self) -> (&[([isize; 3], f64)], f64) {
        (&self.rhs, self.rhs_scale)
    }

    pub fn diag(&self) -> f64 {
        self.lhs
            .iter()
            .find(|(d, _)| *d == [0, 0, 0])
            .map(|(_, c)| c * self.lhs_scale)
            .expect("centre coefficient present")
    }

    pub fn rhs_radius(&self) -> usize {
        match self.order {
            2 => 0,
            4 => 1,
            _ => 2,
        }
    }

    fn bound(entries: &[([isize; 3], f64)], shape: Shape, skip_centre: bool) -> Vec<(isize, f64)> {
        entries
            .iter()
            .filter(|(d, _)| !(skip_centre && *d == [0, 0, 0]))
            .map(|(d, c)| (shape.offset(*d), *c))
            .collect()
    }

    /// `out = Δ_h u` on nodes of `range`.
    pub fn apply_lhs(&self, shape: Shape, u: &[f64], out: &mut [f64], range: [[isize; 2]; 3]) {
        let taps = Self::bound(&self.lhs, shape, false);
        for_each_node(shape, range, |c| {
            out[c] = self.lhs_scale * dot(&taps, u, c);
        });
    }

    /// `out = R_h f` on interior nodes. Order 2 copies bitwise.
    pub fn correct_rhs(&self, shape: Shape, f: &[f64], out: &mut [f64]) {
        let b = shape.b as isize;
        let range = [[0, b]; 3];
        if self.order == 2 {
            for_each_node(shape, range, |c| out[c] = f[c]);
            return;
        }
        let taps = Self::bound(&self.rhs, shape, false);
        for_each_node(shape, range, |c| {
            out[c] = self.rhs_scale * dot(&taps, f, c);
        });
    }

    /// `out = f − Δ_h u` on `range`, zero on the remaining interior nodes.
    pub fn residual(&self, shape: Shape, u: &[f64], f: &[f64], out: &mut [f64], range: [[isize; 2]; 3]) {
        let b = shape.b as isize;
        for_each_node(shape, [[0, b]; 3], |c| out[c] = 0.0);
        let taps = Self::bound(&self.lhs, shape, false);
        for_each_node(shape, range, |c| {
            out[c] = f[c] - self.lhs_scale * dot(&taps, u, c);
        });
    }

    /// One lexicographic Gauss-Seidel pass over `range`; ghosts are read as they are.
    pub fn gauss_seidel(&self, shape: Shape, u: &mut [f64], f: &[f64], range: [[isize; 2]; 3]) {
        let taps = Self::bound(&self.lhs, shape, true);
        let inv_diag = 1.0 / self.diag();
        let scale = self.lhs_scale;
        for_each_node(shape, range, |c| {
            let off = scale * dot(&taps, u, c);
            u[c] = (f[c] - off) * inv_diag;
        });
    }
}

#[inline]
fn dot(taps: &[(isize, f64)], v: &[f64], c: usize) -> f64 {
    let mut acc = 0.0;
    for &(o, w) in taps {
        acc += w * v[(c as isize + o) as usize];
    }
    acc
}

/// Visits nodes of `range` in lexicographic order (x fastest).
#[inline]
pub fn for_each_node(shape: Shape, range: [[isize; 2]; 3], mut f: impl FnMut(usize)) {
    for k in range[2][0]..range[2][1] {
        for j in range[1][0]..range[1][1] {
            let row = shape.idx(0, j, k) as isize;
            for i in range[0][0]..range[0][1] {
                f((row + i) as usize);
            }
        }
    }
}
