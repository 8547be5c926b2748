//! Inter-level transfer between a parent block and one of its children.
//!
//! A child with octant `o` (each component 0 or 1) covers parent-local
//! nodes `[o·B/2, o·B/2 + B/2)` per axis; child node `q` coincides with
//! parent node `o·B/2 + q/2` when `q` is even.

use crate::grid::Shape;

fn parent_local(shape: Shape, octant: [usize; 3], d: usize, q: isize) -> isize {
    (octant[d] * shape.b / 2) as isize + q.div_euclid(2)
}

/// Copies the even-index child nodes onto the coincident parent nodes.
pub fn inject(shape: Shape, child: &[f64], octant: [usize; 3], parent: &mut [f64]) {
    let b = shape.b as isize;
    for k in (0..b).step_by(2) {
        let pk = parent_local(shape, octant, 2, k);
        for j in (0..b).step_by(2) {
            let pj = parent_local(shape, octant, 1, j);
            for i in (0..b).step_by(2) {
                let pi = parent_local(shape, octant, 0, i);
                parent[shape.idx(pi, pj, pk)] = child[shape.idx(i, j, k)];
            }
        }
    }
}

const FW: [f64; 3] = [0.25, 0.5, 0.25];

/// Full weighting of the child residual onto the coincident parent nodes.
/// Reads one ghost layer of `child`.
pub fn restrict_full_weighting(shape: Shape, child: &[f64], octant: [usize; 3], parent: &mut [f64]) {
    let b = shape.b as isize;
    let mut taps = Vec::with_capacity(27);
    for dz in -1..=1isize {
        for dy in -1..=1isize {
            for dx in -1..=1isize {
                let w = FW[(dx + 1) as usize] * FW[(dy + 1) as usize] * FW[(dz + 1) as usize];
                taps.push((shape.offset([dx, dy, dz]), w));
            }
        }
    }
    for k in (0..b).step_by(2) {
        let pk = parent_local(shape, octant, 2, k);
        for j in (0..b).step_by(2) {
            let pj = parent_local(shape, octant, 1, j);
            for i in (0..b).step_by(2) {
                let pi = parent_local(shape, octant, 0, i);
                let c = shape.idx(i, j, k) as isize;
                let mut acc = 0.0;
                for &(o, w) in &taps {
                    acc += w * child[(c + o) as usize];
                }
                parent[shape.idx(pi, pj, pk)] = acc;
            }
        }
    }
}

/// Adds the trilinear interpolation of the parent correction to every
/// interior child node. Reads one ghost layer on the high side of `parent`.
pub fn prolong_add(shape: Shape, parent: &[f64], octant: [usize; 3], child: &mut [f64]) {
    let b = shape.b as isize;
    // Per axis: (lower parent index, weights) for each child index.
    let axis = |d: usize| -> Vec<(isize, bool)> {
        (0..b)
            .map(|q| (parent_local(shape, octant, d, q), q % 2 != 0))
            .collect()
    };
    let ax = [axis(0), axis(1), axis(2)];
    for k in 0..b {
        let (pk, ok) = ax[2][k as usize];
        for j in 0..b {
            let (pj, oj) = ax[1][j as usize];
            for i in 0..b {
                let (pi, oi) = ax[0][i as usize];
                let mut acc = 0.0;
                let zs: &[(isize, f64)] = if ok { &[(0, 0.5), (1, 0.5)] } else { &[(0, 1.0)] };
                let ys: &[(isize, f64)] = if oj { &[(0, 0.5), (1, 0.5)] } else { &[(0, 1.0)] };
                let xs: &[(isize, f64)] = if oi { &[(0, 0.5), (1, 0.5)] } else { &[(0, 1.0)] };
                for &(cz, wz) in zs {
                    for &(cy, wy) in ys {
                        for &(cx, wx) in xs {
                            acc += wx * wy * wz * parent[shape.idx(pi + cx, pj + cy, pk + cz)];
                        }
                    }
                }
                child[shape.idx(i, j, k)] += acc;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn filled(shape: Shape, f: impl Fn(isize, isize, isize) -> f64) -> Vec<f64> {
        let g = shape.g as isize;
        let b = shape.b as isize;
        let mut v = vec![0.0; shape.len()];
        for k in -g..b + g {
            for j in -g..b + g {
                for i in -g..b + g {
                    v[shape.idx(i, j, k)] = f(i, j, k);
                }
            }
        }
        v
    }

    #[test]
    fn full_weighting_keeps_constants_and_linear_data() {
        let shape = Shape::new(8, 2);
        let child = filled(shape, |_, _, _| 2.5);
        let mut parent = vec![0.0; shape.len()];
        restrict_full_weighting(shape, &child, [1, 0, 1], &mut parent);
        assert_eq!(parent[shape.idx(5, 2, 7)], 2.5);
        let child = filled(shape, |i, _, _| i as f64 + 2.0);
        restrict_full_weighting(shape, &child, [0, 0, 0], &mut parent);
        assert_eq!(parent[shape.idx(0, 0, 0)], 2.0);
    }

    #[test]
    fn injection_takes_even_nodes() {
        let shape = Shape::new(8, 2);
        let child = filled(shape, |i, j, k| (i * 100 + j * 10 + k) as f64);
        let mut parent = vec![0.0; shape.len()];
        inject(shape, &child, [1, 1, 0], &mut parent);
        assert_eq!(parent[shape.idx(4 + 1, 4 + 3, 2)], (200 + 60 + 4) as f64);
    }

    #[test]
    fn prolongation_reproduces_trilinear() {
        let shape = Shape::new(8, 2);
        let lin = |x: f64, y: f64, z: f64| 1.0 + 2.0 * x - 0.5 * y + 3.0 * z + x * y * z;
        let parent = filled(shape, |i, j, k| lin(i as f64, j as f64, k as f64));
        let mut child = vec![0.0; shape.len()];
        prolong_add(shape, &parent, [1, 0, 1], &mut child);
        for k in 0..8isize {
            for j in 0..8isize {
                for i in 0..8isize {
                    let x = 4.0 + i as f64 / 2.0;
                    let y = j as f64 / 2.0;
                    let z = 4.0 + k as f64 / 2.0;
                    assert!((child[shape.idx(i, j, k)] - lin(x, y, z)).abs() < 1e-13);
                }
            }
        }
    }
}
