//! Block kernels against dense tensor-product oracles on random data.

use amrmg::oracles::{mehrstellen_lhs, mehrstellen_rhs, Array3, Dense};
use amrmg::stencil::StencilSet;
use amrmg::transfer::{prolong_add, restrict_full_weighting};
use amrmg::Shape;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const B: usize = 16;
const G: usize = 2;
const TOL: f64 = 1e-13;

fn random_block(seed: u64) -> (Shape, Vec<f64>) {
    let shape = Shape::new(B, G);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (shape, (0..shape.len()).map(|_| rng.gen_range(-1.0..1.0)).collect())
}

fn as_array(shape: Shape, v: &[f64]) -> Array3 {
    Array3 { dims: [shape.n; 3], data: v.to_vec() }
}

fn max_abs(v: impl Iterator<Item = f64>) -> f64 {
    v.fold(0.0, |a, x| a.max(x.abs()))
}

fn interior() -> impl Iterator<Item = [isize; 3]> {
    let b = B as isize;
    (0..b).flat_map(move |k| (0..b).flat_map(move |j| (0..b).map(move |i| [i, j, k])))
}

fn compare(shape: Shape, got: &[f64], oracle: &Array3) -> f64 {
    let g = G as isize;
    let at = |p: [isize; 3]| oracle.at((p[0] + g) as usize, (p[1] + g) as usize, (p[2] + g) as usize);
    let scale = max_abs(interior().map(at)).max(1.0);
    max_abs(interior().map(|p| got[shape.idx3(p)] - at(p))) / scale
}

fn check_lhs(order: usize, seed: u64) -> f64 {
    let (shape, u) = random_block(seed);
    let h = 1.0 / 16.0;
    let mut out = vec![0.0; shape.len()];
    StencilSet::new(order, h).unwrap().apply_lhs(shape, &u, &mut out, [[0, B as isize]; 3]);
    compare(shape, &out, &mehrstellen_lhs(order, h, &as_array(shape, &u)))
}

fn check_rhs(order: usize, seed: u64) -> f64 {
    let (shape, f) = random_block(seed);
    let mut out = vec![0.0; shape.len()];
    StencilSet::new(order, 0.1).unwrap().correct_rhs(shape, &f, &mut out);
    compare(shape, &out, &mehrstellen_rhs(order, &as_array(shape, &f)))
}

/// Fine line `[-2, B]` (B + 3 nodes) to coarse line; coarse `i` sits on fine `2i - 2`.
fn check_restriction(octant: [usize; 3], seed: u64) -> f64 {
    let (shape, child) = random_block(seed);
    let mut parent = vec![0.0; shape.len()];
    restrict_full_weighting(shape, &child, octant, &mut parent);

    let nf = B + 3;
    let mut fine = Array3::zeros([nf; 3]);
    for k in 0..nf {
        for j in 0..nf {
            for i in 0..nf {
                let p = [i, j, k].map(|x| x as isize - 2);
                let id = fine.idx(i, j, k);
                fine.data[id] = child[shape.idx3(p)];
            }
        }
    }
    let w = Dense::full_weighting(nf.div_ceil(2));
    let coarse = fine.tensor([&w, &w, &w]);
    let mut err: f64 = 0.0;
    let half = (B / 2) as isize;
    for q in interior().filter(|q| q.iter().all(|x| x % 2 == 0)) {
        let c = q.map(|x| (x / 2 + 1) as usize);
        let p = [0, 1, 2].map(|d| octant[d] as isize * half + q[d] / 2);
        err = err.max((parent[shape.idx3(p)] - coarse.at(c[0], c[1], c[2])).abs());
    }
    err
}

/// Parent line `[o·B/2, o·B/2 + B/2]` to `B + 1` child nodes.
fn check_prolongation(octant: [usize; 3], seed: u64) -> f64 {
    let (shape, parent) = random_block(seed);
    let (_, mut child) = random_block(seed + 1000);
    let before = child.clone();
    prolong_add(shape, &parent, octant, &mut child);

    let nc = B / 2 + 1;
    let mut coarse = Array3::zeros([nc; 3]);
    let half = (B / 2) as isize;
    for k in 0..nc {
        for j in 0..nc {
            for i in 0..nc {
                let p = [i, j, k];
                let src = [0, 1, 2].map(|d| octant[d] as isize * half + p[d] as isize);
                let id = coarse.idx(i, j, k);
                coarse.data[id] = parent[shape.idx3(src)];
            }
        }
    }
    let pm = Dense::linear_prolongation(nc);
    let fine = coarse.tensor([&pm, &pm, &pm]);
    max_abs(interior().map(|q| {
        let c = shape.idx3(q);
        child[c] - before[c] - fine.at(q[0] as usize, q[1] as usize, q[2] as usize)
    }))
}

#[test]
fn laplacians_match_dense_oracle() {
    for order in [2, 4, 6] {
        for seed in 0..4 {
            let e = check_lhs(order, seed);
            assert!(e <= TOL, "M={order} seed {seed}: {e:e}");
        }
    }
}

#[test]
fn rhs_correctors_match_dense_oracle() {
    for order in [2, 4, 6] {
        for seed in 0..4 {
            let e = check_rhs(order, seed);
            assert!(e <= TOL, "M={order} seed {seed}: {e:e}");
        }
    }
}

#[test]
fn restriction_matches_dense_oracle() {
    for o in 0..8usize {
        let octant = [o & 1, (o >> 1) & 1, (o >> 2) & 1];
        let e = check_restriction(octant, o as u64);
        assert!(e <= TOL, "octant {octant:?}: {e:e}");
    }
}

#[test]
fn prolongation_matches_dense_oracle() {
    for o in 0..8usize {
        let octant = [o & 1, (o >> 1) & 1, (o >> 2) & 1];
        let e = check_prolongation(octant, o as u64);
        assert!(e <= TOL, "octant {octant:?}: {e:e}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn lhs_is_linear(seed in 0u64..1000, a in -3.0f64..3.0) {
        let (shape, u) = random_block(seed);
        let (_, v) = random_block(seed + 1);
        let st = StencilSet::new(4, 0.25).unwrap();
        let r = [[0, B as isize]; 3];
        let w: Vec<f64> = u.iter().zip(&v).map(|(x, y)| a * x + y).collect();
        let (mut lu, mut lv, mut lw) = (vec![0.0; shape.len()], vec![0.0; shape.len()], vec![0.0; shape.len()]);
        st.apply_lhs(shape, &u, &mut lu, r);
        st.apply_lhs(shape, &v, &mut lv, r);
        st.apply_lhs(shape, &w, &mut lw, r);
        for p in interior() {
            let c = shape.idx3(p);
            prop_assert!((lw[c] - a * lu[c] - lv[c]).abs() <= 1e-12 * (1.0 + lw[c].abs()));
        }
    }

    #[test]
    fn constants_are_harmonic(c in -10.0f64..10.0, order in prop::sample::select(vec![2usize, 4, 6])) {
        let shape = Shape::new(B, G);
        let u = vec![c; shape.len()];
        let mut out = vec![1.0; shape.len()];
        StencilSet::new(order, 0.5).unwrap().apply_lhs(shape, &u, &mut out, [[0, B as isize]; 3]);
        for p in interior() {
            prop_assert!(out[shape.idx3(p)].abs() <= 1e-12 * c.abs().max(1.0));
        }
    }

    #[test]
    fn prolongation_reproduces_linear_fields(a in -1.0f64..1.0, b in -1.0f64..1.0, o in 0usize..8) {
        let shape = Shape::new(B, G);
        let octant = [o & 1, (o >> 1) & 1, (o >> 2) & 1];
        let g = G as isize;
        let n = (B + G) as isize;
        let mut parent = vec![0.0; shape.len()];
        for k in -g..n { for j in -g..n { for i in -g..n {
            parent[shape.idx(i, j, k)] = a * i as f64 + b * k as f64 - j as f64;
        }}}
        let mut child = vec![0.0; shape.len()];
        prolong_add(shape, &parent, octant, &mut child);
        let half = (B / 2) as f64;
        for q in interior() {
            let x = [0, 1, 2].map(|d| octant[d] as f64 * half + q[d] as f64 / 2.0);
            let expect = a * x[0] + b * x[2] - x[1];
            prop_assert!((child[shape.idx3(q)] - expect).abs() <= 1e-12);
        }
    }
}
