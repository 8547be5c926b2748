//! Slow reference implementations for tests.
//!
//! Nothing here reads the stencil tables or the quadrature code; operators are
//! assembled from dense 1D difference matrices and lattice Green's functions come
//! from sine-transform solves on a large Dirichlet box.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

/// Dense row-major matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Dense {
    pub rows: usize,
    pub cols: usize,
    pub a: Vec<f64>,
}

impl Dense {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Dense { rows, cols, a: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Dense::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.a[i * self.cols + j] = v;
    }

    pub fn mul(&self, o: &Dense) -> Dense {
        assert_eq!(self.cols, o.rows);
        let mut m = Dense::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let v = self.get(i, k);
                if v != 0.0 {
                    for j in 0..o.cols {
                        m.a[i * o.cols + j] += v * o.get(k, j);
                    }
                }
            }
        }
        m
    }

    pub fn scaled(&self, s: f64) -> Dense {
        Dense { a: self.a.iter().map(|v| v * s).collect(), ..self.clone() }
    }

    /// Second difference `u[i-1] - 2u[i] + u[i+1]`; rows without both neighbours are zero.
    pub fn second_difference(n: usize) -> Dense {
        let mut m = Dense::zeros(n, n);
        for i in 1..n.saturating_sub(1) {
            m.set(i, i - 1, 1.0);
            m.set(i, i, -2.0);
            m.set(i, i + 1, 1.0);
        }
        m
    }

    /// Full weighting from `2n - 1` fine nodes to `n` coarse nodes; end rows inject.
    pub fn full_weighting(n: usize) -> Dense {
        let mut m = Dense::zeros(n, 2 * n - 1);
        for i in 0..n {
            if i == 0 || i == n - 1 {
                m.set(i, 2 * i, 1.0);
            } else {
                m.set(i, 2 * i - 1, 0.25);
                m.set(i, 2 * i, 0.5);
                m.set(i, 2 * i + 1, 0.25);
            }
        }
        m
    }

    /// Linear interpolation from `n` coarse nodes to `2n - 1` fine nodes.
    pub fn linear_prolongation(n: usize) -> Dense {
        let mut m = Dense::zeros(2 * n - 1, n);
        for i in 0..2 * n - 1 {
            if i % 2 == 0 {
                m.set(i, i / 2, 1.0);
            } else {
                m.set(i, i / 2, 0.5);
                m.set(i, i / 2 + 1, 0.5);
            }
        }
        m
    }
}

/// 3D array with x fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct Array3 {
    pub dims: [usize; 3],
    pub data: Vec<f64>,
}

impl Array3 {
    pub fn zeros(dims: [usize; 3]) -> Self {
        Array3 { dims, data: vec![0.0; dims[0] * dims[1] * dims[2]] }
    }

    pub fn idx(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.dims[0] * (j + self.dims[1] * k)
    }

    pub fn at(&self, i: usize, j: usize, k: usize) -> f64 {
        self.data[self.idx(i, j, k)]
    }

    /// Applies `m` along `axis`.
    pub fn apply(&self, axis: usize, m: &Dense) -> Array3 {
        assert_eq!(m.cols, self.dims[axis]);
        let mut dims = self.dims;
        dims[axis] = m.rows;
        let mut out = Array3::zeros(dims);
        for k in 0..dims[2] {
            for j in 0..dims[1] {
                for i in 0..dims[0] {
                    let o = [i, j, k];
                    let mut s = 0.0;
                    for c in 0..m.cols {
                        let mut p = o;
                        p[axis] = c;
                        let w = m.get(o[axis], c);
                        if w != 0.0 {
                            s += w * self.at(p[0], p[1], p[2]);
                        }
                    }
                    out.data[i + dims[0] * (j + dims[1] * k)] = s;
                }
            }
        }
        out
    }

    /// Applies one matrix per axis.
    pub fn tensor(&self, m: [&Dense; 3]) -> Array3 {
        self.apply(0, m[0]).apply(1, m[1]).apply(2, m[2])
    }

    pub fn add(&mut self, o: &Array3, s: f64) {
        for (a, b) in self.data.iter_mut().zip(&o.data) {
            *a += s * b;
        }
    }
}

/// `Δ_M u` at spacing `h` for M = 2, 4, 6, built as sums of products of second differences.
pub fn mehrstellen_lhs(order: usize, h: f64, u: &Array3) -> Array3 {
    let d2: Vec<Dense> = (0..3).map(|a| Dense::second_difference(u.dims[a])).collect();
    let d = |a: usize| u.apply(a, &d2[a]);
    let mut out = Array3::zeros(u.dims);
    for a in 0..3 {
        out.add(&d(a), 1.0);
    }
    if order >= 4 {
        for (a, b) in [(0, 1), (0, 2), (1, 2)] {
            out.add(&u.apply(a, &d2[a]).apply(b, &d2[b]), 1.0 / 6.0);
        }
    }
    if order >= 6 {
        out.add(&u.tensor([&d2[0], &d2[1], &d2[2]]), 1.0 / 30.0);
    }
    for v in &mut out.data {
        *v /= h * h;
    }
    out
}

/// Right-hand operator `R_M f`; identity for M = 2.
pub fn mehrstellen_rhs(order: usize, f: &Array3) -> Array3 {
    let mut out = f.clone();
    if order == 2 {
        return out;
    }
    let d2: Vec<Dense> = (0..3).map(|a| Dense::second_difference(f.dims[a])).collect();
    for a in 0..3 {
        out.add(&f.apply(a, &d2[a]), 1.0 / 12.0);
    }
    if order >= 6 {
        for (a, b) in [(0, 1), (0, 2), (1, 2)] {
            out.add(&f.apply(a, &d2[a]).apply(b, &d2[b]), 1.0 / 90.0);
        }
        for a in 0..3 {
            let d4 = d2[a].mul(&d2[a]);
            out.add(&f.apply(a, &d4), -1.0 / 240.0);
        }
    }
    out
}

/// In-place DST-I: `X_k = Σ_j x_j sin(π j k / (n + 1))`, indices from 1.
pub fn dst1(lines: &mut [f64], n: usize, planner: &mut FftPlanner<f64>) {
    let len = 2 * (n + 1);
    let fft = planner.plan_fft_forward(len);
    let mut buf = vec![Complex64::default(); len];
    for line in lines.chunks_mut(n) {
        buf.iter_mut().for_each(|v| *v = Complex64::default());
        for (j, &x) in line.iter().enumerate() {
            buf[j + 1] = Complex64::new(x, 0.0);
            buf[len - j - 1] = Complex64::new(-x, 0.0);
        }
        fft.process(&mut buf);
        for (k, x) in line.iter_mut().enumerate() {
            *x = -buf[k + 1].im / 2.0;
        }
    }
}

fn transpose_axes(data: &[f64], dims: [usize; 3], perm: [usize; 3]) -> Vec<f64> {
    // out axis a is input axis perm[a]
    let od = [dims[perm[0]], dims[perm[1]], dims[perm[2]]];
    let mut out = vec![0.0; data.len()];
    for k in 0..dims[2] {
        for j in 0..dims[1] {
            for i in 0..dims[0] {
                let p = [i, j, k];
                let q = [p[perm[0]], p[perm[1]], p[perm[2]]];
                out[q[0] + od[0] * (q[1] + od[1] * q[2])] = data[i + dims[0] * (j + dims[1] * k)];
            }
        }
    }
    out
}

/// Symbol of `Δ_M` at unit spacing for sine modes, from `ŝ = -4 sin²(θ/2)`.
fn box_symbol(order: usize, s: &[f64]) -> f64 {
    let mut v: f64 = s.iter().sum();
    if order >= 4 {
        for a in 0..s.len() {
            for b in a + 1..s.len() {
                v += s[a] * s[b] / 6.0;
            }
        }
    }
    if order >= 6 && s.len() == 3 {
        v += s[0] * s[1] * s[2] / 30.0;
    }
    v
}

/// Solves `Δ_M G = δ` at unit spacing on the box `[-l, l]^3` with `G = boundary(n)` on
/// the box surface. Returns `G` on `[0, extent]^3`, x fastest.
pub fn dirichlet_lgf_3d(order: usize, l: usize, extent: usize, boundary: impl Fn([i64; 3]) -> f64) -> Vec<f64> {
    let w = 2 * l + 1;
    let mut b = Array3::zeros([w; 3]);
    let on_face = |i: usize| i == 0 || i == w - 1;
    for k in 0..w {
        for j in 0..w {
            for i in 0..w {
                if on_face(i) || on_face(j) || on_face(k) {
                    let n = [i as i64 - l as i64, j as i64 - l as i64, k as i64 - l as i64];
                    let id = b.idx(i, j, k);
                    b.data[id] = boundary(n);
                }
            }
        }
    }
    let lb = mehrstellen_lhs(order, 1.0, &b);
    let n = w - 2;
    let mut rhs = vec![0.0; n * n * n];
    for k in 0..n {
        for j in 0..n {
            for i in 0..n {
                let mut v = -lb.at(i + 1, j + 1, k + 1);
                if i + 1 == l && j + 1 == l && k + 1 == l {
                    v += 1.0;
                }
                rhs[i + n * (j + n * k)] = v;
            }
        }
    }
    let mut planner = FftPlanner::new();
    let dims = [n; 3];
    let mut data = rhs;
    for _ in 0..3 {
        dst1(&mut data, n, &mut planner);
        data = transpose_axes(&data, dims, [1, 2, 0]);
    }
    let s: Vec<f64> = (1..=n).map(|k| -4.0 * (PI * k as f64 / (2.0 * (n + 1) as f64)).sin().powi(2)).collect();
    for k in 0..n {
        for j in 0..n {
            for i in 0..n {
                data[i + n * (j + n * k)] /= box_symbol(order, &[s[i], s[j], s[k]]);
            }
        }
    }
    for _ in 0..3 {
        dst1(&mut data, n, &mut planner);
        data = transpose_axes(&data, dims, [1, 2, 0]);
    }
    let norm = (2.0 / (n + 1) as f64).powi(3);
    let mut out = Vec::with_capacity((extent + 1).pow(3));
    for c in 0..=extent {
        for bb in 0..=extent {
            for a in 0..=extent {
                let (i, j, k) = (l - 1 + a, l - 1 + bb, l - 1 + c);
                out.push(norm * data[i + n * (j + n * k)]);
            }
        }
    }
    out
}

/// 2D analogue of [`dirichlet_lgf_3d`]; the result is shifted so that `G(0) = 0`.
pub fn dirichlet_lgf_2d(order: usize, l: usize, extent: usize, boundary: impl Fn([i64; 2]) -> f64) -> Vec<f64> {
    let w = 2 * l + 1;
    let n = w - 2;
    let at = |i: usize, j: usize| [i as i64 - l as i64, j as i64 - l as i64];
    let mut full = vec![0.0; w * w];
    for j in 0..w {
        for i in 0..w {
            if i == 0 || j == 0 || i == w - 1 || j == w - 1 {
                full[i + w * j] = boundary(at(i, j));
            }
        }
    }
    // Δ applied to the boundary data, using the same products of second differences.
    let d2 = Dense::second_difference(w);
    let apply_x = |u: &[f64]| {
        let mut o = vec![0.0; w * w];
        for j in 0..w {
            for i in 0..w {
                o[i + w * j] = (0..w).map(|c| d2.get(i, c) * u[c + w * j]).sum();
            }
        }
        o
    };
    let apply_y = |u: &[f64]| {
        let mut o = vec![0.0; w * w];
        for j in 0..w {
            for i in 0..w {
                o[i + w * j] = (0..w).map(|c| d2.get(j, c) * u[i + w * c]).sum();
            }
        }
        o
    };
    let dx = apply_x(&full);
    let dy = apply_y(&full);
    let dxy = apply_y(&dx);
    let cross = if order >= 4 { 1.0 / 6.0 } else { 0.0 };
    let mut rhs = vec![0.0; n * n];
    for j in 0..n {
        for i in 0..n {
            let id = (i + 1) + w * (j + 1);
            let mut v = -(dx[id] + dy[id] + cross * dxy[id]);
            if i + 1 == l && j + 1 == l {
                v += 1.0;
            }
            rhs[i + n * j] = v;
        }
    }
    let mut planner = FftPlanner::new();
    let t2 = |d: &[f64]| transpose_axes(d, [n, n, 1], [1, 0, 2]);
    dst1(&mut rhs, n, &mut planner);
    let mut data = t2(&rhs);
    dst1(&mut data, n, &mut planner);
    let s: Vec<f64> = (1..=n).map(|k| -4.0 * (PI * k as f64 / (2.0 * (n + 1) as f64)).sin().powi(2)).collect();
    for j in 0..n {
        for i in 0..n {
            data[i + n * j] /= box_symbol(order, &[s[i], s[j]]);
        }
    }
    dst1(&mut data, n, &mut planner);
    let mut data = t2(&data);
    dst1(&mut data, n, &mut planner);
    let norm = (2.0 / (n + 1) as f64).powi(2);
    let g = |a: usize, b: usize| norm * data[(l - 1 + a) + n * (l - 1 + b)];
    let g0 = g(0, 0);
    let mut out = Vec::with_capacity((extent + 1).pow(2));
    for b in 0..=extent {
        for a in 0..=extent {
            out.push(g(a, b) - g0);
        }
    }
    out
}

/// Free-space Green's function of the Laplacian in 3D.
pub fn newton_3d(n: [i64; 3]) -> f64 {
    let r = ((n[0] * n[0] + n[1] * n[1] + n[2] * n[2]) as f64).sqrt();
    -1.0 / (4.0 * PI * r)
}

/// Free-space Green's function of the Laplacian in 2D, up to a constant.
pub fn log_2d(n: [i64; 2]) -> f64 {
    let r = ((n[0] * n[0] + n[1] * n[1]) as f64).sqrt();
    r.ln() / (2.0 * PI)
}
