//! One-dimensional Lagrange interpolation weights.

/// Weights `w` such that `Σ w_i p(nodes_i) = p(x)` for every polynomial of
/// degree below `nodes.len()`.
pub fn lagrange_weights(nodes: &[f64], x: f64) -> Vec<f64> {
    let mut w = Vec::with_capacity(nodes.len());
    for (i, &xi) in nodes.iter().enumerate() {
        let mut l = 1.0;
        for (j, &xj) in nodes.iter().enumerate() {
            if i != j {
                l *= (x - xj) / (xi - xj);
            }
        }
        w.push(l);
    }
    w
}

/// Weights for the midpoint of `n` equispaced nodes at integer offsets
/// `start, start + 1, …` evaluated at `x` (all in units of the node spacing).
pub fn equispaced_weights(start: i64, n: usize, x: f64) -> Vec<f64> {
    let nodes: Vec<f64> = (0..n as i64).map(|m| (start + m) as f64).collect();
    lagrange_weights(&nodes, x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_polynomials() {
        let nodes = [-1.5, -0.5, 0.5, 1.5, 2.5, 3.5];
        let w = lagrange_weights(&nodes, 0.1);
        for deg in 0..6 {
            let p = |x: f64| x.powi(deg) - 0.3 * x;
            let s: f64 = nodes.iter().zip(&w).map(|(x, w)| w * p(*x)).sum();
            assert!((s - p(0.1)).abs() < 1e-13, "degree {deg}");
        }
    }

    #[test]
    fn cubic_midpoint_weights() {
        let w = equispaced_weights(-1, 4, 0.5);
        let expect = [-1.0 / 16.0, 9.0 / 16.0, 9.0 / 16.0, -1.0 / 16.0];
        for (a, b) in w.iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
    }
}
