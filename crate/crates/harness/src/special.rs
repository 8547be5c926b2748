//! Generalized exponential integral of order two.

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `E₂(x) = ∫₁^∞ e^{-xt} / t² dt` for `x > 0`.
///
/// Power series of `E₁` below one, continued fraction (modified Lentz) above.
pub fn e2(x: f64) -> f64 {
    assert!(x > 0.0, "E2 needs a positive argument, got {x}");
    if x <= 1.0 {
        let mut sum = 0.0;
        let mut term = 1.0;
        for k in 1..60 {
            term *= -x / k as f64;
            let t = term / k as f64;
            sum += t;
            if t.abs() < 1e-17 * sum.abs() {
                break;
            }
        }
        let e1 = -EULER_GAMMA - x.ln() - sum;
        return (-x).exp() - x * e1;
    }
    let tiny = 1e-300;
    let mut b = x + 2.0;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..200 {
        let a = -(i as f64) * (i as f64 + 1.0);
        b += 2.0;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h * (-x).exp()
}
