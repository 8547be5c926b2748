//! Manufactured solutions and the vortex-tube problem.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use amrmg::{BoundarySpec, Error, Result};

use crate::special::e2;

/// A Poisson problem with a known solution on the unit cube.
pub trait Case: Send + Sync {
    fn name(&self) -> &str;
    fn bc(&self) -> BoundarySpec;
    fn u_ref(&self, p: [f64; 3]) -> f64;
    /// Right-hand side of `∇²u = f`.
    fn f(&self, p: [f64; 3]) -> f64;
    /// Field the grid is adapted on.
    fn criterion(&self, p: [f64; 3]) -> f64 {
        self.u_ref(p)
    }
    fn eval(&self, p: [f64; 3]) -> (f64, f64) {
        (self.u_ref(p), self.f(p))
    }
}

/// `exp(-|x - c|² / σ²)` centred in the cube, periodic in all directions.
#[derive(Clone, Copy, Debug)]
pub struct Gaussian {
    pub sigma: f64,
}

impl Default for Gaussian {
    fn default() -> Self {
        Gaussian { sigma: 0.05 }
    }
}

fn r2_centered(p: [f64; 3]) -> f64 {
    p.iter().map(|x| (x - 0.5) * (x - 0.5)).sum()
}

impl Case for Gaussian {
    fn name(&self) -> &str {
        "gaussian"
    }

    fn bc(&self) -> BoundarySpec {
        BoundarySpec::PPP
    }

    fn u_ref(&self, p: [f64; 3]) -> f64 {
        (-r2_centered(p) / (self.sigma * self.sigma)).exp()
    }

    fn f(&self, p: [f64; 3]) -> f64 {
        let s2 = self.sigma * self.sigma;
        let r2 = r2_centered(p);
        (4.0 * r2 / s2 - 6.0) / s2 * (-r2 / s2).exp()
    }
}

/// Value, first and second derivative of the periodic factor `e^{sin 2πx} - 1`.
pub fn u_per(x: f64) -> [f64; 3] {
    let (s, c) = (2.0 * PI * x).sin_cos();
    let e = s.exp();
    let w = 2.0 * PI;
    [e - 1.0, w * c * e, w * w * (c * c - s) * e]
}

/// Value, first and second derivative of the compact factor
/// `exp(10 (1 - 1/(1 - (2x-1)²)))`, zero outside `(0, 1)`.
pub fn u_unb(x: f64) -> [f64; 3] {
    let s = 2.0 * x - 1.0;
    let q = 1.0 - s * s;
    if q <= 0.0 {
        return [0.0; 3];
    }
    let phi = 10.0 * (1.0 - 1.0 / q);
    let u = phi.exp();
    if u == 0.0 {
        return [0.0; 3];
    }
    let d1 = -20.0 * s / (q * q);
    let d2 = -20.0 * (1.0 + 3.0 * s * s) / (q * q * q);
    [u, 2.0 * d1 * u, 4.0 * (d2 + d1 * d1) * u]
}

/// Product of one-dimensional factors matching the boundary condition of each axis.
#[derive(Clone, Copy, Debug)]
pub struct Product {
    pub bc: BoundarySpec,
}

impl Product {
    fn factors(&self, p: [f64; 3]) -> [[f64; 3]; 3] {
        [0, 1, 2].map(|d| if self.bc.is_periodic(d) { u_per(p[d]) } else { u_unb(p[d]) })
    }
}

impl Case for Product {
    fn name(&self) -> &str {
        "product"
    }

    fn bc(&self) -> BoundarySpec {
        self.bc
    }

    fn u_ref(&self, p: [f64; 3]) -> f64 {
        let f = self.factors(p);
        f[0][0] * f[1][0] * f[2][0]
    }

    fn f(&self, p: [f64; 3]) -> f64 {
        let f = self.factors(p);
        f[0][2] * f[1][0] * f[2][0] + f[0][0] * f[1][2] * f[2][0] + f[0][0] * f[1][0] * f[2][2]
    }
}

/// Compact vortex tube along z through the centre of the cube.
#[derive(Clone, Copy, Debug)]
pub struct VortexTube {
    pub radius: f64,
    e2_one: f64,
}

impl VortexTube {
    pub fn new(radius: f64) -> Self {
        VortexTube { radius, e2_one: e2(1.0) }
    }

    /// Axial vorticity at distance `r` from the axis.
    pub fn omega(&self, r: f64) -> f64 {
        let rho = (r / self.radius).powi(2);
        if rho >= 1.0 {
            return 0.0;
        }
        1.0 / (2.0 * PI) * 2.0 / (self.radius * self.radius) / self.e2_one * (-1.0 / (1.0 - rho)).exp()
    }

    /// `dω/dr`.
    pub fn omega_prime(&self, r: f64) -> f64 {
        let rho = (r / self.radius).powi(2);
        if rho >= 1.0 {
            return 0.0;
        }
        let q = 1.0 - rho;
        self.omega(r) * (-2.0 * r / (self.radius * self.radius)) / (q * q)
    }

    /// Azimuthal velocity.
    pub fn u_theta(&self, r: f64) -> f64 {
        let rho = (r / self.radius).powi(2);
        if rho >= 1.0 {
            return 1.0 / (2.0 * PI * r);
        }
        if r == 0.0 {
            return 0.0;
        }
        let q = 1.0 - rho;
        1.0 / (2.0 * PI * r) * (1.0 - q * e2(1.0 / q) / self.e2_one)
    }

    /// Velocity component `c` (0 = x, 1 = y).
    pub fn velocity(&self, p: [f64; 3], c: usize) -> f64 {
        let (dx, dy) = (p[0] - 0.5, p[1] - 0.5);
        let r = dx.hypot(dy);
        if r == 0.0 {
            return 0.0;
        }
        let ut = self.u_theta(r);
        if c == 0 {
            -dy / r * ut
        } else {
            dx / r * ut
        }
    }
}

/// One velocity component of the vortex tube: `∇²u = -(∇ × ω)_c`.
#[derive(Clone, Copy, Debug)]
pub struct VortexComponent {
    pub tube: VortexTube,
    pub component: usize,
}

impl Case for VortexComponent {
    fn name(&self) -> &str {
        if self.component == 0 {
            "vortex-x"
        } else {
            "vortex-y"
        }
    }

    fn bc(&self) -> BoundarySpec {
        BoundarySpec::UUP
    }

    fn u_ref(&self, p: [f64; 3]) -> f64 {
        self.tube.velocity(p, self.component)
    }

    fn f(&self, p: [f64; 3]) -> f64 {
        let (dx, dy) = (p[0] - 0.5, p[1] - 0.5);
        let r = dx.hypot(dy);
        if r == 0.0 {
            return 0.0;
        }
        let dw = self.tube.omega_prime(r);
        // curl of (0, 0, ω) is (∂ω/∂y, -∂ω/∂x, 0)
        if self.component == 0 {
            -dw * dy / r
        } else {
            dw * dx / r
        }
    }

    fn criterion(&self, p: [f64; 3]) -> f64 {
        let (dx, dy) = (p[0] - 0.5, p[1] - 0.5);
        self.tube.omega(dx.hypot(dy))
    }
}

/// Case parameters that are not part of the case name.
#[derive(Clone, Copy, Debug)]
pub struct CaseParams {
    pub bc: BoundarySpec,
    pub sigma: f64,
    pub radius: f64,
}

impl Default for CaseParams {
    fn default() -> Self {
        CaseParams { bc: BoundarySpec::PPP, sigma: 0.05, radius: 0.25 }
    }
}

type Factory = fn(&CaseParams) -> Result<Box<dyn Case>>;

/// Cases by name.
pub struct CaseRegistry {
    factories: BTreeMap<&'static str, Factory>,
}

impl Default for CaseRegistry {
    fn default() -> Self {
        let mut r = CaseRegistry { factories: BTreeMap::new() };
        r.register("gaussian", |p| {
            if p.bc != BoundarySpec::PPP {
                return Err(Error::UnsupportedBoundary(p.bc.to_string(), "gaussian".into()));
            }
            Ok(Box::new(Gaussian { sigma: p.sigma }))
        });
        r.register("product", |p| Ok(Box::new(Product { bc: p.bc })));
        r.register("vortex-x", |p| vortex(p, 0));
        r.register("vortex-y", |p| vortex(p, 1));
        r
    }
}

fn vortex(p: &CaseParams, component: usize) -> Result<Box<dyn Case>> {
    if p.bc != BoundarySpec::UUP {
        return Err(Error::UnsupportedBoundary(p.bc.to_string(), "vortex".into()));
    }
    Ok(Box::new(VortexComponent { tube: VortexTube::new(p.radius), component }))
}

impl CaseRegistry {
    pub fn register(&mut self, name: &'static str, f: Factory) {
        self.factories.insert(name, f);
    }

    pub fn create(&self, name: &str, params: &CaseParams) -> Result<Box<dyn Case>> {
        let f = self
            .factories
            .get(name)
            .ok_or_else(|| Error::UnknownStrategy { kind: "case", name: name.to_string() })?;
        f(params)
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.factories.keys().copied().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factor_values() {
        assert_eq!(u_per(0.0)[0], 0.0);
        assert_eq!(u_unb(0.5)[0], 1.0);
        assert_eq!(u_unb(0.0), [0.0; 3]);
        assert_eq!(u_unb(1.2), [0.0; 3]);
    }

    #[test]
    fn far_field_velocity() {
        let t = VortexTube::new(0.25);
        let r = 0.4;
        assert!((t.u_theta(r) - 1.0 / (2.0 * PI * r)).abs() < 1e-15);
        // continuous across the tube edge
        let inside = t.u_theta(0.25 * (1.0 - 1e-9));
        assert!((inside - 1.0 / (2.0 * PI * 0.25)).abs() < 1e-6);
    }

    #[test]
    fn circulation_is_one() {
        let t = VortexTube::new(0.25);
        // ∫ ω 2πr dr by composite Simpson
        let n = 4000;
        let h = t.radius / n as f64;
        let mut s = 0.0;
        for i in 0..=n {
            let r = i as f64 * h;
            let w = if i == 0 || i == n { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * t.omega(r) * 2.0 * PI * r;
        }
        s *= h / 3.0;
        assert!((s - 1.0).abs() < 1e-9, "{s}");
    }

    #[test]
    fn registry_rejects_mismatched_boundaries() {
        let r = CaseRegistry::default();
        let p = CaseParams { bc: BoundarySpec::UUU, ..Default::default() };
        assert!(r.create("gaussian", &p).is_err());
        assert!(r.create("product", &p).is_ok());
        assert!(r.create("nope", &p).is_err());
    }
}
