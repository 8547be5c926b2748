//! Fourier symbols of discrete Laplacians and the named operator registry.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};

/// `ŝ(θ) = 2 cos θ − 2`, the symbol of the unit second difference.
#[inline]
pub fn s_hat(theta: f64) -> f64 {
    let s = (0.5 * theta).sin();
    -4.0 * s * s
}

/// A constant-coefficient discrete Laplacian known through its Fourier symbol.
pub trait DiscreteOperator: Send + Sync {
    fn name(&self) -> &str;

    /// `σ(θ)·h²` as a function of the dimensionless wavenumbers `θ = k h`.
    fn unit_symbol(&self, theta: [f64; 3]) -> f64;

    fn symbol(&self, k: [f64; 3], h: f64) -> f64 {
        self.unit_symbol(k.map(|x| x * h)) / (h * h)
    }

    /// Coefficients `(A, C)` with `σ h² = A·ŝ(θ_x) + C` for fixed `θ_y, θ_z`.
    /// `None` when the operator is not three-point along x.
    fn split_x(&self, theta_y: f64, theta_z: f64) -> Option<(f64, f64)>;

    /// Order of the matching compact stencil, if any.
    fn stencil_order(&self) -> Option<usize>;
}

/// Compact Mehrstellen Laplacian of order 2, 4 or 6.
#[derive(Clone, Debug)]
pub struct Mehrstellen {
    order: usize,
    name: String,
}

impl Mehrstellen {
    pub fn new(order: usize) -> Result<Self> {
        if ![2, 4, 6].contains(&order) {
            return Err(Error::UnknownStrategy { kind: "operator", name: format!("mehrstellen{order}") });
        }
        Ok(Mehrstellen { order, name: format!("mehrstellen{order}") })
    }

    pub fn order(&self) -> usize {
        self.order
    }
}

impl DiscreteOperator for Mehrstellen {
    fn name(&self) -> &str {
        &self.name
    }

    fn unit_symbol(&self, theta: [f64; 3]) -> f64 {
        let [x, y, z] = theta.map(s_hat);
        let mut s = x + y + z;
        if self.order >= 4 {
            s += (x * y + y * z + z * x) / 6.0;
        }
        if self.order >= 6 {
            s += x * y * z / 30.0;
        }
        s
    }

    fn split_x(&self, theta_y: f64, theta_z: f64) -> Option<(f64, f64)> {
        let (y, z) = (s_hat(theta_y), s_hat(theta_z));
        Some(match self.order {
            2 => (1.0, y + z),
            4 => (1.0 + (y + z) / 6.0, y + z + y * z / 6.0),
            _ => (1.0 + (y + z) / 6.0 + y * z / 30.0, y + z + y * z / 6.0),
        })
    }

    fn stencil_order(&self) -> Option<usize> {
        Some(self.order)
    }
}

/// Wide cross-shaped central difference Laplacian of order 4, 6 or 8.
#[derive(Clone, Debug)]
pub struct WideCentral {
    order: usize,
    name: String,
}

impl WideCentral {
    pub fn new(order: usize) -> Result<Self> {
        if ![4, 6, 8].contains(&order) {
            return Err(Error::UnknownStrategy { kind: "operator", name: format!("central{order}") });
        }
        Ok(WideCentral { order, name: format!("central{order}") })
    }

    fn axis(&self, t: f64) -> f64 {
        let c = |m: f64| (m * t).cos();
        match self.order {
            4 => (-c(2.0) + 16.0 * c(1.0) - 15.0) / 6.0,
            6 => (2.0 * c(3.0) - 27.0 * c(2.0) + 270.0 * c(1.0) - 245.0) / 90.0,
            _ => (-9.0 * c(4.0) + 128.0 * c(3.0) - 1008.0 * c(2.0) + 8064.0 * c(1.0) - 7175.0) / 2520.0,
        }
    }
}

impl DiscreteOperator for WideCentral {
    fn name(&self) -> &str {
        &self.name
    }

    fn unit_symbol(&self, theta: [f64; 3]) -> f64 {
        theta.iter().map(|&t| self.axis(t)).sum()
    }

    fn split_x(&self, _: f64, _: f64) -> Option<(f64, f64)> {
        None
    }

    fn stencil_order(&self) -> Option<usize> {
        None
    }
}

type OperatorFactory = fn() -> Arc<dyn DiscreteOperator>;

/// Operators selectable by name.
pub struct OperatorRegistry {
    entries: BTreeMap<&'static str, OperatorFactory>,
}

impl Default for OperatorRegistry {
    fn default() -> Self {
        let mut r = OperatorRegistry { entries: BTreeMap::new() };
        r.register("mehrstellen2", || Arc::new(Mehrstellen::new(2).unwrap()));
        r.register("mehrstellen4", || Arc::new(Mehrstellen::new(4).unwrap()));
        r.register("mehrstellen6", || Arc::new(Mehrstellen::new(6).unwrap()));
        r.register("central4", || Arc::new(WideCentral::new(4).unwrap()));
        r.register("central6", || Arc::new(WideCentral::new(6).unwrap()));
        r.register("central8", || Arc::new(WideCentral::new(8).unwrap()));
        r
    }
}

impl OperatorRegistry {
    pub fn register(&mut self, name: &'static str, factory: OperatorFactory) {
        self.entries.insert(name, factory);
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn DiscreteOperator>> {
        self.entries
            .get(name)
            .map(|f| f())
            .ok_or_else(|| Error::UnknownStrategy { kind: "operator", name: name.to_string() })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.keys().copied().collect()
    }
}

/// The operator matching the compact stencil of order `m`.
pub fn mehrstellen(m: usize) -> Result<Arc<dyn DiscreteOperator>> {
    Ok(Arc::new(Mehrstellen::new(m)?))
}
