//! Per-axis boundary conditions of the computational domain.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AxisBc {
    Periodic,
    Unbounded,
    /// Homogeneous Neumann (even symmetry). Reserved, not accepted by [`BoundarySpec::new`].
    Even,
    /// Homogeneous Dirichlet (odd symmetry). Reserved, not accepted by [`BoundarySpec::new`].
    Odd,
}

impl AxisBc {
    pub fn letter(self) -> char {
        match self {
            AxisBc::Periodic => 'P',
            AxisBc::Unbounded => 'U',
            AxisBc::Even => 'E',
            AxisBc::Odd => 'O',
        }
    }
}

/// Boundary conditions for the x, y and z axes.
///
/// Only the combinations PPP, UPP, UUP and UUU are accepted: unbounded axes
/// come first, periodic ones last.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BoundarySpec {
    axes: [AxisBc; 3],
}

impl BoundarySpec {
    pub const PPP: BoundarySpec = BoundarySpec { axes: [AxisBc::Periodic; 3] };
    pub const UPP: BoundarySpec =
        BoundarySpec { axes: [AxisBc::Unbounded, AxisBc::Periodic, AxisBc::Periodic] };
    pub const UUP: BoundarySpec =
        BoundarySpec { axes: [AxisBc::Unbounded, AxisBc::Unbounded, AxisBc::Periodic] };
    pub const UUU: BoundarySpec = BoundarySpec { axes: [AxisBc::Unbounded; 3] };

    pub const SUPPORTED: [BoundarySpec; 4] =
        [BoundarySpec::PPP, BoundarySpec::UPP, BoundarySpec::UUP, BoundarySpec::UUU];

    pub fn new(axes: [AxisBc; 3]) -> Result<Self> {
        let spec = BoundarySpec { axes };
        if Self::SUPPORTED.contains(&spec) {
            Ok(spec)
        } else {
            Err(Error::Boundary(format!(
                "combination {spec} is not one of PPP, UPP, UUP, UUU"
            )))
        }
    }

    pub fn axis(&self, d: usize) -> AxisBc {
        self.axes[d]
    }

    pub fn axes(&self) -> [AxisBc; 3] {
        self.axes
    }

    pub fn is_periodic(&self, d: usize) -> bool {
        self.axes[d] == AxisBc::Periodic
    }

    pub fn is_unbounded(&self, d: usize) -> bool {
        self.axes[d] == AxisBc::Unbounded
    }

    pub fn unbounded_count(&self) -> usize {
        self.axes.iter().filter(|a| **a == AxisBc::Unbounded).count()
    }

    /// A fully periodic problem has the constant function in its nullspace.
    pub fn is_singular(&self) -> bool {
        self.axes.iter().all(|a| *a == AxisBc::Periodic)
    }
}

impl fmt::Display for BoundarySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for a in self.axes {
            write!(f, "{}", a.letter())?;
        }
        Ok(())
    }
}

impl FromStr for BoundarySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let chars: Vec<char> = s.trim().chars().collect();
        if chars.len() != 3 {
            return Err(Error::Boundary(format!("expected three axis letters, got `{s}`")));
        }
        let mut axes = [AxisBc::Periodic; 3];
        for (d, c) in chars.iter().enumerate() {
            axes[d] = match c.to_ascii_uppercase() {
                'P' => AxisBc::Periodic,
                'U' => AxisBc::Unbounded,
                'E' => AxisBc::Even,
                'O' => AxisBc::Odd,
                other => return Err(Error::Boundary(format!("unknown axis condition `{other}`"))),
            };
        }
        BoundarySpec::new(axes)
    }
}
