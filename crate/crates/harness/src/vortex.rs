//! Velocity of the compact vortex tube, one scalar solve per in-plane component.

use std::fmt::Write as _;

use amrmg::Result;

use crate::cases::{Case, VortexComponent, VortexTube};
use crate::config::Config;
use crate::metrics::einf;
use crate::run::{run_observed, Outcome, RunSettings};

#[derive(Clone, Debug, PartialEq)]
pub struct VortexRow {
    pub component: char,
    pub cycle: usize,
    pub res_inf: f64,
    pub cauchy: f64,
    pub einf: f64,
}

pub struct VortexResult {
    pub rows: Vec<VortexRow>,
    pub outcomes: Vec<Outcome>,
}

pub const CSV_HEADER: &str = "component,cycle,res_inf,cauchy,einf";

impl VortexResult {
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{CSV_HEADER}");
        for r in &self.rows {
            let _ = writeln!(s, "{},{},{:e},{:e},{:e}", r.component, r.cycle, r.res_inf, r.cauchy, r.einf);
        }
        s
    }

    pub fn all_converged(&self) -> bool {
        self.outcomes.iter().all(|o| o.report.converged)
    }

    /// `res_inf` after `cycles` cycles relative to the initial residual, worst component.
    pub fn residual_reduction(&self, cycles: usize) -> f64 {
        self.outcomes
            .iter()
            .map(|o| match o.report.rows.get(cycles - 1) {
                Some(r) => r.res_inf / o.report.res0,
                None => o.report.rows.last().map_or(f64::NAN, |r| r.res_inf / o.report.res0),
            })
            .fold(0.0, f64::max)
    }
}

/// Solves for `u_x` and `u_y` on the configuration's grid. Cycle 0 rows hold the initial residual.
pub fn run_vortex(config: &Config) -> Result<VortexResult> {
    let mut config = config.clone();
    config.bc = "UUP".into();
    let tube = VortexTube::new(config.radius);
    let eps = config.eps_r.values()[0];
    let mut rows = Vec::new();
    let mut outcomes = Vec::new();
    for (component, label) in [(0usize, 'x'), (1, 'y')] {
        let case = VortexComponent { tube, component };
        let reference = |p: [f64; 3]| case.u_ref(p);
        let mut per_cycle = Vec::new();
        let out = run_observed(&RunSettings::new(&config, eps), &case, &mut |g, u, rec| {
            per_cycle.push(VortexRow {
                component: label,
                cycle: rec.cycle,
                res_inf: rec.res_inf,
                cauchy: rec.cauchy,
                einf: einf(g, u, &reference, 0.0),
            });
        })?;
        rows.push(VortexRow { component: label, cycle: 0, res_inf: out.report.res0, cauchy: f64::NAN, einf: f64::NAN });
        rows.extend(per_cycle);
        outcomes.push(out);
    }
    Ok(VortexResult { rows, outcomes })
}
