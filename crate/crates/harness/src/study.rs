//! Error against refinement tolerance.

use std::fmt::Write as _;

use amrmg::{Error, Result};

use crate::cases::Case;
use crate::config::Config;
use crate::metrics::loglog_slope;
use crate::run::{run, RunSettings};

#[derive(Clone, Debug, PartialEq)]
pub struct StudyRow {
    pub eps_r: f64,
    pub einf: f64,
    pub blocks: usize,
    pub cycles: usize,
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Study {
    pub rows: Vec<StudyRow>,
    /// Fitted exponent of `E∞ ∝ ε_r^slope`; NaN when a row has no error.
    pub slope: f64,
}

impl Study {
    pub const CSV_HEADER: &'static str = "eps_r,einf,blocks,cycles,converged";

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{}", Self::CSV_HEADER);
        for r in &self.rows {
            let _ = writeln!(s, "{:e},{:e},{},{},{}", r.eps_r, r.einf, r.blocks, r.cycles, r.converged);
        }
        let _ = writeln!(s, "# slope,{:.6}", self.slope);
        s
    }

    pub fn all_converged(&self) -> bool {
        self.rows.iter().all(|r| r.converged)
    }
}

/// One adapted solve per `eps_r` of the configuration.
pub fn run_study(config: &Config, case: &dyn Case) -> Result<Study> {
    let mut rows = Vec::new();
    for eps in config.eps_r.values() {
        let out = match run(&RunSettings::new(config, eps), case) {
            Err(Error::BlockBudget { limit }) => {
                log::warn!("{} {} M={} eps_r={eps:e}: over the {limit}-block budget", case.name(), case.bc(), config.m);
                rows.push(StudyRow { eps_r: eps, einf: f64::NAN, blocks: limit, cycles: 0, converged: false });
                continue;
            }
            r => r?,
        };
        log::info!(
            "{} {} M={} eps_r={eps:e}: E_inf={:e}, {} blocks, {} cycles",
            case.name(),
            case.bc(),
            config.m,
            out.einf,
            out.blocks,
            out.report.cycles()
        );
        rows.push(StudyRow {
            eps_r: eps,
            einf: out.einf,
            blocks: out.blocks,
            cycles: out.report.cycles(),
            converged: out.report.converged,
        });
    }
    let slope = if rows.len() > 1 {
        let x: Vec<f64> = rows.iter().map(|r| r.eps_r).collect();
        let y: Vec<f64> = rows.iter().map(|r| r.einf).collect();
        loglog_slope(&x, &y)
    } else {
        f64::NAN
    };
    Ok(Study { rows, slope })
}
