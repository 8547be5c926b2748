//! JSON run configuration.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use amrmg::{BoundarySpec, CycleConfig, Error, Result};

use crate::cases::CaseParams;

/// One tolerance or a list of them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EpsList {
    One(f64),
    Many(Vec<f64>),
}

impl EpsList {
    pub fn values(&self) -> Vec<f64> {
        match self {
            EpsList::One(v) => vec![*v],
            EpsList::Many(v) => v.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub case: String,
    pub bc: String,
    #[serde(rename = "M")]
    pub m: usize,
    /// Adaptation order; defaults to `M`.
    #[serde(rename = "W")]
    pub w: Option<usize>,
    pub eps_r: EpsList,
    /// Coarsening tolerance; defaults to `eps_r / 100`.
    pub eps_c: Option<f64>,
    pub eta1: usize,
    pub eta2: usize,
    pub tol: f64,
    pub max_cycles: usize,
    pub block_size: usize,
    pub base_blocks: usize,
    pub max_level: usize,
    /// Adapted grids larger than this are rejected instead of solved.
    pub max_blocks: Option<usize>,
    pub output: Option<PathBuf>,
    pub sigma: f64,
    pub radius: f64,
    /// Kernel orders tried by the compatibility experiment.
    pub kernel_orders: Vec<usize>,
    pub lgf_cache: Option<PathBuf>,
    pub timing: bool,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            case: "gaussian".into(),
            bc: "PPP".into(),
            m: 4,
            w: None,
            eps_r: EpsList::One(1e-3),
            eps_c: None,
            eta1: 3,
            eta2: 3,
            tol: 1e-6,
            max_cycles: 20,
            block_size: 16,
            base_blocks: 8,
            max_level: 3,
            max_blocks: None,
            output: None,
            sigma: 0.05,
            radius: 0.25,
            kernel_orders: vec![2, 4, 6],
            lgf_cache: None,
            timing: false,
        }
    }
}

impl Config {
    pub fn from_json(text: &str) -> Result<Self> {
        let c: Config = serde_json::from_str(text).map_err(|e| Error::CycleConfig(format!("bad configuration: {e}")))?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }

    pub fn validate(&self) -> Result<()> {
        self.boundary()?;
        self.cycle().validate()?;
        let eps = self.eps_r.values();
        if eps.is_empty() || eps.iter().any(|e| !(*e > 0.0)) {
            return Err(Error::AdaptParams("eps_r must be positive".into()));
        }
        if eps.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::AdaptParams("eps_r list must be strictly decreasing".into()));
        }
        Ok(())
    }

    pub fn boundary(&self) -> Result<BoundarySpec> {
        self.bc.parse()
    }

    pub fn order_w(&self) -> usize {
        self.w.unwrap_or(self.m)
    }

    pub fn cycle(&self) -> CycleConfig {
        CycleConfig {
            eta1: self.eta1,
            eta2: self.eta2,
            order: self.m,
            tol: self.tol,
            max_cycles: self.max_cycles,
            zero_mean: false,
            timing: self.timing,
        }
    }

    pub fn case_params(&self) -> Result<CaseParams> {
        Ok(CaseParams { bc: self.boundary()?, sigma: self.sigma, radius: self.radius })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_spec_keys() {
        let c = Config::from_json(
            r#"{"case": "product", "bc": "UUP", "M": 2, "W": 4, "eps_r": [1e-2, 1e-3], "eps_c": 1e-5,
                "eta1": 2, "eta2": 1, "tol": 1e-8, "max_cycles": 5, "block_size": 8,
                "base_blocks": 2, "max_level": 2, "output": "out.csv"}"#,
        )
        .unwrap();
        assert_eq!(c.m, 2);
        assert_eq!(c.order_w(), 4);
        assert_eq!(c.eps_r.values(), vec![1e-2, 1e-3]);
        assert_eq!(c.boundary().unwrap(), BoundarySpec::UUP);
        assert_eq!(Config::from_json(&c.to_json()).unwrap(), c);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(Config::from_json(r#"{"bogus": 1}"#).is_err());
        assert!(Config::from_json(r#"{"eps_r": [1e-3, 1e-2]}"#).is_err());
        assert!(Config::from_json(r#"{"bc": "PUP"}"#).is_err());
        assert!(Config::from_json(r#"{"M": 3}"#).is_err());
    }
}
