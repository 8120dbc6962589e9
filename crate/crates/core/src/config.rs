//! JSON problem description.
//!
//! ```json
//! {
//!   "s": 1, "alpha": 0.5, "beta": 1.5, "a": 1.0, "b": 1.0,
//!   "p0": 0.0,
//!   "phi": { "sine_coeffs": [1.0, 0.0, 0.5] },
//!   "K": 64,
//!   "grid": { "nx": 64, "ny": 64 },
//!   "tolerances": { "jump": 1e-9 },
//!   "classical_switch": false
//! }
//! ```
//!
//! `p0` is a number or `{"samples": [...]}` (values at the interior points
//! `iπ/(n+1)`); `phi` is `{"sine_coeffs": [...]}` or `{"samples": [...]}`
//! (uniform on `[0, π]` including both ends). Unknown keys are rejected
//! everywhere.

use crate::error::{Error, Result};
use crate::mode_solver::{Grid, ProblemConfig, Tolerances};
use crate::spectral_basis::{Phi, Potential};
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleList {
    pub samples: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PotentialSpec {
    Constant(f64),
    Samples(SampleList),
}

impl Default for PotentialSpec {
    fn default() -> Self {
        PotentialSpec::Constant(0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum PhiSpec {
    SineCoeffs(Vec<f64>),
    Samples(Vec<f64>),
}

fn default_grid() -> Grid {
    Grid { nx: 64, ny: 64 }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub s: u32,
    pub alpha: f64,
    pub beta: f64,
    pub a: f64,
    pub b: f64,
    #[serde(default)]
    pub p0: PotentialSpec,
    pub phi: PhiSpec,
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(default = "default_grid")]
    pub grid: Grid,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub classical_switch: bool,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// The validated problem.
    pub fn problem(&self) -> Result<ProblemConfig> {
        let cfg = ProblemConfig {
            s: self.s,
            alpha: self.alpha,
            beta: self.beta,
            a: self.a,
            b: self.b,
            p0: match &self.p0 {
                PotentialSpec::Constant(p) => Potential::Constant(*p),
                PotentialSpec::Samples(l) => Potential::Samples { samples: l.samples.clone() },
            },
            phi: match &self.phi {
                PhiSpec::SineCoeffs(c) => Phi::SineCoeffs(c.clone()),
                PhiSpec::Samples(v) => {
                    if v.len() < 2 || v.iter().any(|x| !x.is_finite()) {
                        return Err(Error::domain("phi samples need at least 2 finite values"));
                    }
                    Phi::Samples(v.clone())
                }
            },
            k: self.k,
            grid: self.grid,
            tolerances: self.tolerances,
            classical_switch: self.classical_switch,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Inverse of [`ConfigFile::problem`]; fails for φ given as a closure.
    pub fn from_problem(cfg: &ProblemConfig) -> Result<Self> {
        Ok(Self {
            s: cfg.s,
            alpha: cfg.alpha,
            beta: cfg.beta,
            a: cfg.a,
            b: cfg.b,
            p0: match &cfg.p0 {
                Potential::Constant(p) => PotentialSpec::Constant(*p),
                Potential::Samples { samples } => PotentialSpec::Samples(SampleList { samples: samples.clone() }),
            },
            phi: match &cfg.phi {
                Phi::SineCoeffs(c) => PhiSpec::SineCoeffs(c.clone()),
                Phi::Samples(v) => PhiSpec::Samples(v.clone()),
                Phi::Function(_) => return Err(Error::Config("phi given as a function cannot be serialized".into())),
            },
            k: cfg.k,
            grid: cfg.grid,
            tolerances: cfg.tolerances,
            classical_switch: cfg.classical_switch,
        })
    }
}

/// Reads and validates a configuration file.
pub fn load(path: impl AsRef<Path>) -> Result<ProblemConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    ConfigFile::parse(&text)?.problem()
}

#[cfg(test)]
mod tests {
    use super::*;

    const DEMO: &str = r#"{
        "s": 1, "alpha": 0.5, "beta": 1.5, "a": 1, "b": 1,
        "p0": 0, "phi": {"sine_coeffs": [1, 0, 0.5]}, "K": 64,
        "grid": {"nx": 64, "ny": 64}
    }"#;

    #[test]
    fn demo_round_trip() {
        let f = ConfigFile::parse(DEMO).unwrap();
        let cfg = f.problem().unwrap();
        assert_eq!(cfg.k, 64);
        assert_eq!(cfg.tolerances, Tolerances::default());
        let back = ConfigFile::from_problem(&cfg).unwrap();
        assert_eq!(ConfigFile::parse(&back.to_json()).unwrap(), f);
        assert_eq!(ConfigFile::from_problem(&ProblemConfig::demo()).unwrap(), f);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let bad = DEMO.replace("\"K\": 64", "\"K\": 64, \"Kmax\": 3");
        assert!(matches!(ConfigFile::parse(&bad), Err(Error::Config(_))));
        let bad = DEMO.replace("\"nx\": 64", "\"nx\": 64, \"nz\": 1");
        assert!(matches!(ConfigFile::parse(&bad), Err(Error::Config(_))));
        let bad = DEMO.replace("\"sine_coeffs\"", "\"cosine_coeffs\"");
        assert!(matches!(ConfigFile::parse(&bad), Err(Error::Config(_))));
        let bad = DEMO.replace("\"p0\": 0", "\"p0\": {\"samples\": [1, 2], \"n\": 2}");
        assert!(matches!(ConfigFile::parse(&bad), Err(Error::Config(_))));
        let bad = DEMO.replace("\"grid\"", "\"tolerances\": {\"jmp\": 1}, \"grid\"");
        assert!(matches!(ConfigFile::parse(&bad), Err(Error::Config(_))));
    }

    #[test]
    fn invariants_are_enforced_on_load() {
        let bad = DEMO.replace("\"alpha\": 0.5", "\"alpha\": 1.0");
        assert!(matches!(ConfigFile::parse(&bad).unwrap().problem(), Err(Error::Domain(_))));
        let ok = bad.replace("\"K\": 64", "\"K\": 64, \"classical_switch\": true");
        assert!(ConfigFile::parse(&ok).unwrap().problem().is_ok());
        let partial = DEMO.replace("\"grid\"", "\"tolerances\": {\"jump\": 1e-3}, \"grid\"");
        let cfg = ConfigFile::parse(&partial).unwrap().problem().unwrap();
        assert_eq!(cfg.tolerances.jump, 1e-3);
        assert_eq!(cfg.tolerances.ml, 1e-12);
    }
}
