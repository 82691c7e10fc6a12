//! Experiment configuration documents.

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use fhs_core::optimizer::MinimizeOptions;
use fhs_core::params::{critical_exponent, hardy_constant};
use fhs_core::{Grid, Params};
use serde::{Deserialize, Serialize};

use crate::error::{config_err, HarnessError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentId {
    Subcritical,
    #[value(name = "critical_upper", alias = "critical-upper")]
    CriticalUpper,
    Bn,
    Conjecture,
    Sloane,
}

impl ExperimentId {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentId::Subcritical => "subcritical",
            ExperimentId::CriticalUpper => "critical_upper",
            ExperimentId::Bn => "bn",
            ExperimentId::Conjecture => "conjecture",
            ExperimentId::Sloane => "sloane",
        }
    }
}

/// Coupling given either directly or as a multiple of H_s.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Coupling {
    Absolute(f64),
    HardyFraction(f64),
}

impl Coupling {
    pub fn resolve(self, s: f64) -> Result<f64> {
        Ok(match self {
            Coupling::Absolute(l) => l,
            Coupling::HardyFraction(f) => f * hardy_constant(s)?,
        })
    }
}

/// One parameter point; `p` defaults to 2*_s.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointSpec {
    pub n: usize,
    pub s: f64,
    #[serde(default)]
    pub p: Option<f64>,
    pub lambda: Coupling,
}

impl PointSpec {
    pub fn new(n: usize, s: f64, p: Option<f64>, lambda: Coupling) -> Self {
        Self { n, s, p, lambda }
    }

    pub fn exponent(&self) -> Result<f64> {
        match self.p {
            Some(p) => Ok(p),
            None => Ok(critical_exponent(self.n, self.s)?),
        }
    }

    pub fn coupling(&self) -> Result<f64> {
        self.lambda.resolve(self.s)
    }

    /// Parameters with λ < H_s enforced.
    pub fn params(&self) -> Result<Params> {
        Ok(Params::new(self.n, self.s, self.exponent()?, self.coupling()?)?)
    }

    /// Parameters allowing λ ≥ H_s.
    pub fn params_any_coupling(&self) -> Result<Params> {
        Ok(Params::with_any_coupling(self.n, self.s, self.exponent()?, self.coupling()?)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSpec {
    /// Coarse node count per axis; the fine grid has 2m − 1.
    pub resolution: Option<usize>,
    /// Normal extents of a box series (lateral half-width L1/2); empty means
    /// the default box.
    pub boxes: Vec<f64>,
    pub padding: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { resolution: None, boxes: Vec::new(), padding: 4 }
    }
}

impl GridSpec {
    /// Coarse and fine grids on the default box for dimension `n`.
    pub fn pair(&self, n: usize, default_m: usize) -> Result<(Grid, Grid)> {
        let coarse = Grid::with_resolution(n, self.resolution.unwrap_or(default_m))?;
        let fine = coarse.refined();
        Ok((coarse, fine))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentId,
    pub points: Vec<PointSpec>,
    pub grid: GridSpec,
    pub optimizer: MinimizeOptions,
    /// Concentration parameters of the φ_h family.
    pub h_values: Vec<f64>,
    pub output: Option<PathBuf>,
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self::default_for(ExperimentId::Subcritical)
    }
}

fn fraction(n: usize, s: f64, p: Option<f64>, f: f64) -> PointSpec {
    PointSpec::new(n, s, p, Coupling::HardyFraction(f))
}

impl ExperimentConfig {
    pub fn default_for(experiment: ExperimentId) -> Self {
        let base = Self {
            experiment,
            points: Vec::new(),
            grid: GridSpec::default(),
            optimizer: MinimizeOptions::default(),
            h_values: Vec::new(),
            output: None,
            seed: 20240601,
        };
        match experiment {
            ExperimentId::Subcritical => Self {
                points: vec![
                    PointSpec::new(1, 0.4, Some(3.0), Coupling::Absolute(-10.0)),
                    PointSpec::new(1, 0.4, Some(3.0), Coupling::Absolute(0.0)),
                    fraction(1, 0.4, Some(3.0), 0.5),
                ],
                grid: GridSpec { resolution: Some(4097), ..GridSpec::default() },
                ..base
            },
            ExperimentId::CriticalUpper => Self {
                points: vec![
                    PointSpec::new(1, 0.3, None, Coupling::Absolute(0.0)),
                    fraction(1, 0.3, None, 0.5),
                    fraction(1, 0.3, None, 0.9),
                    PointSpec::new(1, 0.3, None, Coupling::Absolute(-0.1)),
                ],
                grid: GridSpec { resolution: Some(4097), ..GridSpec::default() },
                h_values: vec![1.0, 2.0, 4.0, 8.0, 16.0],
                ..base
            },
            ExperimentId::Bn => Self {
                points: vec![
                    fraction(2, 0.45, None, 0.8),
                    fraction(2, 0.45, None, 0.05),
                    PointSpec::new(2, 0.45, None, Coupling::Absolute(-0.5)),
                ],
                grid: GridSpec { resolution: Some(129), padding: 2, ..GridSpec::default() },
                ..base
            },
            ExperimentId::Conjecture => Self {
                points: vec![fraction(1, 0.35, None, 0.9), fraction(2, 0.75, None, 0.5)],
                grid: GridSpec { padding: 2, ..GridSpec::default() },
                optimizer: MinimizeOptions { max_iters: 2000, ..MinimizeOptions::default() },
                ..base
            },
            ExperimentId::Sloane => Self {
                points: vec![fraction(2, 0.75, None, 1.0)],
                grid: GridSpec { resolution: Some(65), padding: 2, ..GridSpec::default() },
                optimizer: MinimizeOptions { max_iters: 2000, ..MinimizeOptions::default() },
                ..base
            },
        }
    }

    /// Parses a config; fields it omits take the defaults of its experiment.
    pub fn from_json(text: &str) -> Result<Self> {
        let invalid = |e: serde_json::Error| HarnessError::Config(format!("invalid config: {e}"));
        let doc: serde_json::Value = serde_json::from_str(text).map_err(invalid)?;
        let id = match doc.get("experiment") {
            Some(v) => serde_json::from_value(v.clone()).map_err(invalid)?,
            None => return config_err("config must name an experiment"),
        };
        let mut merged = serde_json::to_value(Self::default_for(id))?;
        overlay(&mut merged, doc);
        serde_json::from_value(merged).map_err(invalid)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Structural checks shared by all experiments; the hypotheses of each
    /// experiment are checked by its driver.
    pub fn validate(&self) -> Result<()> {
        if self.points.is_empty() {
            return config_err("config lists no parameter points");
        }
        if self.grid.padding < 1 {
            return config_err("padding must be at least 1");
        }
        if let Some(m) = self.grid.resolution {
            if m < 9 {
                return config_err(format!("resolution {m} is below the 9-node minimum"));
            }
        }
        if self.grid.boxes.iter().any(|l| !(*l > 0.0 && l.is_finite())) {
            return config_err("box extents must be positive");
        }
        if self.h_values.iter().any(|h| !(*h >= 1.0 && h.is_finite())) {
            return config_err("concentration parameters h must be at least 1");
        }
        let o = &self.optimizer;
        if !(o.tol > 0.0) || o.max_iters == 0 || !(o.backtracking.shrink > 0.0 && o.backtracking.shrink < 1.0) {
            return config_err("optimizer options out of range");
        }
        for p in &self.points {
            p.exponent().map_err(|e| HarnessError::Config(e.to_string()))?;
            p.coupling().map_err(|e| HarnessError::Config(e.to_string()))?;
            p.params_any_coupling().map_err(|e| HarnessError::Config(e.to_string()))?;
        }
        Ok(())
    }

    /// Canonical JSON (sorted keys) used for the provenance hash.
    pub fn canonical_json(&self) -> Result<String> {
        let mut v = serde_json::to_value(self)?;
        if let Some(obj) = v.as_object_mut() {
            // the output location does not change any number
            obj.remove("output");
        }
        Ok(serde_json::to_string(&v)?)
    }
}

/// Objects merge key by key; anything else replaces.
fn overlay(base: &mut serde_json::Value, doc: serde_json::Value) {
    match (base, doc) {
        (serde_json::Value::Object(b), serde_json::Value::Object(d)) => {
            for (k, v) in d {
                match b.get_mut(&k) {
                    Some(slot) => overlay(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate_and_round_trip() {
        for id in ExperimentId::value_variants() {
            let cfg = ExperimentConfig::default_for(*id);
            cfg.validate().unwrap();
            let text = serde_json::to_string(&cfg).unwrap();
            assert_eq!(ExperimentConfig::from_json(&text).unwrap(), cfg);
        }
    }

    #[test]
    fn canonical_form_ignores_output_and_key_order() {
        let a = ExperimentConfig::default_for(ExperimentId::Bn);
        let mut b = a.clone();
        b.output = Some("elsewhere".into());
        assert_eq!(a.canonical_json().unwrap(), b.canonical_json().unwrap());
        let reordered = r#"{"seed": 3, "experiment": "sloane", "points": [{"s": 0.75, "n": 2, "lambda": {"hardy_fraction": 1.0}}]}"#;
        let c = ExperimentConfig::from_json(reordered).unwrap();
        assert_eq!(c.experiment, ExperimentId::Sloane);
        assert_eq!(c.seed, 3);
        assert_eq!(c.grid, ExperimentConfig::default_for(ExperimentId::Sloane).grid);
        assert_eq!(c.points.len(), 1);
        let partial = r#"{"experiment": "bn", "grid": {"resolution": 65}}"#;
        let d = ExperimentConfig::from_json(partial).unwrap();
        assert_eq!((d.grid.resolution, d.grid.padding), (Some(65), 2));
        assert!(ExperimentConfig::from_json(r#"{"seed": 1}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"experiment": "bn", "grid": {"resolutoin": 65}}"#).is_err());
    }

    #[test]
    fn malformed_documents_are_config_errors() {
        assert_eq!(ExperimentConfig::from_json("{").unwrap_err().exit_code(), 2);
        let mut cfg = ExperimentConfig::default_for(ExperimentId::Subcritical);
        cfg.points[0].s = 1.5;
        assert_eq!(cfg.validate().unwrap_err().exit_code(), 2);
        cfg.points.clear();
        assert!(cfg.validate().is_err());
    }
}
