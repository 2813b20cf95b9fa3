//! Run configuration: a versioned TOML schema covering the model, the
//! initial total income, enforcement, integrator controls and output
//! options. Unknown keys are rejected; only the integrator and output
//! sections have defaults.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dynamics::IntegratorSettings;
use crate::error::{Error, Result};
use crate::kinetics::{EnforcementParams, ModelConfig};

/// The only schema version this build reads.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    pub model: ModelSection,
    pub initial: InitialSection,
    pub enforcement: EnforcementSection,
    #[serde(default)]
    pub integrator: IntegratorSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    /// Number of income classes; must match the class-income specification.
    pub n: usize,
    pub r: ClassIncomes,
    pub s: f64,
    pub tau: TaxSchedule,
    pub theta_ev: Vec<f64>,
    pub sector_weights: Vec<f64>,
}

/// Class incomes: either an explicit list or a linear generator
/// `r_j = base + (j - 1) step`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ClassIncomes {
    List(Vec<f64>),
    Linear(LinearIncomes),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinearIncomes {
    pub base: f64,
    pub step: f64,
}

/// Tax schedule: either an explicit per-class list or the linear progressive
/// schedule interpolating from `first` (bottom class) to `last` (top class).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TaxSchedule {
    List(Vec<f64>),
    Linear(LinearSchedule),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinearSchedule {
    pub first: f64,
    pub last: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSection {
    /// Target total income of the initial condition.
    pub mu: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnforcementSection {
    pub sigma: f64,
    pub xi: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorSection {
    pub dt: Option<f64>,
    pub tol: Option<f64>,
    pub max_time: Option<f64>,
    pub record_every: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub directory: Option<String>,
    pub formats: Option<Vec<OutputFormat>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OutputFormat {
    #[serde(rename = "trajectory-csv")]
    TrajectoryCsv,
    #[serde(rename = "summary-json")]
    SummaryJson,
    #[serde(rename = "lorenz-csv")]
    LorenzCsv,
}

/// Fully validated run parameters derived from a [`RunConfig`].
#[derive(Debug, Clone)]
pub struct ResolvedConfig {
    pub model: ModelConfig,
    pub enforcement: EnforcementParams,
    pub mu: f64,
    pub settings: IntegratorSettings,
    pub out_dir: String,
    pub formats: Vec<OutputFormat>,
}

impl RunConfig {
    /// Expands generators and validates every section against the embedded
    /// type invariants.
    pub fn resolve(&self) -> Result<ResolvedConfig> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Usage(format!(
                "unsupported schema_version {} (this build reads {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        let n = self.model.n;
        if n < 2 {
            return Err(Error::Config(format!("model.n must be at least 2, got {n}")));
        }
        let r: Vec<f64> = match &self.model.r {
            ClassIncomes::List(list) => {
                if list.len() != n {
                    return Err(Error::Config(format!(
                        "model.r lists {} incomes but model.n = {n}",
                        list.len()
                    )));
                }
                list.clone()
            }
            ClassIncomes::Linear(gen) => (0..n).map(|j| gen.base + j as f64 * gen.step).collect(),
        };
        let tau: Vec<f64> = match &self.model.tau {
            TaxSchedule::List(list) => {
                if list.len() != n {
                    return Err(Error::Config(format!(
                        "model.tau lists {} rates but model.n = {n}",
                        list.len()
                    )));
                }
                list.clone()
            }
            TaxSchedule::Linear(sched) => (0..n)
                .map(|j| sched.first + j as f64 / (n - 1) as f64 * (sched.last - sched.first))
                .collect(),
        };
        let model = ModelConfig::new(
            r,
            self.model.s,
            tau,
            self.model.theta_ev.clone(),
            self.model.sector_weights.clone(),
        )?;
        let enforcement = EnforcementParams::new(self.enforcement.sigma, self.enforcement.xi)?;
        let mu = self.initial.mu;
        if !(model.r()[0]..=model.r()[model.n() - 1]).contains(&mu) {
            return Err(Error::Config(format!(
                "initial.mu = {mu} outside the attainable income range [{}, {}]",
                model.r()[0],
                model.r()[model.n() - 1]
            )));
        }
        let defaults = IntegratorSettings::default();
        let settings = IntegratorSettings {
            dt: self.integrator.dt.unwrap_or(defaults.dt),
            tol: self.integrator.tol.unwrap_or(defaults.tol),
            max_time: self.integrator.max_time.unwrap_or(defaults.max_time),
            record_every: self.integrator.record_every.unwrap_or(defaults.record_every),
        };
        settings.validate()?;
        Ok(ResolvedConfig {
            model,
            enforcement,
            mu,
            settings,
            out_dir: self.output.directory.clone().unwrap_or_else(|| "out".to_string()),
            formats: self.output.formats.clone().unwrap_or_else(|| {
                vec![OutputFormat::TrajectoryCsv, OutputFormat::SummaryJson]
            }),
        })
    }
}

/// Loads and validates a TOML run configuration from disk. Schema errors
/// carry the offending key path; constraint errors state the violated
/// condition.
pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)?;
    let cfg: RunConfig = toml::from_str(&text)
        .map_err(|e| Error::Usage(format!("{}: {}", path.display(), e.message())))?;
    cfg.resolve()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::workbench::presets::paper_default_config;

    #[test]
    fn paper_default_resolves_with_progressive_schedule() {
        let cfg = paper_default_config();
        let resolved = cfg.resolve().unwrap();
        let expected = [0.23, 0.255, 0.28, 0.305, 0.33, 0.355, 0.38, 0.405, 0.43];
        for (a, b) in resolved.model.tau().iter().zip(expected) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
        assert_eq!(resolved.mu, 79.0);
        assert_eq!(resolved.settings, IntegratorSettings::default());
    }

    #[test]
    fn rejects_unknown_keys_with_path() {
        let text = r#"
schema_version = 1
[model]
n = 2
r = [10.0, 20.0]
s = 0.1
tau = [0.2, 0.4]
theta_ev = [1.0]
sector_weights = [1.0]
bogus_key = 3
[initial]
mu = 15.0
[enforcement]
sigma = 0.0
xi = 2.0
"#;
        let err = toml::from_str::<RunConfig>(text).unwrap_err();
        assert!(err.to_string().contains("bogus_key"), "{err}");
    }

    #[test]
    fn rejects_out_of_range_enforcement() {
        let mut cfg = paper_default_config();
        cfg.enforcement.xi = 2.5;
        let err = cfg.resolve().unwrap_err();
        assert!(
            err.to_string().contains("(1,2]"),
            "constraint message should state the admissible interval: {err}"
        );
    }

    #[test]
    fn rejects_unordered_incomes() {
        let mut cfg = paper_default_config();
        cfg.model.r = ClassIncomes::List(vec![10.0, 20.0, 15.0, 40.0, 50.0, 60.0, 70.0, 80.0, 90.0]);
        let err = cfg.resolve().unwrap_err();
        assert!(err.to_string().contains("strictly increasing"), "{err}");
    }

    #[test]
    fn missing_schema_version_is_rejected() {
        let text = r#"
[model]
n = 2
r = [10.0, 20.0]
s = 0.1
tau = [0.2, 0.4]
theta_ev = [1.0]
sector_weights = [1.0]
[initial]
mu = 15.0
[enforcement]
sigma = 0.0
xi = 2.0
"#;
        assert!(toml::from_str::<RunConfig>(text).is_err());
    }

    #[test]
    fn toml_round_trip_is_equivalent() {
        let cfg = paper_default_config();
        let text = toml::to_string(&cfg).unwrap();
        let back: RunConfig = toml::from_str(&text).unwrap();
        assert_eq!(cfg, back);
        let text2 = toml::to_string(&back).unwrap();
        assert_eq!(text, text2);
    }
}
