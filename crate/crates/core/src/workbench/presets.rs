//! Built-in run configurations and the two evasion scenarios with their
//! embedded reference tables.
//!
//! The reference values are regression targets for the `paper-tables`
//! command: equilibrium Gini and tax revenue over the 5 x 5 enforcement grid
//! plus two baselines (fully compliant population; evasion without audits).

use crate::calibration::{table_from_values, SweepTable};
use crate::error::{Error, Result};
use crate::workbench::config::{
    ClassIncomes, EnforcementSection, InitialSection, IntegratorSection, LinearIncomes,
    LinearSchedule, ModelSection, OutputSection, RunConfig, TaxSchedule, SCHEMA_VERSION,
};

/// Absolute tolerance on Gini when comparing against the reference tables.
pub const GINI_ABS_TOL: f64 = 5e-4;

/// Relative tolerance on tax revenue when comparing against the reference
/// tables.
pub const TR_REL_TOL: f64 = 0.01;

/// Audit fractions of the reference grid.
pub fn reference_sigmas() -> Vec<f64> {
    vec![2.0 / 56.0, 5.0 / 56.0, 8.0 / 56.0, 11.0 / 56.0, 14.0 / 56.0]
}

/// Penalty multipliers of the reference grid.
pub fn reference_xis() -> Vec<f64> {
    vec![1.25, 1.40, 1.55, 1.70, 1.85]
}

/// One evasion scenario: its retention parameters and reference values.
#[derive(Debug, Clone)]
pub struct ScenarioPreset {
    pub name: String,
    pub theta_ev: Vec<f64>,
    pub reference: ReferenceTables,
}

/// Reference grid values (row-major, sigma outer) and caption baselines.
#[derive(Debug, Clone)]
pub struct ReferenceTables {
    pub sigma_values: Vec<f64>,
    pub xi_values: Vec<f64>,
    pub gini: Vec<f64>,
    pub tax_revenue: Vec<f64>,
    pub no_evasion_gini: f64,
    pub no_evasion_tax_revenue: f64,
    pub no_audit_gini: f64,
    pub no_audit_tax_revenue: f64,
}

impl ReferenceTables {
    /// The reference grid as a fit-eligible sweep table.
    pub fn as_table(&self, scenario: &str) -> SweepTable {
        table_from_values(
            &self.sigma_values,
            &self.xi_values,
            &self.gini,
            &self.tax_revenue,
            scenario,
        )
        .expect("embedded reference tables are complete grids")
    }
}

#[rustfmt::skip]
const SCENARIO1_GINI: [f64; 25] = [
    0.382193, 0.382086, 0.381979, 0.381873, 0.381766,
    0.380873, 0.380614, 0.380355, 0.380099, 0.379844,
    0.37959,  0.379187, 0.378789, 0.378394, 0.378003,
    0.378345, 0.377809, 0.377281, 0.37676,  0.376247,
    0.377138, 0.376479, 0.375833, 0.375198, 0.374577,
];

#[rustfmt::skip]
const SCENARIO1_TR: [f64; 25] = [
    0.988e-3, 0.992e-3, 0.997e-3, 1.002e-3, 1.006e-3,
    1.045e-3, 1.057e-3, 1.068e-3, 1.080e-3, 1.091e-3,
    1.103e-3, 1.121e-3, 1.139e-3, 1.158e-3, 1.176e-3,
    1.160e-3, 1.185e-3, 1.210e-3, 1.235e-3, 1.260e-3,
    1.217e-3, 1.249e-3, 1.281e-3, 1.313e-3, 1.344e-3,
];

#[rustfmt::skip]
const SCENARIO2_GINI: [f64; 25] = [
    0.373611, 0.373568, 0.373526, 0.373483, 0.373441,
    0.373084, 0.37298,  0.372876, 0.372773, 0.37267,
    0.372567, 0.372404, 0.372242, 0.372081, 0.371921,
    0.372061, 0.371841, 0.371624, 0.371408, 0.371194,
    0.371565, 0.371291, 0.371021, 0.370754, 0.37049,
];

// The source table prints "1.401." in the (sigma = 2/56, xi = 1.70) cell;
// the stray trailing period is read as 1.401e-3.
#[rustfmt::skip]
const SCENARIO2_TR: [f64; 25] = [
    1.395e-3, 1.397e-3, 1.399e-3, 1.401e-3, 1.404e-3,
    1.423e-3, 1.428e-3, 1.434e-3, 1.440e-3, 1.445e-3,
    1.451e-3, 1.460e-3, 1.469e-3, 1.478e-3, 1.487e-3,
    1.479e-3, 1.491e-3, 1.503e-3, 1.516e-3, 1.528e-3,
    1.507e-3, 1.522e-3, 1.538e-3, 1.553e-3, 1.569e-3,
];

/// Scenario presets: 1 = strong evasion (retentions 1, 1/2, 1/4),
/// 2 = halved evasion (retentions 1, 3/4, 5/8).
pub fn scenario_preset(which: u8) -> Result<ScenarioPreset> {
    match which {
        1 => Ok(ScenarioPreset {
            name: "scenario-1".into(),
            theta_ev: vec![1.0, 0.5, 0.25],
            reference: ReferenceTables {
                sigma_values: reference_sigmas(),
                xi_values: reference_xis(),
                gini: SCENARIO1_GINI.to_vec(),
                tax_revenue: SCENARIO1_TR.to_vec(),
                no_evasion_gini: 0.367068,
                no_evasion_tax_revenue: 1.789e-3,
                no_audit_gini: 0.383093,
                no_audit_tax_revenue: 0.949e-3,
            },
        }),
        2 => Ok(ScenarioPreset {
            name: "scenario-2".into(),
            theta_ev: vec![1.0, 0.75, 0.625],
            reference: ReferenceTables {
                sigma_values: reference_sigmas(),
                xi_values: reference_xis(),
                gini: SCENARIO2_GINI.to_vec(),
                tax_revenue: SCENARIO2_TR.to_vec(),
                no_evasion_gini: 0.367068,
                no_evasion_tax_revenue: 1.789e-3,
                no_audit_gini: 0.373967,
                no_audit_tax_revenue: 1.376e-3,
            },
        }),
        other => Err(Error::Usage(format!(
            "unknown scenario {other} (available: 1, 2)"
        ))),
    }
}

/// The default model: nine income classes 25..225, exchange amount 0.1,
/// progressive tax schedule 0.23..0.43, three equal-weight sectors with
/// scenario-1 evasion, total income 79, no auditing.
///
/// The class-income scale is pinned by the reference tables: their Gini and
/// revenue values correspond to a mean income of 79 on classes spaced 25
/// apart (equivalently, an expected class index of 3.16). The dynamics is
/// invariant under jointly rescaling incomes and the total income, so this
/// scale is the canonical one on which `mu = 79` reproduces the references.
pub fn paper_default_config() -> RunConfig {
    RunConfig {
        schema_version: SCHEMA_VERSION,
        model: ModelSection {
            n: 9,
            r: ClassIncomes::Linear(LinearIncomes { base: 25.0, step: 25.0 }),
            s: 0.1,
            tau: TaxSchedule::Linear(LinearSchedule { first: 0.23, last: 0.43 }),
            theta_ev: vec![1.0, 0.5, 0.25],
            sector_weights: vec![1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0],
        },
        initial: InitialSection { mu: 79.0 },
        enforcement: EnforcementSection { sigma: 0.0, xi: 2.0 },
        integrator: IntegratorSection::default(),
        output: OutputSection::default(),
    }
}

/// Resolves `--config` values that name built-in presets instead of files:
/// `paper.default` (alias `paper.scenario1`) and `paper.scenario2`.
pub fn builtin_config(name: &str) -> Option<RunConfig> {
    match name {
        "paper.default" | "paper.scenario1" => Some(paper_default_config()),
        "paper.scenario2" => {
            let mut cfg = paper_default_config();
            cfg.model.theta_ev = vec![1.0, 0.75, 0.625];
            Some(cfg)
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_expose_expected_retentions() {
        let s1 = scenario_preset(1).unwrap();
        assert_eq!(s1.theta_ev, vec![1.0, 0.5, 0.25]);
        let s2 = scenario_preset(2).unwrap();
        assert_eq!(s2.theta_ev, vec![1.0, 0.75, 0.625]);
        assert!(scenario_preset(3).is_err());
    }

    #[test]
    fn reference_tables_are_complete_and_monotone() {
        for which in [1, 2] {
            let preset = scenario_preset(which).unwrap();
            let t = preset.reference.as_table(&preset.name);
            assert_eq!(t.rows.len(), 25);
            assert!(t.fit_eligible());
            // revenue rises and Gini falls along both enforcement axes
            for si in 0..5 {
                for ki in 0..4 {
                    assert!(
                        t.value(crate::calibration::Metric::TaxRevenue, si, ki + 1)
                            > t.value(crate::calibration::Metric::TaxRevenue, si, ki)
                    );
                    assert!(
                        t.value(crate::calibration::Metric::Gini, si, ki + 1)
                            < t.value(crate::calibration::Metric::Gini, si, ki)
                    );
                }
            }
            for ki in 0..5 {
                for si in 0..4 {
                    assert!(
                        t.value(crate::calibration::Metric::TaxRevenue, si + 1, ki)
                            > t.value(crate::calibration::Metric::TaxRevenue, si, ki)
                    );
                    assert!(
                        t.value(crate::calibration::Metric::Gini, si + 1, ki)
                            < t.value(crate::calibration::Metric::Gini, si, ki)
                    );
                }
            }
        }
    }

    #[test]
    fn builtin_names_resolve() {
        assert!(builtin_config("paper.default").is_some());
        assert!(builtin_config("paper.scenario1").is_some());
        let s2 = builtin_config("paper.scenario2").unwrap();
        assert_eq!(s2.model.theta_ev, vec![1.0, 0.75, 0.625]);
        assert!(builtin_config("nope").is_none());
        // presets must themselves be valid
        builtin_config("paper.default").unwrap().resolve().unwrap();
        builtin_config("paper.scenario2").unwrap().resolve().unwrap();
    }
}
