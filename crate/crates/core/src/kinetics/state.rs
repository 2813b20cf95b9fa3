//! Population state: the distribution over (class, sector) groups.

use crate::error::{Error, Result};
use crate::kinetics::config::ModelConfig;

/// The component sum must equal one within this tolerance.
pub const NORMALIZATION_TOL: f64 = 1e-9;

/// Nonnegative fractions over the `n * m` (class, sector) groups, flattened
/// class-major: index = class * m + sector (0-based). Normalized to total
/// one and carrying the conserved total income `mu`.
#[derive(Debug, Clone, PartialEq)]
pub struct PopulationState {
    x: Vec<f64>,
    n: usize,
    m: usize,
    mu: f64,
}

impl PopulationState {
    /// Validates a flattened distribution against a configuration.
    pub fn new(x: Vec<f64>, config: &ModelConfig) -> Result<Self> {
        let n = config.n();
        let m = config.m();
        if x.len() != n * m {
            return Err(Error::Dimension(format!(
                "state has {} components, model needs {}",
                x.len(),
                n * m
            )));
        }
        for (i, v) in x.iter().enumerate() {
            if !v.is_finite() || *v < 0.0 {
                return Err(Error::State(format!(
                    "component {} is {} (must be finite and nonnegative)",
                    i, v
                )));
            }
        }
        let total: f64 = x.iter().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::State(format!(
                "components sum to {total}, expected 1 within {NORMALIZATION_TOL:e}"
            )));
        }
        let mu = income_of(&x, config.r(), m);
        // For a normalized nonnegative state mu is automatically a convex
        // combination of the class incomes; this only guards against NaN-ish
        // corruption slipping through.
        if !(config.r()[0] - 1e-6..=config.r()[n - 1] + 1e-6).contains(&mu) {
            return Err(Error::State(format!(
                "total income {mu} outside [{}, {}]",
                config.r()[0],
                config.r()[n - 1]
            )));
        }
        Ok(Self { x, n, m, mu })
    }

    /// Number of income classes.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of behavioral sectors.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Flattened components, class-major.
    pub fn as_slice(&self) -> &[f64] {
        &self.x
    }

    /// Fraction of individuals in (class, sector), 0-based indices.
    pub fn get(&self, class: usize, sector: usize) -> f64 {
        self.x[class * self.m + sector]
    }

    /// Conserved total income of the state.
    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Population fraction per class (sectors aggregated).
    pub fn class_totals(&self) -> Vec<f64> {
        (0..self.n)
            .map(|j| self.x[j * self.m..(j + 1) * self.m].iter().sum())
            .collect()
    }

    /// Population fraction per sector (classes aggregated).
    pub fn sector_totals(&self) -> Vec<f64> {
        (0..self.m)
            .map(|a| (0..self.n).map(|j| self.x[j * self.m + a]).sum())
            .collect()
    }
}

/// Total income of a flattened distribution: sum_j r_j sum_alpha x_j^alpha.
pub fn income_of(x: &[f64], r: &[f64], m: usize) -> f64 {
    r.iter()
        .enumerate()
        .map(|(j, rj)| rj * x[j * m..(j + 1) * m].iter().sum::<f64>())
        .sum()
}
