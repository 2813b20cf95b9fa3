//! Static model parameters and enforcement parameters, validated on construction.

use crate::error::{Error, Result};

/// Sector weights must sum to one within this tolerance.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

/// Exchange amounts above this fraction of the smallest class gap trigger a
/// warning (the model assumes the exchanged amount is small against the gaps).
pub const S_GAP_WARN_RATIO: f64 = 0.1;

/// Static parameters of the kinetic model: income classes, behavioral
/// sectors, the per-transaction exchange amount, the tax schedule and the
/// per-sector evasion retention parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelConfig {
    r: Vec<f64>,
    s: f64,
    tau: Vec<f64>,
    theta_ev: Vec<f64>,
    sector_weights: Vec<f64>,
}

impl ModelConfig {
    /// Validates and builds a model configuration.
    ///
    /// Requirements: at least two strictly increasing positive class incomes,
    /// a nondecreasing tax schedule with top rate <= 0.5, retention
    /// parameters in [0,1], nonnegative sector weights summing to one, and a
    /// nonnegative exchange amount strictly below the smallest class gap.
    pub fn new(
        r: Vec<f64>,
        s: f64,
        tau: Vec<f64>,
        theta_ev: Vec<f64>,
        sector_weights: Vec<f64>,
    ) -> Result<Self> {
        let n = r.len();
        let m = theta_ev.len();
        if n < 2 {
            return Err(Error::Config(format!(
                "need at least 2 income classes, got {n}"
            )));
        }
        if m < 1 {
            return Err(Error::Config("need at least 1 behavioral sector".into()));
        }
        if r.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("class incomes must be finite".into()));
        }
        if r[0] <= 0.0 {
            return Err(Error::Config(format!(
                "class incomes must be positive, r[1] = {}",
                r[0]
            )));
        }
        for i in 1..n {
            if r[i] <= r[i - 1] {
                return Err(Error::Config(format!(
                    "class incomes must be strictly increasing, r[{}] = {} <= r[{}] = {}",
                    i + 1,
                    r[i],
                    i,
                    r[i - 1]
                )));
            }
        }
        if tau.len() != n {
            return Err(Error::Dimension(format!(
                "tax schedule has {} entries for {} classes",
                tau.len(),
                n
            )));
        }
        if tau.iter().any(|v| !v.is_finite()) || tau[0] < 0.0 {
            return Err(Error::Config("tax rates must be finite and nonnegative".into()));
        }
        for k in 1..n {
            if tau[k] < tau[k - 1] {
                return Err(Error::Config(format!(
                    "tax rates must be nondecreasing, tau[{}] = {} < tau[{}] = {}",
                    k + 1,
                    tau[k],
                    k,
                    tau[k - 1]
                )));
            }
        }
        if tau[n - 1] > 0.5 {
            return Err(Error::Constraint(format!(
                "top tax rate must not exceed 0.5 (so audited transactions stay nonnegative), got {}",
                tau[n - 1]
            )));
        }
        for (a, th) in theta_ev.iter().enumerate() {
            if !(0.0..=1.0).contains(th) {
                return Err(Error::Config(format!(
                    "evasion retention theta_ev[{}] = {} outside [0,1]",
                    a + 1,
                    th
                )));
            }
        }
        if sector_weights.len() != m {
            return Err(Error::Dimension(format!(
                "sector weights have {} entries for {} sectors",
                sector_weights.len(),
                m
            )));
        }
        if sector_weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::Config("sector weights must be nonnegative".into()));
        }
        let wsum: f64 = sector_weights.iter().sum();
        if (wsum - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::Config(format!(
                "sector weights must sum to 1 within {WEIGHT_SUM_TOL:e}, got {wsum}"
            )));
        }
        let min_gap = r.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
        if !(s >= 0.0 && s.is_finite()) {
            return Err(Error::Config(format!("exchange amount must be nonnegative, got {s}")));
        }
        if s >= min_gap {
            return Err(Error::Config(format!(
                "exchange amount S = {s} must be strictly below the smallest class gap {min_gap}"
            )));
        }
        Ok(Self {
            r,
            s,
            tau,
            theta_ev,
            sector_weights,
        })
    }

    /// Number of income classes.
    pub fn n(&self) -> usize {
        self.r.len()
    }

    /// Number of behavioral sectors.
    pub fn m(&self) -> usize {
        self.theta_ev.len()
    }

    /// State vector length `n * m`.
    pub fn dim(&self) -> usize {
        self.n() * self.m()
    }

    /// Average class incomes, strictly increasing.
    pub fn r(&self) -> &[f64] {
        &self.r
    }

    /// Amount of money exchanged per transaction.
    pub fn s(&self) -> f64 {
        self.s
    }

    /// Tax rate per class, nondecreasing.
    pub fn tau(&self) -> &[f64] {
        &self.tau
    }

    /// Evasion retention parameter per sector, in [0,1]
    /// (0 = total evasion, 1 = full compliance).
    pub fn theta_ev(&self) -> &[f64] {
        &self.theta_ev
    }

    /// Population fraction per sector, summing to one.
    pub fn sector_weights(&self) -> &[f64] {
        &self.sector_weights
    }

    /// Unweighted mean of the class incomes.
    pub fn mean_r(&self) -> f64 {
        self.r.iter().sum::<f64>() / self.n() as f64
    }

    /// Smallest gap between adjacent class incomes.
    pub fn min_gap(&self) -> f64 {
        self.r.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
    }

    /// The model assumes S is small against every class gap. Construction
    /// only rejects S >= min gap; ratios above [`S_GAP_WARN_RATIO`] are legal
    /// but worth flagging to the user.
    pub fn s_gap_warning(&self) -> Option<String> {
        let ratio = self.s / self.min_gap();
        if ratio > S_GAP_WARN_RATIO {
            Some(format!(
                "exchange amount S = {} is {:.3} of the smallest class gap; \
                 the model assumes S to be small against the gaps",
                self.s, ratio
            ))
        } else {
            None
        }
    }

    /// Flattened index of (class j, sector alpha), both 0-based; class-major.
    #[inline]
    pub fn index(&self, class: usize, sector: usize) -> usize {
        class * self.m() + sector
    }
}

/// Audit policy: the audited population fraction and the penalty multiplier
/// applied to evaded tax.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnforcementParams {
    sigma: f64,
    xi: f64,
}

impl EnforcementParams {
    /// Validates `sigma` in [0,1] and `xi` in (1,2]. The upper bound on `xi`
    /// together with a top tax rate of at most 0.5 guarantees that an audited
    /// transaction never extracts more than the amount exchanged.
    pub fn new(sigma: f64, xi: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&sigma) {
            return Err(Error::Constraint(format!(
                "audit fraction sigma must lie in [0,1], got {sigma}"
            )));
        }
        if !(xi > 1.0 && xi <= 2.0) {
            return Err(Error::Constraint(format!(
                "penalty multiplier xi must lie in (1,2], got {xi}"
            )));
        }
        Ok(Self { sigma, xi })
    }

    /// No auditing at all; the penalty multiplier is an unused placeholder.
    pub fn no_audit() -> Self {
        Self { sigma: 0.0, xi: 2.0 }
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }
}
