//! Aggregate observables of a population state: Lorenz curve, Gini index,
//! per-unit-time tax revenue and per-sector mean incomes.

use crate::error::{Error, Result};
use crate::kinetics::{EnforcementParams, PopulationState, TransitionTensors};

/// Piecewise-linear Lorenz curve: cumulative population share against
/// cumulative income share, from (0,0) to (1,1).
#[derive(Debug, Clone)]
pub struct LorenzCurve {
    pub points: Vec<(f64, f64)>,
}

impl LorenzCurve {
    /// Gini index: one minus twice the area under the curve. The trapezoidal
    /// rule is exact for the piecewise-linear curve of a class-discrete
    /// distribution.
    pub fn gini(&self) -> f64 {
        let mut area = 0.0;
        for w in self.points.windows(2) {
            let (p0, i0) = w[0];
            let (p1, i1) = w[1];
            area += (p1 - p0) * (i0 + i1) * 0.5;
        }
        1.0 - 2.0 * area
    }
}

/// Builds the Lorenz curve of a state. Income is class-determined, so
/// sectors are aggregated per class and classes are traversed in increasing
/// income order (the configured order).
pub fn lorenz(x: &PopulationState, r: &[f64]) -> Result<LorenzCurve> {
    if r.len() != x.n() {
        return Err(Error::Dimension(format!(
            "{} class incomes for a state with {} classes",
            r.len(),
            x.n()
        )));
    }
    let class_totals = x.class_totals();
    let total_income: f64 = class_totals.iter().zip(r).map(|(xt, rj)| xt * rj).sum();
    if total_income <= 0.0 {
        return Err(Error::Degenerate(format!(
            "total income {total_income} must be positive"
        )));
    }
    let mut points = Vec::with_capacity(x.n() + 1);
    points.push((0.0, 0.0));
    let mut cum_pop = 0.0;
    let mut cum_inc = 0.0;
    for (xt, rj) in class_totals.iter().zip(r) {
        cum_pop += xt;
        cum_inc += xt * rj;
        points.push((cum_pop, cum_inc / total_income));
    }
    Ok(LorenzCurve { points })
}

/// Gini index of a state in [0, 1]; zero for a single-income population.
pub fn gini(x: &PopulationState, r: &[f64]) -> Result<f64> {
    Ok(lorenz(x, r)?.gini())
}

/// Tax revenue per unit time at a (stationary) state under the given
/// enforcement. Evaluates the revenue sum literally: over payer class h,
/// receiver class k and receiver sector g, the flow
/// `S p_{h,k} (theta_{k,g} + sigma xi (tau_k - theta_{k,g}))` weighted by the
/// interacting fractions, times the redistribution-eligible population
/// (classes below the top one).
///
/// The blended rate uses `enforcement` as passed; the tensors contribute the
/// payer matrix and the rate matrices only.
pub fn tax_revenue(
    x: &PopulationState,
    tensors: &TransitionTensors,
    enforcement: &EnforcementParams,
) -> Result<f64> {
    let (n, m) = (tensors.n(), tensors.m());
    if x.n() != n || x.m() != m {
        return Err(Error::Dimension(format!(
            "state of {} classes x {} sectors against tensors of {} x {}",
            x.n(),
            x.m(),
            n,
            m
        )));
    }
    let s = tensors.s();
    let sx = enforcement.sigma() * enforcement.xi();
    let theta = tensors.theta();
    let tau = tensors.tau();
    let xs = x.as_slice();
    let class_totals = x.class_totals();
    let eligible: f64 = xs[..(n - 1) * m].iter().sum();

    let mut tr = 0.0;
    for h in 0..n {
        for k in 0..n {
            let p = tensors.payer(h, k);
            if p == 0.0 {
                continue;
            }
            let mut flow = 0.0;
            for g in 0..m {
                let th = theta[k * m + g];
                flow += (th + sx * (tau[k] - th)) * xs[k * m + g];
            }
            tr += s * p * class_totals[h] * flow;
        }
    }
    Ok(tr * eligible)
}

/// Mean income per sector: for each sector, the income-weighted class
/// distribution of that sector normalized by its population.
pub fn sector_mean_income(x: &PopulationState, r: &[f64]) -> Result<Vec<f64>> {
    if r.len() != x.n() {
        return Err(Error::Dimension(format!(
            "{} class incomes for a state with {} classes",
            r.len(),
            x.n()
        )));
    }
    let (n, m) = (x.n(), x.m());
    let xs = x.as_slice();
    let mut out = Vec::with_capacity(m);
    for a in 0..m {
        let mass: f64 = (0..n).map(|j| xs[j * m + a]).sum();
        if mass <= 0.0 {
            return Err(Error::EmptySector(a));
        }
        let inc: f64 = (0..n).map(|j| r[j] * xs[j * m + a]).sum();
        out.push(inc / mass);
    }
    Ok(out)
}

/// All observables of a state bundled for reporting, together with the
/// enforcement parameters the revenue was evaluated under.
#[derive(Debug, Clone)]
pub struct MetricsReport {
    pub gini: f64,
    pub tax_revenue: f64,
    pub sector_mean_income: Vec<f64>,
    pub sigma: f64,
    pub xi: f64,
}

pub fn report(
    x: &PopulationState,
    tensors: &TransitionTensors,
    enforcement: &EnforcementParams,
) -> Result<MetricsReport> {
    Ok(MetricsReport {
        gini: gini(x, tensors.r())?,
        tax_revenue: tax_revenue(x, tensors, enforcement)?,
        sector_mean_income: sector_mean_income(x, tensors.r())?,
        sigma: enforcement.sigma(),
        xi: enforcement.xi(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinetics::ModelConfig;

    fn two_class_cfg() -> ModelConfig {
        ModelConfig::new(vec![10.0, 30.0], 0.1, vec![0.2, 0.4], vec![1.0], vec![1.0]).unwrap()
    }

    #[test]
    fn lorenz_two_class_hand_computed() {
        let cfg = two_class_cfg();
        let x = PopulationState::new(vec![0.5, 0.5], &cfg).unwrap();
        let c = lorenz(&x, cfg.r()).unwrap();
        assert_eq!(c.points.len(), 3);
        assert_eq!(c.points[0], (0.0, 0.0));
        assert!((c.points[1].0 - 0.5).abs() < 1e-15);
        assert!((c.points[1].1 - 0.25).abs() < 1e-15);
        assert!((c.points[2].0 - 1.0).abs() < 1e-15);
        assert!((c.points[2].1 - 1.0).abs() < 1e-15);
        // trapezoid area by hand: 1 - 2*(0.0625 + 0.3125)
        assert!((c.gini() - 0.25).abs() < 1e-12);
        assert!((gini(&x, cfg.r()).unwrap() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn gini_zero_for_single_populated_class() {
        let cfg = two_class_cfg();
        let x = PopulationState::new(vec![0.0, 1.0], &cfg).unwrap();
        assert!(gini(&x, cfg.r()).unwrap().abs() < 1e-15);
        let x = PopulationState::new(vec![1.0, 0.0], &cfg).unwrap();
        assert!(gini(&x, cfg.r()).unwrap().abs() < 1e-15);
    }

    #[test]
    fn gini_scale_invariant_in_incomes() {
        let cfg = ModelConfig::new(
            vec![10.0, 20.0, 30.0, 40.0],
            0.1,
            vec![0.1, 0.2, 0.3, 0.4],
            vec![1.0],
            vec![1.0],
        )
        .unwrap();
        let scaled = ModelConfig::new(
            vec![70.0, 140.0, 210.0, 280.0],
            0.1,
            vec![0.1, 0.2, 0.3, 0.4],
            vec![1.0],
            vec![1.0],
        )
        .unwrap();
        let x = PopulationState::new(vec![0.4, 0.3, 0.2, 0.1], &cfg).unwrap();
        let g1 = gini(&x, cfg.r()).unwrap();
        let g2 = gini(&x, scaled.r()).unwrap();
        assert!((g1 - g2).abs() < 1e-12);
        assert!(g1 > 0.0 && g1 < 1.0);
    }

    #[test]
    fn uniform_state_gives_uniform_sector_means() {
        let r: Vec<f64> = (1..=9).map(|j| 10.0 * j as f64).collect();
        let tau: Vec<f64> = (1..=9).map(|j| 0.23 + (j - 1) as f64 / 8.0 * 0.20).collect();
        let cfg = ModelConfig::new(r, 0.1, tau, vec![1.0, 0.5, 0.25], vec![1.0 / 3.0; 3]).unwrap();
        let x = PopulationState::new(vec![1.0 / 27.0; 27], &cfg).unwrap();
        let means = sector_mean_income(&x, cfg.r()).unwrap();
        for mval in means {
            assert!((mval - 50.0).abs() < 1e-12);
        }
    }

    #[test]
    fn empty_sector_is_an_error() {
        let cfg = ModelConfig::new(
            vec![10.0, 20.0],
            0.1,
            vec![0.2, 0.4],
            vec![1.0, 0.5],
            vec![0.5, 0.5],
        )
        .unwrap();
        let x = PopulationState::new(vec![0.5, 0.0, 0.5, 0.0], &cfg).unwrap();
        assert!(matches!(
            sector_mean_income(&x, cfg.r()),
            Err(Error::EmptySector(1))
        ));
    }

    #[test]
    fn revenue_vanishes_without_exchange() {
        let r: Vec<f64> = (1..=9).map(|j| 10.0 * j as f64).collect();
        let tau: Vec<f64> = (1..=9).map(|j| 0.23 + (j - 1) as f64 / 8.0 * 0.20).collect();
        let cfg_zero =
            ModelConfig::new(r.clone(), 0.0, tau.clone(), vec![1.0, 0.5, 0.25], vec![1.0 / 3.0; 3])
                .unwrap();
        let cfg = ModelConfig::new(r, 0.1, tau, vec![1.0, 0.5, 0.25], vec![1.0 / 3.0; 3]).unwrap();
        let enf = EnforcementParams::new(0.25, 1.85).unwrap();
        let t_zero = TransitionTensors::build(&cfg_zero, &enf).unwrap();
        let t = TransitionTensors::build(&cfg, &enf).unwrap();
        let x = PopulationState::new(vec![1.0 / 27.0; 27], &cfg).unwrap();
        assert_eq!(tax_revenue(&x, &t_zero, &enf).unwrap(), 0.0);
        assert!(tax_revenue(&x, &t, &enf).unwrap() > 0.0);
    }

    #[test]
    fn revenue_monotone_in_enforcement_at_fixed_state() {
        let r: Vec<f64> = (1..=9).map(|j| 10.0 * j as f64).collect();
        let tau: Vec<f64> = (1..=9).map(|j| 0.23 + (j - 1) as f64 / 8.0 * 0.20).collect();
        let cfg = ModelConfig::new(r, 0.1, tau, vec![1.0, 0.5, 0.25], vec![1.0 / 3.0; 3]).unwrap();
        let x = PopulationState::new(vec![1.0 / 27.0; 27], &cfg).unwrap();
        let mut prev = 0.0;
        for (i, (sg, xi)) in [(0.1, 1.25), (0.2, 1.25), (0.2, 1.6), (0.5, 1.6), (0.5, 2.0)]
            .iter()
            .enumerate()
        {
            let enf = EnforcementParams::new(*sg, *xi).unwrap();
            let t = TransitionTensors::build(&cfg, &enf).unwrap();
            let tr = tax_revenue(&x, &t, &enf).unwrap();
            if i > 0 {
                assert!(tr > prev, "revenue must increase with sigma*xi");
            }
            prev = tr;
        }
    }

    #[test]
    fn zero_income_state_is_degenerate() {
        // a state concentrated where incomes would be zero cannot happen with
        // a valid config (incomes are positive), so drive the guard directly
        // with a mismatched r and a zero-mass aggregation
        let cfg = two_class_cfg();
        let x = PopulationState::new(vec![0.5, 0.5], &cfg).unwrap();
        assert!(matches!(
            lorenz(&x, &[10.0]),
            Err(Error::Dimension(_))
        ));
    }
}
