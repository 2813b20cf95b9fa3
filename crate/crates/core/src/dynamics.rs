//! Time integration of the kinetic system to its stationary distribution,
//! plus construction of admissible initial conditions with prescribed total
//! income.
//!
//! The flow conserves the number of individuals and the total income exactly,
//! so the integrator never renormalizes; drift beyond tight bounds indicates
//! a defect and is reported as an error instead of being papered over.

use crate::error::{Error, Result};
use crate::kinetics::{income_of, ModelConfig, PopulationState, NORMALIZATION_TOL};

/// Relative drift bound on the total income along a trajectory.
pub const MU_DRIFT_REL_TOL: f64 = 1e-8;

/// Components below this value abort the integration; components in
/// [-NEGATIVITY_TOL, 0) are treated as zero when states are reported.
pub const NEGATIVITY_TOL: f64 = 1e-9;

/// Fixed-step integrator controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorSettings {
    /// Time step of the classical 4th-order scheme.
    pub dt: f64,
    /// Stationarity threshold on the max-norm of the right-hand side.
    pub tol: f64,
    /// Hard cap on the integration horizon.
    pub max_time: f64,
    /// Trajectory sampling stride, in steps.
    pub record_every: usize,
}

impl Default for IntegratorSettings {
    /// With paper-scale parameters the interaction rates are around 1e-3 per
    /// unit time, so dt = 1 sits deep inside the stability region of the
    /// explicit scheme; the stationarity tolerance is two orders below what
    /// the reference-table comparisons need.
    fn default() -> Self {
        Self {
            dt: 1.0,
            tol: 1e-11,
            max_time: 1e7,
            record_every: 1000,
        }
    }
}

impl IntegratorSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Config(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::Config(format!("tol must be positive, got {}", self.tol)));
        }
        if !(self.max_time >= self.dt) {
            return Err(Error::Config(format!(
                "max_time = {} must be at least dt = {}",
                self.max_time, self.dt
            )));
        }
        if self.record_every == 0 {
            return Err(Error::Config("record_every must be at least 1".into()));
        }
        Ok(())
    }
}

/// Sampled states along an integration, clamped to nonnegative at reporting.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
}

/// Outcome of a steady-state search.
#[derive(Debug, Clone)]
pub struct EquilibriumResult {
    pub state: PopulationState,
    /// Model time at which the search stopped.
    pub t_final: f64,
    /// Max-norm of the right-hand side at the final state.
    pub residual: f64,
    /// Whether the residual dropped below the stationarity tolerance.
    pub converged: bool,
    /// Largest observed |sum(x) - 1| along the run.
    pub norm_drift: f64,
    /// Largest observed relative |mu - mu0| along the run.
    pub mu_drift: f64,
}

/// Builds the standard initial condition with total income `mu`: a convex
/// mixture of the uniform class profile with a point mass at the top class
/// (for mu at or above the mean class income) or at the bottom class (below
/// the mean), with identical sector composition in every class.
pub fn make_initial_condition(config: &ModelConfig, mu: f64) -> Result<PopulationState> {
    let r = config.r();
    let n = config.n();
    let (r1, rn) = (r[0], r[n - 1]);
    if !(r1..=rn).contains(&mu) {
        return Err(Error::Config(format!(
            "target income {mu} outside the attainable range [{r1}, {rn}]"
        )));
    }
    let mean = config.mean_r();
    let mut q = vec![0.0; n];
    if mu >= mean {
        let lambda = (mu - mean) / (rn - mean);
        for item in q.iter_mut() {
            *item = (1.0 - lambda) / n as f64;
        }
        q[n - 1] += lambda;
    } else {
        let lambda = (mean - mu) / (mean - r1);
        for item in q.iter_mut() {
            *item = (1.0 - lambda) / n as f64;
        }
        q[0] += lambda;
    }
    initial_from_class_profile(config, &q)
}

/// Spreads a class profile `q` over sectors using the configured sector
/// weights, producing a valid population state. Useful for exploring
/// alternative initial conditions with the same total income.
pub fn initial_from_class_profile(config: &ModelConfig, q: &[f64]) -> Result<PopulationState> {
    if q.len() != config.n() {
        return Err(Error::Dimension(format!(
            "class profile has {} entries for {} classes",
            q.len(),
            config.n()
        )));
    }
    let m = config.m();
    let mut x = vec![0.0; config.dim()];
    for (j, qj) in q.iter().enumerate() {
        for (a, w) in config.sector_weights().iter().enumerate() {
            x[j * m + a] = w * qj;
        }
    }
    PopulationState::new(x, config)
}

struct RunOutcome {
    trajectory: Trajectory,
    x: Vec<f64>,
    t_final: f64,
    residual: f64,
    converged: bool,
    norm_drift: f64,
    mu_drift: f64,
}

/// Shared fixed-step loop. k1 doubles as the stationarity residual, so the
/// convergence check costs nothing extra.
fn run<F>(
    mut rhs: F,
    x0: &PopulationState,
    r: &[f64],
    settings: &IntegratorSettings,
    stop_at_tol: bool,
) -> Result<RunOutcome>
where
    F: FnMut(&[f64], &mut [f64]),
{
    settings.validate()?;
    let dim = x0.as_slice().len();
    let m = x0.m();
    let mut x = x0.as_slice().to_vec();
    let mu0 = income_of(&x, r, m);

    let mut k1 = vec![0.0; dim];
    let mut k2 = vec![0.0; dim];
    let mut k3 = vec![0.0; dim];
    let mut k4 = vec![0.0; dim];
    let mut stage = vec![0.0; dim];

    let mut trajectory = Trajectory {
        times: vec![0.0],
        states: vec![report_state(&x)],
    };
    let mut norm_drift: f64 = (x.iter().sum::<f64>() - 1.0).abs();
    let mut mu_drift: f64 = 0.0;

    let dt = settings.dt;
    let mut t = 0.0;
    let mut step: usize = 0;
    let (mut residual, mut converged);
    loop {
        rhs(&x, &mut k1);
        residual = k1.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
        converged = residual <= settings.tol;
        if (stop_at_tol && converged) || t + dt > settings.max_time + dt * 1e-9 {
            break;
        }

        for i in 0..dim {
            stage[i] = x[i] + 0.5 * dt * k1[i];
        }
        rhs(&stage, &mut k2);
        for i in 0..dim {
            stage[i] = x[i] + 0.5 * dt * k2[i];
        }
        rhs(&stage, &mut k3);
        for i in 0..dim {
            stage[i] = x[i] + dt * k3[i];
        }
        rhs(&stage, &mut k4);
        for i in 0..dim {
            x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        t += dt;
        step += 1;

        let total: f64 = x.iter().sum();
        let nd = (total - 1.0).abs();
        norm_drift = norm_drift.max(nd);
        if nd > NORMALIZATION_TOL {
            return Err(Error::Integration(format!(
                "population drifted to {total} at t = {t} (bound {NORMALIZATION_TOL:e})"
            )));
        }
        let mu = income_of(&x, r, m);
        let md = ((mu - mu0) / mu0).abs();
        mu_drift = mu_drift.max(md);
        if md > MU_DRIFT_REL_TOL {
            return Err(Error::Integration(format!(
                "total income drifted from {mu0} to {mu} at t = {t} (relative bound {MU_DRIFT_REL_TOL:e})"
            )));
        }
        if let Some(bad) = x.iter().find(|v| **v < -NEGATIVITY_TOL) {
            return Err(Error::Integration(format!(
                "component went negative ({bad}) at t = {t}"
            )));
        }

        if step % settings.record_every == 0 {
            trajectory.times.push(t);
            trajectory.states.push(report_state(&x));
        }
    }

    if trajectory.times.last() != Some(&t) {
        trajectory.times.push(t);
        trajectory.states.push(report_state(&x));
    }
    Ok(RunOutcome {
        trajectory,
        x,
        t_final: t,
        residual,
        converged,
        norm_drift,
        mu_drift,
    })
}

fn report_state(x: &[f64]) -> Vec<f64> {
    x.iter()
        .map(|v| if *v < 0.0 { 0.0 } else { *v })
        .collect()
}

/// Integrates over the full horizon, sampling every `record_every` steps.
pub fn integrate<F>(
    rhs: F,
    x0: &PopulationState,
    config: &ModelConfig,
    settings: &IntegratorSettings,
) -> Result<Trajectory>
where
    F: FnMut(&[f64], &mut [f64]),
{
    Ok(run(rhs, x0, config.r(), settings, false)?.trajectory)
}

/// Integrates until the right-hand side drops below the stationarity
/// tolerance (or the horizon cap is hit, in which case the result carries
/// `converged = false` and the caller decides how severe that is).
pub fn find_steady_state<F>(
    rhs: F,
    x0: &PopulationState,
    config: &ModelConfig,
    settings: &IntegratorSettings,
) -> Result<EquilibriumResult>
where
    F: FnMut(&[f64], &mut [f64]),
{
    let out = run(rhs, x0, config.r(), settings, true)?;
    Ok(EquilibriumResult {
        state: PopulationState::new(report_state(&out.x), config)?,
        t_final: out.t_final,
        residual: out.residual,
        converged: out.converged,
        norm_drift: out.norm_drift,
        mu_drift: out.mu_drift,
    })
}

/// Steady state plus the trajectory that led there, for file output.
pub fn find_steady_state_with_trajectory<F>(
    rhs: F,
    x0: &PopulationState,
    config: &ModelConfig,
    settings: &IntegratorSettings,
) -> Result<(EquilibriumResult, Trajectory)>
where
    F: FnMut(&[f64], &mut [f64]),
{
    let out = run(rhs, x0, config.r(), settings, true)?;
    Ok((
        EquilibriumResult {
            state: PopulationState::new(report_state(&out.x), config)?,
            t_final: out.t_final,
            residual: out.residual,
            converged: out.converged,
            norm_drift: out.norm_drift,
            mu_drift: out.mu_drift,
        },
        out.trajectory,
    ))
}
