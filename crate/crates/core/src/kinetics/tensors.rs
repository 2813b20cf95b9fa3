//! Transition coefficients and right-hand-side evaluation.
//!
//! All interaction machinery is precomputed here: the payer-probability
//! matrix, the effective (possibly evaded) tax rates, their audited variants,
//! the banded class-transition coefficients and the state-independent
//! prefactors of the taxation/redistribution functionals. The right-hand
//! sides of both the base and the audit dynamics are then pure functions of a
//! population state.

use crate::error::{Error, Result};
use crate::kinetics::config::{EnforcementParams, ModelConfig};

/// Row sums of the transition coefficients must equal one within this bound.
pub const STOCHASTICITY_TOL: f64 = 1e-12;

/// Builds the n x n payer-probability matrix (row-major, 0-based).
///
/// `p[h][k]` is the probability that in an encounter between an individual of
/// class h and one of class k, the one who pays is the former. The base rule
/// `min(r_h, r_k) / (4 r_n)` is overridden by five exception families:
/// doubled diagonal for interior classes, doubled first column (everyone pays
/// the poorest class more often), doubled last row (the richest class pays
/// everyone more often), a zero first row (the poorest never pay) and a zero
/// last column (the richest never receive).
pub fn build_payer_matrix(r: &[f64]) -> Result<Vec<f64>> {
    let n = r.len();
    if n < 2 {
        return Err(Error::Config("need at least 2 income classes".into()));
    }
    if r[0] <= 0.0 || r.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Config(
            "class incomes must be positive and strictly increasing".into(),
        ));
    }
    let rn = r[n - 1];
    let mut p = vec![0.0; n * n];
    for h in 0..n {
        for k in 0..n {
            p[h * n + k] = r[h].min(r[k]) / (4.0 * rn);
        }
    }
    for j in 1..n - 1 {
        p[j * n + j] = r[j] / (2.0 * rn);
    }
    for h in 1..n {
        p[h * n] = r[0] / (2.0 * rn);
    }
    for k in 0..n - 1 {
        p[(n - 1) * n + k] = r[k] / (2.0 * rn);
    }
    for k in 0..n {
        p[k] = 0.0;
    }
    for h in 0..n {
        p[h * n + n - 1] = 0.0;
    }
    // The first-column and last-row families overlap at (n, 1); both assign
    // r_1 / (2 r_n), so the application order above is immaterial.
    assert_eq!(p[(n - 1) * n], r[0] / (2.0 * rn));
    Ok(p)
}

/// Effective tax rates: `theta[k][alpha] = theta_ev(alpha) * tau_k`,
/// row-major n x m.
pub fn effective_rates(config: &ModelConfig) -> Vec<f64> {
    let (n, m) = (config.n(), config.m());
    let mut theta = vec![0.0; n * m];
    for k in 0..n {
        for a in 0..m {
            theta[k * m + a] = config.theta_ev()[a] * config.tau()[k];
        }
    }
    theta
}

/// Rates effectively extracted from audited individuals, fine included:
/// entrywise `theta + xi * (tau - theta)`.
///
/// Under the admissibility bounds (`xi <= 2`, top rate <= 0.5) every entry
/// stays at most 1, so the residue passed on in a transaction is nonnegative.
pub fn audited_rates(theta: &[f64], tau: &[f64], xi: f64) -> Result<Vec<f64>> {
    if !(xi > 1.0 && xi <= 2.0) {
        return Err(Error::Constraint(format!(
            "penalty multiplier xi must lie in (1,2], got {xi}"
        )));
    }
    let n = tau.len();
    if n == 0 || theta.len() % n != 0 {
        return Err(Error::Dimension(format!(
            "effective-rate matrix of {} entries does not match {} tax rates",
            theta.len(),
            n
        )));
    }
    if tau[n - 1] > 0.5 {
        return Err(Error::Constraint(format!(
            "top tax rate must not exceed 0.5, got {}",
            tau[n - 1]
        )));
    }
    let m = theta.len() / n;
    let mut out = vec![0.0; theta.len()];
    for k in 0..n {
        for a in 0..m {
            let th = theta[k * m + a];
            let v = th + xi * (tau[k] - th);
            debug_assert!(v <= 1.0 + 1e-12);
            out[k * m + a] = v;
        }
    }
    Ok(out)
}

/// Precomputed interaction coefficients for one model configuration and one
/// penalty multiplier. Immutable after construction and freely shareable
/// across threads; the right-hand-side evaluations are pure functions.
///
/// The class-transition coefficients are banded: an interaction moves an
/// individual at most one class up or down, so only the three families
/// (down, stay, up) are nonzero. The "stay" coefficient completes each
/// source pair's distribution over targets to exactly one and is derived on
/// the fly from the other two.
#[derive(Debug, Clone)]
pub struct TransitionTensors {
    n: usize,
    m: usize,
    r: Vec<f64>,
    s: f64,
    tau: Vec<f64>,
    inv_gap: Vec<f64>,
    p: Vec<f64>,
    theta: Vec<f64>,
    theta_audited: Vec<f64>,
    xi: f64,
    /// down[(h*n + k)*m + g]: probability factor for a class-h payer to drop
    /// to h-1 when paying a (k, g) receiver; zero for h = 0.
    c_down: Vec<f64>,
    c_down_xi: Vec<f64>,
    /// up[(h*m + a)*n + k]: probability factor for an (h, a) receiver to rise
    /// to h+1 when paid by a class-k payer; zero for h = n-1.
    c_up: Vec<f64>,
    c_up_xi: Vec<f64>,
    /// pref[(h*n + k)*m + g]: tax flow p_{h,k} * S * theta_{k,g} feeding the
    /// taxation/redistribution functional.
    t_pref: Vec<f64>,
    t_pref_xi: Vec<f64>,
}

impl TransitionTensors {
    /// Assembles all coefficient families for `config` with the audited
    /// rates determined by `enforcement.xi()`.
    pub fn build(config: &ModelConfig, enforcement: &EnforcementParams) -> Result<Self> {
        let n = config.n();
        let m = config.m();
        let r = config.r().to_vec();
        let s = config.s();
        let p = build_payer_matrix(&r)?;
        let theta = effective_rates(config);
        let theta_audited = audited_rates(&theta, config.tau(), enforcement.xi())?;
        let inv_gap: Vec<f64> = r.windows(2).map(|w| 1.0 / (w[1] - w[0])).collect();

        let bands = |th: &[f64]| -> (Vec<f64>, Vec<f64>, Vec<f64>) {
            let mut down = vec![0.0; n * n * m];
            let mut up = vec![0.0; n * m * n];
            let mut pref = vec![0.0; n * n * m];
            for h in 0..n {
                for k in 0..n {
                    for g in 0..m {
                        pref[(h * n + k) * m + g] = p[h * n + k] * s * th[k * m + g];
                        if h >= 1 {
                            down[(h * n + k) * m + g] =
                                p[h * n + k] * s * (1.0 - th[k * m + g]) * inv_gap[h - 1];
                        }
                    }
                }
                if h + 1 < n {
                    for a in 0..m {
                        for k in 0..n {
                            up[(h * m + a) * n + k] =
                                p[k * n + h] * s * (1.0 - th[h * m + a]) * inv_gap[h];
                        }
                    }
                }
            }
            (down, up, pref)
        };
        let (c_down, c_up, t_pref) = bands(&theta);
        let (c_down_xi, c_up_xi, t_pref_xi) = bands(&theta_audited);

        Ok(Self {
            n,
            m,
            r,
            s,
            tau: config.tau().to_vec(),
            inv_gap,
            p,
            theta,
            theta_audited,
            xi: enforcement.xi(),
            c_down,
            c_down_xi,
            c_up,
            c_up_xi,
            t_pref,
            t_pref_xi,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// State vector length n * m.
    pub fn dim(&self) -> usize {
        self.n * self.m
    }

    pub fn r(&self) -> &[f64] {
        &self.r
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn tau(&self) -> &[f64] {
        &self.tau
    }

    /// Penalty multiplier the audited coefficient families were built with.
    pub fn xi(&self) -> f64 {
        self.xi
    }

    /// Payer probability `p[h][k]`, 0-based classes.
    pub fn payer(&self, h: usize, k: usize) -> f64 {
        self.p[h * self.n + k]
    }

    /// Effective rate matrix, row-major n x m.
    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    /// Audited rate matrix, row-major n x m.
    pub fn theta_audited(&self) -> &[f64] {
        &self.theta_audited
    }

    /// Class-transition coefficient for `source = (h, b)` interacting with
    /// `partner = (k, g)`, landing on `target = (j, a)`; 0-based indices.
    /// Nonzero only for a = b and j within one class of h.
    pub fn c_value(
        &self,
        source: (usize, usize),
        partner: (usize, usize),
        target: (usize, usize),
        audited: bool,
    ) -> f64 {
        let (h, b) = source;
        let (k, g) = partner;
        let (j, a) = target;
        if a != b {
            return 0.0;
        }
        let (down, up) = if audited {
            (&self.c_down_xi, &self.c_up_xi)
        } else {
            (&self.c_down, &self.c_up)
        };
        let dn = down[(h * self.n + k) * self.m + g];
        let upv = up[(h * self.m + b) * self.n + k];
        if j + 1 == h {
            dn
        } else if j == h + 1 {
            upv
        } else if j == h {
            1.0 - upv - dn
        } else {
            0.0
        }
    }

    /// Taxation/redistribution contributions of one source pair over all
    /// targets, evaluated on a flattened state. The component sum over the
    /// returned vector is zero (up to roundoff) for any state.
    pub fn t_values(
        &self,
        source: (usize, usize),
        partner: (usize, usize),
        x: &[f64],
        audited: bool,
    ) -> Result<Vec<f64>> {
        self.check_dim(x)?;
        let (n, m) = (self.n, self.m);
        let (h, b) = source;
        let (k, g) = partner;
        let pref = if audited {
            self.t_pref_xi[(h * n + k) * m + g]
        } else {
            self.t_pref[(h * n + k) * m + g]
        };
        let total: f64 = x.iter().sum();
        let eligible: f64 = x[..(n - 1) * m].iter().sum();
        let f = eligible / total;
        let mut out = vec![0.0; n * m];
        for j in 0..n {
            for a in 0..m {
                let mut t1 = 0.0;
                if j >= 1 {
                    t1 += x[(j - 1) * m + a] * self.inv_gap[j - 1];
                }
                if j + 1 < n {
                    t1 -= x[j * m + a] * self.inv_gap[j];
                }
                t1 *= pref / total;
                let mut t2 = 0.0;
                if a == b {
                    if h == j + 1 {
                        t2 += self.inv_gap[j];
                    }
                    if h == j && j >= 1 {
                        t2 -= self.inv_gap[j - 1];
                    }
                    t2 *= pref * f;
                }
                out[j * m + a] = t1 + t2;
            }
        }
        Ok(out)
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::Dimension(format!(
                "state has {} components, tensors need {}",
                x.len(),
                self.dim()
            )));
        }
        Ok(())
    }

    /// One bracket of the dynamics (binary exchanges plus taxation and
    /// redistribution, loss term included), for either the plain or the
    /// audited rate family. Denominators are evaluated from the actual state
    /// so the conservation identities hold for denormalized states too.
    fn bracket_into(&self, audited: bool, x: &[f64], out: &mut [f64]) {
        let (n, m) = (self.n, self.m);
        let (down, up, pref) = if audited {
            (&self.c_down_xi, &self.c_up_xi, &self.t_pref_xi)
        } else {
            (&self.c_down, &self.c_up, &self.t_pref)
        };

        let mut class_tot = vec![0.0; n];
        for j in 0..n {
            class_tot[j] = x[j * m..(j + 1) * m].iter().sum();
        }
        let total: f64 = class_tot.iter().sum();
        let eligible: f64 = class_tot[..n - 1].iter().sum();
        let f = eligible / total;

        // d[h]: total downward rate of a class-h individual against the state.
        // v[h]: tax flow generated by a class-h payer against the state.
        let mut d = vec![0.0; n];
        let mut v = vec![0.0; n];
        for h in 0..n {
            let row = &down[h * n * m..(h + 1) * n * m];
            let prow = &pref[h * n * m..(h + 1) * n * m];
            let mut acc_d = 0.0;
            let mut acc_v = 0.0;
            for i in 0..n * m {
                acc_d += row[i] * x[i];
                acc_v += prow[i] * x[i];
            }
            d[h] = acc_d;
            v[h] = acc_v;
        }
        // u[h][a]: total upward rate of an (h, a) individual against the state.
        let mut u = vec![0.0; n * m];
        for h in 0..n - 1 {
            for a in 0..m {
                let row = &up[(h * m + a) * n..(h * m + a + 1) * n];
                u[h * m + a] = row.iter().zip(&class_tot).map(|(c, xt)| c * xt).sum();
            }
        }
        // g: total tax flow per unit time (before the redistribution
        // eligibility factor), sum_{h,k,b,g} p_{h,k} S theta_{k,g} x_h x_k.
        let g: f64 = class_tot.iter().zip(&v).map(|(xt, vh)| xt * vh).sum();

        for j in 0..n {
            for a in 0..m {
                let i = j * m + a;
                let mut acc = -x[i] * (d[j] + u[i]);
                if j + 1 < n {
                    acc += x[i + m] * (d[j + 1] + f * v[j + 1] * self.inv_gap[j]);
                    acc -= x[i] * g * self.inv_gap[j] / total;
                }
                if j >= 1 {
                    acc += x[i - m] * (u[i - m] + g * self.inv_gap[j - 1] / total);
                    acc -= x[i] * f * v[j] * self.inv_gap[j - 1];
                }
                out[i] = acc;
            }
        }
    }

    /// Base dynamics rates for a flattened state (no auditing).
    ///
    /// The component sum and the income-weighted component sum of the result
    /// vanish up to roundoff: interactions conserve both the number of
    /// individuals and the total income.
    pub fn rhs_base(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(x)?;
        let mut out = vec![0.0; self.dim()];
        self.bracket_into(false, x, &mut out);
        Ok(out)
    }

    /// Audit dynamics rates: the base bracket and the penalty-modified
    /// bracket blended with weights (1 - sigma) and sigma. `enforcement.xi()`
    /// must match the multiplier the tensors were built with whenever
    /// `sigma > 0`; tensors may be reused across different audit fractions.
    pub fn rhs_audit(&self, enforcement: &EnforcementParams, x: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(x)?;
        let sigma = enforcement.sigma();
        if sigma == 0.0 {
            return self.rhs_base(x);
        }
        if enforcement.xi() != self.xi {
            return Err(Error::Constraint(format!(
                "tensors were built for xi = {}, audit evaluation requested xi = {}",
                self.xi,
                enforcement.xi()
            )));
        }
        let mut base = vec![0.0; self.dim()];
        let mut aud = vec![0.0; self.dim()];
        self.bracket_into(false, x, &mut base);
        self.bracket_into(true, x, &mut aud);
        for (b, a) in base.iter_mut().zip(&aud) {
            *b = (1.0 - sigma) * *b + sigma * *a;
        }
        Ok(base)
    }

    /// Allocation-free variant of [`Self::rhs_audit`] for integrator loops:
    /// writes the rates into `out`, using `scratch` for the audited bracket.
    /// Both buffers must have length `dim()`; lengths are not re-checked and
    /// `sigma` is paired with the multiplier the tensors were built with.
    pub fn rhs_audit_into(&self, sigma: f64, x: &[f64], out: &mut [f64], scratch: &mut [f64]) {
        if sigma == 0.0 {
            self.bracket_into(false, x, out);
            return;
        }
        self.bracket_into(false, x, out);
        self.bracket_into(true, x, scratch);
        for (b, a) in out.iter_mut().zip(scratch.iter()) {
            *b = (1.0 - sigma) * *b + sigma * *a;
        }
    }
}
