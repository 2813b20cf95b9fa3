//! Brute-force reference implementation used as an independent oracle.
//!
//! Everything here is a direct nested-loop transcription of the model's
//! defining sums, built without reference to the optimized evaluation in the
//! crate: the payer matrix and rate matrices are reconstructed from scratch
//! and the right-hand side is assembled source pair by source pair over all
//! six indices. Deliberately slow and simple.

#![allow(dead_code)]

use rand::Rng;

/// Payer matrix by literal application of the base rule and the five
/// exception families, 1-based logic on 0-based storage.
pub fn oracle_payer(r: &[f64]) -> Vec<Vec<f64>> {
    let n = r.len();
    let rn = r[n - 1];
    let mut p = vec![vec![0.0; n]; n];
    for h in 0..n {
        for k in 0..n {
            p[h][k] = r[h].min(r[k]) / (4.0 * rn);
        }
    }
    for j in 1..n.saturating_sub(1) {
        p[j][j] = r[j] / (2.0 * rn);
    }
    for h in 1..n {
        p[h][0] = r[0] / (2.0 * rn);
    }
    for k in 0..n - 1 {
        p[n - 1][k] = r[k] / (2.0 * rn);
    }
    for k in 0..n {
        p[0][k] = 0.0;
    }
    for h in 0..n {
        p[h][n - 1] = 0.0;
    }
    p
}

pub fn oracle_theta(tau: &[f64], theta_ev: &[f64]) -> Vec<Vec<f64>> {
    tau.iter()
        .map(|t| theta_ev.iter().map(|e| e * t).collect())
        .collect()
}

pub fn oracle_audited(theta: &[Vec<f64>], tau: &[f64], xi: f64) -> Vec<Vec<f64>> {
    theta
        .iter()
        .zip(tau)
        .map(|(row, t)| row.iter().map(|th| th + xi * (t - th)).collect())
        .collect()
}

/// Model inputs for the oracle evaluation.
pub struct OracleModel {
    pub r: Vec<f64>,
    pub s: f64,
    pub p: Vec<Vec<f64>>,
    pub theta: Vec<Vec<f64>>,
    pub theta_audited: Vec<Vec<f64>>,
}

impl OracleModel {
    pub fn new(r: &[f64], s: f64, tau: &[f64], theta_ev: &[f64], xi: f64) -> Self {
        let theta = oracle_theta(tau, theta_ev);
        let theta_audited = oracle_audited(&theta, tau, xi);
        Self {
            r: r.to_vec(),
            s,
            p: oracle_payer(r),
            theta,
            theta_audited,
        }
    }

    pub fn n(&self) -> usize {
        self.r.len()
    }

    pub fn m(&self) -> usize {
        self.theta[0].len()
    }

    /// Class-transition coefficient for source (h, b), partner (k, g),
    /// target (j, a); all indices 0-based. Terms are dropped exactly where
    /// their class-gap references would leave the index range.
    pub fn c(&self, th: &[Vec<f64>], h: usize, b: usize, k: usize, g: usize, j: usize, a: usize) -> f64 {
        let n = self.n();
        let r = &self.r;
        let s = self.s;
        if a != b {
            return 0.0;
        }
        if j + 1 == h {
            // source pays and falls one class; h >= 2 in 1-based terms
            return self.p[h][k] * s * (1.0 - th[k][g]) / (r[h] - r[h - 1]);
        }
        if j == h + 1 && h + 1 < n {
            // source receives and rises one class
            return self.p[k][h] * s * (1.0 - th[h][b]) / (r[h + 1] - r[h]);
        }
        if j == h {
            let mut v = 1.0;
            if h + 1 < n && k >= 1 {
                v -= self.p[k][h] * s * (1.0 - th[h][b]) / (r[h + 1] - r[h]);
            }
            if h >= 1 && k + 1 < n {
                v -= self.p[h][k] * s * (1.0 - th[k][g]) / (r[h] - r[h - 1]);
            }
            return v;
        }
        0.0
    }

    /// Taxation/redistribution functional for one source pair and target,
    /// evaluated on a flattened state (class-major).
    #[allow(clippy::too_many_arguments)]
    pub fn t(
        &self,
        th: &[Vec<f64>],
        h: usize,
        b: usize,
        k: usize,
        g: usize,
        j: usize,
        a: usize,
        x: &[f64],
    ) -> f64 {
        let n = self.n();
        let m = self.m();
        let r = &self.r;
        let total: f64 = x.iter().sum();
        let eligible: f64 = x[..(n - 1) * m].iter().sum();
        let pref = self.p[h][k] * self.s * th[k][g];

        let mut t1 = 0.0;
        if j >= 1 {
            t1 += x[(j - 1) * m + a] / (r[j] - r[j - 1]);
        }
        if j + 1 < n {
            t1 -= x[j * m + a] / (r[j + 1] - r[j]);
        }
        t1 *= pref / total;

        let mut t2 = 0.0;
        if a == b {
            if h == j + 1 {
                t2 += 1.0 / (r[h] - r[j]);
            }
            if h == j && j >= 1 {
                t2 -= 1.0 / (r[h] - r[j - 1]);
            }
            t2 *= pref * eligible / total;
        }
        t1 + t2
    }

    /// Base dynamics by the full six-index nested sum.
    pub fn rhs_base(&self, x: &[f64]) -> Vec<f64> {
        self.rhs_bracket(&self.theta, x)
    }

    /// Audit dynamics: blend of the plain and penalty-modified brackets.
    pub fn rhs_audit(&self, sigma: f64, x: &[f64]) -> Vec<f64> {
        let base = self.rhs_bracket(&self.theta, x);
        let aud = self.rhs_bracket(&self.theta_audited, x);
        base.iter()
            .zip(&aud)
            .map(|(bv, av)| (1.0 - sigma) * bv + sigma * av)
            .collect()
    }

    fn rhs_bracket(&self, th: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
        let n = self.n();
        let m = self.m();
        let total: f64 = x.iter().sum();
        let mut out = vec![0.0; n * m];
        for j in 0..n {
            for a in 0..m {
                let mut acc = 0.0;
                for h in 0..n {
                    for b in 0..m {
                        for k in 0..n {
                            for g in 0..m {
                                let c = self.c(th, h, b, k, g, j, a);
                                let t = self.t(th, h, b, k, g, j, a, x);
                                acc += (c + t) * x[h * m + b] * x[k * m + g];
                            }
                        }
                    }
                }
                out[j * m + a] = acc - x[j * m + a] * total;
            }
        }
        out
    }
}

/// Random normalized nonnegative state of the given dimensions.
pub fn random_state<R: Rng>(rng: &mut R, n: usize, m: usize) -> Vec<f64> {
    let mut x: Vec<f64> = (0..n * m).map(|_| rng.gen_range(0.01..1.0)).collect();
    let total: f64 = x.iter().sum();
    for v in &mut x {
        *v /= total;
    }
    x
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

pub fn inf_norm(a: &[f64]) -> f64 {
    a.iter().map(|v| v.abs()).fold(0.0, f64::max)
}
