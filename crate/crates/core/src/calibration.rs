//! Enforcement-grid sweeps, bilinear surface fitting and inversion.
//!
//! A sweep integrates the model to equilibrium on a (sigma, xi) grid and
//! records Gini and tax revenue per cell. The revenue (or Gini) surface is
//! then fitted by least squares with the bilinear model
//! `f(xi, sigma) = a0 + a10 xi + a01 sigma + a11 xi sigma`, which can be
//! inverted for either coordinate at a revenue target.

use rayon::prelude::*;

use crate::dynamics::{find_steady_state, make_initial_condition, IntegratorSettings};
use crate::error::{Error, Result};
use crate::kinetics::{EnforcementParams, ModelConfig, TransitionTensors};
use crate::metrics;

/// One equilibrium cell of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub sigma: f64,
    pub xi: f64,
    pub gini: f64,
    pub tax_revenue: f64,
    pub converged: bool,
    pub residual: f64,
}

/// Grid of equilibrium observables over enforcement parameters, in row-major
/// order (sigma outer, xi inner).
#[derive(Debug, Clone)]
pub struct SweepTable {
    pub sigma_values: Vec<f64>,
    pub xi_values: Vec<f64>,
    pub rows: Vec<SweepRow>,
    pub scenario: String,
}

impl SweepTable {
    /// A table is usable for fitting only when every cell converged.
    pub fn fit_eligible(&self) -> bool {
        !self.rows.is_empty() && self.rows.iter().all(|row| row.converged)
    }

    /// Value of a metric at grid position (sigma index, xi index).
    pub fn value(&self, metric: Metric, si: usize, xi: usize) -> f64 {
        let row = &self.rows[si * self.xi_values.len() + xi];
        match metric {
            Metric::Gini => row.gini,
            Metric::TaxRevenue => row.tax_revenue,
        }
    }
}

/// Which observable a fit targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Gini,
    TaxRevenue,
}

impl Metric {
    pub fn name(&self) -> &'static str {
        match self {
            Metric::Gini => "gini",
            Metric::TaxRevenue => "tax_revenue",
        }
    }
}

impl std::str::FromStr for Metric {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gini" => Ok(Metric::Gini),
            "tr" | "tax_revenue" => Ok(Metric::TaxRevenue),
            other => Err(Error::Usage(format!(
                "unknown metric '{other}' (expected 'gini' or 'tr')"
            ))),
        }
    }
}

/// Coefficients of the fitted bilinear surface, with the largest absolute
/// reproduction residual over the fitted grid.
#[derive(Debug, Clone)]
pub struct FitCoefficients {
    pub metric: String,
    pub a0: f64,
    pub a10: f64,
    pub a01: f64,
    pub a11: f64,
    pub fit_residual_max: f64,
}

impl FitCoefficients {
    /// Forward evaluation of the fitted surface.
    pub fn eval(&self, xi: f64, sigma: f64) -> f64 {
        self.a0 + self.a10 * xi + self.a01 * sigma + self.a11 * xi * sigma
    }
}

/// Bilinear model augmented with pure quadratic terms, used as a diagnostic
/// of how much the surface deviates from bilinearity.
#[derive(Debug, Clone)]
pub struct QuadraticFit {
    pub metric: String,
    pub a0: f64,
    pub a10: f64,
    pub a01: f64,
    pub a11: f64,
    pub a20: f64,
    pub a02: f64,
    pub fit_residual_max: f64,
}

/// Result of inverting the fitted surface for one coordinate. Values outside
/// the admissible box are returned with `constraint_ok = false` rather than
/// rejected: the inversion is a policy-exploration tool.
#[derive(Debug, Clone)]
pub struct Inversion {
    pub value: f64,
    pub constraint_ok: bool,
    /// Admissible interval for the solved coordinate.
    pub bounds: (f64, f64),
}

/// Runs the model to equilibrium on every (sigma, xi) grid cell and records
/// Gini and tax revenue. Cells are independent and evaluated in parallel;
/// rows are emitted in deterministic row-major order (sigma outer, xi inner)
/// regardless of scheduling.
pub fn sweep(
    config: &ModelConfig,
    mu: f64,
    sigma_list: &[f64],
    xi_list: &[f64],
    settings: &IntegratorSettings,
) -> Result<SweepTable> {
    if sigma_list.is_empty() || xi_list.is_empty() {
        return Err(Error::Usage("sweep needs nonempty sigma and xi lists".into()));
    }
    settings.validate()?;
    let x0 = make_initial_condition(config, mu)?;
    let cells: Vec<(f64, f64)> = sigma_list
        .iter()
        .flat_map(|s| xi_list.iter().map(move |x| (*s, *x)))
        .collect();
    let rows: Result<Vec<SweepRow>> = cells
        .par_iter()
        .map(|(sigma, xi)| {
            let enforcement = EnforcementParams::new(*sigma, *xi)?;
            let tensors = TransitionTensors::build(config, &enforcement)?;
            let dim = tensors.dim();
            let mut scratch = vec![0.0; dim];
            let eq = find_steady_state(
                |x, out| tensors.rhs_audit_into(*sigma, x, out, &mut scratch),
                &x0,
                config,
                settings,
            )?;
            let rep = metrics::report(&eq.state, &tensors, &enforcement)?;
            Ok(SweepRow {
                sigma: *sigma,
                xi: *xi,
                gini: rep.gini,
                tax_revenue: rep.tax_revenue,
                converged: eq.converged,
                residual: eq.residual,
            })
        })
        .collect();
    Ok(SweepTable {
        sigma_values: sigma_list.to_vec(),
        xi_values: xi_list.to_vec(),
        rows: rows?,
        scenario: String::new(),
    })
}

/// Solves a small symmetric linear system by Gaussian elimination with
/// partial pivoting. The normal-equation systems here are 4x4 or 6x6 and
/// comfortably conditioned.
fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Result<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        if a[pivot_row][col].abs() < 1e-300 {
            return Err(Error::Fit("normal equations are rank deficient".into()));
        }
        a.swap(col, pivot_row);
        b.swap(col, pivot_row);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= factor * a[col][k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in row + 1..n {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    Ok(x)
}

/// Least-squares fit of `basis` functions to the grid values of `metric`,
/// via the normal equations. Returns coefficients and the max residual.
fn least_squares(
    points: &[(f64, f64, f64)], // (xi, sigma, value)
    basis: &[fn(f64, f64) -> f64],
) -> Result<(Vec<f64>, f64)> {
    let k = basis.len();
    let mut ata = vec![vec![0.0; k]; k];
    let mut atb = vec![0.0; k];
    for (xi, sigma, z) in points {
        let row: Vec<f64> = basis.iter().map(|f| f(*xi, *sigma)).collect();
        for i in 0..k {
            for j in 0..k {
                ata[i][j] += row[i] * row[j];
            }
            atb[i] += row[i] * z;
        }
    }
    let coeffs = solve_dense(ata, atb)?;
    let mut resid_max = 0.0_f64;
    for (xi, sigma, z) in points {
        let fit: f64 = basis
            .iter()
            .zip(&coeffs)
            .map(|(f, c)| c * f(*xi, *sigma))
            .sum();
        resid_max = resid_max.max((fit - z).abs());
    }
    Ok((coeffs, resid_max))
}

fn check_fit_preconditions(table: &SweepTable) -> Result<()> {
    if !table.fit_eligible() {
        return Err(Error::Fit(
            "table contains non-converged cells and is not fit-eligible".into(),
        ));
    }
    let mut sigmas: Vec<f64> = table.rows.iter().map(|r| r.sigma).collect();
    let mut xis: Vec<f64> = table.rows.iter().map(|r| r.xi).collect();
    sigmas.sort_by(f64::total_cmp);
    sigmas.dedup();
    xis.sort_by(f64::total_cmp);
    xis.dedup();
    if table.rows.len() < 4 || sigmas.len() < 2 || xis.len() < 2 {
        return Err(Error::Fit(
            "fit needs at least a 2x2 grid spanning both axes".into(),
        ));
    }
    Ok(())
}

fn table_points(table: &SweepTable, metric: Metric) -> Vec<(f64, f64, f64)> {
    table
        .rows
        .iter()
        .map(|r| {
            (
                r.xi,
                r.sigma,
                match metric {
                    Metric::Gini => r.gini,
                    Metric::TaxRevenue => r.tax_revenue,
                },
            )
        })
        .collect()
}

const BILINEAR_BASIS: [fn(f64, f64) -> f64; 4] = [
    |_, _| 1.0,
    |xi, _| xi,
    |_, sigma| sigma,
    |xi, sigma| xi * sigma,
];

/// Fits the bilinear surface to one metric of a sweep table.
pub fn bilinear_fit(table: &SweepTable, metric: Metric) -> Result<FitCoefficients> {
    check_fit_preconditions(table)?;
    let points = table_points(table, metric);
    let (c, resid) = least_squares(&points, &BILINEAR_BASIS)?;
    Ok(FitCoefficients {
        metric: metric.name().to_string(),
        a0: c[0],
        a10: c[1],
        a01: c[2],
        a11: c[3],
        fit_residual_max: resid,
    })
}

/// Diagnostic fit with pure quadratic terms added. Small quadratic
/// coefficients confirm the bilinear model captures the surface.
pub fn quadratic_diagnostic_fit(table: &SweepTable, metric: Metric) -> Result<QuadraticFit> {
    check_fit_preconditions(table)?;
    let mut sigmas: Vec<f64> = table.rows.iter().map(|r| r.sigma).collect();
    let mut xis: Vec<f64> = table.rows.iter().map(|r| r.xi).collect();
    sigmas.sort_by(f64::total_cmp);
    sigmas.dedup();
    xis.sort_by(f64::total_cmp);
    xis.dedup();
    if sigmas.len() < 3 || xis.len() < 3 {
        return Err(Error::Fit(
            "quadratic diagnostic needs at least a 3x3 grid".into(),
        ));
    }
    let basis: [fn(f64, f64) -> f64; 6] = [
        |_, _| 1.0,
        |xi, _| xi,
        |_, sigma| sigma,
        |xi, sigma| xi * sigma,
        |xi, _| xi * xi,
        |_, sigma| sigma * sigma,
    ];
    let points = table_points(table, metric);
    let (c, resid) = least_squares(&points, &basis)?;
    Ok(QuadraticFit {
        metric: metric.name().to_string(),
        a0: c[0],
        a10: c[1],
        a01: c[2],
        a11: c[3],
        a20: c[4],
        a02: c[5],
        fit_residual_max: resid,
    })
}

/// Diagnostic fit with the grid-axis assignment deliberately swapped: the
/// value at grid position (i, k) is attributed to (xi_values[i],
/// sigma_values[k]) instead of (xi_values[k], sigma_values[i]). Requires a
/// square grid. Emitted for inspection when investigating published
/// coefficient sets that do not reproduce their own tables.
pub fn transposed_axes_fit(table: &SweepTable, metric: Metric) -> Result<FitCoefficients> {
    check_fit_preconditions(table)?;
    let ns = table.sigma_values.len();
    let nx = table.xi_values.len();
    if ns != nx {
        return Err(Error::Fit(format!(
            "transposed-axes fit needs a square grid, got {ns} x {nx}"
        )));
    }
    let mut points = Vec::with_capacity(table.rows.len());
    for si in 0..ns {
        for ki in 0..nx {
            points.push((
                table.xi_values[si],
                table.sigma_values[ki],
                table.value(metric, si, ki),
            ));
        }
    }
    let (c, resid) = least_squares(&points, &BILINEAR_BASIS)?;
    Ok(FitCoefficients {
        metric: format!("{}_transposed_axes", metric.name()),
        a0: c[0],
        a10: c[1],
        a01: c[2],
        a11: c[3],
        fit_residual_max: resid,
    })
}

const INVERSION_DENOM_TOL: f64 = 1e-12;

/// Solves `f(xi, sigma) = target` for xi at fixed sigma:
/// `xi = (target - a0 - a01 sigma) / (a10 + a11 sigma)`.
pub fn xi_for_target(fit: &FitCoefficients, target: f64, sigma: f64) -> Result<Inversion> {
    let denom = fit.a10 + fit.a11 * sigma;
    if denom.abs() <= INVERSION_DENOM_TOL {
        return Err(Error::SingularInversion(format!(
            "xi coefficient {denom:e} vanishes at sigma = {sigma}"
        )));
    }
    let value = (target - fit.a0 - fit.a01 * sigma) / denom;
    Ok(Inversion {
        value,
        constraint_ok: value > 1.0 && value <= 2.0,
        bounds: (1.0, 2.0),
    })
}

/// Solves `f(xi, sigma) = target` for sigma at fixed xi:
/// `sigma = (target - a0 - a10 xi) / (a01 + a11 xi)`.
pub fn sigma_for_target(fit: &FitCoefficients, target: f64, xi: f64) -> Result<Inversion> {
    let denom = fit.a01 + fit.a11 * xi;
    if denom.abs() <= INVERSION_DENOM_TOL {
        return Err(Error::SingularInversion(format!(
            "sigma coefficient {denom:e} vanishes at xi = {xi}"
        )));
    }
    let value = (target - fit.a0 - fit.a10 * xi) / denom;
    Ok(Inversion {
        value,
        constraint_ok: (0.0..=1.0).contains(&value),
        bounds: (0.0, 1.0),
    })
}

/// Builds a table directly from externally supplied grid values (row-major,
/// sigma outer), e.g. published reference tables. All cells are marked
/// converged so the table is fit-eligible.
pub fn table_from_values(
    sigma_values: &[f64],
    xi_values: &[f64],
    gini: &[f64],
    tax_revenue: &[f64],
    scenario: &str,
) -> Result<SweepTable> {
    let cells = sigma_values.len() * xi_values.len();
    if gini.len() != cells || tax_revenue.len() != cells {
        return Err(Error::Dimension(format!(
            "{} x {} grid needs {cells} values, got {} gini / {} revenue",
            sigma_values.len(),
            xi_values.len(),
            gini.len(),
            tax_revenue.len()
        )));
    }
    let mut rows = Vec::with_capacity(cells);
    for (si, sigma) in sigma_values.iter().enumerate() {
        for (ki, xi) in xi_values.iter().enumerate() {
            rows.push(SweepRow {
                sigma: *sigma,
                xi: *xi,
                gini: gini[si * xi_values.len() + ki],
                tax_revenue: tax_revenue[si * xi_values.len() + ki],
                converged: true,
                residual: 0.0,
            });
        }
    }
    Ok(SweepTable {
        sigma_values: sigma_values.to_vec(),
        xi_values: xi_values.to_vec(),
        rows,
        scenario: scenario.to_string(),
    })
}
