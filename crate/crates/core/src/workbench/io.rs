//! Flat-file input/output: trajectory and sweep CSVs, equilibrium and fit
//! JSON. All numbers go through the nine-significant-digit formatter, so
//! identical runs produce byte-identical files.

use std::fmt::Write as _;
use std::path::Path;

use serde::Deserialize;

use crate::calibration::{FitCoefficients, SweepRow, SweepTable};
use crate::dynamics::{EquilibriumResult, Trajectory};
use crate::error::{Error, Result};
use crate::metrics::{LorenzCurve, MetricsReport};
use crate::workbench::format::fmt_sig9;

/// Renders a trajectory as CSV with header `t,x_1_1,...,x_n_m` (class-major,
/// 1-based group labels).
pub fn trajectory_csv(traj: &Trajectory, n: usize, m: usize) -> String {
    let mut out = String::from("t");
    for j in 1..=n {
        for a in 1..=m {
            let _ = write!(out, ",x_{j}_{a}");
        }
    }
    out.push('\n');
    for (t, state) in traj.times.iter().zip(&traj.states) {
        out.push_str(&fmt_sig9(*t));
        for v in state {
            out.push(',');
            out.push_str(&fmt_sig9(*v));
        }
        out.push('\n');
    }
    out
}

/// Renders the equilibrium summary JSON with a fixed field order.
pub fn equilibrium_json(mu: f64, eq: &EquilibriumResult, report: &MetricsReport) -> String {
    let mut out = String::from("{\n");
    let _ = writeln!(out, "  \"mu\": {},", fmt_sig9(mu));
    let _ = writeln!(out, "  \"sigma\": {},", fmt_sig9(report.sigma));
    let _ = writeln!(out, "  \"xi\": {},", fmt_sig9(report.xi));
    let _ = writeln!(out, "  \"converged\": {},", eq.converged);
    let _ = writeln!(out, "  \"t_final\": {},", fmt_sig9(eq.t_final));
    let _ = writeln!(out, "  \"residual\": {},", fmt_sig9(eq.residual));
    let state_items: Vec<String> = eq.state.as_slice().iter().map(|v| fmt_sig9(*v)).collect();
    let _ = writeln!(out, "  \"state\": [{}],", state_items.join(", "));
    let _ = writeln!(out, "  \"gini\": {},", fmt_sig9(report.gini));
    let _ = writeln!(out, "  \"tax_revenue\": {},", fmt_sig9(report.tax_revenue));
    let means: Vec<String> = report
        .sector_mean_income
        .iter()
        .map(|v| fmt_sig9(*v))
        .collect();
    let _ = writeln!(out, "  \"sector_mean_income\": [{}]", means.join(", "));
    out.push_str("}\n");
    out
}

/// Renders a sweep table as CSV with header
/// `sigma,xi,gini,tax_revenue,converged,residual`.
pub fn sweep_csv(table: &SweepTable) -> String {
    let mut out = String::from("sigma,xi,gini,tax_revenue,converged,residual\n");
    for row in &table.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            fmt_sig9(row.sigma),
            fmt_sig9(row.xi),
            fmt_sig9(row.gini),
            fmt_sig9(row.tax_revenue),
            row.converged,
            fmt_sig9(row.residual),
        );
    }
    out
}

/// Parses a sweep CSV. Accepts the full six-column format written by this
/// tool as well as externally prepared tables carrying only
/// `sigma,xi,gini,tax_revenue` (all cells then count as converged).
pub fn parse_sweep_csv(text: &str) -> Result<SweepTable> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| Error::Usage("empty sweep table".into()))?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    let find = |name: &str| cols.iter().position(|c| *c == name);
    let (Some(si), Some(xi_i), Some(gi), Some(ti)) = (
        find("sigma"),
        find("xi"),
        find("gini"),
        find("tax_revenue"),
    ) else {
        return Err(Error::Usage(format!(
            "sweep table must carry sigma, xi, gini and tax_revenue columns, got header '{header}'"
        )));
    };
    let conv_i = find("converged");
    let res_i = find("residual");

    let mut rows = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != cols.len() {
            return Err(Error::Usage(format!(
                "row {} has {} fields, header has {}",
                lineno + 2,
                fields.len(),
                cols.len()
            )));
        }
        let num = |idx: usize| -> Result<f64> {
            fields[idx]
                .parse::<f64>()
                .map_err(|_| Error::Usage(format!("row {}: bad number '{}'", lineno + 2, fields[idx])))
        };
        rows.push(SweepRow {
            sigma: num(si)?,
            xi: num(xi_i)?,
            gini: num(gi)?,
            tax_revenue: num(ti)?,
            converged: match conv_i {
                Some(ci) => fields[ci] == "true",
                None => true,
            },
            residual: match res_i {
                Some(ri) => num(ri)?,
                None => 0.0,
            },
        });
    }
    if rows.is_empty() {
        return Err(Error::Usage("sweep table has no data rows".into()));
    }
    let mut sigma_values: Vec<f64> = rows.iter().map(|r| r.sigma).collect();
    sigma_values.sort_by(f64::total_cmp);
    sigma_values.dedup();
    let mut xi_values: Vec<f64> = rows.iter().map(|r| r.xi).collect();
    xi_values.sort_by(f64::total_cmp);
    xi_values.dedup();
    // normalize complete grids to row-major order so positional lookups work
    if sigma_values.len() * xi_values.len() == rows.len() {
        rows.sort_by(|a, b| {
            a.sigma
                .total_cmp(&b.sigma)
                .then(a.xi.total_cmp(&b.xi))
        });
    }
    Ok(SweepTable {
        sigma_values,
        xi_values,
        rows,
        scenario: String::new(),
    })
}

/// Renders fit coefficients as JSON with a fixed field order.
pub fn fit_json(fit: &FitCoefficients) -> String {
    format!(
        "{{\n  \"metric\": \"{}\",\n  \"a0\": {},\n  \"a10\": {},\n  \"a01\": {},\n  \"a11\": {},\n  \"fit_residual_max\": {}\n}}\n",
        fit.metric,
        fmt_sig9(fit.a0),
        fmt_sig9(fit.a10),
        fmt_sig9(fit.a01),
        fmt_sig9(fit.a11),
        fmt_sig9(fit.fit_residual_max),
    )
}

#[derive(Deserialize)]
struct FitJson {
    metric: String,
    a0: f64,
    a10: f64,
    a01: f64,
    a11: f64,
    fit_residual_max: f64,
}

/// Parses a fit JSON produced by [`fit_json`].
pub fn parse_fit_json(text: &str) -> Result<FitCoefficients> {
    let parsed: FitJson =
        serde_json::from_str(text).map_err(|e| Error::Usage(format!("bad fit JSON: {e}")))?;
    Ok(FitCoefficients {
        metric: parsed.metric,
        a0: parsed.a0,
        a10: parsed.a10,
        a01: parsed.a01,
        a11: parsed.a11,
        fit_residual_max: parsed.fit_residual_max,
    })
}

/// Renders a Lorenz curve as CSV for external plotting.
pub fn lorenz_csv(curve: &LorenzCurve) -> String {
    let mut out = String::from("cum_population,cum_income\n");
    for (p, i) in &curve.points {
        let _ = writeln!(out, "{},{}", fmt_sig9(*p), fmt_sig9(*i));
    }
    out
}

pub fn write_file(path: &Path, content: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    std::fs::write(path, content)?;
    Ok(())
}
