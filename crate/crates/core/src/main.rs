use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use taxkin::calibration::Metric;
use taxkin::workbench::{
    cmd_fit, cmd_invert, cmd_paper_tables, cmd_simulate, cmd_sweep, fmt_sig9, resolve_config_arg,
    InvertQuery,
};

#[derive(Parser)]
#[command(
    name = "taxkin",
    version,
    about = "Kinetic income-distribution workbench: stationary distributions under taxation, \
             evasion and audits; enforcement sweeps; bilinear revenue-surface fits and inversion"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate to the stationary distribution and write trajectory/summary files
    Simulate {
        /// Config file path or built-in preset name (paper.default, paper.scenario2)
        #[arg(long, default_value = "paper.default")]
        config: String,
        /// Override the audited population fraction
        #[arg(long)]
        sigma: Option<f64>,
        /// Override the penalty multiplier
        #[arg(long)]
        xi: Option<f64>,
        /// Override the initial total income
        #[arg(long)]
        mu: Option<f64>,
        /// Output directory (defaults to the config's output section)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run steady states over a (sigma, xi) grid and write sweep.csv
    Sweep {
        #[arg(long, default_value = "paper.default")]
        config: String,
        /// Comma-separated audit fractions
        #[arg(long, value_delimiter = ',', required = true)]
        sigma_list: Vec<f64>,
        /// Comma-separated penalty multipliers
        #[arg(long, value_delimiter = ',', required = true)]
        xi_list: Vec<f64>,
        #[arg(long)]
        mu: Option<f64>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Worker threads for grid cells (default: all cores)
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Fit the bilinear enforcement surface to a sweep table
    Fit {
        /// Sweep CSV (as written by `sweep`, or external with sigma,xi,gini,tax_revenue)
        #[arg(long)]
        table: PathBuf,
        /// Metric to fit: gini | tr
        #[arg(long, value_parser = parse_metric)]
        metric: Metric,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Invert a stored fit for xi or sigma at a target level
    Invert {
        /// Fit JSON written by `fit`
        #[arg(long)]
        fit: PathBuf,
        /// Target level of the fitted metric
        #[arg(long)]
        target: f64,
        /// Solve for xi at this audit fraction
        #[arg(long, conflicts_with = "xi")]
        sigma: Option<f64>,
        /// Solve for sigma at this penalty multiplier
        #[arg(long)]
        xi: Option<f64>,
    },
    /// Recompute a scenario's reference tables and report deviations
    PaperTables {
        /// Scenario preset: 1 | 2
        #[arg(long)]
        scenario: u8,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long)]
        workers: Option<usize>,
    },
}

fn parse_metric(s: &str) -> Result<Metric, String> {
    s.parse::<Metric>().map_err(|e| e.to_string())
}

fn run() -> taxkin::Result<u8> {
    let cli = Cli::parse();
    match cli.command {
        Command::Simulate {
            config,
            sigma,
            xi,
            mu,
            out,
        } => {
            let cfg = resolve_config_arg(&config)?;
            if let Some(warning) = cfg.resolve()?.model.s_gap_warning() {
                eprintln!("warning: {warning}");
            }
            let outcome = cmd_simulate(&cfg, sigma, xi, mu, out.as_deref())?;
            println!(
                "converged: {} (t = {}, residual = {})",
                outcome.equilibrium.converged,
                fmt_sig9(outcome.equilibrium.t_final),
                fmt_sig9(outcome.equilibrium.residual),
            );
            println!("gini: {}", fmt_sig9(outcome.report.gini));
            println!("tax_revenue: {}", fmt_sig9(outcome.report.tax_revenue));
            let means: Vec<String> = outcome
                .report
                .sector_mean_income
                .iter()
                .map(|v| fmt_sig9(*v))
                .collect();
            println!("sector_mean_income: [{}]", means.join(", "));
            for p in &outcome.written {
                println!("wrote {}", p.display());
            }
            Ok(if outcome.equilibrium.converged { 0 } else { 1 })
        }
        Command::Sweep {
            config,
            sigma_list,
            xi_list,
            mu,
            out,
            workers,
        } => {
            let cfg = resolve_config_arg(&config)?;
            let (table, path) = cmd_sweep(&cfg, &sigma_list, &xi_list, mu, &out, workers)?;
            let bad = table.rows.iter().filter(|r| !r.converged).count();
            println!(
                "{} cells ({} non-converged), wrote {}",
                table.rows.len(),
                bad,
                path.display()
            );
            Ok(if bad == 0 { 0 } else { 1 })
        }
        Command::Fit { table, metric, out } => {
            let (fit, path) = cmd_fit(&table, metric, &out)?;
            println!(
                "{}: a0 = {}, a10 = {}, a01 = {}, a11 = {}, max residual = {}",
                fit.metric,
                fmt_sig9(fit.a0),
                fmt_sig9(fit.a10),
                fmt_sig9(fit.a01),
                fmt_sig9(fit.a11),
                fmt_sig9(fit.fit_residual_max),
            );
            println!("wrote {}", path.display());
            Ok(0)
        }
        Command::Invert {
            fit,
            target,
            sigma,
            xi,
        } => {
            let query = match (sigma, xi) {
                (Some(s), None) => InvertQuery::XiAtSigma(s),
                (None, Some(x)) => InvertQuery::SigmaAtXi(x),
                _ => {
                    return Err(taxkin::Error::Usage(
                        "pass exactly one of --sigma (solve for xi) or --xi (solve for sigma)".into(),
                    ))
                }
            };
            let outcome = cmd_invert(&fit, target, query)?;
            println!("{}", outcome.formula);
            println!("{} = {}", outcome.solved_for, fmt_sig9(outcome.inversion.value));
            if !outcome.inversion.constraint_ok {
                let (lo, hi) = outcome.inversion.bounds;
                println!(
                    "warning: {} = {} lies outside the admissible interval ({}, {}]",
                    outcome.solved_for,
                    fmt_sig9(outcome.inversion.value),
                    fmt_sig9(lo),
                    fmt_sig9(hi),
                );
            }
            Ok(0)
        }
        Command::PaperTables {
            scenario,
            out,
            workers,
        } => {
            let report = cmd_paper_tables(scenario, &out, workers)?;
            for row in &report.rows {
                println!(
                    "{:<22} sigma={:<12} xi={:<5} gini {} vs {} (dev {:.2e}, {}) tr {} vs {} (rel {:.2e}, {})",
                    row.label,
                    fmt_sig9(row.sigma),
                    fmt_sig9(row.xi),
                    fmt_sig9(row.gini),
                    fmt_sig9(row.gini_reference),
                    row.gini_abs_dev,
                    if row.gini_within { "ok" } else { "OUT" },
                    fmt_sig9(row.tax_revenue),
                    fmt_sig9(row.tax_revenue_reference),
                    row.tax_revenue_rel_dev,
                    if row.tax_revenue_within { "ok" } else { "OUT" },
                );
            }
            println!(
                "fit (tax_revenue): a0 = {}, a10 = {}, a01 = {}, a11 = {}, max residual = {}",
                fmt_sig9(report.revenue_fit.a0),
                fmt_sig9(report.revenue_fit.a10),
                fmt_sig9(report.revenue_fit.a01),
                fmt_sig9(report.revenue_fit.a11),
                fmt_sig9(report.revenue_fit.fit_residual_max),
            );
            println!(
                "quadratic diagnostic: a20 = {}, a02 = {}",
                fmt_sig9(report.revenue_quadratic.a20),
                fmt_sig9(report.revenue_quadratic.a02),
            );
            println!(
                "transposed-axes diagnostic (inspection only): a0 = {}, a10 = {}, a01 = {}, a11 = {}",
                fmt_sig9(report.revenue_transposed.a0),
                fmt_sig9(report.revenue_transposed.a10),
                fmt_sig9(report.revenue_transposed.a01),
                fmt_sig9(report.revenue_transposed.a11),
            );
            println!("wrote {}", report.report_path.display());
            println!("wrote {}", report.diagnostics_path.display());
            println!(
                "{}: {}",
                report.scenario,
                if report.all_within_tolerance {
                    "all cells within tolerance"
                } else {
                    "TOLERANCE EXCEEDED"
                }
            );
            Ok(if report.all_within_tolerance { 0 } else { 1 })
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
