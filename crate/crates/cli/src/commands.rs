use std::fs::File;
use std::path::Path;

use serde::Serialize;

use lilbound::bound::{theorem_bound, BoundReport};
use lilbound::grid::parse_grid;
use lilbound::norms::{estimate_norms, Sample};
use lilbound::phi::conjugate_grid;
use lilbound::registry;
use lilbound::verify::{
    calibrate_c, empirical_sup_tail, exact_sup_tail_small, CalibrationResult, SingleNLowerBound, TailEstimate,
    CENSOR_COUNT,
};

use crate::config::{RunArgs, RunConfig};
use crate::error::{code, CliError, CliResult};
use crate::output::{json_text, num, write_atomic, write_pair};

/// Fewest paths for which tail counts are worth calibrating against.
pub const MIN_VERIFY_PATHS: u64 = 1000;

#[derive(Serialize)]
struct ConjugateOut {
    phi: String,
    u: Vec<f64>,
    phi_star: Vec<f64>,
    max_residual: f64,
}

pub fn conjugate(phi_id: &str, u_spec: &str, json: bool, out: Option<&Path>) -> CliResult<()> {
    let phi = registry::parse_phi(phi_id)?;
    let u = parse_grid(u_spec)?;
    let grid = conjugate_grid(&phi, &u)?;
    let result = ConjugateOut {
        phi: phi.label().to_string(),
        u: grid.u_values,
        phi_star: grid.phi_star_values,
        max_residual: grid.max_residual,
    };
    let rows: Vec<Vec<String>> = result
        .u
        .iter()
        .zip(&result.phi_star)
        .map(|(u, s)| vec![num(*u), num(*s)])
        .collect();
    let header = ["u", "phi_star"];
    if json {
        print!("{}", String::from_utf8_lossy(&json_text(&result)?));
    } else {
        print!("{}", String::from_utf8_lossy(&crate::output::csv_text(&header, &rows)?));
    }
    if let Some(dir) = out {
        write_pair(dir, "conjugate", &header, &rows, &result)?;
    }
    Ok(())
}

pub fn norm(sample_path: &Path, phi_id: &str, out: Option<&Path>) -> CliResult<()> {
    let phi = registry::parse_phi(phi_id)?;
    let file = File::open(sample_path)
        .map_err(|e| CliError::new(code::IO, format!("cannot open sample {}: {e}", sample_path.display())))?;
    let sample = Sample::from_csv(file)?;
    let estimate = estimate_norms(&sample, &phi)?;
    let text = json_text(&estimate)?;
    print!("{}", String::from_utf8_lossy(&text));
    if let Some(dir) = out {
        write_atomic(&dir.join("norm.json"), &text)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct BoundOut<'a> {
    config: &'a RunConfig,
    report: &'a BoundReport,
}

pub fn bound(args: &RunArgs) -> CliResult<()> {
    let cfg = RunConfig::resolve(args)?;
    let problem = cfg.problem()?;
    let report = theorem_bound(&problem, &cfg.u_grid, cfg.c, &cfg.bound_options()).map_err(|e| match e {
        lilbound::Error::AllDivergent => CliError::new(
            code::DIVERGENT,
            format!(
                "the block sum diverges for every ratio and every u (norming {} with sigma {}): the terms do not decay",
                cfg.norming, cfg.sigma
            ),
        ),
        other => other.into(),
    })?;
    let rows: Vec<Vec<String>> = (0..report.u_grid.len())
        .map(|i| {
            vec![
                num(report.u_grid[i]),
                num(report.bounds[i]),
                num(report.chosen_ratio[i]),
                report.k_used[i].to_string(),
                num(report.residual_bound[i]),
                status_name(report.status[i]).to_string(),
            ]
        })
        .collect();
    write_pair(
        &cfg.out,
        "bound",
        &["u", "bound", "ratio_chosen", "K_used", "residual_bound", "status"],
        &rows,
        &BoundOut {
            config: &cfg,
            report: &report,
        },
    )?;
    let i = report.argmin();
    println!(
        "min bound {} at u = {} (ratio {}, K = {}, C = {})",
        num(report.bounds[i]),
        num(report.u_grid[i]),
        num(report.chosen_ratio[i]),
        report.k_used[i],
        num(cfg.c)
    );
    if !report.converged {
        eprintln!("note: some points stopped before the tail residual fell below {}", num(cfg.tolerance));
    }
    Ok(())
}

fn status_name(s: lilbound::bound::QSumStatus) -> &'static str {
    use lilbound::bound::QSumStatus::*;
    match s {
        Converged => "converged",
        Truncated => "truncated",
        Divergent => "divergent",
    }
}

fn estimate(cfg: &RunConfig, exact: bool) -> CliResult<TailEstimate> {
    let model = cfg.model()?;
    let v = cfg.norming()?;
    Ok(if exact {
        exact_sup_tail_small(&model, &v, cfg.horizon, &cfg.u_grid)?
    } else {
        empirical_sup_tail(&model, &v, cfg.horizon, cfg.paths, &cfg.u_grid, cfg.seed)?
    })
}

#[derive(Serialize)]
struct TailsOut<'a> {
    config: &'a RunConfig,
    tails: &'a TailEstimate,
}

fn write_tails(cfg: &RunConfig, est: &TailEstimate) -> CliResult<()> {
    let rows: Vec<Vec<String>> = (0..est.u_grid.len())
        .map(|i| {
            vec![
                num(est.u_grid[i]),
                num(est.w_hat[i]),
                num(est.ci_low[i]),
                num(est.ci_high[i]),
                num(est.w_plus_hat[i]),
                num(est.ci_plus_low[i]),
                num(est.ci_plus_high[i]),
                est.counts[i].to_string(),
                est.counts_plus[i].to_string(),
                est.paths.to_string(),
                format!("{}/{}", est.counts[i], est.paths),
                est.censored[i].to_string(),
            ]
        })
        .collect();
    write_pair(
        &cfg.out,
        "tails",
        &[
            "u",
            "w_hat",
            "ci_low",
            "ci_high",
            "w_plus_hat",
            "ci_plus_low",
            "ci_plus_high",
            "count",
            "count_plus",
            "paths",
            "w_hat_fraction",
            "censored",
        ],
        &rows,
        &TailsOut { config: cfg, tails: est },
    )
}

pub fn simulate(args: &RunArgs, exact: bool) -> CliResult<()> {
    let cfg = RunConfig::resolve(args)?;
    let est = estimate(&cfg, exact)?;
    write_tails(&cfg, &est)?;
    println!(
        "{} paths, horizon {}, {} of {} grid points censored",
        est.paths,
        est.horizon,
        est.censored.iter().filter(|c| **c).count(),
        est.u_grid.len()
    );
    Ok(())
}

#[derive(Serialize)]
struct SandwichRow {
    u: f64,
    lower_bound: f64,
    lower_n0: u64,
    w_hat: f64,
    ci_high: f64,
    #[serde(with = "lilbound::serde_inf")]
    bound_at_chat_u: f64,
    censored: bool,
    ordered: bool,
}

#[derive(Serialize)]
struct CalibrationOut<'a> {
    config: &'a RunConfig,
    calibration: &'a CalibrationResult,
}

pub fn verify(args: &RunArgs, exact: bool) -> CliResult<()> {
    let cfg = RunConfig::resolve(args)?;
    if !exact && cfg.paths < MIN_VERIFY_PATHS {
        return Err(CliError::new(
            code::CENSORED,
            format!(
                "{} paths cannot resolve the tails (at least {MIN_VERIFY_PATHS} required); every grid point would be censored",
                cfg.paths
            ),
        ));
    }
    let est = estimate(&cfg, exact)?;
    write_tails(&cfg, &est)?;
    if !exact && est.all_censored() {
        return Err(CliError::new(
            code::CENSORED,
            format!("every tail count is below {CENSOR_COUNT}; enlarge the paths or lower the u grid"),
        ));
    }

    let problem = cfg.problem()?;
    let calibration = calibrate_c(&est, &problem, &cfg.bound_options())?;
    let model = cfg.model()?;
    let v = cfg.norming()?;
    let lower = SingleNLowerBound::new(&model, cfg.horizon)?;
    let rows: Vec<SandwichRow> = (0..est.u_grid.len())
        .map(|i| {
            let (lb, n0) = lower.at(&v, est.u_grid[i]);
            let bound = calibration.bounds[i];
            // A censored count cannot resolve the lower bound; its upper
            // limit still must.
            let censored = est.censored[i];
            let w_ref = if censored { est.ci_high[i] } else { est.w_hat[i] };
            SandwichRow {
                u: est.u_grid[i],
                lower_bound: lb,
                lower_n0: n0,
                w_hat: est.w_hat[i],
                ci_high: est.ci_high[i],
                bound_at_chat_u: bound,
                censored,
                ordered: lb <= w_ref && est.w_hat[i] <= est.ci_high[i] && est.ci_high[i] <= bound,
            }
        })
        .collect();
    let csv_rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                num(r.u),
                num(r.lower_bound),
                r.lower_n0.to_string(),
                num(r.w_hat),
                num(r.ci_high),
                num(r.bound_at_chat_u),
                r.censored.to_string(),
                r.ordered.to_string(),
            ]
        })
        .collect();
    write_pair(
        &cfg.out,
        "sandwich",
        &["u", "lower_bound", "lower_n0", "w_hat", "ci_high", "bound_at_chat_u", "censored", "ordered"],
        &csv_rows,
        &rows,
    )?;
    write_atomic(
        &cfg.out.join("calibration.json"),
        &json_text(&CalibrationOut {
            config: &cfg,
            calibration: &calibration,
        })?,
    )?;
    println!("C_hat = {} (margin {})", num(calibration.c_hat), num(calibration.margin));
    if let Some(r) = rows.iter().find(|r| !r.ordered) {
        return Err(CliError::new(
            code::DOMINANCE,
            format!(
                "sandwich ordering fails at u = {}: lower {} / w_hat {} / ci_high {} / bound {}",
                num(r.u),
                num(r.lower_bound),
                num(r.w_hat),
                num(r.ci_high),
                num(r.bound_at_chat_u)
            ),
        ));
    }
    Ok(())
}

pub fn models(json: bool) -> CliResult<()> {
    let entries = registry::listing();
    if json {
        print!("{}", String::from_utf8_lossy(&json_text(&entries)?));
        return Ok(());
    }
    let width = entries.iter().map(|e| e.id.len()).max().unwrap_or(0);
    for e in &entries {
        println!("{:<8} {:<width$}  {}", e.kind, e.id, e.description);
    }
    Ok(())
}
