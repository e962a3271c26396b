//! Batch front-end for `halfspec`: threshold certificates, single solves,
//! parameter sweeps and the invariant suite, all driven by one TOML file.
//!
//! Reports are deterministic functions of the configuration and seed; wall
//! times go to separate `*_timings.toml` files.

// `!(x > 0)` is deliberate: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use halfspec::solvers::solve_both;
use halfspec::thresholds::{certify, check_theorem_ball, estimate_lambda_star, LambdaStarBudget};
use halfspec::verify::{run_suite, Check, VerifySettings};
use halfspec::Domain64;
use log::info;
use rayon::prelude::*;
use serde::Serialize;

use config::{config_err, Loaded, RunConfig};
use report::*;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

impl From<halfspec::Error> for CliError {
    fn from(e: halfspec::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

/// Command-line overrides shared by every subcommand.
#[derive(Clone, Debug, Default)]
pub struct Options {
    pub out: Option<PathBuf>,
    pub jobs: Option<usize>,
    pub seed: Option<u64>,
}

impl Options {
    fn apply(&self, loaded: &Loaded) -> Loaded {
        let mut l = loaded.clone();
        if let Some(s) = self.seed {
            l.config.seed = s;
        }
        l
    }

    fn out_dir(&self, loaded: &Loaded) -> Option<PathBuf> {
        self.out
            .clone()
            .or_else(|| loaded.config.output.as_deref().map(|o| loaded.resolve(o)))
    }

    fn require_out(&self, loaded: &Loaded) -> Result<PathBuf, CliError> {
        let dir = self
            .out_dir(loaded)
            .ok_or_else(|| config_err("no output directory: pass --out or set `output`"))?;
        fs::create_dir_all(&dir).map_err(|e| config_err(format!("output directory {}: {e}", dir.display())))?;
        Ok(dir)
    }
}

/// Writes `thresholds.toml`.
pub fn cmd_thresholds(loaded: &Loaded, opts: &Options) -> Result<PathBuf, CliError> {
    let l = opts.apply(loaded);
    let out = opts.require_out(&l)?;
    let c = &l.config;
    let nl = l.nonlinearity()?;
    let domain = l.domain()?;
    let spectral = !matches!(domain, Domain64::Ball { .. });
    let model = if spectral { Some(l.model(1.0)?) } else { None };
    let bounds = l.weight_bounds(model.as_ref().map(|m| m.grid().as_ref()))?;

    let cert = certify(&nl, bounds, &domain, (c.thresholds.cf_tmax, c.thresholds.cf_grid))?;
    info!("lambda_0 = {}", cert.lambda_zero.value);

    let lambda_star = match &model {
        Some(m) => {
            let budget = LambdaStarBudget::around(cert.sign_witness, c.thresholds.lambda_star_trials, c.seed);
            let est = estimate_lambda_star(m, cert.inputs.cf, &budget)?;
            Some(LambdaStarReport::new(&est, c.thresholds.lambda_star_trials))
        }
        None => None,
    };
    let ball = match domain {
        Domain64::Ball { dim, radius } => {
            let b = check_theorem_ball(&nl, dim, radius, c.thresholds.ball_tmax)?;
            Some(BallReport {
                holds: b.holds,
                min_ratio: b.min_ratio,
                zeta: b.zeta,
                t0: b.t0,
            })
        }
        _ => None,
    };

    let rep = ThresholdsReport {
        meta: Meta::new("thresholds"),
        config: c.clone(),
        certificate: (&cert).into(),
        lambda_star,
        ball,
    };
    let path = out.join("thresholds.toml");
    write_toml(&path, &rep)?;
    match cert.lambda_nonexist {
        Some(lo) => println!("lambda_nonexist = {lo}"),
        None => println!("lambda_nonexist = (no closed-form lambda_1 for this domain)"),
    }
    if let Some(s) = &rep.lambda_star {
        println!("lambda_star    <= {}", s.upper);
    }
    println!("lambda_zero     = {}", cert.lambda_zero.value);
    if let Some(b) = &rep.ball {
        println!("ball condition  = {} (min t^2/F = {}, zeta = {})", b.holds, b.min_ratio, b.zeta);
    }
    println!("wrote {}", path.display());
    Ok(path)
}

fn write_timings(path: &Path, stages: Vec<Timing>) -> Result<(), CliError> {
    write_toml(path, &Timings { stages })
}

/// Writes `solve.toml`, `solve_timings.toml` and two CSVs per critical point.
pub fn cmd_solve(loaded: &Loaded, opts: &Options) -> Result<PathBuf, CliError> {
    let l = opts.apply(loaded);
    let out = opts.require_out(&l)?;
    let lambda = l.require_lambda()?;
    let model = l.model(lambda)?;
    let clock = Instant::now();
    let r = solve_both(&model, &l.solver_config(l.config.seed))?;
    let total = clock.elapsed();

    let mut files = Vec::new();
    for (i, p) in r.points.iter().enumerate() {
        files.push(write_point_files(&model, p, &out, &format!("solution_{i}"))?);
    }
    let (coefficients, samples) = field_columns(model.domain().dim());
    let rep = SolveFileReport {
        meta: Meta::new("solve"),
        config: l.config.clone(),
        columns: Columns {
            coefficients: Some(coefficients),
            samples: Some(samples),
            sweep: None,
        },
        result: solve_result(&r, files),
    };
    let path = out.join("solve.toml");
    write_toml(&path, &rep)?;
    let mut stages: Vec<Timing> = r
        .timings
        .iter()
        .map(|(s, d)| Timing {
            stage: s.to_string(),
            seconds: d.as_secs_f64(),
        })
        .collect();
    stages.push(Timing {
        stage: "total".into(),
        seconds: total.as_secs_f64(),
    });
    write_timings(&out.join("solve_timings.toml"), stages)?;

    println!("outcome = {}", r.outcome.as_str());
    for p in &rep.result.points {
        println!(
            "  u{}: {:<13} J = {:+.10e}  residual = {:.3e}  |u|_H = {:.6e}",
            p.index, p.kind, p.energy, p.residual, p.h_norm
        );
    }
    println!("wrote {}", path.display());
    Ok(path)
}

pub const SWEEP_COLUMNS: [&str; 14] = [
    "index",
    "lambda",
    "outcome",
    "start",
    "nonexistence_holds",
    "points",
    "kind_1",
    "energy_1",
    "residual_1",
    "kind_2",
    "energy_2",
    "residual_2",
    "h_distance",
    "error",
];

fn sweep_row(index: usize, lambda: f64, result: &Result<halfspec::SolveReport64, CliError>) -> Vec<String> {
    use halfspec::io::fmt_real;
    let mut row = vec![index.to_string(), fmt_real(lambda)];
    match result {
        Ok(r) => {
            row.push(r.outcome.as_str().into());
            row.push(start_str(r.start).into());
            row.push(r.nonexistence.holds.to_string());
            row.push(r.points.len().to_string());
            for k in 0..2 {
                match r.points.get(k) {
                    Some(p) => row.extend([p.kind.as_str().into(), fmt_real(p.energy), fmt_real(p.residual)]),
                    None => row.extend([String::new(), String::new(), String::new()]),
                }
            }
            row.push(r.distances.first().map(|d| fmt_real(d.2)).unwrap_or_default());
            row.push(String::new());
        }
        Err(e) => {
            row.push("failed".into());
            row.extend(std::iter::repeat_n(String::new(), SWEEP_COLUMNS.len() - 4));
            row.push(e.to_string());
        }
    }
    row
}

fn csv_bytes(rows: &[Vec<String>]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(SWEEP_COLUMNS).map_err(|e| CliError::Runtime(e.to_string()))?;
    for r in rows {
        w.write_record(r).map_err(|e| CliError::Runtime(e.to_string()))?;
    }
    w.into_inner().map_err(|e| CliError::Runtime(e.to_string()))
}

#[derive(Debug, Serialize)]
struct SweepSummary {
    rows: usize,
    succeeded: usize,
    failed: usize,
    two_solutions: usize,
    trivial_only: usize,
    inconclusive: usize,
}

#[derive(Debug, Serialize)]
struct SweepFileReport {
    meta: Meta,
    config: RunConfig,
    columns: Columns,
    summary: SweepSummary,
}

/// Writes one file per row under `sweep_rows/` as rows finish, then
/// `sweep.csv` (rows in `λ` order) and `sweep.toml`.
pub fn cmd_sweep(loaded: &Loaded, opts: &Options) -> Result<PathBuf, CliError> {
    let l = opts.apply(loaded);
    let lambdas = l.require_sweep()?;
    let out = opts.require_out(&l)?;
    let rows_dir = out.join("sweep_rows");
    fs::create_dir_all(&rows_dir).map_err(|e| io_err(&rows_dir, e))?;
    let base = l.model(lambdas[0])?;
    let cfg = l.solver_config(l.config.seed);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Runtime(format!("thread pool: {e}")))?;

    let clock = Instant::now();
    let rows: Vec<(Vec<String>, bool, f64)> = pool.install(|| {
        lambdas
            .par_iter()
            .enumerate()
            .map(|(i, &lambda)| {
                let t = Instant::now();
                let res = base
                    .with_lambda(lambda)
                    .map_err(CliError::from)
                    .and_then(|m| solve_both(&m, &cfg).map_err(CliError::from));
                let row = sweep_row(i, lambda, &res);
                let file = rows_dir.join(format!("row_{i:04}.csv"));
                let written = csv_bytes(std::slice::from_ref(&row)).and_then(|b| write_atomic(&file, &b));
                if let Err(e) = written {
                    log::warn!("row {i}: {e}");
                }
                info!("row {i} (lambda = {lambda}) done");
                (row, res.is_ok(), t.elapsed().as_secs_f64())
            })
            .collect()
    });
    let total = clock.elapsed().as_secs_f64();

    let count = |s: &str| rows.iter().filter(|r| r.0[2] == s).count();
    let summary = SweepSummary {
        rows: rows.len(),
        succeeded: rows.iter().filter(|r| r.1).count(),
        failed: count("failed"),
        two_solutions: count("two-solutions"),
        trivial_only: count("trivial-only"),
        inconclusive: count("inconclusive"),
    };
    let table: Vec<Vec<String>> = rows.iter().map(|r| r.0.clone()).collect();
    let csv_path = out.join("sweep.csv");
    write_atomic(&csv_path, &csv_bytes(&table)?)?;
    let rep = SweepFileReport {
        meta: Meta::new("sweep"),
        config: l.config.clone(),
        columns: Columns {
            coefficients: None,
            samples: None,
            sweep: Some(SWEEP_COLUMNS.iter().map(|s| s.to_string()).collect()),
        },
        summary,
    };
    write_toml(&out.join("sweep.toml"), &rep)?;
    let mut stages: Vec<Timing> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| Timing {
            stage: format!("row_{i}"),
            seconds: r.2,
        })
        .collect();
    stages.push(Timing {
        stage: "total".into(),
        seconds: total,
    });
    write_timings(&out.join("sweep_timings.toml"), stages)?;

    let s = &rep.summary;
    println!(
        "{} rows: {} two-solutions, {} trivial-only, {} inconclusive, {} failed",
        s.rows, s.two_solutions, s.trivial_only, s.inconclusive, s.failed
    );
    println!("wrote {}", csv_path.display());
    if s.succeeded == 0 {
        return Err(CliError::Runtime("every sweep row failed".into()));
    }
    Ok(csv_path)
}

#[derive(Debug, Serialize)]
struct CheckReport {
    name: String,
    measured: f64,
    tolerance: f64,
    passed: bool,
}

#[derive(Debug, Serialize)]
struct VerifyFileReport {
    meta: Meta,
    config: RunConfig,
    passed: bool,
    checks: Vec<CheckReport>,
}

/// Runs the invariant suite; `Ok` iff every check passes. The report goes to
/// `verify.toml` when an output directory is known.
pub fn cmd_verify(loaded: &Loaded, opts: &Options) -> Result<Vec<Check>, CliError> {
    let l = opts.apply(loaded);
    let c = &l.config;
    let settings = VerifySettings {
        domain: l.spectral_domain()?,
        modes: c.modes,
        quad_points: c.quad_points,
        nonlinearity: l.nonlinearity()?,
        lambda: c.verify.lambda,
        samples: c.verify.samples,
        seed: c.seed,
    };
    let checks = run_suite(&settings)?;
    let passed = checks.iter().all(|k| k.passed);
    for k in &checks {
        println!(
            "{:<4} {:<32} measured = {:.3e}  tolerance = {:.1e}",
            if k.passed { "ok" } else { "FAIL" },
            k.name,
            k.measured,
            k.tolerance
        );
    }
    if let Some(dir) = opts.out_dir(&l) {
        fs::create_dir_all(&dir).map_err(|e| config_err(format!("output directory {}: {e}", dir.display())))?;
        let rep = VerifyFileReport {
            meta: Meta::new("verify"),
            config: c.clone(),
            passed,
            checks: checks
                .iter()
                .map(|k| CheckReport {
                    name: k.name.clone(),
                    measured: k.measured,
                    tolerance: k.tolerance,
                    passed: k.passed,
                })
                .collect(),
        };
        write_toml(&dir.join("verify.toml"), &rep)?;
    }
    if !passed {
        let failed: Vec<&str> = checks.iter().filter(|k| !k.passed).map(|k| k.name.as_str()).collect();
        return Err(CliError::Runtime(format!("checks failed: {}", failed.join(", "))));
    }
    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn failed_sweep_row_keeps_its_lambda_and_error() {
        let row = sweep_row(3, 2.5, &Err(CliError::Runtime("mountain_pass: diverged, badly".into())));
        assert_eq!(row.len(), SWEEP_COLUMNS.len());
        assert_eq!(row[0], "3");
        assert_eq!(row[1].parse::<f64>().unwrap(), 2.5);
        assert_eq!(row[2], "failed");
        assert_eq!(row[13], "mountain_pass: diverged, badly");
        let bytes = csv_bytes(&[row]).unwrap();
        assert!(String::from_utf8(bytes).unwrap().ends_with("\"mountain_pass: diverged, badly\"\n"));
    }
}
