//! Serialised report structures and atomic file output.

use std::fs;
use std::io::Write;
use std::path::Path;

use halfspec::io::{write_field_csv, write_samples_csv};
use halfspec::solvers::StartKind;
use halfspec::thresholds::{LambdaStarEstimate, NonexistenceCheck, TrialSource};
use halfspec::{CriticalPoint64, Model64, SolveReport64, ThresholdCertificate64};
use serde::Serialize;

use crate::config::RunConfig;
use crate::CliError;

#[derive(Debug, Serialize)]
pub struct Meta {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
}

impl Meta {
    pub fn new(command: &'static str) -> Self {
        Self {
            tool: "halfspec",
            version: halfspec::VERSION,
            command,
        }
    }
}

/// Writes to a sibling temporary file, then renames over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".partial");
    let tmp = std::path::PathBuf::from(tmp);
    let mut f = fs::File::create(&tmp).map_err(|e| io_err(&tmp, e))?;
    f.write_all(bytes).map_err(|e| io_err(&tmp, e))?;
    f.sync_all().map_err(|e| io_err(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| io_err(path, e))
}

pub fn write_toml<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let text = toml::to_string(value).map_err(|e| CliError::Runtime(format!("serialising report: {e}")))?;
    write_atomic(path, text.as_bytes())
}

pub(crate) fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Runtime(format!("{}: {e}", path.display()))
}

#[derive(Debug, Serialize)]
pub struct ConeReport {
    pub center: Vec<f64>,
    pub radius: f64,
    pub sigma: f64,
    pub height: f64,
}

#[derive(Debug, Serialize)]
pub struct SearchReport {
    pub heights: usize,
    pub height_min: f64,
    pub height_max: f64,
    pub sigmas: usize,
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub radius_fractions: Vec<f64>,
}

#[derive(Debug, Serialize)]
pub struct PsiWitnessReport {
    pub height: f64,
    pub sigma: f64,
    pub margin: f64,
    pub relative_margin: f64,
}

#[derive(Debug, Serialize)]
pub struct CertificateReport {
    pub sign_witness: f64,
    pub cf: f64,
    pub cf_argmax: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda1: Option<f64>,
    pub beta_essinf: f64,
    pub beta_sup: f64,
    /// Below this only the trivial solution exists.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_nonexist: Option<f64>,
    /// Above this two nontrivial solutions exist.
    pub lambda_zero: f64,
    pub lambda_zero_margin: f64,
    pub max_abs_primitive: f64,
    pub cone: ConeReport,
    pub psi_witness: PsiWitnessReport,
    pub search: SearchReport,
}

impl From<&ThresholdCertificate64> for CertificateReport {
    fn from(c: &ThresholdCertificate64) -> Self {
        let l0 = &c.lambda_zero;
        let s = &c.search;
        let span = |v: &[f64]| (v.iter().copied().fold(f64::INFINITY, f64::min), v.iter().copied().fold(f64::NEG_INFINITY, f64::max));
        let (hmin, hmax) = span(&s.heights);
        let (smin, smax) = span(&s.sigmas);
        Self {
            sign_witness: c.sign_witness,
            cf: c.inputs.cf,
            cf_argmax: c.inputs.cf_argmax,
            lambda1: c.inputs.lambda1,
            beta_essinf: c.inputs.beta_essinf,
            beta_sup: c.inputs.beta_sup,
            lambda_nonexist: c.lambda_nonexist,
            lambda_zero: l0.value,
            lambda_zero_margin: l0.margin,
            max_abs_primitive: l0.max_abs_primitive,
            cone: ConeReport {
                center: l0.cone.center.clone(),
                radius: l0.cone.radius,
                sigma: l0.cone.sigma,
                height: l0.cone.height,
            },
            psi_witness: PsiWitnessReport {
                height: c.psi_witness.height,
                sigma: c.psi_witness.sigma,
                margin: c.psi_witness.margin,
                relative_margin: c.psi_witness.relative_margin,
            },
            search: SearchReport {
                heights: s.heights.len(),
                height_min: hmin,
                height_max: hmax,
                sigmas: s.sigmas.len(),
                sigma_min: smin,
                sigma_max: smax,
                radius_fractions: s.radius_fractions.clone(),
            },
        }
    }
}

#[derive(Debug, Serialize)]
pub struct LambdaStarReport {
    /// `min Φ/Ψ` over the trial fields; an upper bound on `λ*`.
    pub upper: f64,
    pub lower: f64,
    pub source: String,
    pub trials_with_positive_psi: usize,
    pub random_trials: usize,
}

impl LambdaStarReport {
    pub fn new(e: &LambdaStarEstimate<f64>, random_trials: usize) -> Self {
        let source = match &e.source {
            TrialSource::Cone(p) => format!("cone(radius={}, sigma={}, height={})", p.radius, p.sigma, p.height),
            TrialSource::Random { index, amplitude } => format!("random(index={index}, amplitude={amplitude})"),
        };
        Self {
            upper: e.upper,
            lower: e.lower,
            source,
            trials_with_positive_psi: e.trials_with_positive_psi,
            random_trials,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct BallReport {
    pub holds: bool,
    pub min_ratio: f64,
    pub zeta: f64,
    pub t0: f64,
}

#[derive(Debug, Serialize)]
pub struct ThresholdsReport {
    pub meta: Meta,
    pub config: RunConfig,
    pub certificate: CertificateReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_star: Option<LambdaStarReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ball: Option<BallReport>,
}

#[derive(Debug, Serialize)]
pub struct NonexistenceReport {
    pub product: f64,
    pub margin: f64,
    pub holds: bool,
}

impl From<&NonexistenceCheck<f64>> for NonexistenceReport {
    fn from(c: &NonexistenceCheck<f64>) -> Self {
        Self {
            product: c.product,
            margin: c.margin,
            holds: c.holds,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct PointReport {
    pub index: usize,
    pub kind: &'static str,
    pub energy: f64,
    pub residual: f64,
    pub h_norm: f64,
    pub iterations: usize,
    pub converged: bool,
    pub coefficients_file: String,
    pub samples_file: String,
}

#[derive(Debug, Serialize)]
pub struct DistanceReport {
    pub i: usize,
    pub j: usize,
    pub h_distance: f64,
}

#[derive(Debug, Serialize)]
pub struct SolveResult {
    pub lambda: f64,
    pub seed: u64,
    pub outcome: &'static str,
    pub start: &'static str,
    pub cf: f64,
    pub separation_tol: f64,
    pub nonexistence: NonexistenceReport,
    pub points: Vec<PointReport>,
    pub distances: Vec<DistanceReport>,
}

/// Column layouts of the CSV files a report refers to.
#[derive(Debug, Serialize)]
pub struct Columns {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Vec<String>>,
}

pub fn field_columns(dim: usize) -> (Vec<String>, Vec<String>) {
    let idx = |p: &str| -> Vec<String> {
        if dim == 1 {
            vec![p.to_string()]
        } else {
            (1..=dim).map(|i| format!("{p}{i}")).collect()
        }
    };
    let mut c = idx("m");
    c.push("coefficient".into());
    let mut s = idx("x");
    s.push("value".into());
    (c, s)
}

#[derive(Debug, Serialize)]
pub struct SolveFileReport {
    pub meta: Meta,
    pub config: RunConfig,
    pub columns: Columns,
    pub result: SolveResult,
}

pub fn start_str(s: StartKind) -> &'static str {
    match s {
        StartKind::Cone => "cone",
        StartKind::Random => "random",
    }
}

/// Writes the coefficient and grid-sample CSVs of one critical point.
pub fn write_point_files(
    model: &Model64,
    p: &CriticalPoint64,
    dir: &Path,
    stem: &str,
) -> Result<(String, String), CliError> {
    let coeffs = format!("{stem}_coefficients.csv");
    let samples = format!("{stem}_samples.csv");
    let mut buf = Vec::new();
    write_field_csv(&p.u, &mut buf).map_err(CliError::from)?;
    write_atomic(&dir.join(&coeffs), &buf)?;
    let mut buf = Vec::new();
    write_samples_csv(model.grid(), &p.u.sample_with(model.table()), &mut buf).map_err(CliError::from)?;
    write_atomic(&dir.join(&samples), &buf)?;
    Ok((coeffs, samples))
}

pub fn solve_result(r: &SolveReport64, files: Vec<(String, String)>) -> SolveResult {
    SolveResult {
        lambda: r.lambda,
        seed: r.seed,
        outcome: r.outcome.as_str(),
        start: start_str(r.start),
        cf: r.cf,
        separation_tol: r.separation_tol,
        nonexistence: (&r.nonexistence).into(),
        points: r
            .points
            .iter()
            .zip(files)
            .enumerate()
            .map(|(index, (p, (c, s)))| PointReport {
                index,
                kind: p.kind.as_str(),
                energy: p.energy,
                residual: p.residual,
                h_norm: p.u.h_half_norm(),
                iterations: p.iterations,
                converged: p.converged,
                coefficients_file: c,
                samples_file: s,
            })
            .collect(),
        distances: r
            .distances
            .iter()
            .map(|&(i, j, h_distance)| DistanceReport { i, j, h_distance })
            .collect(),
    }
}

/// Wall-clock stage times, kept out of the deterministic reports.
#[derive(Debug, Serialize)]
pub struct Timings {
    pub stages: Vec<Timing>,
}

#[derive(Debug, Serialize)]
pub struct Timing {
    pub stage: String,
    pub seconds: f64,
}
