//! Run configuration: one TOML file per run, every field defaulted so that
//! the serialised form is the fully resolved configuration.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use halfspec::nonlinearity::{DEFAULT_CF_GRID, DEFAULT_CF_TMAX};
use halfspec::thresholds::WeightBounds;
use halfspec::{BasisTable, Domain64, Model64, Nonlinearity64, QuadratureGrid64, SolverConfig64, SpectralBasis, Weight};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum DomainSpec {
    Interval { lengths: Vec<f64> },
    Rectangle { lengths: Vec<f64> },
    Ball { dim: usize, radius: f64 },
}

impl Default for DomainSpec {
    fn default() -> Self {
        DomainSpec::Interval { lengths: vec![PI] }
    }
}

impl DomainSpec {
    pub fn build(&self) -> Result<Domain64, CliError> {
        let d = match self {
            DomainSpec::Interval { lengths } => match lengths.as_slice() {
                [l] => Domain64::interval(*l),
                _ => return Err(config_err("interval needs exactly one length")),
            },
            DomainSpec::Rectangle { lengths } => match lengths.as_slice() {
                [a, b] => Domain64::rectangle(*a, *b),
                _ => return Err(config_err("rectangle needs exactly two lengths")),
            },
            DomainSpec::Ball { dim, radius } => Domain64::ball(*dim, *radius),
        };
        d.map_err(|e| config_err(format!("domain: {e}")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NonlinearitySpec {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<String>,
}

impl Default for NonlinearitySpec {
    fn default() -> Self {
        Self {
            name: "log-square".into(),
            table: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum BetaSpec {
    Constant { value: f64 },
    Table { path: String },
}

impl Default for BetaSpec {
    fn default() -> Self {
        BetaSpec::Constant { value: 1.0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Linear,
    Log,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub min: f64,
    pub max: f64,
    pub count: usize,
    #[serde(default = "linear")]
    pub scale: Scale,
}

fn linear() -> Scale {
    Scale::Linear
}

impl SweepSpec {
    /// The sweep values in increasing order.
    pub fn values(&self) -> Result<Vec<f64>, CliError> {
        if self.count == 0 {
            return Err(config_err("lambda_sweep.count must be >= 1"));
        }
        if !(self.min.is_finite() && self.max.is_finite()) || self.max < self.min || self.min < 0.0 {
            return Err(config_err(format!(
                "lambda_sweep range [{}, {}] is empty or invalid",
                self.min, self.max
            )));
        }
        if self.count == 1 {
            return Ok(vec![self.min]);
        }
        let n = (self.count - 1) as f64;
        Ok(match self.scale {
            Scale::Linear => (0..self.count)
                .map(|i| self.min + (self.max - self.min) * i as f64 / n)
                .collect(),
            Scale::Log => {
                if self.min <= 0.0 {
                    return Err(config_err("log-scale sweep needs min > 0"));
                }
                let (a, b) = (self.min.ln(), self.max.ln());
                (0..self.count).map(|i| (a + (b - a) * i as f64 / n).exp()).collect()
            }
        })
    }
}

/// Solver knobs; the seed comes from the top-level `seed`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSpec {
    pub max_iters: usize,
    pub grad_tol: f64,
    pub path_points: usize,
    pub redistribute_every: usize,
    pub initial_step: f64,
    pub backtrack: f64,
    pub armijo: f64,
    pub max_backtracks: usize,
    pub restarts: usize,
    /// Resolved to `10³ · grad_tol` when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub separation_tol: Option<f64>,
}

impl Default for SolverSpec {
    fn default() -> Self {
        let d = SolverConfig64::default();
        Self {
            max_iters: d.max_iters,
            grad_tol: d.grad_tol,
            path_points: d.path_points,
            redistribute_every: d.redistribute_every,
            initial_step: d.initial_step,
            backtrack: d.backtrack,
            armijo: d.armijo,
            max_backtracks: d.max_backtracks,
            restarts: d.restarts,
            separation_tol: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ThresholdSpec {
    /// Scan range and resolution of the `c_f` estimate.
    pub cf_tmax: f64,
    pub cf_grid: usize,
    /// Random trial fields in the `λ*` estimate.
    pub lambda_star_trials: usize,
    /// Upper end of the `t` scan for the ball criterion.
    pub ball_tmax: f64,
}

impl Default for ThresholdSpec {
    fn default() -> Self {
        Self {
            cf_tmax: DEFAULT_CF_TMAX,
            cf_grid: DEFAULT_CF_GRID,
            lambda_star_trials: 50,
            ball_tmax: 1e4,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifySpec {
    pub samples: usize,
    /// `λ` of the model used by the gradient and growth checks.
    pub lambda: f64,
}

impl Default for VerifySpec {
    fn default() -> Self {
        Self {
            samples: 200,
            lambda: 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub modes: usize,
    pub quad_points: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    /// Where reports go; overridden by `--out`. Not part of the report.
    #[serde(skip_serializing)]
    pub output: Option<String>,
    pub domain: DomainSpec,
    pub nonlinearity: NonlinearitySpec,
    pub beta: BetaSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_sweep: Option<SweepSpec>,
    pub solver: SolverSpec,
    pub thresholds: ThresholdSpec,
    pub verify: VerifySpec,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            modes: 32,
            quad_points: 80,
            lambda: None,
            output: None,
            domain: DomainSpec::default(),
            nonlinearity: NonlinearitySpec::default(),
            beta: BetaSpec::default(),
            lambda_sweep: None,
            solver: SolverSpec::default(),
            thresholds: ThresholdSpec::default(),
            verify: VerifySpec::default(),
        }
    }
}

pub(crate) fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

/// A parsed configuration plus the directory its relative paths refer to.
#[derive(Clone, Debug)]
pub struct Loaded {
    pub config: RunConfig,
    pub base_dir: PathBuf,
}

impl Loaded {
    pub fn from_str(text: &str, base_dir: impl Into<PathBuf>) -> Result<Self, CliError> {
        let mut config: RunConfig = toml::from_str(text).map_err(|e| config_err(e.to_string()))?;
        if config.solver.separation_tol.is_none() {
            config.solver.separation_tol = Some(1e3 * config.solver.grad_tol);
        }
        let out = Self {
            config,
            base_dir: base_dir.into(),
        };
        out.validate()?;
        Ok(out)
    }

    pub fn from_path(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::from_str(&text, base).map_err(|e| match e {
            CliError::Config(m) => config_err(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    /// All defaults: the `(0, π)` interval with `J = 32`, `M = 80`.
    pub fn defaults() -> Self {
        Self::from_str("", ".").expect("defaults are valid")
    }

    fn validate(&self) -> Result<(), CliError> {
        let c = &self.config;
        self.domain()?;
        if c.modes == 0 {
            return Err(config_err("modes must be >= 1"));
        }
        if c.quad_points < 2 {
            return Err(config_err("quad_points must be >= 2"));
        }
        if let Some(l) = c.lambda {
            if !(l.is_finite() && l >= 0.0) {
                return Err(config_err(format!("lambda must be finite and >= 0, got {l}")));
            }
        }
        if let Some(s) = &c.lambda_sweep {
            s.values()?;
        }
        match c.nonlinearity.name.as_str() {
            "custom" if c.nonlinearity.table.is_none() => {
                return Err(config_err("nonlinearity `custom` needs `table`"))
            }
            "custom" | "log-square" | "zero" => {}
            other => return Err(config_err(format!("unknown nonlinearity `{other}`"))),
        }
        if let BetaSpec::Constant { value } = c.beta {
            WeightBounds::new(value, value).map_err(|e| config_err(format!("beta: {e}")))?;
        }
        self.solver_config(c.seed).validate().map_err(|e| config_err(format!("solver: {e}")))?;
        let t = &c.thresholds;
        if !(t.cf_tmax > 0.0) || t.cf_grid < 2 || !(t.ball_tmax > 0.0) {
            return Err(config_err("thresholds: cf_tmax, ball_tmax > 0 and cf_grid >= 2 required"));
        }
        if c.verify.samples == 0 {
            return Err(config_err("verify.samples must be >= 1"));
        }
        Ok(())
    }

    pub fn resolve(&self, rel: &str) -> PathBuf {
        self.base_dir.join(rel)
    }

    pub fn domain(&self) -> Result<Domain64, CliError> {
        self.config.domain.build()
    }

    /// Interval or rectangle; the spectral basis exists only there.
    pub fn spectral_domain(&self) -> Result<Domain64, CliError> {
        let d = self.domain()?;
        if matches!(d, Domain64::Ball { .. }) {
            return Err(config_err("this command needs an interval or rectangle domain"));
        }
        Ok(d)
    }

    pub fn nonlinearity(&self) -> Result<Nonlinearity64, CliError> {
        let spec = &self.config.nonlinearity;
        match (spec.name.as_str(), &spec.table) {
            ("custom", Some(t)) => Nonlinearity64::from_table_csv(&self.resolve(t))
                .map_err(|e| config_err(format!("nonlinearity table: {e}"))),
            (name, _) => Nonlinearity64::builtin(name).map_err(|e| config_err(e.to_string())),
        }
    }

    pub fn weight(&self, grid: &QuadratureGrid64) -> Result<Weight<f64>, CliError> {
        match &self.config.beta {
            BetaSpec::Constant { value } => Weight::constant(*value, grid),
            BetaSpec::Table { path } => Weight::from_table_csv(&self.resolve(path), grid),
        }
        .map_err(|e| config_err(format!("beta: {e}")))
    }

    /// Bounds of `β`; a table needs a grid to be sampled on.
    pub fn weight_bounds(&self, grid: Option<&QuadratureGrid64>) -> Result<WeightBounds<f64>, CliError> {
        match (&self.config.beta, grid) {
            (BetaSpec::Constant { value }, _) => {
                WeightBounds::new(*value, *value).map_err(|e| config_err(format!("beta: {e}")))
            }
            (BetaSpec::Table { .. }, Some(g)) => Ok(WeightBounds::from(&self.weight(g)?)),
            (BetaSpec::Table { .. }, None) => {
                Err(config_err("a tabulated beta needs an interval or rectangle domain"))
            }
        }
    }

    pub fn model(&self, lambda: f64) -> Result<Model64, CliError> {
        let c = &self.config;
        let nl = self.nonlinearity()?;
        let domain = self.spectral_domain()?;
        let basis = SpectralBasis::new(domain.clone(), c.modes).map_err(|e| config_err(e.to_string()))?;
        let grid = QuadratureGrid64::new(domain, c.quad_points).map_err(|e| config_err(e.to_string()))?;
        let weight = self.weight(&grid)?;
        let table = BasisTable::new(Arc::new(basis), Arc::new(grid)).map_err(|e| config_err(e.to_string()))?;
        Model64::new(Arc::new(table), weight, nl, lambda).map_err(|e| config_err(e.to_string()))
    }

    pub fn solver_config(&self, seed: u64) -> SolverConfig64 {
        let s = &self.config.solver;
        SolverConfig64 {
            max_iters: s.max_iters,
            grad_tol: s.grad_tol,
            path_points: s.path_points,
            redistribute_every: s.redistribute_every,
            initial_step: s.initial_step,
            backtrack: s.backtrack,
            armijo: s.armijo,
            max_backtracks: s.max_backtracks,
            restarts: s.restarts,
            seed,
            separation_tol: s.separation_tol,
        }
    }

    pub fn require_lambda(&self) -> Result<f64, CliError> {
        self.config
            .lambda
            .ok_or_else(|| config_err("`lambda` is required for this command"))
    }

    pub fn require_sweep(&self) -> Result<Vec<f64>, CliError> {
        self.config
            .lambda_sweep
            .as_ref()
            .ok_or_else(|| config_err("`[lambda_sweep]` is required for this command"))?
            .values()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_resolves_to_defaults() {
        let l = Loaded::defaults();
        assert_eq!(l.config.modes, 32);
        assert_eq!(l.config.domain, DomainSpec::Interval { lengths: vec![PI] });
        assert_eq!(l.config.solver.separation_tol, Some(1e-5));
    }

    #[test]
    fn resolved_config_round_trips() {
        let text = r#"
            seed = 4
            modes = 16
            quad_points = 42
            lambda = 30.5
            domain = { kind = "rectangle", lengths = [3.0, 2.0] }
            [lambda_sweep]
            min = 1.0
            max = 100.0
            count = 3
            scale = "log"
            [solver]
            restarts = 2
        "#;
        let l = Loaded::from_str(text, ".").unwrap();
        let back = toml::to_string(&l.config).unwrap();
        let again = Loaded::from_str(&back, ".").unwrap();
        assert_eq!(l.config, again.config);
        let v = l.require_sweep().unwrap();
        assert!((v[1] - 10.0).abs() < 1e-12);
    }

    #[test]
    fn bad_configs_are_rejected() {
        for text in [
            "modes = 0",
            "bogus = 1",
            "domain = { kind = \"rectangle\", lengths = [1.0] }",
            "domain = { kind = \"torus\" }",
            "nonlinearity = { name = \"custom\" }",
            "beta = { kind = \"constant\", value = -1.0 }",
            "[lambda_sweep]\nmin = 2.0\nmax = 1.0\ncount = 3",
            "[lambda_sweep]\nmin = 1.0\nmax = 2.0\ncount = 0",
            "[solver]\nbacktrack = 2.0",
            "lambda = -1.0",
        ] {
            assert!(
                matches!(Loaded::from_str(text, "."), Err(CliError::Config(_))),
                "{text}"
            );
        }
    }

    #[test]
    fn linear_sweep_endpoints() {
        let s = SweepSpec {
            min: 1.0,
            max: 3.0,
            count: 5,
            scale: Scale::Linear,
        };
        assert_eq!(s.values().unwrap(), vec![1.0, 1.5, 2.0, 2.5, 3.0]);
    }
}
