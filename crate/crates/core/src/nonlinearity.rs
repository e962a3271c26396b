//! The nonlinear term `f`, its primitive `F(t) = ∫₀ᵗ f`, finite-sample
//! checks of the growth hypotheses, and the constant
//! `c_f = max_{t≠0} |f(t)|/|t|`.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::{golden_max, log_grid, Scalar};

pub type ScalarFn<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

/// Tolerance of the adaptive Simpson rule used when no analytic primitive is
/// available.
pub const SIMPSON_TOL: f64 = 1e-10;

/// Default truncation of the `c_f` supremum.
pub const DEFAULT_CF_TMAX: f64 = 1e4;
pub const DEFAULT_CF_GRID: usize = 2000;

#[derive(Clone)]
enum Primitive<T> {
    Analytic(ScalarFn<T>),
    Simpson,
}

/// Outcome of the finite-sample hypothesis checks, with the grids used.
#[derive(Clone, Debug, PartialEq)]
pub struct Hypotheses {
    /// `f(t)/t → 0` as `t → 0`, checked on `±near_zero`.
    pub superlinear_at_zero: bool,
    /// `f(t)/t → 0` as `|t| → ∞`, checked on `±far`.
    pub sublinear_at_infinity: bool,
    /// `sup F > 0`, checked by a scan up to `|t| ≤ 10⁴`.
    pub sign_condition: bool,
    pub near_zero: Vec<f64>,
    pub far: Vec<f64>,
    pub tolerance: f64,
}

/// Result of [`Nonlinearity::estimate_cf`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CfEstimate<T> {
    pub value: T,
    /// A maximiser of `|f(t)|/|t|`; positive when both signs tie.
    pub argmax: T,
}

/// The pair `(f, F)` plus metadata.
#[derive(Clone)]
pub struct Nonlinearity<T> {
    name: String,
    f: ScalarFn<T>,
    primitive: Primitive<T>,
    hypotheses: Hypotheses,
    cf: Option<CfEstimate<T>>,
}

impl<T: fmt::Debug> fmt::Debug for Nonlinearity<T> {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        fm.debug_struct("Nonlinearity")
            .field("name", &self.name)
            .field(
                "primitive",
                &match self.primitive {
                    Primitive::Analytic(_) => "analytic",
                    Primitive::Simpson => "adaptive-simpson",
                },
            )
            .field("hypotheses", &self.hypotheses)
            .field("cf", &self.cf)
            .finish()
    }
}

impl<T: Scalar> Nonlinearity<T> {
    /// Wraps a callable `f`; `primitive`, when given, must satisfy
    /// `F(0) = 0` and `F' = f`. Without it `F` is computed by adaptive
    /// Simpson quadrature.
    pub fn new(
        name: impl Into<String>,
        f: impl Fn(T) -> T + Send + Sync + 'static,
        primitive: Option<ScalarFn<T>>,
    ) -> Self {
        let mut out = Self {
            name: name.into(),
            f: Arc::new(f),
            primitive: primitive.map_or(Primitive::Simpson, Primitive::Analytic),
            hypotheses: Hypotheses {
                superlinear_at_zero: false,
                sublinear_at_infinity: false,
                sign_condition: false,
                near_zero: vec![],
                far: vec![],
                tolerance: 0.0,
            },
            cf: None,
        };
        out.hypotheses = out.check_hypotheses();
        out
    }

    /// Built-in models: `log-square` (`f(t) = log(1+t²)`) and `zero`.
    /// `custom` needs a table; use [`Nonlinearity::from_table_csv`].
    pub fn builtin(name: &str) -> Result<Self> {
        match name {
            "log-square" => Ok(Self::log_square()),
            "zero" => Ok(Self::new("zero", |_| T::zero(), Some(Arc::new(|_| T::zero())))),
            "custom" => Err(Error::InvalidArgument(
                "the custom nonlinearity needs a (t, f(t)) table".into(),
            )),
            other => Err(Error::UnknownNonlinearity(other.to_string())),
        }
    }

    /// `f(t) = log(1+t²)`, `F(t) = 2 arctan t + t log(1+t²) − 2t`.
    pub fn log_square() -> Self {
        Self::new(
            "log-square",
            |t: T| (t * t).ln_1p(),
            Some(Arc::new(|t: T| {
                T::lit(2.0) * t.atan() + t * (t * t).ln_1p() - T::lit(2.0) * t
            })),
        )
    }

    /// Natural cubic spline through tabulated `(t, f(t))`, held constant
    /// beyond the table; `F` is the exact integral of the spline.
    pub fn from_table(name: impl Into<String>, ts: Vec<T>, fs: Vec<T>) -> Result<Self> {
        let spline = Arc::new(CubicSpline::new(ts, fs)?);
        let offset = spline.integral_from_start(T::zero());
        let (s1, s2) = (spline.clone(), spline);
        Ok(Self::new(
            name,
            move |t| s1.eval(t),
            Some(Arc::new(move |t| s2.integral_from_start(t) - offset)),
        ))
    }

    /// Reads a two-column CSV `t,f` (a header row is accepted).
    pub fn from_table_csv(path: &Path) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_path(path)?;
        let (mut ts, mut fs) = (Vec::new(), Vec::new());
        for (row, rec) in rdr.records().enumerate() {
            let rec = rec?;
            if rec.len() < 2 {
                return Err(Error::InvalidArgument(format!(
                    "{}: row {} needs two columns",
                    path.display(),
                    row + 1
                )));
            }
            match (rec[0].parse::<f64>(), rec[1].parse::<f64>()) {
                (Ok(t), Ok(v)) => {
                    ts.push(T::lit(t));
                    fs.push(T::lit(v));
                }
                // header
                _ if row == 0 => continue,
                _ => {
                    return Err(Error::InvalidArgument(format!(
                        "{}: row {} is not numeric",
                        path.display(),
                        row + 1
                    )))
                }
            }
        }
        Self::from_table(format!("custom:{}", path.display()), ts, fs)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    #[inline]
    pub fn f(&self, t: T) -> T {
        (self.f)(t)
    }

    /// `F(t) = ∫₀ᵗ f`.
    pub fn primitive(&self, t: T) -> T {
        match &self.primitive {
            Primitive::Analytic(p) => p(t),
            Primitive::Simpson => adaptive_simpson(&*self.f, T::zero(), t, T::lit(SIMPSON_TOL)),
        }
    }

    pub fn has_analytic_primitive(&self) -> bool {
        matches!(self.primitive, Primitive::Analytic(_))
    }

    pub fn hypotheses(&self) -> &Hypotheses {
        &self.hypotheses
    }

    /// The cached `c_f`, if [`Nonlinearity::with_cf`] was called.
    pub fn cf(&self) -> Option<CfEstimate<T>> {
        self.cf
    }

    /// Estimates `c_f` and caches it on the returned value.
    pub fn with_cf(mut self, t_max: T, grid: usize) -> Result<Self> {
        self.cf = Some(self.estimate_cf(t_max, grid)?);
        Ok(self)
    }

    /// `f₊(t) = f(t)` for `t ≥ 0`, `0` otherwise; `F₊` likewise.
    pub fn positive_part(&self) -> Self {
        let (inner_f, inner_p) = (self.clone(), self.clone());
        Self::new(
            format!("{}+", self.name),
            move |t: T| if t >= T::zero() { inner_f.f(t) } else { T::zero() },
            Some(Arc::new(move |t: T| {
                if t >= T::zero() {
                    inner_p.primitive(t)
                } else {
                    T::zero()
                }
            })),
        )
    }

    fn check_hypotheses(&self) -> Hypotheses {
        let near_zero = vec![1e-3, 1e-4, 1e-5, 1e-6];
        let far = vec![1e4, 1e5, 1e6, 1e7];
        let tolerance = 1e-2;
        let trend_ok = |grid: &[f64]| {
            [1.0, -1.0].iter().all(|&sign| {
                let ratios: Vec<f64> = grid
                    .iter()
                    .map(|&t| {
                        let t = T::lit(sign * t);
                        (self.f(t) / t).abs().to_f64_lossy()
                    })
                    .collect();
                ratios.iter().all(|r| r.is_finite() && *r < tolerance)
                    && ratios.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12))
            })
        };
        Hypotheses {
            superlinear_at_zero: trend_ok(&near_zero),
            sublinear_at_infinity: trend_ok(&far),
            sign_condition: self.find_sign_witness(T::lit(DEFAULT_CF_TMAX)).is_some(),
            near_zero,
            far,
            tolerance,
        }
    }

    /// `c_f ≈ max |f(t)|/|t|` over a log grid on `[10⁻⁶, t_max]` (both signs),
    /// refined by golden section around the best cell.
    pub fn estimate_cf(&self, t_max: T, grid: usize) -> Result<CfEstimate<T>> {
        if !self.hypotheses.sublinear_at_infinity {
            return Err(Error::HypothesisNotMet(format!(
                "{} is not sublinear at infinity on the check grid; the c_f scan cannot be truncated",
                self.name
            )));
        }
        let t_min = T::lit(1e-6);
        if !(t_max > t_min) || grid < 2 {
            return Err(Error::InvalidArgument(format!(
                "c_f scan needs t_max > 1e-6 and at least 2 points (got {t_max}, {grid})"
            )));
        }
        let ts = log_grid(t_min, t_max, grid);
        let ratio = |t: T| (self.f(t) / t).abs();
        let mut best = (T::zero(), T::one(), 0usize);
        for sign in [T::one(), -T::one()] {
            for (i, &t) in ts.iter().enumerate() {
                let r = ratio(sign * t);
                // Strict comparison keeps the positive side on ties.
                if r > best.0 {
                    best = (r, sign, i);
                }
            }
        }
        let (grid_best, sign, i) = best;
        if grid_best <= T::zero() || !grid_best.is_finite() {
            return Err(Error::UndefinedCf);
        }
        let lo = ts[i.saturating_sub(1)].ln();
        let hi = ts[(i + 1).min(ts.len() - 1)].ln();
        let (x, refined) = golden_max(lo, hi, 200, |x: T| ratio(sign * x.exp()));
        let (value, argmax) = if refined > grid_best {
            (refined, sign * x.exp())
        } else {
            (grid_best, sign * ts[i])
        };
        Ok(CfEstimate { value, argmax })
    }

    /// Some `t̄` with `F(t̄) > 0` in `0 < |t| ≤ t_max`, or `None`.
    ///
    /// Among the scanned candidates the one minimising `t²/F(t)` is returned,
    /// which sets the natural scale for the threshold searches.
    pub fn find_sign_witness(&self, t_max: T) -> Option<T> {
        let t_min = T::lit(1e-6).min(t_max);
        let ts = log_grid(t_min, t_max, 600);
        let mut best: Option<(T, T)> = None;
        for sign in [T::one(), -T::one()] {
            for &t in &ts {
                let t = sign * t;
                let big_f = self.primitive(t);
                if big_f > T::zero() && big_f.is_finite() {
                    let score = t * t / big_f;
                    if best.is_none_or(|(s, _)| score < s) {
                        best = Some((score, t));
                    }
                }
            }
        }
        best.map(|(_, t)| t)
    }
}

/// Adaptive Simpson quadrature of `f` on `[a, b]` (`b < a` allowed).
pub fn adaptive_simpson<T: Scalar>(f: &dyn Fn(T) -> T, a: T, b: T, tol: T) -> T {
    if a == b {
        return T::zero();
    }
    let two = T::lit(2.0);
    let m = (a + b) / two;
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / T::lit(6.0) * (fa + T::lit(4.0) * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, 50)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<T: Scalar>(
    f: &dyn Fn(T) -> T,
    a: T,
    b: T,
    fa: T,
    fm: T,
    fb: T,
    whole: T,
    tol: T,
    depth: usize,
) -> T {
    let two = T::lit(2.0);
    let six = T::lit(6.0);
    let four = T::lit(4.0);
    let m = (a + b) / two;
    let (lm, rm) = ((a + m) / two, (m + b) / two);
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / six * (fa + four * flm + fm);
    let right = (b - m) / six * (fm + four * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= T::lit(15.0) * tol {
        return left + right + delta / T::lit(15.0);
    }
    simpson_step(f, a, m, fa, flm, fm, left, tol / two, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, tol / two, depth - 1)
}

/// Natural cubic spline with constant extension outside the knots.
#[derive(Clone, Debug)]
struct CubicSpline<T> {
    t: Vec<T>,
    y: Vec<T>,
    /// Second derivatives at the knots.
    m: Vec<T>,
    /// `∫_{t₀}^{tᵢ}` of the spline.
    cum: Vec<T>,
}

impl<T: Scalar> CubicSpline<T> {
    fn new(t: Vec<T>, y: Vec<T>) -> Result<Self> {
        if t.len() != y.len() {
            return Err(Error::LengthMismatch {
                expected: t.len(),
                got: y.len(),
            });
        }
        if t.len() < 2 {
            return Err(Error::InvalidArgument("spline table needs >= 2 rows".into()));
        }
        if t.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidArgument(
                "spline abscissae must be strictly increasing".into(),
            ));
        }
        let n = t.len();
        let two = T::lit(2.0);
        let six = T::lit(6.0);
        // Tridiagonal solve for interior second derivatives (Thomas).
        let mut m = vec![T::zero(); n];
        if n > 2 {
            let k = n - 2;
            let mut diag = vec![T::zero(); k];
            let mut rhs = vec![T::zero(); k];
            let mut upper = vec![T::zero(); k];
            for i in 1..n - 1 {
                let h0 = t[i] - t[i - 1];
                let h1 = t[i + 1] - t[i];
                diag[i - 1] = two * (h0 + h1);
                upper[i - 1] = h1;
                rhs[i - 1] = six * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
            }
            for i in 1..k {
                let lower = t[i + 1] - t[i];
                let w = lower / diag[i - 1];
                diag[i] = diag[i] - w * upper[i - 1];
                rhs[i] = rhs[i] - w * rhs[i - 1];
            }
            let mut sol = vec![T::zero(); k];
            sol[k - 1] = rhs[k - 1] / diag[k - 1];
            for i in (0..k - 1).rev() {
                sol[i] = (rhs[i] - upper[i] * sol[i + 1]) / diag[i];
            }
            m[1..n - 1].copy_from_slice(&sol);
        }
        let mut cum = vec![T::zero(); n];
        for i in 1..n {
            let h = t[i] - t[i - 1];
            let seg = h * (y[i - 1] + y[i]) / two - h * h * h * (m[i - 1] + m[i]) / T::lit(24.0);
            cum[i] = cum[i - 1] + seg;
        }
        Ok(Self { t, y, m, cum })
    }

    fn segment(&self, x: T) -> usize {
        match self.t.binary_search_by(|p| p.partial_cmp(&x).unwrap()) {
            Ok(i) => i.min(self.t.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.t.len() - 2),
        }
    }

    fn eval(&self, x: T) -> T {
        let n = self.t.len();
        if x <= self.t[0] {
            return self.y[0];
        }
        if x >= self.t[n - 1] {
            return self.y[n - 1];
        }
        let i = self.segment(x);
        let h = self.t[i + 1] - self.t[i];
        let a = (self.t[i + 1] - x) / h;
        let b = (x - self.t[i]) / h;
        let six = T::lit(6.0);
        a * self.y[i]
            + b * self.y[i + 1]
            + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / six
    }

    /// `∫_{t₀}^{x}` of the (extended) spline.
    fn integral_from_start(&self, x: T) -> T {
        let n = self.t.len();
        if x <= self.t[0] {
            return (x - self.t[0]) * self.y[0];
        }
        if x >= self.t[n - 1] {
            return self.cum[n - 1] + (x - self.t[n - 1]) * self.y[n - 1];
        }
        let i = self.segment(x);
        let h = self.t[i + 1] - self.t[i];
        let s = x - self.t[i];
        let two = T::lit(2.0);
        let four = T::lit(4.0);
        let six = T::lit(6.0);
        let (yi, yj, mi, mj) = (self.y[i], self.y[i + 1], self.m[i], self.m[i + 1]);
        // Antiderivative of the standard cubic form in the local coordinate s.
        let a_int = h / two * (T::one() - (h - s) * (h - s) / (h * h));
        let b_int = s * s / (two * h);
        let a3_int = h / four * (T::one() - ((h - s) / h).powi(4));
        let b3_int = s.powi(4) / (four * h * h * h);
        self.cum[i]
            + yi * a_int
            + yj * b_int
            + (mi * (a3_int - a_int) + mj * (b3_int - b_int)) * h * h / six
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    #[test]
    fn log_square_primitive_at_one() {
        let g = Nonlinearity::<f64>::log_square();
        let want = PI / 2.0 + 2f64.ln() - 2.0;
        assert!((g.primitive(1.0) - want).abs() < 1e-15);
        assert_eq!(g.primitive(0.0), 0.0);
    }

    #[test]
    fn log_square_derivative_matches_finite_difference() {
        let g = Nonlinearity::<f64>::log_square();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..50 {
            let t: f64 = rng.gen_range(-20.0..20.0);
            if t.abs() < 0.05 {
                continue;
            }
            let h = 1e-5 * t.abs().max(1.0);
            let fd = (g.primitive(t + h) - g.primitive(t - h)) / (2.0 * h);
            assert!((fd - g.f(t)).abs() < 1e-6 * g.f(t).abs(), "t={t}");
        }
    }

    #[test]
    fn analytic_primitive_matches_simpson() {
        let g = Nonlinearity::<f64>::log_square();
        let mut rng = ChaCha8Rng::seed_from_u64(40);
        for _ in 0..100 {
            let t: f64 = rng.gen_range(-50.0..50.0);
            let q = adaptive_simpson(&|s| g.f(s), 0.0, t, SIMPSON_TOL);
            let a = g.primitive(t);
            assert!((q - a).abs() <= 1e-8 * a.abs().max(1e-12), "t={t}: {q} vs {a}");
        }
    }

    #[test]
    fn zero_model() {
        let z = Nonlinearity::<f64>::builtin("zero").unwrap();
        assert_eq!(z.primitive(3.0), 0.0);
        assert!(!z.hypotheses().sign_condition);
        assert!(matches!(z.estimate_cf(1e4, 100), Err(Error::UndefinedCf)));
        assert!(z.find_sign_witness(1e4).is_none());
    }

    #[test]
    fn unknown_and_custom_without_table() {
        assert!(matches!(
            Nonlinearity::<f64>::builtin("cubic"),
            Err(Error::UnknownNonlinearity(_))
        ));
        assert!(Nonlinearity::<f64>::builtin("custom").is_err());
    }

    #[test]
    fn log_square_hypotheses() {
        let g = Nonlinearity::<f64>::log_square();
        let h = g.hypotheses();
        assert!(h.superlinear_at_zero && h.sublinear_at_infinity && h.sign_condition);
        for t in [1e-3, 1e-4] {
            assert!((g.f(t) / t).abs() < 1e-2);
        }
        for t in [1e3, 1e4] {
            assert!((g.f(t) / t).abs() < 2e-2);
        }
        assert!(g.f(1e4) / 1e4 < g.f(1e3) / 1e3);
    }

    #[test]
    fn positive_part() {
        let g = Nonlinearity::<f64>::log_square();
        let p = g.positive_part();
        assert_eq!(p.f(-1.0), 0.0);
        assert_eq!(p.primitive(-5.0), 0.0);
        for t in [0.0, 0.5, 3.0, 17.0] {
            assert_eq!(p.f(t), g.f(t));
            assert_eq!(p.primitive(t), g.primitive(t));
        }
    }

    #[test]
    fn cf_gaussian_times_t() {
        let g = Nonlinearity::<f64>::new("t exp(-t^2)", |t| t * (-t * t).exp(), None);
        let est = g.estimate_cf(1e4, 2000).unwrap();
        assert!((est.value - 1.0).abs() < 1e-4);
    }

    /// Independent brute-force scan at ten times the resolution.
    fn brute_cf(g: &Nonlinearity<f64>, t_max: f64, points: usize) -> f64 {
        let (a, b) = (1e-6f64.ln(), t_max.ln());
        (0..points)
            .map(|i| (a + (b - a) * i as f64 / (points - 1) as f64).exp())
            .flat_map(|t| [t, -t])
            .map(|t| (g.f(t) / t).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn cf_log_square_matches_brute_force() {
        let g = Nonlinearity::<f64>::log_square();
        let est = g.estimate_cf(1e4, 2000).unwrap();
        let brute = brute_cf(&g, 1e4, 200_000);
        assert!((est.value - brute).abs() <= 1e-6 * brute);
        assert!(est.argmax > 0.0);
        assert!((est.argmax - 1.980_291_330_8).abs() < 1e-4);
    }

    #[test]
    fn cf_monotone_in_range_and_resolution() {
        let g = Nonlinearity::<f64>::log_square();
        let mut prev = 0.0;
        for t_max in [1.0, 2.0, 10.0, 1e3, 1e4] {
            let v = g.estimate_cf(t_max, 500).unwrap().value;
            assert!(v >= prev * (1.0 - 1e-12), "t_max={t_max}");
            prev = v;
        }
        let mut prev = 0.0;
        for n in [10, 50, 200, 1000, 4000] {
            let v = g.estimate_cf(1e4, n).unwrap().value;
            assert!(v >= prev * (1.0 - 1e-12), "n={n}");
            prev = v;
        }
    }

    #[test]
    fn cf_requires_sublinearity() {
        let g = Nonlinearity::<f64>::new("linear", |t| t, None);
        assert!(matches!(g.estimate_cf(1e4, 100), Err(Error::HypothesisNotMet(_))));
    }

    #[test]
    fn cf_bounds_f_on_grid() {
        let g = Nonlinearity::<f64>::log_square().with_cf(1e4, 2000).unwrap();
        let cf = g.cf().unwrap().value;
        for i in 0..2000 {
            let t = -50.0 + 0.05 * i as f64;
            assert!(g.f(t).abs() <= cf * t.abs() * (1.0 + 1e-12));
        }
    }

    #[test]
    fn sign_witness() {
        let g = Nonlinearity::<f64>::log_square();
        assert!(g.primitive(3.0) > 0.0);
        let t = g.find_sign_witness(1e4).unwrap();
        assert!(g.primitive(t) > 0.0);

        let neg = Nonlinearity::<f64>::new("-t exp(-|t|)", |t| -t * (-t.abs()).exp(), None);
        assert!(neg.find_sign_witness(50.0).is_none());
        assert!(!neg.hypotheses().sign_condition);
    }

    #[test]
    fn spline_table_reproduces_smooth_function() {
        let ts: Vec<f64> = (0..=400).map(|i| -20.0 + 0.1 * i as f64).collect();
        let fs: Vec<f64> = ts.iter().map(|t| (t * t).ln_1p()).collect();
        let g = Nonlinearity::from_table("tab", ts, fs).unwrap();
        let exact = Nonlinearity::<f64>::log_square();
        for t in [-7.33, -1.0, 0.0, 0.37, 2.5, 11.1] {
            assert!((g.f(t) - exact.f(t)).abs() < 1e-4);
            assert!((g.primitive(t) - exact.primitive(t)).abs() < 1e-4 * exact.primitive(t).abs().max(1.0));
        }
        assert_eq!(g.primitive(0.0), 0.0);
        // Spline primitive agrees with quadrature of the spline itself.
        for t in [-19.0, -3.3, 4.4, 25.0] {
            let q = adaptive_simpson(&|s| g.f(s), 0.0, t, 1e-11);
            assert!((q - g.primitive(t)).abs() < 1e-7 * q.abs().max(1.0), "t={t}");
        }
    }

    #[test]
    fn spline_rejects_bad_tables() {
        assert!(Nonlinearity::<f64>::from_table("x", vec![0.0], vec![0.0]).is_err());
        assert!(Nonlinearity::<f64>::from_table("x", vec![0.0, 0.0], vec![0.0, 1.0]).is_err());
        assert!(Nonlinearity::<f64>::from_table("x", vec![0.0, 1.0], vec![0.0]).is_err());
    }

    #[test]
    fn f32_log_square() {
        let g = Nonlinearity::<f32>::log_square();
        let want = std::f32::consts::FRAC_PI_2 + 2f32.ln() - 2.0;
        assert!((g.primitive(1.0) - want).abs() < 1e-6);
        let est = g.estimate_cf(1e4, 500).unwrap();
        assert!((est.value - 0.804_742_34).abs() < 1e-5);
    }
}
