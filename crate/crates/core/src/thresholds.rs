//! Closed-form thresholds and certificates.
//!
//! * `λ_nonexist = λ₁^{1/2} / (c_f ‖β‖_∞)`: below it only `u = 0` solves the
//!   problem.
//! * `λ₀`: an upper bound on `λ* = inf_{Ψ>0} Φ/Ψ` built from cone test
//!   functions `ω_σ^t` lifted to the cylinder as `e^{-y/2} ω_σ^t(x)`.
//! * `z_n(σ)` and `ζ(n, r)`: the specialisation of `λ₀` to balls, and the
//!   resulting condition `min_{F(t)>0} t²/F(t) < ζ(n, r)`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::domain::{unit_ball_volume, Domain, QuadratureGrid};
use crate::energy::{EnergyModel, Weight};
use crate::error::{Error, Result};
use crate::field::{random_coeffs, Field};
use crate::nonlinearity::Nonlinearity;
use crate::scalar::{golden_max, log_grid, Scalar};

/// Points used when scanning `max_{|t|≤|t₀|} |F(t)|`.
pub const PRIMITIVE_SCAN_POINTS: usize = 10_000;

/// `(essinf β, ‖β‖_∞)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeightBounds<T> {
    pub essinf: T,
    pub sup: T,
}

impl<T: Scalar> WeightBounds<T> {
    pub fn new(essinf: T, sup: T) -> Result<Self> {
        if !(essinf > T::zero()) || sup < essinf {
            return Err(Error::InvalidArgument(format!(
                "weight bounds need 0 < essinf <= sup, got ({essinf}, {sup})"
            )));
        }
        Ok(Self { essinf, sup })
    }

    pub fn unit() -> Self {
        Self {
            essinf: T::one(),
            sup: T::one(),
        }
    }
}

impl<T: Scalar> From<&Weight<T>> for WeightBounds<T> {
    fn from(w: &Weight<T>) -> Self {
        Self {
            essinf: w.essinf(),
            sup: w.sup_norm(),
        }
    }
}

/// `λ₁^{1/2} / (c_f ‖β‖_∞)`.
pub fn lambda_nonexist<T: Scalar>(lambda1: T, cf: T, beta_sup: T) -> Result<T> {
    if !(lambda1 > T::zero() && cf > T::zero() && beta_sup > T::zero()) {
        return Err(Error::InvalidArgument(format!(
            "lambda_nonexist needs positive inputs, got lambda1={lambda1}, c_f={cf}, |beta|={beta_sup}"
        )));
    }
    Ok(lambda1.sqrt() / (cf * beta_sup))
}

/// A-priori non-existence certificate for a model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NonexistenceCheck<T> {
    /// `λ c_f ‖β‖_∞ / √λ₁`.
    pub product: T,
    /// `1 − product`.
    pub margin: T,
    /// `product < 1`: every discrete weak solution satisfies
    /// `‖u‖² ≤ product·‖u‖²` and hence vanishes.
    pub holds: bool,
}

pub fn check_nonexistence<T: Scalar>(model: &EnergyModel<T>, cf: T) -> NonexistenceCheck<T> {
    let product = model.lambda() * cf * model.weight().sup_norm() / model.basis().lambda1().sqrt();
    NonexistenceCheck {
        product,
        margin: T::one() - product,
        holds: product < T::one(),
    }
}

/// Cone test function `ω_σ^t`: `t` on `B(x₀, στ)`, a linear ramp down to `0`
/// on the annulus, `0` outside `B(x₀, τ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConeParams<T> {
    pub center: Vec<T>,
    pub radius: T,
    pub sigma: T,
    pub height: T,
}

impl<T: Scalar> ConeParams<T> {
    pub fn new(center: Vec<T>, radius: T, sigma: T, height: T) -> Self {
        Self {
            center,
            radius,
            sigma,
            height,
        }
    }

    /// Centered at the inradius center with `τ = fraction · inradius`.
    pub fn centered(domain: &Domain<T>, fraction: T, sigma: T, height: T) -> Self {
        Self::new(domain.center(), fraction * domain.inradius(), sigma, height)
    }

    pub fn validate(&self, domain: &Domain<T>) -> Result<()> {
        if !(self.sigma > T::zero() && self.sigma < T::one()) {
            return Err(Error::SigmaOutOfRange {
                sigma: self.sigma.to_f64_lossy(),
                lo: 0.0,
            });
        }
        if !domain.contains_ball(&self.center, self.radius) {
            return Err(Error::Containment {
                center: self.center.iter().map(|c| c.to_f64_lossy()).collect(),
                radius: self.radius.to_f64_lossy(),
            });
        }
        Ok(())
    }

    fn distance(&self, x: &[T]) -> T {
        x.iter()
            .zip(&self.center)
            .map(|(&a, &b)| (a - b) * (a - b))
            .sum::<T>()
            .sqrt()
    }

    pub fn value(&self, x: &[T]) -> T {
        let r = self.distance(x);
        let tau = self.radius;
        if r >= tau {
            T::zero()
        } else if r <= self.sigma * tau {
            self.height
        } else {
            self.height * (tau - r) / ((T::one() - self.sigma) * tau)
        }
    }

    /// `|∇ω(x)|²`: constant `t²/((1−σ)τ)²` on the open annulus, zero elsewhere.
    pub fn grad_sq(&self, x: &[T]) -> T {
        let r = self.distance(x);
        let tau = self.radius;
        if r < tau && r > self.sigma * tau {
            let s = self.height / ((T::one() - self.sigma) * tau);
            s * s
        } else {
            T::zero()
        }
    }
}

/// Pointwise cone values at the grid nodes.
pub fn cone_field<T: Scalar>(params: &ConeParams<T>, grid: &QuadratureGrid<T>) -> Result<Vec<T>> {
    params.validate(grid.domain())?;
    Ok(grid.nodes().map(|x| params.value(x)).collect())
}

/// `∫|∇ω_σ^t|² = t² ωₙ τ^{n−2} (1−σⁿ)/(1−σ)²`.
pub fn cone_gradient_energy<T: Scalar>(params: &ConeParams<T>) -> Result<T> {
    let n = params.center.len();
    let omega = unit_ball_volume::<T>(n)?;
    let s = params.sigma;
    Ok(params.height.powi(2) * omega * params.radius.powi(n as i32 - 2)
        * (T::one() - s.powi(n as i32))
        / (T::one() - s).powi(2))
}

/// The same integral by quadrature of the piecewise gradient.
pub fn cone_gradient_energy_quadrature<T: Scalar>(
    params: &ConeParams<T>,
    grid: &QuadratureGrid<T>,
) -> Result<T> {
    params.validate(grid.domain())?;
    Ok(grid.integrate_fn(|x| params.grad_sq(x)))
}

/// Upper bound on `‖e^{-y/2} ω_σ^t‖²_X`:
/// `(ωₙ τ^{n−2}(1−σⁿ)/(1−σ)² + |Ω|/4) t²`.
pub fn cone_cylinder_norm_bound<T: Scalar>(params: &ConeParams<T>, domain: &Domain<T>) -> Result<T> {
    params.validate(domain)?;
    Ok(cone_gradient_energy(params)? + domain.measure() / T::lit(4.0) * params.height.powi(2))
}

/// `‖e^{-y/2} ω_σ^t‖²_X = ∫|∇ω|² + ¼∫ω²` (the y-integral `∫e^{-y} = 1` is
/// exact), with the x-integrals by quadrature.
pub fn cone_cylinder_norm_sq_quadrature<T: Scalar>(
    params: &ConeParams<T>,
    grid: &QuadratureGrid<T>,
) -> Result<T> {
    params.validate(grid.domain())?;
    Ok(grid.integrate_fn(|x| params.grad_sq(x) + params.value(x).powi(2) / T::lit(4.0)))
}

/// `max_{|t| ≤ |t₀|} |F(t)|` by a dense scan plus the endpoints.
pub fn max_abs_primitive<T: Scalar>(nl: &Nonlinearity<T>, t0: T) -> T {
    let a = t0.abs();
    let half = PRIMITIVE_SCAN_POINTS / 2;
    let mut best = nl.primitive(a).abs().max(nl.primitive(-a).abs());
    for i in 1..half {
        let t = a * T::from_usize_lossy(i) / T::from_usize_lossy(half);
        best = best.max(nl.primitive(t).abs()).max(nl.primitive(-t).abs());
    }
    best
}

/// Positivity margin `F(t₀)σⁿ essinf β − (1−σⁿ) max_{|t|≤|t₀|}|F| ‖β‖_∞`.
fn positivity_margin<T: Scalar>(
    f_t0: T,
    max_abs_f: T,
    sigma: T,
    n: usize,
    bounds: WeightBounds<T>,
) -> T {
    let sn = sigma.powi(n as i32);
    f_t0 * sn * bounds.essinf - (T::one() - sn) * max_abs_f * bounds.sup
}

/// Search grid for the cone parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct ConeSearch<T> {
    /// Plateau heights `t₀` (signed).
    pub heights: Vec<T>,
    pub sigmas: Vec<T>,
    /// Radii as fractions of the inradius, in `(0, 1]`.
    pub radius_fractions: Vec<T>,
}

impl<T: Scalar> ConeSearch<T> {
    /// 200 log-spaced heights on `[10⁻², 10²]·|t̄|` (sign of `t̄`), 100
    /// values of `σ` on `[0.05, 0.995]`, `τ ∈ {¼, ½, ¾, 1}·inradius`.
    pub fn around(sign_witness: T) -> Self {
        Self::with_counts(sign_witness, 200, 100)
    }

    pub fn with_counts(sign_witness: T, heights: usize, sigmas: usize) -> Self {
        let scale = sign_witness.abs();
        let sign = sign_witness.signum();
        let heights = log_grid(T::lit(1e-2) * scale, T::lit(1e2) * scale, heights)
            .into_iter()
            .map(|t| sign * t)
            .collect();
        let (lo, hi) = (T::lit(0.05), T::lit(0.995));
        let sigmas = if sigmas == 1 {
            vec![hi]
        } else {
            (0..sigmas)
                .map(|i| lo + (hi - lo) * T::from_usize_lossy(i) / T::from_usize_lossy(sigmas - 1))
                .collect()
        };
        Self {
            heights,
            sigmas,
            radius_fractions: vec![T::lit(0.25), T::lit(0.5), T::lit(0.75), T::one()],
        }
    }
}

/// The minimising witness of the `λ₀` search.
#[derive(Clone, Debug, PartialEq)]
pub struct LambdaZero<T> {
    pub value: T,
    pub cone: ConeParams<T>,
    /// Positivity margin (denominator factor) at the witness; always `> 0`.
    pub margin: T,
    pub max_abs_primitive: T,
}

/// `λ₀ = t₀² (ωₙτ^{n−2}(1−σ₀ⁿ)/(1−σ₀)² + |Ω|/4) / (2ωₙτⁿ · margin)`.
pub fn lambda_zero_formula<T: Scalar>(
    domain: &Domain<T>,
    cone: &ConeParams<T>,
    margin: T,
) -> Result<T> {
    let n = domain.dim();
    let omega = unit_ball_volume::<T>(n)?;
    let num = cone_cylinder_norm_bound(cone, domain)?;
    Ok(num / (T::lit(2.0) * omega * cone.radius.powi(n as i32) * margin))
}

/// Minimises `λ₀` over `search` with `x₀` at the inradius center, keeping
/// only cells with a positive margin.
pub fn lambda_zero<T: Scalar>(
    nl: &Nonlinearity<T>,
    bounds: WeightBounds<T>,
    domain: &Domain<T>,
    search: &ConeSearch<T>,
) -> Result<LambdaZero<T>> {
    let n = domain.dim();
    let mut best: Option<LambdaZero<T>> = None;
    for &t0 in &search.heights {
        let f_t0 = nl.primitive(t0);
        if !(f_t0 > T::zero()) {
            continue;
        }
        let max_f = max_abs_primitive(nl, t0);
        for &sigma in &search.sigmas {
            let margin = positivity_margin(f_t0, max_f, sigma, n, bounds);
            if !(margin > T::zero()) {
                continue;
            }
            for &frac in &search.radius_fractions {
                let cone = ConeParams::centered(domain, frac, sigma, t0);
                let value = lambda_zero_formula(domain, &cone, margin)?;
                if value.is_finite() && best.as_ref().is_none_or(|b| value < b.value) {
                    best = Some(LambdaZero {
                        value,
                        cone,
                        margin,
                        max_abs_primitive: max_f,
                    });
                }
            }
        }
    }
    best.ok_or(Error::NoFeasibleWitness)
}

/// [`lambda_zero`] with the default grid around the nonlinearity's sign
/// witness.
pub fn lambda_zero_default<T: Scalar>(
    nl: &Nonlinearity<T>,
    bounds: WeightBounds<T>,
    domain: &Domain<T>,
) -> Result<LambdaZero<T>> {
    let witness = nl
        .find_sign_witness(T::lit(crate::nonlinearity::DEFAULT_CF_TMAX))
        .ok_or(Error::NoSignWitness)?;
    lambda_zero(nl, bounds, domain, &ConeSearch::around(witness))
}

/// A pair `(t̄, σ₀)` making the `Ψ`-positivity margin strictly positive.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PsiWitness<T> {
    pub height: T,
    pub sigma: T,
    pub margin: T,
    /// `margin / (max|F| ‖β‖_∞)`, the scale-free quantity being maximised.
    pub relative_margin: T,
}

/// Grid search over `(t̄, σ₀)`; returns the first pair attaining the largest
/// relative margin.
pub fn find_psi_witness<T: Scalar>(
    nl: &Nonlinearity<T>,
    bounds: WeightBounds<T>,
    domain: &Domain<T>,
) -> Result<PsiWitness<T>> {
    let witness = nl
        .find_sign_witness(T::lit(crate::nonlinearity::DEFAULT_CF_TMAX))
        .ok_or_else(|| Error::NoWitness("no t with F(t) > 0".into()))?;
    let search = ConeSearch::around(witness);
    let n = domain.dim();
    let mut best: Option<PsiWitness<T>> = None;
    for &t in &search.heights {
        let f_t = nl.primitive(t);
        if !(f_t > T::zero()) {
            continue;
        }
        let max_f = max_abs_primitive(nl, t);
        for &sigma in &search.sigmas {
            let margin = positivity_margin(f_t, max_f, sigma, n, bounds);
            if !(margin > T::zero()) {
                continue;
            }
            let relative_margin = margin / (max_f * bounds.sup);
            if best.is_none_or(|b| relative_margin > b.relative_margin) {
                best = Some(PsiWitness {
                    height: t,
                    sigma,
                    margin,
                    relative_margin,
                });
            }
        }
    }
    best.ok_or_else(|| Error::NoWitness("positivity margin never positive on the grid".into()))
}

/// Trial family for [`estimate_lambda_star`].
#[derive(Clone, Debug)]
pub struct LambdaStarBudget<T> {
    pub cones: ConeSearch<T>,
    /// Random directions, each tried at every amplitude in `amplitudes`.
    pub random_trials: usize,
    pub amplitudes: Vec<T>,
    pub seed: u64,
    /// Also try the `λ₀` witness cone itself.
    pub include_lambda_zero_witness: bool,
}

impl<T: Scalar> LambdaStarBudget<T> {
    pub fn around(sign_witness: T, random_trials: usize, seed: u64) -> Self {
        let scale = sign_witness.abs();
        let mut cones = ConeSearch::with_counts(sign_witness, 24, 12);
        cones.heights = log_grid(T::lit(0.1) * scale, T::lit(10.0) * scale, 24)
            .into_iter()
            .map(|t| sign_witness.signum() * t)
            .collect();
        cones.radius_fractions = vec![T::lit(0.5), T::one()];
        Self {
            cones,
            random_trials,
            amplitudes: log_grid(T::lit(0.1) * scale, T::lit(100.0) * scale, 12),
            seed,
            include_lambda_zero_witness: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum TrialSource<T> {
    Cone(ConeParams<T>),
    Random { index: usize, amplitude: T },
}

/// Upper estimate of `λ*` with the field attaining it.
#[derive(Clone, Debug)]
pub struct LambdaStarEstimate<T> {
    pub upper: T,
    /// `λ₁^{1/2}/(c_f ‖β‖_∞)`.
    pub lower: T,
    pub best: Field<T>,
    pub source: TrialSource<T>,
    pub trials_with_positive_psi: usize,
}

/// `min Φ/Ψ` over projected cones and random fields with `Ψ > 0`. This is
/// an infimum over a subset, hence an upper bound on `λ*`.
pub fn estimate_lambda_star<T: Scalar>(
    model: &EnergyModel<T>,
    cf: T,
    budget: &LambdaStarBudget<T>,
) -> Result<LambdaStarEstimate<T>> {
    let lower = lambda_nonexist(model.basis().lambda1(), cf, model.weight().sup_norm())?;
    let domain = model.domain();
    let mut best: Option<(T, Vec<T>, TrialSource<T>)> = None;
    let mut positive = 0usize;
    let mut consider = |coeffs: Vec<T>, source: TrialSource<T>| {
        let psi = model.psi_coeffs(&coeffs);
        if psi > T::zero() {
            positive += 1;
            let ratio = model.phi_coeffs(&coeffs) / psi;
            if best.as_ref().is_none_or(|(r, _, _)| ratio < *r) {
                best = Some((ratio, coeffs, source));
            }
        }
    };

    let mut cones = Vec::new();
    if budget.include_lambda_zero_witness {
        if let Ok(l0) = lambda_zero_default(model.nonlinearity(), model.weight().into(), domain) {
            cones.push(l0.cone);
        }
    }
    for &t in &budget.cones.heights {
        for &s in &budget.cones.sigmas {
            for &frac in &budget.cones.radius_fractions {
                cones.push(ConeParams::centered(domain, frac, s, t));
            }
        }
    }
    for cone in cones {
        let values = cone_field(&cone, model.grid())?;
        consider(model.table().analyze(&values), TrialSource::Cone(cone));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
    for index in 0..budget.random_trials {
        let dir: Vec<T> = random_coeffs(&mut rng, model.dim());
        for &amp in &budget.amplitudes {
            let coeffs = dir.iter().map(|&a| a * amp).collect();
            consider(coeffs, TrialSource::Random { index, amplitude: amp });
        }
    }

    let (upper, coeffs, source) =
        best.ok_or_else(|| Error::NoWitness("no trial field has Psi > 0".into()))?;
    Ok(LambdaStarEstimate {
        upper,
        lower,
        best: model.field(coeffs)?,
        source,
        trials_with_positive_psi: positive,
    })
}

/// Left end `2^{-1/n}` of `Σₙ`.
pub fn sigma_range_start<T: Scalar>(n: usize) -> T {
    T::lit(2.0).powf(-T::one() / T::from_usize_lossy(n))
}

/// `zₙ(σ) = (1−σⁿ)/((2σⁿ−1)(1−σ)²)` on `Σₙ = (2^{-1/n}, 1)`.
pub fn z_n<T: Scalar>(n: usize, sigma: T) -> Result<T> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("z_n needs n >= 2, got {n}")));
    }
    let lo = sigma_range_start::<T>(n);
    if !(sigma > lo && sigma < T::one()) {
        return Err(Error::SigmaOutOfRange {
            sigma: sigma.to_f64_lossy(),
            lo: lo.to_f64_lossy(),
        });
    }
    let sn = sigma.powi(n as i32);
    Ok((T::one() - sn) / ((T::lit(2.0) * sn - T::one()) * (T::one() - sigma).powi(2)))
}

/// `(argmin, min)` of `zₙ` over `Σₙ`: 10³-point scan, then golden section.
pub fn min_z_n<T: Scalar>(n: usize) -> Result<(T, T)> {
    let lo = sigma_range_start::<T>(n);
    let count = 1000;
    let step = (T::one() - lo) / T::from_usize_lossy(count + 1);
    let mut best = (T::zero(), T::infinity(), 0usize);
    for i in 1..=count {
        let s = lo + step * T::from_usize_lossy(i);
        let z = z_n(n, s)?;
        if z < best.1 {
            best = (s, z, i);
        }
    }
    let a = lo + step * T::from_usize_lossy(best.2 - 1);
    let b = lo + step * T::from_usize_lossy(best.2 + 1);
    let (s, neg) = golden_max(a, b, 200, |s| match z_n(n, s) {
        Ok(z) => -z,
        Err(_) => -T::infinity(),
    });
    Ok(if -neg < best.1 { (s, -neg) } else { (best.0, best.1) })
}

/// `ζ(n, r) = 8r² / (r² + 4 min zₙ)`.
pub fn zeta<T: Scalar>(n: usize, r: T) -> Result<T> {
    if !(r > T::zero()) {
        return Err(Error::InvalidArgument(format!("zeta needs r > 0, got {r}")));
    }
    let (_, zmin) = min_z_n::<T>(n)?;
    Ok(T::lit(8.0) * r * r / (r * r + T::lit(4.0) * zmin))
}

/// Outcome of the ball condition check.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BallCheck<T> {
    /// `min_{t∈S} t²/F(t) < ζ(n, r)`.
    pub holds: bool,
    pub min_ratio: T,
    pub zeta: T,
    /// Minimiser `t₀ ∈ S`.
    pub t0: T,
}

/// Checks `min_{t∈S} t²/F(t) < ζ(n, r)` with `S = {t > 0 : F(t) > 0}`,
/// scanning `(0, t_max]` on a log grid and refining by golden section.
pub fn check_theorem_ball<T: Scalar>(
    nl: &Nonlinearity<T>,
    n: usize,
    r: T,
    t_max: T,
) -> Result<BallCheck<T>> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("ball check needs n >= 2, got {n}")));
    }
    let ts = log_grid(T::lit(1e-6), t_max, 4000);
    if let Some(&t) = ts.iter().find(|&&t| nl.f(t) < T::zero()) {
        return Err(Error::HypothesisNotMet(format!(
            "f must be nonnegative on [0, inf); f({t}) < 0"
        )));
    }
    let ratio = |t: T| {
        let big_f = nl.primitive(t);
        if big_f > T::zero() {
            t * t / big_f
        } else {
            T::infinity()
        }
    };
    let mut best = (T::infinity(), 0usize);
    for (i, &t) in ts.iter().enumerate() {
        let q = ratio(t);
        if q < best.0 {
            best = (q, i);
        }
    }
    if !best.0.is_finite() {
        return Err(Error::ConditionUnverifiable(
            "F(t) <= 0 for every scanned t > 0 (S is empty on the scan range)".into(),
        ));
    }
    let i = best.1;
    let a = ts[i.saturating_sub(1)].ln();
    let b = ts[(i + 1).min(ts.len() - 1)].ln();
    let (x, neg) = golden_max(a, b, 200, |x: T| -ratio(x.exp()));
    let (min_ratio, t0) = if -neg < best.0 {
        (-neg, x.exp())
    } else {
        (best.0, ts[i])
    };
    let z = zeta(n, r)?;
    Ok(BallCheck {
        holds: min_ratio < z,
        min_ratio,
        zeta: z,
        t0,
    })
}

/// Inputs that determine the certificate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CertificateInputs<T> {
    pub cf: T,
    pub cf_argmax: T,
    /// `None` on balls (no analytic eigenvalue available).
    pub lambda1: Option<T>,
    pub beta_sup: T,
    pub beta_essinf: T,
}

/// Everything the threshold computations certify for one configuration.
#[derive(Clone, Debug)]
pub struct ThresholdCertificate<T> {
    pub inputs: CertificateInputs<T>,
    pub sign_witness: T,
    pub lambda_nonexist: Option<T>,
    pub lambda_zero: LambdaZero<T>,
    /// `(λ_nonexist, λ₀)`.
    pub lambda_star_bracket: (Option<T>, T),
    pub psi_witness: PsiWitness<T>,
    pub search: ConeSearch<T>,
}

/// First Dirichlet eigenvalue when it is known in closed form.
pub fn analytic_lambda1<T: Scalar>(domain: &Domain<T>) -> Option<T> {
    match *domain {
        Domain::Interval { length } => Some((T::PI() / length).powi(2)),
        Domain::Rectangle { lengths } => {
            Some((T::PI() / lengths[0]).powi(2) + (T::PI() / lengths[1]).powi(2))
        }
        Domain::Ball { .. } => None,
    }
}

/// Builds the full certificate. `cf_scan` is `(t_max, grid)` for the `c_f`
/// estimate.
pub fn certify<T: Scalar>(
    nl: &Nonlinearity<T>,
    bounds: WeightBounds<T>,
    domain: &Domain<T>,
    cf_scan: (T, usize),
) -> Result<ThresholdCertificate<T>> {
    let sign_witness = nl
        .find_sign_witness(T::lit(crate::nonlinearity::DEFAULT_CF_TMAX))
        .ok_or(Error::NoSignWitness)?;
    let cf = match nl.cf() {
        Some(c) => c,
        None => nl.estimate_cf(cf_scan.0, cf_scan.1)?,
    };
    let lambda1 = analytic_lambda1(domain);
    let lambda_nonexist = lambda1
        .map(|l1| lambda_nonexist(l1, cf.value, bounds.sup))
        .transpose()?;
    let search = ConeSearch::around(sign_witness);
    let l0 = lambda_zero(nl, bounds, domain, &search)?;
    let psi_witness = find_psi_witness(nl, bounds, domain)?;
    Ok(ThresholdCertificate {
        inputs: CertificateInputs {
            cf: cf.value,
            cf_argmax: cf.argmax,
            lambda1,
            beta_sup: bounds.sup,
            beta_essinf: bounds.essinf,
        },
        sign_witness,
        lambda_nonexist,
        lambda_star_bracket: (lambda_nonexist, l0.value),
        lambda_zero: l0,
        psi_witness,
        search,
    })
}
