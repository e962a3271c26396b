//! Critical point search for `J_λ`: a global minimiser by preconditioned
//! descent and a mountain-pass point by path deformation.
//!
//! All steps use the `H₀^{1/2}` metric: the Riesz representative of the
//! Euclidean coefficient gradient `g` is `gⱼ/√λⱼ`, which makes the quadratic
//! part of the energy perfectly conditioned regardless of the truncation.

use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::energy::EnergyModel;
use crate::error::{Error, Result};
use crate::field::{h_norm_sq, random_coeffs, Field};
use crate::nonlinearity::{DEFAULT_CF_GRID, DEFAULT_CF_TMAX};
use crate::scalar::{dot, Scalar};
use crate::thresholds::{
    check_nonexistence, cone_field, find_psi_witness, lambda_zero_default, ConeParams,
    NonexistenceCheck,
};

/// Tunables for every solver in this module.
#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig<T> {
    pub max_iters: usize,
    /// Stop once the dual residual drops below this.
    pub grad_tol: T,
    /// Points on the discrete mountain-pass path, endpoints included.
    pub path_points: usize,
    /// Re-even the path by arclength every this many iterations.
    pub redistribute_every: usize,
    pub initial_step: T,
    pub backtrack: T,
    pub armijo: T,
    pub max_backtracks: usize,
    /// Extra random-start minimisations in [`solve_both`].
    pub restarts: usize,
    pub seed: u64,
    /// Minimum H-distance between two reported solutions; `None` means
    /// `10³ · grad_tol`.
    pub separation_tol: Option<T>,
}

impl<T: Scalar> Default for SolverConfig<T> {
    fn default() -> Self {
        Self {
            max_iters: 50_000,
            grad_tol: T::lit(1e-8),
            path_points: 41,
            redistribute_every: 10,
            initial_step: T::one(),
            backtrack: T::lit(0.5),
            armijo: T::lit(1e-4),
            max_backtracks: 60,
            restarts: 0,
            seed: 0,
            separation_tol: None,
        }
    }
}

impl<T: Scalar> SolverConfig<T> {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if !(self.grad_tol > T::zero()) {
            return bad(format!("grad_tol must be positive, got {}", self.grad_tol));
        }
        if self.path_points < 3 {
            return bad(format!("path_points must be >= 3, got {}", self.path_points));
        }
        if !(self.backtrack > T::zero() && self.backtrack < T::one()) {
            return bad(format!("backtrack factor must lie in (0, 1), got {}", self.backtrack));
        }
        if !(self.armijo > T::zero() && self.armijo < T::one()) {
            return bad(format!("armijo constant must lie in (0, 1), got {}", self.armijo));
        }
        if !(self.initial_step > T::zero()) {
            return bad(format!("initial_step must be positive, got {}", self.initial_step));
        }
        if self.redistribute_every == 0 {
            return bad("redistribute_every must be >= 1".into());
        }
        if let Some(s) = self.separation_tol {
            if !(s > T::zero()) {
                return bad(format!("separation_tol must be positive, got {s}"));
            }
        }
        Ok(())
    }

    pub fn separation(&self) -> T {
        self.separation_tol
            .unwrap_or_else(|| T::lit(1e3) * self.grad_tol)
    }

    /// `‖u‖_H` below which a point counts as the trivial solution.
    pub fn trivial_radius(&self) -> T {
        T::lit(10.0) * self.grad_tol
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CriticalKind {
    Trivial,
    Minimizer,
    MountainPass,
    /// Converged or not, the point fits none of the above.
    Unclassified,
}

impl CriticalKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CriticalKind::Trivial => "trivial",
            CriticalKind::Minimizer => "minimizer",
            CriticalKind::MountainPass => "mountain-pass",
            CriticalKind::Unclassified => "unclassified",
        }
    }
}

#[derive(Clone, Debug)]
pub struct CriticalPoint<T> {
    pub u: Field<T>,
    pub energy: T,
    /// Dual residual `‖J_λ'(u)‖_*`.
    pub residual: T,
    pub kind: CriticalKind,
    pub iterations: usize,
    /// `residual < grad_tol` was reached.
    pub converged: bool,
}

/// Per-iteration callback: `(iteration, energy, residual)`.
pub trait Observer<T> {
    fn observe(&mut self, iteration: usize, energy: T, residual: T);
}

impl<T, F: FnMut(usize, T, T)> Observer<T> for F {
    fn observe(&mut self, iteration: usize, energy: T, residual: T) {
        self(iteration, energy, residual)
    }
}

struct Silent;

impl<T> Observer<T> for Silent {
    fn observe(&mut self, _: usize, _: T, _: T) {}
}

fn numerical(stage: &str, detail: impl Into<String>) -> Error {
    Error::NumericalFailure {
        stage: stage.into(),
        detail: detail.into(),
    }
}

/// Energy and gradient, rejecting non-finite values.
fn evaluate<T: Scalar>(model: &EnergyModel<T>, a: &[T], stage: &str) -> Result<(T, Vec<T>)> {
    let (e, g) = model.energy_and_gradient(a);
    if !e.is_finite() || g.iter().any(|x| !x.is_finite()) {
        return Err(numerical(
            stage,
            format!(
                "non-finite energy or gradient at |u|_H = {:e} (energy {e})",
                h_norm_sq(model.basis().sqrt_eigenvalues(), a).sqrt()
            ),
        ));
    }
    Ok((e, g))
}

/// Largest energy increase accepted as rounding noise near `a`.
fn roundoff<T: Scalar>(model: &EnergyModel<T>, a: &[T], energy: T) -> T {
    T::lit(64.0) * T::epsilon() * (model.phi_coeffs(a) + energy.abs())
}

fn classify<T: Scalar>(model: &EnergyModel<T>, a: &[T], energy: T, cfg: &SolverConfig<T>) -> CriticalKind {
    let norm = h_norm_sq(model.basis().sqrt_eigenvalues(), a).sqrt();
    if norm < cfg.trivial_radius() {
        CriticalKind::Trivial
    } else if energy < T::zero() {
        CriticalKind::Minimizer
    } else {
        CriticalKind::Unclassified
    }
}

/// One Armijo-backtracked step along `−gⱼ/√λⱼ` from `a`. Returns the new
/// point, its energy and gradient, and the accepted step, or `None` if no
/// step length satisfied the condition.
#[allow(clippy::type_complexity)]
fn descent_step<T: Scalar>(
    model: &EnergyModel<T>,
    a: &[T],
    energy: T,
    grad: &[T],
    alpha0: T,
    cfg: &SolverConfig<T>,
    stage: &str,
) -> Result<Option<(Vec<T>, T, Vec<T>, T)>> {
    let sqrt = model.basis().sqrt_eigenvalues();
    let dir: Vec<T> = grad.iter().zip(sqrt).map(|(&g, &s)| -g / s).collect();
    let slope = dot(grad, &dir);
    let slack = roundoff(model, a, energy);
    let mut alpha = alpha0;
    for _ in 0..=cfg.max_backtracks {
        let trial: Vec<T> = a.iter().zip(&dir).map(|(&x, &d)| x + alpha * d).collect();
        let (e, g) = model.energy_and_gradient(&trial);
        let finite = e.is_finite() && g.iter().all(|x| x.is_finite());
        if finite && e <= energy + cfg.armijo * alpha * slope + slack {
            return Ok(Some((trial, e, g, alpha)));
        }
        alpha = alpha * cfg.backtrack;
    }
    // Exhausted backtracking: a tiny step still failing means we sit on a
    // non-finite or rounding-limited region.
    let trial: Vec<T> = a.iter().zip(&dir).map(|(&x, &d)| x + alpha * d).collect();
    evaluate(model, &trial, stage)?;
    Ok(None)
}

/// Preconditioned steepest descent with a Barzilai–Borwein trial step and
/// Armijo backtracking.
pub fn minimize<T: Scalar>(
    model: &EnergyModel<T>,
    start: &Field<T>,
    cfg: &SolverConfig<T>,
) -> Result<CriticalPoint<T>> {
    minimize_observed(model, start, cfg, &mut Silent)
}

/// [`minimize`] reporting every accepted iterate to `observer`.
pub fn minimize_observed<T: Scalar>(
    model: &EnergyModel<T>,
    start: &Field<T>,
    cfg: &SolverConfig<T>,
    observer: &mut dyn Observer<T>,
) -> Result<CriticalPoint<T>> {
    const STAGE: &str = "minimize";
    cfg.validate()?;
    if start.coeffs().len() != model.dim() {
        return Err(Error::LengthMismatch {
            expected: model.dim(),
            got: start.coeffs().len(),
        });
    }
    let sqrt = model.basis().sqrt_eigenvalues();
    let mut a = start.coeffs().to_vec();
    let (mut energy, mut grad) = evaluate(model, &a, STAGE)?;
    let mut residual = model.dual_norm(&grad);
    observer.observe(0, energy, residual);
    let (lo, hi) = (T::lit(1e-6), T::lit(1e6));
    let mut alpha0 = cfg.initial_step;
    let mut iterations = 0;
    while residual >= cfg.grad_tol && iterations < cfg.max_iters {
        let Some((next, e, g, _)) = descent_step(model, &a, energy, &grad, alpha0, cfg, STAGE)?
        else {
            break;
        };
        debug_assert!(e <= energy + roundoff(model, &a, energy));
        // BB1 in the H metric: ⟨s, s⟩_H / ⟨s, Δg⟩.
        let s: Vec<T> = next.iter().zip(&a).map(|(&x, &y)| x - y).collect();
        let y: Vec<T> = g.iter().zip(&grad).map(|(&x, &y)| x - y).collect();
        let sy = dot(&s, &y);
        alpha0 = if sy > T::zero() {
            (h_norm_sq(sqrt, &s) / sy).max(lo).min(hi)
        } else {
            cfg.initial_step
        };
        a = next;
        energy = e;
        grad = g;
        residual = model.dual_norm(&grad);
        iterations += 1;
        observer.observe(iterations, energy, residual);
    }
    let kind = classify(model, &a, energy, cfg);
    Ok(CriticalPoint {
        u: model.field(a)?,
        energy,
        residual,
        kind,
        iterations,
        converged: residual < cfg.grad_tol,
    })
}

/// Projection of `ω` onto the basis with `Ψ > 0` re-checked by quadrature.
fn projected_cone<T: Scalar>(model: &EnergyModel<T>, cone: &ConeParams<T>) -> Option<Vec<T>> {
    let values = cone_field(cone, model.grid()).ok()?;
    let coeffs = model.table().analyze(&values);
    (model.psi_coeffs(&coeffs) > T::zero()).then_some(coeffs)
}

/// Descent seed with `Ψ > 0`: the projected `λ₀` witness cone, else the
/// `Ψ`-positivity witness cone, else a scaled scan of both.
pub fn warm_start<T: Scalar>(model: &EnergyModel<T>) -> Result<Field<T>> {
    let nl = model.nonlinearity();
    let bounds = model.weight().into();
    let domain = model.domain();
    let mut candidates = Vec::new();
    if let Ok(l0) = lambda_zero_default(nl, bounds, domain) {
        candidates.push(l0.cone);
    }
    if let Ok(w) = find_psi_witness(nl, bounds, domain) {
        candidates.push(ConeParams::centered(domain, T::one(), w.sigma, w.height));
    }
    for cone in &candidates {
        if let Some(c) = projected_cone(model, cone) {
            return model.field(c);
        }
    }
    let scales = crate::scalar::log_grid(T::lit(1e-2), T::lit(1e2), 41);
    for cone in &candidates {
        for &s in &scales {
            let scaled = ConeParams {
                height: cone.height * s,
                ..cone.clone()
            };
            if let Some(c) = projected_cone(model, &scaled) {
                return model.field(c);
            }
        }
    }
    Err(Error::NoWitness(
        "no projected cone has Psi > 0 at this truncation".into(),
    ))
}

/// `‖a − b‖_H` in coefficients.
fn h_dist<T: Scalar>(sqrt: &[T], a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .zip(sqrt)
        .map(|((&x, &y), &s)| (x - y) * (x - y) * s)
        .sum::<T>()
        .sqrt()
}

/// Moves the interior points so that consecutive H-distances are equal,
/// interpolating linearly along the current polyline.
fn redistribute<T: Scalar>(sqrt: &[T], path: &mut [Vec<T>]) {
    let p = path.len();
    let mut cum = vec![T::zero(); p];
    for i in 1..p {
        cum[i] = cum[i - 1] + h_dist(sqrt, &path[i], &path[i - 1]);
    }
    let total = cum[p - 1];
    if !(total > T::zero()) {
        return;
    }
    let old = path.to_vec();
    let mut seg = 0;
    for (k, point) in path.iter_mut().enumerate().take(p - 1).skip(1) {
        let target = total * T::from_usize_lossy(k) / T::from_usize_lossy(p - 1);
        while seg + 1 < p - 1 && cum[seg + 1] < target {
            seg += 1;
        }
        let len = cum[seg + 1] - cum[seg];
        let t = if len > T::zero() {
            ((target - cum[seg]) / len).max(T::zero()).min(T::one())
        } else {
            T::zero()
        };
        for (j, x) in point.iter_mut().enumerate() {
            *x = old[seg][j] + t * (old[seg + 1][j] - old[seg][j]);
        }
    }
}

fn argmax<T: Scalar>(values: &[T]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Mountain-pass point between `0` and `valley.u`.
///
/// Phase one deforms a `P`-point path: the current path maximum takes a
/// preconditioned Armijo descent step (endpoints frozen) and the path is
/// re-evened every `R` iterations. Once the path maximum stops improving,
/// phase two refines the maximum as a saddle: the lowest-curvature direction
/// is tracked by Rayleigh-quotient rotation from the path tangent, the step
/// along it is reflected (ascent, Newton length) and the orthogonal part is
/// plain preconditioned descent.
pub fn mountain_pass<T: Scalar>(
    model: &EnergyModel<T>,
    valley: &CriticalPoint<T>,
    cfg: &SolverConfig<T>,
) -> Result<CriticalPoint<T>> {
    mountain_pass_observed(model, valley, cfg, &mut Silent)
}

/// [`mountain_pass`] reporting `(iteration, path max energy, residual at
/// the max)` to `observer`.
pub fn mountain_pass_observed<T: Scalar>(
    model: &EnergyModel<T>,
    valley: &CriticalPoint<T>,
    cfg: &SolverConfig<T>,
    observer: &mut dyn Observer<T>,
) -> Result<CriticalPoint<T>> {
    const STAGE: &str = "mountain_pass";
    cfg.validate()?;
    if !(valley.energy < T::zero()) {
        return Err(Error::DegenerateGeometry(format!(
            "valley endpoint has energy {} >= 0",
            valley.energy
        )));
    }
    let sqrt = model.basis().sqrt_eigenvalues().to_vec();
    let end = ray_endpoint(model, valley.u.coeffs())?;
    let p = cfg.path_points;
    let mut path: Vec<Vec<T>> = (0..p)
        .map(|i| {
            let s = T::from_usize_lossy(i) / T::from_usize_lossy(p - 1);
            end.iter().map(|&x| s * x).collect()
        })
        .collect();
    let mut energies = Vec::with_capacity(p);
    let mut grads = Vec::with_capacity(p);
    for x in &path {
        let (e, g) = evaluate(model, x, STAGE)?;
        energies.push(e);
        grads.push(g);
    }
    let endpoint_max = energies[0].max(energies[p - 1]);

    let collapse = |m: usize| {
        Error::DegenerateGeometry(format!(
            "path maximum drifted to endpoint {m}; lambda may be too close to the threshold"
        ))
    };

    let phase_one_cap = cfg.max_iters / 2;
    let mut iterations = 0;
    let mut steps = vec![cfg.initial_step; p];
    let mut last_max = T::infinity();
    let mut m;
    loop {
        m = argmax(&energies);
        if m == 0 || m == p - 1 || !(energies[m] > endpoint_max) {
            return Err(collapse(m));
        }
        let residual = model.dual_norm(&grads[m]);
        observer.observe(iterations, energies[m], residual);
        if residual < cfg.grad_tol {
            return finish(model, path.swap_remove(m), energies[m], grads[m].clone(), iterations, cfg);
        }
        if iterations >= phase_one_cap {
            break;
        }
        match descent_step(model, &path[m], energies[m], &grads[m], steps[m], cfg, STAGE)? {
            Some((x, e, g, alpha)) => {
                path[m] = x;
                energies[m] = e;
                grads[m] = g;
                steps[m] = (alpha * T::lit(2.0)).min(T::lit(1e3));
            }
            None => break,
        }
        iterations += 1;
        if iterations % cfg.redistribute_every == 0 {
            redistribute(&sqrt, &mut path);
            for i in 1..p - 1 {
                let (e, g) = evaluate(model, &path[i], STAGE)?;
                energies[i] = e;
                grads[i] = g;
            }
            let top = energies[argmax(&energies)];
            let improved = last_max - top;
            if improved.is_finite() && improved < T::lit(1e-4) * top.abs().max(T::one()) {
                break;
            }
            last_max = top;
        }
    }

    m = argmax(&energies);
    if m == 0 || m == p - 1 {
        return Err(collapse(m));
    }
    let tangent: Vec<T> = path[m + 1]
        .iter()
        .zip(&path[m - 1])
        .map(|(&x, &y)| x - y)
        .collect();
    let x = path.swap_remove(m);
    let e = energies[m];
    let g = grads[m].clone();
    let (x, e, g, n) = refine_saddle(model, x, e, g, tangent, cfg, iterations, observer)?;
    let point = finish(model, x, e, g, n, cfg)?;
    if !(point.energy > endpoint_max) {
        return Err(collapse(0));
    }
    Ok(point)
}

/// Path endpoint on the ray through `valley`: the first scanned point past
/// the ray's energy peak from which `J_λ(s·valley)` stays negative up to
/// `s = 1`. The segment beyond it lies in `{J_λ < 0}`, so the minimax level
/// is unchanged, while the hump near the origin gets resolved by the `P`
/// path points instead of falling between the first two.
fn ray_endpoint<T: Scalar>(model: &EnergyModel<T>, valley: &[T]) -> Result<Vec<T>> {
    let ss = crate::scalar::log_grid(T::lit(1e-6), T::one(), 400);
    let energies = ss
        .iter()
        .map(|&s| {
            let a: Vec<T> = valley.iter().map(|&x| s * x).collect();
            evaluate(model, &a, "mountain_pass").map(|(e, _)| e)
        })
        .collect::<Result<Vec<T>>>()?;
    let peak = argmax(&energies);
    if !(energies[peak] > T::zero()) {
        return Err(Error::DegenerateGeometry(
            "energy along the ray to the valley never rises above zero".into(),
        ));
    }
    let mut first = ss.len() - 1;
    for k in (peak + 1..ss.len()).rev() {
        if energies[k] < T::zero() {
            first = k;
        } else {
            break;
        }
    }
    let s = ss[first];
    Ok(valley.iter().map(|&x| s * x).collect())
}

fn finish<T: Scalar>(
    model: &EnergyModel<T>,
    x: Vec<T>,
    energy: T,
    grad: Vec<T>,
    iterations: usize,
    cfg: &SolverConfig<T>,
) -> Result<CriticalPoint<T>> {
    let residual = model.dual_norm(&grad);
    let kind = if energy > T::zero() {
        CriticalKind::MountainPass
    } else {
        classify(model, &x, energy, cfg)
    };
    Ok(CriticalPoint {
        u: model.field(x)?,
        energy,
        residual,
        kind,
        iterations,
        converged: residual < cfg.grad_tol,
    })
}

fn normalize_h<T: Scalar>(sqrt: &[T], v: &mut [T]) -> bool {
    let n = h_norm_sq(sqrt, v).sqrt();
    if !(n > T::zero()) || !n.is_finite() {
        return false;
    }
    v.iter_mut().for_each(|x| *x = *x / n);
    true
}

/// Min-mode following from `x` with initial direction `tangent`.
#[allow(clippy::too_many_arguments, clippy::type_complexity)]
fn refine_saddle<T: Scalar>(
    model: &EnergyModel<T>,
    mut x: Vec<T>,
    mut energy: T,
    mut grad: Vec<T>,
    mut tau: Vec<T>,
    cfg: &SolverConfig<T>,
    mut iterations: usize,
    observer: &mut dyn Observer<T>,
) -> Result<(Vec<T>, T, Vec<T>, usize)> {
    const STAGE: &str = "mountain_pass";
    let sqrt = model.basis().sqrt_eigenvalues().to_vec();
    if !normalize_h(&sqrt, &mut tau) {
        return Err(Error::DegenerateGeometry("path tangent vanishes at the maximum".into()));
    }
    let two = T::lit(2.0);
    let mut residual = model.dual_norm(&grad);
    while residual >= cfg.grad_tol && iterations < cfg.max_iters {
        // Curvature along tau from a finite-difference Hessian-vector product,
        // expressed as an H-gradient: hv = D⁻¹(g(x + ε tau) − g(x)) / ε.
        let scale = h_norm_sq(&sqrt, &x).sqrt().max(T::one());
        let eps = T::epsilon().sqrt() * scale;
        let shifted: Vec<T> = x.iter().zip(&tau).map(|(&a, &t)| a + eps * t).collect();
        let (_, g_shift) = evaluate(model, &shifted, STAGE)?;
        let hv: Vec<T> = g_shift
            .iter()
            .zip(&grad)
            .zip(&sqrt)
            .map(|((&a, &b), &s)| (a - b) / (eps * s))
            .collect();
        // ⟨tau, hv⟩_H = Σ tau_j hv_j √λ_j.
        let mu: T = tau
            .iter()
            .zip(&hv)
            .zip(&sqrt)
            .map(|((&t, &h), &s)| t * h * s)
            .sum();
        let eta = T::one() / (two * (T::one() + mu.abs()));
        for ((t, &h), _) in tau.iter_mut().zip(&hv).zip(&sqrt) {
            *t = *t - eta * (h - mu * *t);
        }
        if !normalize_h(&sqrt, &mut tau) {
            return Err(numerical(STAGE, "lost the unstable direction"));
        }

        // H-gradient split into its tau component and the rest.
        let hgrad: Vec<T> = grad.iter().zip(&sqrt).map(|(&g, &s)| g / s).collect();
        let along = dot(&grad, &tau);
        let along_step = if mu < T::zero() {
            T::one() / (-mu).max(T::lit(1e-3))
        } else {
            T::one()
        };
        let cap = T::lit(0.1) * scale;
        let along_move = (along * along_step).max(-cap).min(cap);
        let mut alpha = T::one();
        let mut accepted = false;
        for _ in 0..=cfg.max_backtracks {
            // Descent orthogonal to tau, ascent along it.
            let trial: Vec<T> = x
                .iter()
                .zip(&hgrad)
                .zip(&tau)
                .map(|((&xi, &gi), &ti)| xi - alpha * (gi - along * ti) + alpha * along_move * ti)
                .collect();
            let (e, g) = model.energy_and_gradient(&trial);
            if e.is_finite() && g.iter().all(|v| v.is_finite()) {
                let r = model.dual_norm(&g);
                if r < two * residual {
                    x = trial;
                    energy = e;
                    grad = g;
                    residual = r;
                    accepted = true;
                    break;
                }
            }
            alpha = alpha * cfg.backtrack;
        }
        if !accepted {
            break;
        }
        iterations += 1;
        observer.observe(iterations, energy, residual);
    }
    Ok((x, energy, grad, iterations))
}

/// How the first minimisation was seeded.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StartKind {
    /// Projected cone from the threshold witnesses.
    Cone,
    /// No witness exists; a seeded random field.
    Random,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    TrivialOnly,
    TwoSolutions,
    /// Something converged but the pair promised above `λ*` was not
    /// completed (non-convergence or a nonnegative minimum energy).
    Inconclusive,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::TrivialOnly => "trivial-only",
            Outcome::TwoSolutions => "two-solutions",
            Outcome::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Clone, Debug)]
pub struct SolveReport<T> {
    pub lambda: T,
    pub seed: u64,
    /// `c_f` used for the non-existence check.
    pub cf: T,
    pub nonexistence: NonexistenceCheck<T>,
    pub start: StartKind,
    pub points: Vec<CriticalPoint<T>>,
    /// `(i, j, ‖uᵢ − uⱼ‖_H)` over all pairs of `points`.
    pub distances: Vec<(usize, usize, T)>,
    pub separation_tol: T,
    pub outcome: Outcome,
    /// Stage wall times; excluded from any deterministic serialisation.
    pub timings: Vec<(&'static str, Duration)>,
}

/// Warm start, minimisation (plus `restarts` random starts) and, when a
/// negative-energy minimiser is found, the mountain pass.
pub fn solve_both<T: Scalar>(model: &EnergyModel<T>, cfg: &SolverConfig<T>) -> Result<SolveReport<T>> {
    cfg.validate()?;
    let mut timings = Vec::new();
    let clock = Instant::now();
    let cf = match model.nonlinearity().cf() {
        Some(c) => c.value,
        None => match model
            .nonlinearity()
            .estimate_cf(T::lit(DEFAULT_CF_TMAX), DEFAULT_CF_GRID)
        {
            Ok(c) => c.value,
            Err(Error::UndefinedCf) => T::zero(),
            Err(e) => return Err(e.in_stage("thresholds")),
        },
    };
    let nonexistence = check_nonexistence(model, cf);
    timings.push(("thresholds", clock.elapsed()));

    let clock = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (start, start_kind) = match warm_start(model) {
        Ok(u) => (u, StartKind::Cone),
        Err(Error::NoWitness(_)) => (
            model.field(random_coeffs(&mut rng, model.dim()))?,
            StartKind::Random,
        ),
        Err(e) => return Err(e.in_stage("warm_start")),
    };
    timings.push(("warm_start", clock.elapsed()));

    let clock = Instant::now();
    let mut best = minimize(model, &start, cfg).map_err(|e| e.in_stage("minimize"))?;
    let amplitude = start.h_half_norm().max(T::one());
    for _ in 0..cfg.restarts {
        let dir: Vec<T> = random_coeffs(&mut rng, model.dim());
        let norm = h_norm_sq(model.basis().sqrt_eigenvalues(), &dir).sqrt();
        let coeffs = dir.iter().map(|&x| x * amplitude / norm).collect();
        let cand = minimize(model, &model.field(coeffs)?, cfg).map_err(|e| e.in_stage("minimize"))?;
        if cand.converged && (!best.converged || cand.energy < best.energy) {
            best = cand;
        }
    }
    timings.push(("minimize", clock.elapsed()));

    let mut points = vec![best];
    let first = &points[0];
    let mut outcome = if first.converged && first.kind == CriticalKind::Trivial {
        Outcome::TrivialOnly
    } else {
        Outcome::Inconclusive
    };
    if first.converged && first.kind == CriticalKind::Minimizer {
        let clock = Instant::now();
        let mp = mountain_pass(model, first, cfg).map_err(|e| e.in_stage("mountain_pass"))?;
        timings.push(("mountain_pass", clock.elapsed()));
        let distance = mp.u.h_distance(&first.u);
        if !(distance > cfg.separation()) {
            return Err(Error::NotDistinct {
                distance: distance.to_f64_lossy(),
                tolerance: cfg.separation().to_f64_lossy(),
            }
            .in_stage("verify"));
        }
        if mp.converged && mp.kind == CriticalKind::MountainPass {
            outcome = Outcome::TwoSolutions;
        }
        points.push(mp);
    }

    let mut distances = Vec::new();
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            distances.push((i, j, points[i].u.h_distance(&points[j].u)));
        }
    }
    Ok(SolveReport {
        lambda: model.lambda(),
        seed: cfg.seed,
        cf,
        nonexistence,
        start: start_kind,
        points,
        distances,
        separation_tol: cfg.separation(),
        outcome,
        timings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Domain;
    use crate::energy::Weight;
    use crate::nonlinearity::Nonlinearity;
    use crate::thresholds::lambda_nonexist;
    use std::f64::consts::PI;

    fn model(nl: Nonlinearity<f64>, lambda: f64, modes: usize, quad: usize) -> EnergyModel<f64> {
        EnergyModel::build(
            Domain::rectangle(PI, PI).unwrap(),
            modes,
            quad,
            |g| Weight::constant(1.0, g),
            nl,
            lambda,
        )
        .unwrap()
    }

    fn random_start(m: &EnergyModel<f64>, seed: u64, scale: f64) -> Field<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = random_coeffs::<f64, _>(&mut rng, m.dim());
        m.field(c.into_iter().map(|x| x * scale).collect()).unwrap()
    }

    #[test]
    fn config_validation() {
        let ok = SolverConfig::<f64>::default();
        assert!(ok.validate().is_ok());
        assert_eq!(ok.separation(), 1e-5);
        for bad in [
            SolverConfig { grad_tol: 0.0, ..ok.clone() },
            SolverConfig { path_points: 2, ..ok.clone() },
            SolverConfig { backtrack: 1.0, ..ok.clone() },
            SolverConfig { armijo: 0.0, ..ok.clone() },
        ] {
            assert!(bad.validate().is_err());
        }
    }

    #[test]
    fn lambda_zero_converges_to_origin() {
        let m = model(Nonlinearity::log_square(), 0.0, 16, 24);
        let p = minimize(&m, &random_start(&m, 3, 5.0), &SolverConfig::default()).unwrap();
        assert!(p.converged);
        assert_eq!(p.kind, CriticalKind::Trivial);
        assert!(p.u.h_half_norm() < 1e-7);
    }

    #[test]
    fn descent_is_monotone() {
        let m = model(Nonlinearity::log_square(), 8.0, 16, 24);
        let mut prev = f64::INFINITY;
        let mut worst = f64::NEG_INFINITY;
        let mut obs = |_: usize, e: f64, _: f64| {
            worst = worst.max(e - prev);
            prev = e;
        };
        minimize_observed(&m, &random_start(&m, 11, 3.0), &SolverConfig::default(), &mut obs).unwrap();
        assert!(worst <= 1e-9, "energy rose by {worst}");
    }

    #[test]
    fn zero_nonlinearity_linear_rate() {
        let m = model(Nonlinearity::builtin("zero").unwrap(), 3.0, 16, 24);
        let mut res = Vec::new();
        let cfg = SolverConfig {
            initial_step: 0.5,
            max_iters: 200,
            ..SolverConfig::default()
        };
        let mut obs = |_: usize, _: f64, r: f64| res.push(r);
        let p = minimize_observed(&m, &random_start(&m, 5, 2.0), &cfg, &mut obs).unwrap();
        assert!(p.converged && p.kind == CriticalKind::Trivial);
        // Preconditioned Hessian is the identity: every step contracts.
        let rates: Vec<f64> = res.windows(2).map(|w| w[1] / w[0]).collect();
        assert!(!rates.is_empty());
        assert!(rates.iter().all(|&r| r < 1.0), "{rates:?}");
    }

    #[test]
    fn below_nonexistence_everything_is_trivial() {
        let nl = Nonlinearity::log_square();
        let cf = nl.estimate_cf(1e4, 2000).unwrap().value;
        let lambda = 0.9 * lambda_nonexist(2.0, cf, 1.0).unwrap();
        let m = model(nl, lambda, 16, 24);
        assert!(check_nonexistence(&m, cf).holds);
        for seed in 0..5 {
            let p = minimize(&m, &random_start(&m, seed, 10.0), &SolverConfig::default()).unwrap();
            assert!(p.converged);
            assert_eq!(p.kind, CriticalKind::Trivial);
        }
    }

    #[test]
    fn mountain_pass_rejects_nonnegative_valley() {
        let m = model(Nonlinearity::log_square(), 0.0, 8, 12);
        let p = minimize(&m, &random_start(&m, 1, 1.0), &SolverConfig::default()).unwrap();
        assert!(matches!(
            mountain_pass(&m, &p, &SolverConfig::default()),
            Err(Error::DegenerateGeometry(_))
        ));
    }

    #[test]
    fn warm_start_needs_witness() {
        let m = model(Nonlinearity::builtin("zero").unwrap(), 1.0, 8, 12);
        assert!(matches!(warm_start(&m), Err(Error::NoWitness(_))));
        let m = model(Nonlinearity::log_square(), 1.0, 16, 32);
        let u = warm_start(&m).unwrap();
        assert!(m.psi(&u) > 0.0);
    }

    #[test]
    fn redistribution_evens_spacing() {
        let sqrt = vec![1.0, 2.0];
        let mut path = vec![
            vec![0.0, 0.0],
            vec![0.1, 0.05],
            vec![0.2, 0.1],
            vec![1.0, 0.5],
            vec![2.0, 1.0],
        ];
        redistribute(&sqrt, &mut path);
        let d: Vec<f64> = path.windows(2).map(|w| h_dist(&sqrt, &w[0], &w[1])).collect();
        for x in &d {
            assert!((x - d[0]).abs() < 1e-12, "{d:?}");
        }
        assert_eq!(path[0], vec![0.0, 0.0]);
        assert_eq!(path[4], vec![2.0, 1.0]);
    }
}
