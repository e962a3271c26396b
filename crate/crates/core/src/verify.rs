//! Self-checks run by the `verify` command: each compares a computed
//! quantity with an identity it must satisfy and records the measured error.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::domain::{mass_matrix, stiffness_matrix, BasisTable, Domain, QuadratureGrid, SpectralBasis};
use crate::energy::{EnergyModel, Weight};
use crate::error::Result;
use crate::field::{random_coeffs, random_field, ExtensionField, ExtensionQuadrature, Field};
use crate::nonlinearity::{adaptive_simpson, Nonlinearity, SIMPSON_TOL};
use crate::thresholds::{cone_gradient_energy, cone_gradient_energy_quadrature, min_z_n, zeta, ConeParams};

/// One check: `passed` iff `measured <= tolerance`.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    fn new(name: impl Into<String>, measured: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            measured,
            tolerance,
            passed: measured <= tolerance,
        }
    }
}

/// Discretisation and sampling used by [`run_suite`].
#[derive(Clone, Debug)]
pub struct VerifySettings {
    pub domain: Domain<f64>,
    pub modes: usize,
    pub quad_points: usize,
    pub nonlinearity: Nonlinearity<f64>,
    pub lambda: f64,
    pub samples: usize,
    pub seed: u64,
}

impl VerifySettings {
    /// `(0, π)`, `J = 32`, `M = 80`, log-square, `λ = 1`.
    pub fn default_interval() -> Self {
        Self {
            domain: Domain::interval(std::f64::consts::PI).expect("valid interval"),
            modes: 32,
            quad_points: 80,
            nonlinearity: Nonlinearity::log_square(),
            lambda: 1.0,
            samples: 200,
            seed: 0,
        }
    }
}

fn max_abs_offdiag_error(m: &[f64], n: usize, diag: impl Fn(usize) -> f64) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let want = if i == j { diag(i) } else { 0.0 };
            worst = worst.max((m[i * n + j] - want).abs());
        }
    }
    worst
}

/// Grid sup-norm given to random directions in the growth check: close to
/// where `F(t)/t²` peaks for the log-square model, so `s = 1` is the scale at
/// which `Ψ` is most visible.
pub const DIRECTION_PEAK: f64 = 3.0;

/// `u` rescaled so that `max |u|` over the grid nodes equals `peak`.
pub fn unit_direction(u: &Field<f64>, table: &BasisTable<f64>, peak: f64) -> Field<f64> {
    let sup = u.sample_with(table).iter().fold(0.0f64, |m, v| m.max(v.abs()));
    u.scaled(peak / sup)
}

/// `Ψ(s·u) / ‖s·u‖²_{H₀^{1/2}}`.
pub fn growth_ratio(model: &EnergyModel<f64>, u: &Field<f64>, s: f64) -> f64 {
    let v = u.scaled(s);
    model.psi(&v) / v.h_half_norm().powi(2)
}

/// Runs every check; never fails early on a check, only on setup errors.
pub fn run_suite(s: &VerifySettings) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let basis = Arc::new(SpectralBasis::new(s.domain.clone(), s.modes)?);
    let grid = Arc::new(QuadratureGrid::new(s.domain.clone(), s.quad_points)?);
    let table = Arc::new(BasisTable::new(basis.clone(), grid.clone())?);
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    let fields: Vec<Field<f64>> = (0..s.samples).map(|_| random_field(&mut rng, basis.clone())).collect();
    let n = basis.len();

    let gram = mass_matrix(&table);
    out.push(Check::new("gram-identity", max_abs_offdiag_error(&gram, n, |_| 1.0), 1e-8));

    let eig = basis.eigenvalues();
    let stiff = stiffness_matrix(&basis, &grid)?;
    let lmax = eig.iter().cloned().fold(0.0, f64::max);
    out.push(Check::new(
        "stiffness-diagonal",
        max_abs_offdiag_error(&stiff, n, |i| eig[i]) / lmax,
        1e-8,
    ));

    let sorted = eig.windows(2).all(|w| w[0] <= w[1]);
    out.push(Check::new("eigenvalues-sorted", if sorted { 0.0 } else { 1.0 }, 0.0));

    let iso = fields
        .iter()
        .map(|u| {
            let h = u.h_half_norm();
            ((u.extend().x_norm() - h) / h).abs()
        })
        .fold(0.0, f64::max);
    out.push(Check::new("extension-isometry", iso, 1e-10));

    let xq = ExtensionQuadrature::new(basis.clone(), grid.clone())?;
    let iso_q = fields
        .iter()
        .map(|u| {
            let h = u.h_half_norm();
            ((xq.x_norm(&u.extend()) - h) / h).abs()
        })
        .fold(0.0, f64::max);
    out.push(Check::new("extension-isometry-quadrature", iso_q, 1e-8));

    let trace = (0..s.samples)
        .map(|_| {
            let w = ExtensionField::new(basis.clone(), random_coeffs(&mut rng, n)).expect("sized");
            (w.trace().h_half_norm() - w.x_norm()).max(0.0)
        })
        .fold(0.0, f64::max);
    out.push(Check::new("trace-inequality", trace, 1e-12));

    let parseval = fields
        .iter()
        .map(|u| {
            let vals = u.sample_with(&table);
            let quad = grid.integrate(&vals.iter().map(|v| v * v).collect::<Vec<_>>());
            let exact: f64 = u.coeffs().iter().map(|a| a * a).sum();
            ((quad - exact) / exact).abs()
        })
        .fold(0.0, f64::max);
    out.push(Check::new("parseval", parseval, 1e-8));

    let half = fields
        .iter()
        .map(|u| {
            let twice = u.apply_half_laplacian().apply_half_laplacian();
            twice
                .coeffs()
                .iter()
                .zip(u.coeffs())
                .zip(&eig)
                .map(|((&t, &a), &l)| ((t - l * a) / (l * a)).abs())
                .fold(0.0, f64::max)
        })
        .fold(0.0, f64::max);
    out.push(Check::new("half-laplacian-squared", half, 1e-14));

    let weight = Weight::constant(1.0, &grid)?;
    let model = EnergyModel::new(table.clone(), weight, s.nonlinearity.clone(), s.lambda)?;
    let h = 1e-6;
    let grad_err = fields
        .iter()
        .take(20)
        .map(|u| {
            let a = u.coeffs();
            let g = model.gradient_coeffs(a);
            let mut num = 0.0;
            let mut den = 0.0;
            for j in 0..n {
                let mut p = a.to_vec();
                let mut m = a.to_vec();
                p[j] += h;
                m[j] -= h;
                let fd = (model.energy_coeffs(&p) - model.energy_coeffs(&m)) / (2.0 * h);
                num += (fd - g[j]).powi(2);
                den += g[j].powi(2);
            }
            (num / den).sqrt()
        })
        .fold(0.0, f64::max);
    out.push(Check::new("gradient-finite-difference", grad_err, 1e-5));

    let nl = &s.nonlinearity;
    let f = |t: f64| nl.f(t);
    let prim = (0..100)
        .map(|_| {
            let t: f64 = rng.gen_range(-20.0..20.0);
            let q = adaptive_simpson(&f, 0.0, t, SIMPSON_TOL);
            let a = nl.primitive(t);
            (a - q).abs() / a.abs().max(1e-300)
        })
        .fold(0.0, f64::max);
    out.push(Check::new("primitive-vs-quadrature", prim, 1e-8));

    let hyp = nl.hypotheses();
    let flags = [hyp.superlinear_at_zero, hyp.sublinear_at_infinity, hyp.sign_condition];
    out.push(Check::new(
        "growth-hypotheses",
        flags.iter().filter(|&&b| !b).count() as f64,
        0.0,
    ));

    let zeta_err = [2usize, 3, 4]
        .iter()
        .flat_map(|&n| [0.5, 1.0, 2.0].map(move |r| (n, r)))
        .map(|(n, r)| {
            let (_, zmin) = min_z_n::<f64>(n)?;
            Ok((0.5 * (zmin / (r * r) + 0.25) * zeta(n, r)? - 1.0).abs())
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    out.push(Check::new("zeta-identity", zeta_err, 1e-12));

    // The cone check uses its own fine grid: it tests the closed form, not
    // the configured resolution. In one dimension the two kinks carry the
    // whole error, so the rule must be much finer there. Ramps are kept wide
    // enough to span many nodes.
    let order = if s.domain.dim() == 1 { 4096 } else { 128 };
    let fine = QuadratureGrid::new(s.domain.clone(), order)?;
    let r_in = s.domain.inradius();
    let cone = (0..10)
        .map(|_| {
            let p = ConeParams::centered(
                &s.domain,
                rng.gen_range(0.75..1.0),
                rng.gen_range(0.1..0.5),
                rng.gen_range(0.1..10.0),
            );
            let exact = cone_gradient_energy(&p)?;
            let quad = cone_gradient_energy_quadrature(&p, &fine)?;
            debug_assert!(p.radius <= r_in);
            Ok(((exact - quad) / exact).abs())
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    out.push(Check::new("cone-gradient-closed-form", cone, 1e-2));

    let subq = fields
        .iter()
        .take(10)
        .map(|u| {
            let u = unit_direction(u, &table, DIRECTION_PEAK);
            let base = growth_ratio(&model, &u, 1.0).abs();
            (growth_ratio(&model, &u, 1e-4).abs() / base).max(growth_ratio(&model, &u, 1e4).abs() / base)
        })
        .fold(0.0, f64::max);
    out.push(Check::new("sub-quadratic-growth", subq, 1e-2));

    Ok(out)
}
