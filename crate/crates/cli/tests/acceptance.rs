//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Run with `cargo test -p halfspec-cli --test acceptance`.
//!
//! Each criterion's wall time counts against its budget; the budgets assume
//! the optimised test profile.

use std::f64::consts::PI;
use std::fs;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use halfspec::field::random_coeffs;
use halfspec::solvers::{minimize, solve_both};
use halfspec::thresholds::{
    check_nonexistence, cone_gradient_energy_quadrature, estimate_lambda_star, lambda_nonexist,
    lambda_zero_default, min_z_n, zeta, ConeParams, LambdaStarBudget, WeightBounds,
};
use halfspec::verify::{growth_ratio, unit_direction, DIRECTION_PEAK};
use halfspec::*;
use halfspec_cli::config::Loaded;
use halfspec_cli::{cmd_solve, Options};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: String) -> Verdict {
    Verdict { passed, detail }
}

fn square() -> Domain64 {
    Domain::rectangle(PI, PI).unwrap()
}

fn log_square_model(modes: usize, quad: usize, lambda: f64) -> Model64 {
    EnergyModel::build(square(), modes, quad, |g| Weight::constant(1.0, g), Nonlinearity::log_square(), lambda)
        .unwrap()
}

fn cf() -> f64 {
    Nonlinearity::<f64>::log_square().estimate_cf(1e4, 2000).unwrap().value
}

/// `√λ` of every basis mode from its index, independent of the library's
/// eigenvalue table.
fn sqrt_eigs(basis: &SpectralBasis64, lengths: [f64; 2]) -> Vec<f64> {
    basis
        .modes()
        .iter()
        .map(|m| {
            let (a, b) = (m.index[0] as f64 * PI / lengths[0], m.index[1] as f64 * PI / lengths[1]);
            (a * a + b * b).sqrt()
        })
        .collect()
}

fn c1_extension_isometry() -> Verdict {
    let basis = Arc::new(SpectralBasis::new(square(), 64).unwrap());
    let grid = Arc::new(QuadratureGrid::new(square(), 128).unwrap());
    let xq = ExtensionQuadrature::new(basis.clone(), grid).unwrap();
    let mu = sqrt_eigs(&basis, [PI, PI]);
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let (mut closed, mut quad) = (0.0f64, 0.0f64);
    for _ in 0..1000 {
        let a: Vec<f64> = random_coeffs(&mut rng, basis.len());
        let want = a.iter().zip(&mu).map(|(x, m)| x * x * m).sum::<f64>().sqrt();
        let u = Field::new(basis.clone(), a).unwrap();
        let w = u.extend();
        closed = closed.max(((w.x_norm() - want) / want).abs().max(((u.h_half_norm() - want) / want).abs()));
        quad = quad.max(((xq.x_norm(&w) - want) / want).abs());
    }
    verdict(
        closed <= 1e-10 && quad <= 1e-8,
        format!("1000 fields, J=64: closed-form max rel {closed:.2e} (tol 1e-10), quadrature M=128 max rel {quad:.2e} (tol 1e-8)"),
    )
}

fn c2_trace_inequality() -> Verdict {
    let lengths = [PI, 2.0];
    let basis = Arc::new(SpectralBasis::new(Domain::rectangle(lengths[0], lengths[1]).unwrap(), 64).unwrap());
    let mu = sqrt_eigs(&basis, lengths);
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..1000 {
        let b: Vec<f64> = random_coeffs(&mut rng, basis.len());
        let w = ExtensionField::new(basis.clone(), b.clone()).unwrap();
        let trace = w.trace().h_half_norm();
        worst = worst.max(trace - w.x_norm());
        // Non-harmonic profiles e^{-kμy}: ‖w‖²_X = Σ b² μ (1+k²)/(2k).
        let k: f64 = rng.gen_range(0.2..5.0);
        let x = b.iter().zip(&mu).map(|(c, m)| c * c * m * (1.0 + k * k) / (2.0 * k)).sum::<f64>().sqrt();
        worst = worst.max(trace - x);
    }
    verdict(
        worst <= 1e-12,
        format!("1000 harmonic and 1000 decaying extensions: max(|Tr w| - |w|_X) = {worst:.2e} (tol 1e-12)"),
    )
}

fn c3_gradient() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let (l1, l2) = (rng.gen_range(1.0..4.0), rng.gen_range(1.0..4.0));
        let lambda = rng.gen_range(0.5..40.0);
        let model = EnergyModel::build(
            Domain::rectangle(l1, l2).unwrap(),
            24,
            48,
            |g| Weight::constant(1.0, g),
            Nonlinearity::log_square(),
            lambda,
        )
        .unwrap();
        let amp = rng.gen_range(0.5..5.0);
        let a: Vec<f64> = random_coeffs::<f64, _>(&mut rng, model.dim()).iter().map(|x| amp * x).collect();
        let g = model.gradient_coeffs(&a);
        let h = 1e-6;
        let (mut num, mut den) = (0.0, 0.0);
        for j in 0..a.len() {
            let (mut p, mut m) = (a.clone(), a.clone());
            p[j] += h;
            m[j] -= h;
            let fd = (model.energy_coeffs(&p) - model.energy_coeffs(&m)) / (2.0 * h);
            num += (fd - g[j]).powi(2);
            den += g[j].powi(2);
        }
        worst = worst.max((num / den).sqrt());
    }
    verdict(worst < 1e-5, format!("20 (model, u) pairs: max rel error {worst:.2e} (tol 1e-5)"))
}

fn c4_nonexistence() -> Verdict {
    let cf = cf();
    let lambda = 0.9 * 2f64.sqrt() / cf;
    let model = log_square_model(64, 128, lambda);
    let check = check_nonexistence(&model, cf);
    let cfg = SolverConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let mut worst = 0.0f64;
    let mut all_converged = true;
    for _ in 0..50 {
        let amp = 10f64.powf(rng.gen_range(-1.0..2.0));
        let a: Vec<f64> = random_coeffs::<f64, _>(&mut rng, model.dim()).iter().map(|x| amp * x).collect();
        let p = minimize(&model, &model.field(a).unwrap(), &cfg).unwrap();
        all_converged &= p.converged;
        worst = worst.max(p.u.h_half_norm());
    }
    verdict(
        check.holds && check.margin > 0.0 && worst < 1e-6 && all_converged,
        format!(
            "lambda = {lambda:.6}: check holds = {}, margin = {:.4}; 50 starts, max |u|_H = {worst:.2e} (tol 1e-6)",
            check.holds, check.margin
        ),
    )
}

fn c5_multiplicity() -> Verdict {
    let l0 = lambda_zero_default(&Nonlinearity::log_square(), WeightBounds::unit(), &square()).unwrap().value;
    let model = log_square_model(64, 128, 2.0 * l0);
    let cfg = SolverConfig::default();
    let r = match solve_both(&model, &cfg) {
        Ok(r) => r,
        Err(e) => return verdict(false, format!("solve_both failed: {e}")),
    };
    if r.points.len() != 2 {
        return verdict(false, format!("outcome {}, {} point(s)", r.outcome.as_str(), r.points.len()));
    }
    let mu = sqrt_eigs(model.basis(), [PI, PI]);
    let residual = |u: &Field64| {
        let g = model.gradient_coeffs(u.coeffs());
        g.iter().zip(&mu).map(|(x, m)| x * x / m).sum::<f64>().sqrt()
    };
    let (u1, u2) = (&r.points[0].u, &r.points[1].u);
    let (e1, e2) = (model.energy_coeffs(u1.coeffs()), model.energy_coeffs(u2.coeffs()));
    let (r1, r2) = (residual(u1), residual(u2));
    let dist = u1.h_distance(u2);
    verdict(
        e1 < 0.0 && e2 > 0.0 && r1 < 1e-8 && r2 < 1e-8 && dist > 1e-4,
        format!(
            "lambda = 2*lambda_0 = {:.6}, J=64, P={}: J(u1) = {e1:.6e}, J(u2) = {e2:.6e}, residuals {r1:.2e}, {r2:.2e} (tol 1e-8), distance {dist:.4e} (min 1e-4)",
            2.0 * l0,
            cfg.path_points
        ),
    )
}

fn c6_bracket() -> Verdict {
    let nl = Nonlinearity::<f64>::log_square();
    let cf = cf();
    let model = log_square_model(64, 128, 1.0);
    let low = lambda_nonexist(2.0, cf, 1.0).unwrap();
    let budget = LambdaStarBudget::around(nl.find_sign_witness(1e4).unwrap(), 50, 606);
    let star = estimate_lambda_star(&model, cf, &budget).unwrap().upper;
    let l0 = lambda_zero_default(&nl, WeightBounds::unit(), &square()).unwrap().value;
    let slack = 1e-10;
    verdict(
        low <= star + slack && star <= l0 + slack,
        format!("lambda_nonexist = {low:.10} <= lambda_star estimate = {star:.10} <= lambda_0 = {l0:.10} (slack 1e-10)"),
    )
}

fn c7_cone_identity() -> Verdict {
    let d = square();
    let grid = QuadratureGrid::new(d.clone(), 128).unwrap();
    let r_in = d.inradius();
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let mut worst = 0.0f64;
    // Ramps at least 0.375 inradius wide, so the annulus spans many nodes.
    for _ in 0..10 {
        let tau = rng.gen_range(0.75..1.0) * r_in;
        let sigma: f64 = rng.gen_range(0.1..0.5);
        let t: f64 = rng.gen_range(0.1..10.0);
        let exact = t * t * PI * (1.0 - sigma * sigma) / (1.0 - sigma).powi(2);
        let p = ConeParams::new(d.center(), tau, sigma, t);
        let quad = cone_gradient_energy_quadrature(&p, &grid).unwrap();
        worst = worst.max(((quad - exact) / exact).abs());
    }
    verdict(worst < 0.01, format!("10 triples, M=128: max rel error {worst:.3e} (tol 1e-2)"))
}

/// `min zₙ` by a dense scan and ternary refinement.
fn min_z_oracle(n: usize) -> f64 {
    let z = |s: f64| {
        let sn = s.powi(n as i32);
        (1.0 - sn) / ((2.0 * sn - 1.0) * (1.0 - s).powi(2))
    };
    let lo = 0.5f64.powf(1.0 / n as f64);
    let count = 100_000;
    let step = (1.0 - lo) / (count + 1) as f64;
    let i = (1..=count)
        .min_by(|&a, &b| z(lo + step * a as f64).total_cmp(&z(lo + step * b as f64)))
        .unwrap();
    let (mut a, mut b) = (lo + step * (i - 1) as f64, lo + step * (i + 1) as f64);
    for _ in 0..200 {
        let (m1, m2) = (a + (b - a) / 3.0, b - (b - a) / 3.0);
        if z(m1) < z(m2) {
            b = m2;
        } else {
            a = m1;
        }
    }
    z(0.5 * (a + b))
}

fn c8_zeta_identity() -> Verdict {
    let mut worst = 0.0f64;
    let mut min_gap = 0.0f64;
    for n in 2..=5 {
        let zmin = min_z_oracle(n);
        let (_, lib) = min_z_n::<f64>(n).unwrap();
        min_gap = min_gap.max(((lib - zmin) / zmin).abs());
        for r in [0.1, 1.0, 10.0] {
            let z = zeta(n, r).unwrap();
            worst = worst.max((0.5 * (zmin / (r * r) + 0.25) * z - 1.0).abs());
        }
    }
    verdict(
        worst <= 1e-12,
        format!("n = 2..5, r in {{0.1, 1, 10}}: max |identity - 1| = {worst:.2e} (tol 1e-12); min z_n rel gap {min_gap:.1e}"),
    )
}

fn c9_subquadratic() -> Verdict {
    let model = log_square_model(64, 128, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(909);
    let (mut small, mut large) = (0.0f64, 0.0f64);
    for _ in 0..10 {
        let u = model.field(random_coeffs(&mut rng, model.dim())).unwrap();
        let u = unit_direction(&u, model.table(), DIRECTION_PEAK);
        let base = growth_ratio(&model, &u, 1.0).abs();
        small = small.max(growth_ratio(&model, &u, 1e-4).abs() / base);
        large = large.max(growth_ratio(&model, &u, 1e4).abs() / base);
    }
    verdict(
        small < 0.01 && large < 0.01,
        format!("10 directions (grid sup {DIRECTION_PEAK}): max ratio at s=1e-4 {small:.2e}, at s=1e4 {large:.2e} (tol 1e-2)"),
    )
}

fn c10_determinism() -> (Verdict, Duration) {
    let l0 = lambda_zero_default(&Nonlinearity::log_square(), WeightBounds::unit(), &square()).unwrap().value;
    let text = format!(
        "seed = 10\nmodes = 64\nquad_points = 128\nlambda = {}\n\
         domain = {{ kind = \"rectangle\", lengths = [{PI:?}, {PI:?}] }}\n",
        2.0 * l0
    );
    let loaded = Loaded::from_str(&text, ".").unwrap();
    let dir = tempfile::tempdir().unwrap();
    let opts = Options {
        out: Some(dir.path().to_path_buf()),
        ..Options::default()
    };
    let snapshot = || -> Vec<(String, Vec<u8>)> {
        let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir.path())
            .unwrap()
            .map(|e| e.unwrap())
            .filter(|e| e.file_name() != "solve_timings.toml")
            .map(|e| (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap()))
            .collect();
        files.sort();
        files
    };
    let clock = Instant::now();
    if let Err(e) = cmd_solve(&loaded, &opts) {
        return (verdict(false, format!("first run failed: {e}")), clock.elapsed());
    }
    let first_time = clock.elapsed();
    let first = snapshot();
    let clock = Instant::now();
    let second_ok = cmd_solve(&loaded, &opts).is_ok();
    let rerun = clock.elapsed();
    let second = snapshot();
    let identical = second_ok && first == second;
    let within = rerun < 2 * first_time;
    (
        verdict(
            identical && within,
            format!(
                "{} files byte-identical = {identical}; rerun {:.1} s vs first solve {:.1} s (budget 2x)",
                first.len(),
                rerun.as_secs_f64(),
                first_time.as_secs_f64()
            ),
        ),
        first_time + rerun,
    )
}

fn main() -> ExitCode {
    type Criterion = (u32, &'static str, u64, fn() -> Verdict);
    let criteria: [Criterion; 9] = [
        (1, "extension isometry", 10, c1_extension_isometry),
        (2, "trace inequality", 5, c2_trace_inequality),
        (3, "gradient correctness", 30, c3_gradient),
        (4, "non-existence below the bound", 120, c4_nonexistence),
        (5, "two solutions above lambda_0", 300, c5_multiplicity),
        (6, "bracket ordering", 60, c6_bracket),
        (7, "cone identity", 30, c7_cone_identity),
        (8, "zeta identity", 5, c8_zeta_identity),
        (9, "sub-quadratic growth", 10, c9_subquadratic),
    ];
    let mut failed = 0;
    let report = |id: u32, name: &str, v: &Verdict, elapsed: Duration, budget: Option<u64>| {
        let in_time = budget.is_none_or(|b| elapsed < Duration::from_secs(b));
        let ok = v.passed && in_time;
        let budget = budget.map_or(String::new(), |b| format!(", budget {b} s"));
        println!(
            "criterion {id:>2} {} {name}: {} [{:.2} s{budget}]",
            if ok { "PASS" } else { "FAIL" },
            v.detail,
            elapsed.as_secs_f64()
        );
        ok
    };
    for (id, name, budget, f) in criteria {
        let clock = Instant::now();
        let v = f();
        if !report(id, name, &v, clock.elapsed(), Some(budget)) {
            failed += 1;
        }
    }
    let (v, elapsed) = c10_determinism();
    if !report(10, "determinism", &v, elapsed, None) {
        failed += 1;
    }
    println!("acceptance: {} of 10 criteria passed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
