//! Computational domains with analytically known Dirichlet eigenpairs of
//! `-Δ`, plus tensor Gauss–Legendre quadrature over them.
//!
//! Intervals and rectangles carry a sine basis. Balls exist only so the
//! threshold formulas can be evaluated on them; asking a ball for a basis or
//! a quadrature grid is an error.

use std::cmp::Ordering;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Bounded open set `Ω ⊂ ℝⁿ`.
#[derive(Clone, Debug, PartialEq)]
pub enum Domain<T> {
    /// `(0, L)`.
    Interval { length: T },
    /// `(0, L₁) × (0, L₂)`.
    Rectangle { lengths: [T; 2] },
    /// `B(0, r) ⊂ ℝⁿ`.
    Ball { dim: usize, radius: T },
}

impl<T: Scalar> Domain<T> {
    pub fn interval(length: T) -> Result<Self> {
        positive("interval length", length)?;
        Ok(Domain::Interval { length })
    }

    pub fn rectangle(l1: T, l2: T) -> Result<Self> {
        positive("rectangle side", l1)?;
        positive("rectangle side", l2)?;
        Ok(Domain::Rectangle { lengths: [l1, l2] })
    }

    pub fn ball(dim: usize, radius: T) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("ball dimension must be >= 1".into()));
        }
        positive("ball radius", radius)?;
        Ok(Domain::Ball { dim, radius })
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Domain::Interval { .. } => "interval",
            Domain::Rectangle { .. } => "rectangle",
            Domain::Ball { .. } => "ball",
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Domain::Interval { .. } => 1,
            Domain::Rectangle { .. } => 2,
            Domain::Ball { dim, .. } => *dim,
        }
    }

    /// Lebesgue measure `|Ω|`.
    pub fn measure(&self) -> T {
        match *self {
            Domain::Interval { length } => length,
            Domain::Rectangle { lengths } => lengths[0] * lengths[1],
            Domain::Ball { dim, radius } => {
                unit_ball_volume::<T>(dim).expect("dim >= 1") * radius.powi(dim as i32)
            }
        }
    }

    /// Radius of the largest inscribed ball.
    pub fn inradius(&self) -> T {
        let half = T::lit(0.5);
        match *self {
            Domain::Interval { length } => half * length,
            Domain::Rectangle { lengths } => half * lengths[0].min(lengths[1]),
            Domain::Ball { radius, .. } => radius,
        }
    }

    /// Center of the largest inscribed ball.
    pub fn center(&self) -> Vec<T> {
        let half = T::lit(0.5);
        match *self {
            Domain::Interval { length } => vec![half * length],
            Domain::Rectangle { lengths } => vec![half * lengths[0], half * lengths[1]],
            Domain::Ball { dim, .. } => vec![T::zero(); dim],
        }
    }

    /// Whether the open ball `B(center, radius)` lies inside `Ω`.
    pub fn contains_ball(&self, center: &[T], radius: T) -> bool {
        if center.len() != self.dim() || radius <= T::zero() {
            return false;
        }
        // Tiny relative slack so that the inradius ball itself qualifies.
        let slack = T::lit(64.0) * T::epsilon() * (T::one() + self.inradius());
        match *self {
            Domain::Interval { length } => {
                center[0] - radius >= -slack && center[0] + radius <= length + slack
            }
            Domain::Rectangle { lengths } => center.iter().zip(lengths).all(|(&c, l)| {
                c - radius >= -slack && c + radius <= l + slack
            }),
            Domain::Ball {
                radius: outer, ..
            } => {
                let norm = center.iter().map(|&c| c * c).sum::<T>().sqrt();
                norm + radius <= outer + slack
            }
        }
    }

    /// The existence theory is stated for `n ≥ 2`; intervals are accepted as
    /// a test bed but flagged.
    pub fn within_theorem_hypotheses(&self) -> bool {
        self.dim() >= 2
    }
}

fn positive<T: Scalar>(what: &str, v: T) -> Result<()> {
    if v > T::zero() && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{what} must be positive and finite, got {v}")))
    }
}

/// Volume `ωₙ = π^{n/2} / Γ(1 + n/2)` of the unit ball in `ℝⁿ`.
///
/// Uses the recurrence `ωₙ = 2π/n · ωₙ₋₂` with `ω₀ = 1`, `ω₁ = 2`, which is
/// exact in the integer dimensions we need and avoids a gamma function.
pub fn unit_ball_volume<T: Scalar>(n: usize) -> Result<T> {
    if n == 0 {
        return Err(Error::InvalidArgument("dimension must be >= 1".into()));
    }
    let two_pi = T::lit(2.0) * T::PI();
    let mut w = if n.is_multiple_of(2) { T::one() } else { T::lit(2.0) };
    let mut k = if n.is_multiple_of(2) { 2 } else { 3 };
    while k <= n {
        w = w * two_pi / T::from_usize_lossy(k);
        k += 2;
    }
    Ok(w)
}

/// One Dirichlet eigenpair.
#[derive(Clone, Debug, PartialEq)]
pub struct Mode<T> {
    /// Multi-index `(m)` or `(m, p)`, 1-based.
    pub index: Vec<usize>,
    pub eigenvalue: T,
}

/// The `J` lowest L²-normalised Dirichlet eigenpairs of `-Δ` on an interval
/// or rectangle, sorted ascending (ties broken by lexicographic index).
#[derive(Clone, Debug)]
pub struct SpectralBasis<T> {
    domain: Domain<T>,
    modes: Vec<Mode<T>>,
    sqrt_eigs: Vec<T>,
}

impl<T: Scalar> SpectralBasis<T> {
    pub fn new(domain: Domain<T>, modes: usize) -> Result<Self> {
        if modes == 0 {
            return Err(Error::InvalidArgument("mode count must be >= 1".into()));
        }
        let mut list: Vec<Mode<T>> = match domain {
            Domain::Interval { length } => (1..=modes)
                .map(|m| Mode {
                    index: vec![m],
                    eigenvalue: axis_eigenvalue(m, length),
                })
                .collect(),
            Domain::Rectangle { lengths } => {
                // The J lowest pairs always have both indices <= J.
                let mut all = Vec::with_capacity(modes * modes);
                for m in 1..=modes {
                    for p in 1..=modes {
                        all.push(Mode {
                            index: vec![m, p],
                            eigenvalue: axis_eigenvalue(m, lengths[0])
                                + axis_eigenvalue(p, lengths[1]),
                        });
                    }
                }
                all
            }
            Domain::Ball { .. } => return Err(Error::UnsupportedBasis("ball")),
        };
        list.sort_by(mode_order);
        list.truncate(modes);
        let sqrt_eigs = list.iter().map(|m| m.eigenvalue.sqrt()).collect();
        Ok(Self {
            domain,
            modes: list,
            sqrt_eigs,
        })
    }

    pub fn domain(&self) -> &Domain<T> {
        &self.domain
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn modes(&self) -> &[Mode<T>] {
        &self.modes
    }

    pub fn eigenvalues(&self) -> Vec<T> {
        self.modes.iter().map(|m| m.eigenvalue).collect()
    }

    /// `λⱼ^{1/2}` for every retained mode.
    pub fn sqrt_eigenvalues(&self) -> &[T] {
        &self.sqrt_eigs
    }

    /// First Dirichlet eigenvalue `λ₁`.
    pub fn lambda1(&self) -> T {
        self.modes[0].eigenvalue
    }

    /// Largest 1-D index appearing in any retained mode.
    pub fn max_axis_index(&self) -> usize {
        self.modes
            .iter()
            .flat_map(|m| m.index.iter().copied())
            .max()
            .unwrap_or(0)
    }

    /// `φⱼ(x)`.
    pub fn eval(&self, j: usize, x: &[T]) -> T {
        let idx = &self.modes[j].index;
        match self.domain {
            Domain::Interval { length } => axis_sine(idx[0], length, x[0]),
            Domain::Rectangle { lengths } => {
                axis_sine(idx[0], lengths[0], x[0]) * axis_sine(idx[1], lengths[1], x[1])
            }
            Domain::Ball { .. } => unreachable!("ball bases are never constructed"),
        }
    }

    /// `∇φⱼ(x)`.
    pub fn grad(&self, j: usize, x: &[T]) -> Vec<T> {
        let idx = &self.modes[j].index;
        match self.domain {
            Domain::Interval { length } => vec![axis_sine_deriv(idx[0], length, x[0])],
            Domain::Rectangle { lengths } => {
                let (sx, sy) = (
                    axis_sine(idx[0], lengths[0], x[0]),
                    axis_sine(idx[1], lengths[1], x[1]),
                );
                vec![
                    axis_sine_deriv(idx[0], lengths[0], x[0]) * sy,
                    sx * axis_sine_deriv(idx[1], lengths[1], x[1]),
                ]
            }
            Domain::Ball { .. } => unreachable!("ball bases are never constructed"),
        }
    }
}

fn mode_order<T: Scalar>(a: &Mode<T>, b: &Mode<T>) -> Ordering {
    let scale = a.eigenvalue.abs().max(b.eigenvalue.abs());
    if (a.eigenvalue - b.eigenvalue).abs() <= T::lit(16.0) * T::epsilon() * scale {
        a.index.cmp(&b.index)
    } else {
        a.eigenvalue.partial_cmp(&b.eigenvalue).unwrap_or(Ordering::Equal)
    }
}

fn axis_eigenvalue<T: Scalar>(m: usize, length: T) -> T {
    let k = T::from_usize_lossy(m) * T::PI() / length;
    k * k
}

fn axis_sine<T: Scalar>(m: usize, length: T, x: T) -> T {
    (T::lit(2.0) / length).sqrt() * (T::from_usize_lossy(m) * T::PI() * x / length).sin()
}

fn axis_sine_deriv<T: Scalar>(m: usize, length: T, x: T) -> T {
    let k = T::from_usize_lossy(m) * T::PI() / length;
    (T::lit(2.0) / length).sqrt() * k * (k * x).cos()
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, ascending.
pub fn gauss_legendre<T: Scalar>(m: usize) -> (Vec<T>, Vec<T>) {
    let mut nodes = vec![T::zero(); m];
    let mut weights = vec![T::zero(); m];
    let mf = T::from_usize_lossy(m);
    for i in 0..m.div_ceil(2) {
        // Tricomi initial guess, then Newton on P_m.
        let mut x = (T::PI() * (T::from_usize_lossy(i) + T::lit(0.75)) / (mf + T::lit(0.5))).cos();
        let mut dp = T::one();
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(m, x);
            dp = d;
            let dx = p / d;
            x = x - dx;
            if dx.abs() <= T::lit(2.0) * T::epsilon() {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(m, x);
        if d != T::zero() {
            dp = d;
        }
        let w = T::lit(2.0) / ((T::one() - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[m - 1 - i] = x;
        weights[i] = w;
        weights[m - 1 - i] = w;
    }
    if m % 2 == 1 {
        nodes[m / 2] = T::zero();
    }
    (nodes, weights)
}

fn legendre_with_derivative<T: Scalar>(m: usize, x: T) -> (T, T) {
    let mut p0 = T::one();
    let mut p1 = x;
    if m == 0 {
        return (p0, T::zero());
    }
    for k in 2..=m {
        let kf = T::from_usize_lossy(k);
        let p2 = ((T::lit(2.0) * kf - T::one()) * x * p1 - (kf - T::one()) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = T::from_usize_lossy(m) * (x * p1 - p0) / (x * x - T::one());
    (p1, d)
}

/// Tensor Gauss–Legendre rule on an interval or rectangle.
#[derive(Clone, Debug)]
pub struct QuadratureGrid<T> {
    domain: Domain<T>,
    order: usize,
    axes: Vec<(Vec<T>, Vec<T>)>,
    coords: Vec<T>,
    weights: Vec<T>,
}

impl<T: Scalar> QuadratureGrid<T> {
    /// `order` points per dimension.
    pub fn new(domain: Domain<T>, order: usize) -> Result<Self> {
        if order < 2 {
            return Err(Error::InvalidArgument(format!(
                "quadrature needs at least 2 points per dimension, got {order}"
            )));
        }
        let lengths: Vec<T> = match domain {
            Domain::Interval { length } => vec![length],
            Domain::Rectangle { lengths } => lengths.to_vec(),
            Domain::Ball { .. } => return Err(Error::UnsupportedBasis("ball")),
        };
        let (ref_nodes, ref_weights) = gauss_legendre::<T>(order);
        let half = T::lit(0.5);
        let axes: Vec<(Vec<T>, Vec<T>)> = lengths
            .iter()
            .map(|&l| {
                let x = ref_nodes.iter().map(|&r| half * l * (r + T::one())).collect();
                let w = ref_weights.iter().map(|&w| half * l * w).collect();
                (x, w)
            })
            .collect();
        let (coords, weights) = match axes.as_slice() {
            [(x, w)] => (x.clone(), w.clone()),
            [(x0, w0), (x1, w1)] => {
                let mut c = Vec::with_capacity(2 * order * order);
                let mut ws = Vec::with_capacity(order * order);
                for (a, wa) in x0.iter().zip(w0) {
                    for (b, wb) in x1.iter().zip(w1) {
                        c.push(*a);
                        c.push(*b);
                        ws.push(*wa * *wb);
                    }
                }
                (c, ws)
            }
            _ => unreachable!(),
        };
        Ok(Self {
            domain,
            order,
            axes,
            coords,
            weights,
        })
    }

    pub fn domain(&self) -> &Domain<T> {
        &self.domain
    }

    /// Points per dimension.
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn node(&self, i: usize) -> &[T] {
        let d = self.dim();
        &self.coords[i * d..(i + 1) * d]
    }

    pub fn nodes(&self) -> impl Iterator<Item = &[T]> {
        self.coords.chunks_exact(self.dim())
    }

    /// 1-D nodes and weights along each axis.
    pub fn axes(&self) -> &[(Vec<T>, Vec<T>)] {
        &self.axes
    }

    /// `∫_Ω g` for grid samples `g`.
    pub fn integrate(&self, values: &[T]) -> T {
        crate::scalar::dot(&self.weights, values)
    }

    pub fn integrate_fn(&self, f: impl Fn(&[T]) -> T) -> T {
        self.nodes().zip(&self.weights).map(|(x, &w)| w * f(x)).sum()
    }
}

/// Basis values `φⱼ(x_m)` at every node of a grid, stored mode-major.
///
/// This is the workhorse behind sampling, projection and the nonlinear terms
/// of the energy.
#[derive(Clone, Debug)]
pub struct BasisTable<T> {
    basis: Arc<SpectralBasis<T>>,
    grid: Arc<QuadratureGrid<T>>,
    values: Vec<T>,
}

impl<T: Scalar> BasisTable<T> {
    pub fn new(basis: Arc<SpectralBasis<T>>, grid: Arc<QuadratureGrid<T>>) -> Result<Self> {
        if basis.domain() != grid.domain() {
            return Err(Error::DomainMismatch(format!(
                "basis on {:?}, grid on {:?}",
                basis.domain(),
                grid.domain()
            )));
        }
        let n = grid.len();
        let axes = grid.axes();
        let axis_table = |axis: usize, m: usize, length: T| -> Vec<T> {
            axes[axis].0.iter().map(|&x| axis_sine(m, length, x)).collect()
        };
        let mut values = Vec::with_capacity(basis.len() * n);
        for mode in basis.modes() {
            match *basis.domain() {
                Domain::Interval { length } => values.extend(axis_table(0, mode.index[0], length)),
                Domain::Rectangle { lengths } => {
                    let sx = axis_table(0, mode.index[0], lengths[0]);
                    let sy = axis_table(1, mode.index[1], lengths[1]);
                    for a in &sx {
                        values.extend(sy.iter().map(|&b| *a * b));
                    }
                }
                Domain::Ball { .. } => unreachable!(),
            }
        }
        Ok(Self {
            basis,
            grid,
            values,
        })
    }

    pub fn basis(&self) -> &Arc<SpectralBasis<T>> {
        &self.basis
    }

    pub fn grid(&self) -> &Arc<QuadratureGrid<T>> {
        &self.grid
    }

    /// Row `j`: `φⱼ` at every node.
    pub fn mode(&self, j: usize) -> &[T] {
        let n = self.grid.len();
        &self.values[j * n..(j + 1) * n]
    }

    /// `Σⱼ aⱼ φⱼ(x_m)` at every node.
    pub fn synthesize(&self, coeffs: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.grid.len()];
        for (j, &a) in coeffs.iter().enumerate() {
            if a == T::zero() {
                continue;
            }
            for (o, &p) in out.iter_mut().zip(self.mode(j)) {
                *o = *o + a * p;
            }
        }
        out
    }

    /// `Σ_m w_m g_m φⱼ(x_m)` for every mode: the discrete `∫ g φⱼ`.
    pub fn analyze(&self, values: &[T]) -> Vec<T> {
        let weighted: Vec<T> = values
            .iter()
            .zip(self.grid.weights())
            .map(|(&v, &w)| v * w)
            .collect();
        (0..self.basis.len())
            .map(|j| crate::scalar::dot(self.mode(j), &weighted))
            .collect()
    }
}

/// Quadrature Gram matrix `∫ φᵢ φⱼ`, row-major `J × J`.
pub fn mass_matrix<T: Scalar>(table: &BasisTable<T>) -> Vec<T> {
    let j = table.basis().len();
    let mut out = vec![T::zero(); j * j];
    for a in 0..j {
        let weighted: Vec<T> = table
            .mode(a)
            .iter()
            .zip(table.grid().weights())
            .map(|(&p, &w)| p * w)
            .collect();
        for b in a..j {
            let v = crate::scalar::dot(&weighted, table.mode(b));
            out[a * j + b] = v;
            out[b * j + a] = v;
        }
    }
    out
}

/// Quadrature stiffness matrix `∫ ∇φᵢ·∇φⱼ`, row-major `J × J`, with the
/// gradients evaluated analytically.
pub fn stiffness_matrix<T: Scalar>(
    basis: &SpectralBasis<T>,
    grid: &QuadratureGrid<T>,
) -> Result<Vec<T>> {
    if basis.domain() != grid.domain() {
        return Err(Error::DomainMismatch("stiffness: basis and grid differ".into()));
    }
    let j = basis.len();
    let d = grid.dim();
    // Gradient table: mode-major, then node, then component.
    let mut grads = Vec::with_capacity(j * grid.len() * d);
    for jj in 0..j {
        for x in grid.nodes() {
            grads.extend(basis.grad(jj, x));
        }
    }
    let row = grid.len() * d;
    let w = grid.weights();
    let mut out = vec![T::zero(); j * j];
    for a in 0..j {
        let ga = &grads[a * row..(a + 1) * row];
        for b in a..j {
            let gb = &grads[b * row..(b + 1) * row];
            let v = ga
                .chunks_exact(d)
                .zip(gb.chunks_exact(d))
                .zip(w)
                .map(|((p, q), &wt)| wt * crate::scalar::dot(p, q))
                .sum();
            out[a * j + b] = v;
            out[b * j + a] = v;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn interval_pi_eigenvalues() {
        let b = SpectralBasis::new(Domain::interval(PI).unwrap(), 3).unwrap();
        let e = b.eigenvalues();
        for (got, want) in e.iter().zip([1.0, 4.0, 9.0]) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
    }

    #[test]
    fn square_eigenvalues_with_ties() {
        let b = SpectralBasis::new(Domain::rectangle(PI, PI).unwrap(), 4).unwrap();
        let e = b.eigenvalues();
        for (got, want) in e.iter().zip([2.0, 5.0, 5.0, 8.0]) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
        assert_eq!(b.modes()[1].index, vec![1, 2]);
        assert_eq!(b.modes()[2].index, vec![2, 1]);
    }

    #[test]
    fn unit_interval_first_eigenvalue() {
        let b = SpectralBasis::new(Domain::interval(1.0).unwrap(), 1).unwrap();
        assert!((b.lambda1() - PI * PI).abs() < 1e-12);
    }

    #[test]
    fn basis_errors() {
        assert!(matches!(
            SpectralBasis::new(Domain::ball(2, 1.0).unwrap(), 3),
            Err(Error::UnsupportedBasis(_))
        ));
        assert!(matches!(
            SpectralBasis::new(Domain::interval(1.0).unwrap(), 0),
            Err(Error::InvalidArgument(_))
        ));
        assert!(Domain::rectangle(1.0, -2.0).is_err());
        assert!(Domain::<f64>::ball(0, 1.0).is_err());
    }

    #[test]
    fn eigenvalues_nondecreasing_and_match_brute_force() {
        let b = SpectralBasis::new(Domain::rectangle(1.0, 2.5).unwrap(), 40).unwrap();
        let e = b.eigenvalues();
        assert!(e.windows(2).all(|w| w[0] <= w[1]));
        // Independent enumeration over a generous index box.
        let mut brute: Vec<f64> = (1..60)
            .flat_map(|m| {
                (1..60).map(move |p| {
                    PI * PI * ((m * m) as f64 / 1.0 + (p * p) as f64 / (2.5 * 2.5))
                })
            })
            .collect();
        brute.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (got, want) in e.iter().zip(&brute) {
            assert!((got - want).abs() < 1e-9 * want);
        }
    }

    #[test]
    fn unit_ball_volumes() {
        assert!((unit_ball_volume::<f64>(1).unwrap() - 2.0).abs() < 1e-15);
        assert!((unit_ball_volume::<f64>(2).unwrap() - PI).abs() < 1e-15);
        assert!((unit_ball_volume::<f64>(3).unwrap() - 4.0 * PI / 3.0).abs() < 1e-14);
        assert!((unit_ball_volume::<f64>(4).unwrap() - PI * PI / 2.0).abs() < 1e-14);
        assert!(unit_ball_volume::<f64>(0).is_err());
    }

    #[test]
    fn domain_measures() {
        assert_eq!(Domain::interval(3.0).unwrap().measure(), 3.0);
        assert_eq!(Domain::rectangle(2.0, 3.0).unwrap().measure(), 6.0);
        let ball = Domain::ball(3, 2.0).unwrap().measure();
        assert!((ball - 4.0 * PI / 3.0 * 8.0).abs() < 1e-12);
    }

    #[test]
    fn quadrature_weights_sum_to_measure() {
        let g = QuadratureGrid::new(Domain::interval(1.0).unwrap(), 2).unwrap();
        assert!((g.weights().iter().sum::<f64>() - 1.0).abs() < 1e-15);
        let g = QuadratureGrid::new(Domain::rectangle(PI, 2.0).unwrap(), 17).unwrap();
        let s: f64 = g.weights().iter().sum();
        assert!((s - 2.0 * PI).abs() < 1e-12 * 2.0 * PI);
        assert!(g.weights().iter().all(|&w| w > 0.0));
    }

    #[test]
    fn quadrature_exact_on_polynomials() {
        // M points integrate degree 2M-1 exactly.
        for m in 2..12 {
            let g = QuadratureGrid::<f64>::new(Domain::interval(2.0).unwrap(), m).unwrap();
            let deg = 2 * m - 1;
            let got = g.integrate_fn(|x| x[0].powi(deg as i32));
            let want = 2f64.powi(deg as i32 + 1) / (deg as f64 + 1.0);
            assert!((got - want).abs() < 1e-12 * want, "m={m}");
        }
        let g = QuadratureGrid::<f64>::new(Domain::rectangle(1.0, 3.0).unwrap(), 4).unwrap();
        let got = g.integrate_fn(|x| x[0].powi(7) * x[1].powi(5));
        let want = (1.0 / 8.0) * 3f64.powi(6) / 6.0;
        assert!((got - want).abs() < 1e-12 * want);
    }

    #[test]
    fn quadrature_errors() {
        assert!(QuadratureGrid::new(Domain::interval(1.0).unwrap(), 1).is_err());
        assert!(matches!(
            QuadratureGrid::new(Domain::ball(2, 1.0).unwrap(), 8),
            Err(Error::UnsupportedBasis(_))
        ));
    }

    #[test]
    fn sine_squared_integral() {
        let g = QuadratureGrid::new(Domain::interval(PI).unwrap(), 12).unwrap();
        let v = g.integrate_fn(|x| x[0].sin().powi(2));
        assert!((v - PI / 2.0).abs() < 1e-10);
    }

    #[test]
    fn first_mode_normalised_on_square() {
        let d = Domain::rectangle(PI, PI).unwrap();
        let b = SpectralBasis::new(d.clone(), 1).unwrap();
        let g = QuadratureGrid::new(d, 16).unwrap();
        let v = g.integrate_fn(|x| b.eval(0, x).powi(2));
        assert!((v - 1.0).abs() < 1e-10);
    }

    #[test]
    fn gram_and_stiffness_are_diagonal() {
        let d = Domain::rectangle(PI, 2.0).unwrap();
        let basis = Arc::new(SpectralBasis::new(d.clone(), 20).unwrap());
        let m = 2 * basis.max_axis_index() + 10;
        let grid = Arc::new(QuadratureGrid::new(d, m).unwrap());
        let table = BasisTable::new(basis.clone(), grid.clone()).unwrap();
        let mass = mass_matrix(&table);
        let stiff = stiffness_matrix(&basis, &grid).unwrap();
        let j = basis.len();
        let eig = basis.eigenvalues();
        for a in 0..j {
            for b in 0..j {
                let id = if a == b { 1.0 } else { 0.0 };
                assert!((mass[a * j + b] - id).abs() < 1e-8);
                assert!((stiff[a * j + b] - id * eig[a]).abs() < 1e-8 * eig[a].max(1.0));
            }
        }
    }

    #[test]
    fn table_matches_pointwise_eval() {
        let d = Domain::<f64>::rectangle(1.0, 2.0).unwrap();
        let basis = Arc::new(SpectralBasis::new(d.clone(), 7).unwrap());
        let grid = Arc::new(QuadratureGrid::new(d, 5).unwrap());
        let table = BasisTable::new(basis.clone(), grid.clone()).unwrap();
        for j in 0..basis.len() {
            for (m, x) in grid.nodes().enumerate() {
                assert!((table.mode(j)[m] - basis.eval(j, x)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn table_rejects_mismatched_domains() {
        let b = Arc::new(SpectralBasis::new(Domain::interval(1.0).unwrap(), 3).unwrap());
        let g = Arc::new(QuadratureGrid::new(Domain::interval(2.0).unwrap(), 4).unwrap());
        assert!(matches!(BasisTable::new(b, g), Err(Error::DomainMismatch(_))));
    }

    #[test]
    fn containment() {
        let d = Domain::rectangle(PI, 2.0).unwrap();
        let c = d.center();
        assert!(d.contains_ball(&c, d.inradius()));
        assert!(!d.contains_ball(&c, d.inradius() * 1.01));
        assert!(!d.contains_ball(&[0.1, 1.0], 0.5));
    }

    #[test]
    fn f32_basis_and_quadrature() {
        let d = Domain::<f32>::interval(std::f32::consts::PI).unwrap();
        let b = SpectralBasis::new(d.clone(), 3).unwrap();
        assert!((b.eigenvalues()[2] - 9.0).abs() < 1e-4);
        let g = QuadratureGrid::new(d, 8).unwrap();
        let v = g.integrate_fn(|x| b.eval(0, x).powi(2));
        assert!((v - 1.0).abs() < 1e-5);
    }
}
