//! The energy `J_λ = Φ − λΨ` in coefficient space and its gradient.
//!
//! `Φ(u) = ½ Σ aⱼ² λⱼ^{1/2}` is exact. `Ψ(u) = ∫ β F(u)` is evaluated on the
//! model's quadrature grid, and the gradient is the exact derivative of that
//! discrete `Ψ`, so a zero of [`EnergyModel::gradient`] solves the discrete
//! weak form `√λⱼ aⱼ = λ ∫ β f(u) φⱼ` for every retained mode.

use std::path::Path;
use std::sync::Arc;

use log::warn;

use crate::domain::{BasisTable, Domain, QuadratureGrid, SpectralBasis};
use crate::error::{Error, Result};
use crate::field::{h_norm_sq, Field};
use crate::nonlinearity::Nonlinearity;
use crate::scalar::Scalar;

/// A positive weight `β ∈ L^∞(Ω)` sampled on the quadrature nodes.
#[derive(Clone, Debug)]
pub struct Weight<T> {
    values: Vec<T>,
    essinf: T,
    sup_norm: T,
}

impl<T: Scalar> Weight<T> {
    pub fn constant(value: T, grid: &QuadratureGrid<T>) -> Result<Self> {
        Self::from_values(vec![value; grid.len()])
    }

    /// Samples `beta` once onto the grid. When `declared` bounds
    /// `(essinf, sup)` are given, a relative mismatch above 1 % against the
    /// sampled extremes is logged as a warning.
    pub fn from_fn(
        grid: &QuadratureGrid<T>,
        beta: impl Fn(&[T]) -> T,
        declared: Option<(T, T)>,
    ) -> Result<Self> {
        let w = Self::from_values(grid.nodes().map(beta).collect())?;
        if let Some((lo, hi)) = declared {
            let off = |got: T, want: T| (got - want).abs() > T::lit(0.01) * want.abs();
            if off(w.essinf, lo) || off(w.sup_norm, hi) {
                warn!(
                    "weight bounds sampled on the grid ({}, {}) differ from declared ({lo}, {hi}) by more than 1%",
                    w.essinf, w.sup_norm
                );
            }
        }
        Ok(w)
    }

    pub fn from_values(values: Vec<T>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument("weight has no samples".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("weight has non-finite samples".into()));
        }
        let essinf = values.iter().copied().fold(T::infinity(), T::min);
        let sup_norm = values.iter().map(|v| v.abs()).fold(T::zero(), T::max);
        if essinf <= T::zero() {
            return Err(Error::HypothesisNotMet(format!(
                "essinf beta must be positive, got {essinf}"
            )));
        }
        Ok(Self {
            values,
            essinf,
            sup_norm,
        })
    }

    /// Tabulated weight on a tensor grid, CSV rows `x₁[,x₂],β`, interpolated
    /// (bi)linearly onto `grid` and clamped at the table edges.
    pub fn from_table_csv(path: &Path, grid: &QuadratureGrid<T>) -> Result<Self> {
        let dim = grid.dim();
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_path(path)?;
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let parsed: std::result::Result<Vec<f64>, _> =
                rec.iter().map(|s| s.parse::<f64>()).collect();
            match parsed {
                Ok(v) if v.len() == dim + 1 => rows.push(v),
                Err(_) if i == 0 => continue,
                _ => {
                    return Err(Error::InvalidArgument(format!(
                        "{}: row {} needs {} numeric columns",
                        path.display(),
                        i + 1,
                        dim + 1
                    )))
                }
            }
        }
        let table = TensorTable::new(dim, &rows).map_err(|e| {
            Error::InvalidArgument(format!("{}: {e}", path.display()))
        })?;
        Self::from_values(
            grid.nodes()
                .map(|x| {
                    let p: Vec<f64> = x.iter().map(|v| v.to_f64_lossy()).collect();
                    T::lit(table.interpolate(&p))
                })
                .collect(),
        )
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn essinf(&self) -> T {
        self.essinf
    }

    /// `‖β‖_{L^∞}` over the nodes.
    pub fn sup_norm(&self) -> T {
        self.sup_norm
    }

    pub fn scaled(&self, s: T) -> Result<Self> {
        Self::from_values(self.values.iter().map(|&v| v * s).collect())
    }

    pub fn is_constant(&self) -> bool {
        self.essinf == self.sup_norm
    }
}

/// Values on a tensor grid of axis coordinates, for (bi)linear lookup.
struct TensorTable {
    axes: Vec<Vec<f64>>,
    values: Vec<f64>,
}

impl TensorTable {
    fn new(dim: usize, rows: &[Vec<f64>]) -> std::result::Result<Self, String> {
        let mut axes: Vec<Vec<f64>> = (0..dim)
            .map(|d| {
                let mut a: Vec<f64> = rows.iter().map(|r| r[d]).collect();
                a.sort_by(|x, y| x.partial_cmp(y).unwrap());
                a.dedup();
                a
            })
            .collect();
        let expected: usize = axes.iter().map(Vec::len).product();
        if expected != rows.len() || axes.iter().any(|a| a.is_empty()) {
            return Err(format!(
                "rows do not form a complete tensor grid ({} rows, {expected} expected)",
                rows.len()
            ));
        }
        let mut values = vec![f64::NAN; expected];
        for r in rows {
            let mut flat = 0;
            for (d, axis) in axes.iter().enumerate() {
                let k = axis.binary_search_by(|p| p.partial_cmp(&r[d]).unwrap()).unwrap();
                flat = flat * axis.len() + k;
            }
            values[flat] = r[dim];
        }
        axes.shrink_to_fit();
        Ok(Self { axes, values })
    }

    fn interpolate(&self, x: &[f64]) -> f64 {
        // Per axis: lower index and fraction.
        let cells: Vec<(usize, f64)> = self
            .axes
            .iter()
            .zip(x)
            .map(|(a, &v)| {
                if a.len() == 1 || v <= a[0] {
                    return (0, 0.0);
                }
                if v >= a[a.len() - 1] {
                    return (a.len() - 2, 1.0);
                }
                let i = a.partition_point(|p| *p <= v) - 1;
                (i, (v - a[i]) / (a[i + 1] - a[i]))
            })
            .collect();
        let dim = self.axes.len();
        let mut acc = 0.0;
        for corner in 0..(1usize << dim) {
            let mut weight = 1.0;
            let mut flat = 0;
            for (d, axis) in self.axes.iter().enumerate() {
                let (i, frac) = cells[d];
                let up = (corner >> d) & 1 == 1;
                let idx = if axis.len() == 1 { 0 } else { i + usize::from(up) };
                weight *= if axis.len() == 1 {
                    if up {
                        0.0
                    } else {
                        1.0
                    }
                } else if up {
                    frac
                } else {
                    1.0 - frac
                };
                flat = flat * axis.len() + idx;
            }
            if weight != 0.0 {
                acc += weight * self.values[flat];
            }
        }
        acc
    }
}

/// `(basis, grid, β, f, λ)`: everything needed to evaluate `J_λ`.
#[derive(Clone, Debug)]
pub struct EnergyModel<T> {
    table: Arc<BasisTable<T>>,
    weight: Arc<Weight<T>>,
    nonlinearity: Nonlinearity<T>,
    lambda: T,
}

impl<T: Scalar> EnergyModel<T> {
    pub fn new(
        table: Arc<BasisTable<T>>,
        weight: Weight<T>,
        nonlinearity: Nonlinearity<T>,
        lambda: T,
    ) -> Result<Self> {
        if weight.values().len() != table.grid().len() {
            return Err(Error::LengthMismatch {
                expected: table.grid().len(),
                got: weight.values().len(),
            });
        }
        if !(lambda >= T::zero()) || !lambda.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "lambda must be finite and >= 0, got {lambda}"
            )));
        }
        Ok(Self {
            table,
            weight: Arc::new(weight),
            nonlinearity,
            lambda,
        })
    }

    /// Builds basis, grid and table from scratch.
    pub fn build(
        domain: Domain<T>,
        modes: usize,
        quad_points: usize,
        weight: impl FnOnce(&QuadratureGrid<T>) -> Result<Weight<T>>,
        nonlinearity: Nonlinearity<T>,
        lambda: T,
    ) -> Result<Self> {
        let basis = Arc::new(SpectralBasis::new(domain.clone(), modes)?);
        let grid = Arc::new(QuadratureGrid::new(domain, quad_points)?);
        let w = weight(&grid)?;
        let table = Arc::new(BasisTable::new(basis, grid)?);
        Self::new(table, w, nonlinearity, lambda)
    }

    /// Same model at another `λ`; shares all precomputed data.
    pub fn with_lambda(&self, lambda: T) -> Result<Self> {
        if !(lambda >= T::zero()) || !lambda.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "lambda must be finite and >= 0, got {lambda}"
            )));
        }
        Ok(Self {
            lambda,
            ..self.clone()
        })
    }

    /// Same model with another nonlinearity.
    pub fn with_nonlinearity(&self, nonlinearity: Nonlinearity<T>) -> Self {
        Self {
            nonlinearity,
            ..self.clone()
        }
    }

    pub fn lambda(&self) -> T {
        self.lambda
    }

    pub fn basis(&self) -> &Arc<SpectralBasis<T>> {
        self.table.basis()
    }

    pub fn grid(&self) -> &Arc<QuadratureGrid<T>> {
        self.table.grid()
    }

    pub fn table(&self) -> &Arc<BasisTable<T>> {
        &self.table
    }

    pub fn weight(&self) -> &Weight<T> {
        &self.weight
    }

    pub fn nonlinearity(&self) -> &Nonlinearity<T> {
        &self.nonlinearity
    }

    pub fn domain(&self) -> &Domain<T> {
        self.basis().domain()
    }

    pub fn dim(&self) -> usize {
        self.basis().len()
    }

    pub fn field(&self, coeffs: Vec<T>) -> Result<Field<T>> {
        Field::new(self.basis().clone(), coeffs)
    }

    /// `Φ(u) = ½‖u‖²_{H₀^{1/2}}`.
    pub fn phi_coeffs(&self, a: &[T]) -> T {
        T::lit(0.5) * h_norm_sq(self.basis().sqrt_eigenvalues(), a)
    }

    /// `Ψ(u) = ∫ β F(u)` by quadrature.
    pub fn psi_coeffs(&self, a: &[T]) -> T {
        self.psi_samples(&self.table.synthesize(a))
    }

    /// `Ψ` from point values at the grid nodes.
    pub fn psi_samples(&self, u: &[T]) -> T {
        let nl = &self.nonlinearity;
        u.iter()
            .zip(self.weight.values())
            .zip(self.grid().weights())
            .map(|((&v, &b), &w)| w * b * nl.primitive(v))
            .sum()
    }

    pub fn energy_coeffs(&self, a: &[T]) -> T {
        self.phi_coeffs(a) - self.lambda * self.psi_coeffs(a)
    }

    /// `gⱼ = √λⱼ aⱼ − λ Σ_m w_m β_m f(u_m) φⱼ(x_m)`.
    pub fn gradient_coeffs(&self, a: &[T]) -> Vec<T> {
        self.energy_and_gradient(a).1
    }

    /// `(J_λ(u), ∇J_λ(u))` sharing one synthesis.
    pub fn energy_and_gradient(&self, a: &[T]) -> (T, Vec<T>) {
        let u = self.table.synthesize(a);
        let nl = &self.nonlinearity;
        let beta = self.weight.values();
        let psi = self.psi_samples(&u);
        let forcing: Vec<T> = u.iter().zip(beta).map(|(&v, &b)| b * nl.f(v)).collect();
        let proj = self.table.analyze(&forcing);
        let grad = a
            .iter()
            .zip(self.basis().sqrt_eigenvalues())
            .zip(&proj)
            .map(|((&ai, &s), &p)| s * ai - self.lambda * p)
            .collect();
        (self.phi_coeffs(a) - self.lambda * psi, grad)
    }

    /// `(Σ gⱼ² / λⱼ^{1/2})^{1/2}`: the norm of the derivative as a functional
    /// on `H₀^{1/2}`.
    pub fn dual_norm(&self, g: &[T]) -> T {
        g.iter()
            .zip(self.basis().sqrt_eigenvalues())
            .map(|(&x, &s)| x * x / s)
            .sum::<T>()
            .sqrt()
    }

    pub fn phi(&self, u: &Field<T>) -> T {
        self.phi_coeffs(u.coeffs())
    }

    pub fn psi(&self, u: &Field<T>) -> T {
        self.psi_coeffs(u.coeffs())
    }

    pub fn j_lambda(&self, u: &Field<T>) -> T {
        self.energy_coeffs(u.coeffs())
    }

    pub fn grad_j(&self, u: &Field<T>) -> Field<T> {
        Field::new(self.basis().clone(), self.gradient_coeffs(u.coeffs()))
            .expect("gradient has one entry per mode")
    }

    /// Dual residual `‖J_λ'(u)‖_*`.
    pub fn grad_norm_dual(&self, u: &Field<T>) -> T {
        self.dual_norm(&self.gradient_coeffs(u.coeffs()))
    }
}
