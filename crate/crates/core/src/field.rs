//! Coefficient-space representation of `H₀^{1/2}(Ω)` and of its harmonic
//! extension to the half cylinder `Ω × (0, ∞)`.
//!
//! A field `u = Σ aⱼ φⱼ` is stored by its coefficients. The extension
//! `w(x, y) = Σ bⱼ φⱼ(x) e^{-√λⱼ y}` is never gridded in `y`: every
//! `y`-integral is done in closed form.

use std::sync::Arc;

use rand::Rng;

use crate::domain::{mass_matrix, stiffness_matrix, BasisTable, QuadratureGrid, SpectralBasis};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// An element of the truncated space `span{φ₁, …, φ_J}`.
#[derive(Clone, Debug)]
pub struct Field<T> {
    basis: Arc<SpectralBasis<T>>,
    coeffs: Vec<T>,
}

impl<T: Scalar> Field<T> {
    pub fn new(basis: Arc<SpectralBasis<T>>, coeffs: Vec<T>) -> Result<Self> {
        if coeffs.len() != basis.len() {
            return Err(Error::LengthMismatch {
                expected: basis.len(),
                got: coeffs.len(),
            });
        }
        Ok(Self { basis, coeffs })
    }

    pub fn zero(basis: Arc<SpectralBasis<T>>) -> Self {
        let coeffs = vec![T::zero(); basis.len()];
        Self { basis, coeffs }
    }

    /// The `j`-th eigenfunction (0-based) scaled by `amplitude`.
    pub fn mode(basis: Arc<SpectralBasis<T>>, j: usize, amplitude: T) -> Self {
        let mut f = Self::zero(basis);
        f.coeffs[j] = amplitude;
        f
    }

    pub fn basis(&self) -> &Arc<SpectralBasis<T>> {
        &self.basis
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    pub fn scaled(&self, s: T) -> Self {
        Self {
            basis: self.basis.clone(),
            coeffs: self.coeffs.iter().map(|&a| a * s).collect(),
        }
    }

    /// `‖u‖_{H₀^{1/2}} = (Σ aⱼ² λⱼ^{1/2})^{1/2}`.
    pub fn h_half_norm(&self) -> T {
        h_norm_sq(self.basis.sqrt_eigenvalues(), &self.coeffs).sqrt()
    }

    /// `‖u − v‖_{H₀^{1/2}}`.
    pub fn h_distance(&self, other: &Field<T>) -> T {
        let diff: Vec<T> = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| a - b)
            .collect();
        h_norm_sq(self.basis.sqrt_eigenvalues(), &diff).sqrt()
    }

    /// `‖u‖_{L²}` by Parseval.
    pub fn l2_norm(&self) -> T {
        self.coeffs.iter().map(|&a| a * a).sum::<T>().sqrt()
    }

    /// `A_{1/2} u`: `aⱼ ↦ λⱼ^{1/2} aⱼ`.
    pub fn apply_half_laplacian(&self) -> Self {
        Self {
            basis: self.basis.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(self.basis.sqrt_eigenvalues())
                .map(|(&a, &s)| a * s)
                .collect(),
        }
    }

    /// `-Δu`: `aⱼ ↦ λⱼ aⱼ`.
    pub fn apply_laplacian(&self) -> Self {
        Self {
            basis: self.basis.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(self.basis.modes())
                .map(|(&a, m)| a * m.eigenvalue)
                .collect(),
        }
    }

    /// Harmonic extension `E(u)` to the cylinder.
    pub fn extend(&self) -> ExtensionField<T> {
        ExtensionField {
            basis: self.basis.clone(),
            coeffs: self.coeffs.clone(),
        }
    }

    /// `u(x)` at a single point.
    pub fn eval(&self, x: &[T]) -> T {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(j, &a)| a * self.basis.eval(j, x))
            .sum()
    }

    /// Point values of `u` at every node of `grid`.
    pub fn sample_on_grid(&self, grid: &QuadratureGrid<T>) -> Result<Vec<T>> {
        if self.basis.domain() != grid.domain() {
            return Err(Error::DomainMismatch(
                "field and grid live on different domains".into(),
            ));
        }
        Ok(grid.nodes().map(|x| self.eval(x)).collect())
    }

    /// `aⱼ = Σ_m w_m g_m φⱼ(x_m)`: discrete L² projection of grid samples.
    pub fn project(
        values: &[T],
        grid: &QuadratureGrid<T>,
        basis: Arc<SpectralBasis<T>>,
    ) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        if basis.domain() != grid.domain() {
            return Err(Error::DomainMismatch(
                "projection basis and grid live on different domains".into(),
            ));
        }
        let coeffs = (0..basis.len())
            .map(|j| {
                grid.nodes()
                    .zip(grid.weights())
                    .zip(values)
                    .map(|((x, &w), &v)| w * v * basis.eval(j, x))
                    .sum()
            })
            .collect();
        Ok(Self { basis, coeffs })
    }

    /// Fast paths through a precomputed table.
    pub fn sample_with(&self, table: &BasisTable<T>) -> Vec<T> {
        table.synthesize(&self.coeffs)
    }

    pub fn project_with(values: &[T], table: &BasisTable<T>) -> Result<Self> {
        if values.len() != table.grid().len() {
            return Err(Error::LengthMismatch {
                expected: table.grid().len(),
                got: values.len(),
            });
        }
        Ok(Self {
            basis: table.basis().clone(),
            coeffs: table.analyze(values),
        })
    }
}

pub(crate) fn h_norm_sq<T: Scalar>(sqrt_eigs: &[T], coeffs: &[T]) -> T {
    coeffs
        .iter()
        .zip(sqrt_eigs)
        .map(|(&a, &s)| a * a * s)
        .sum()
}

/// An element `w = Σ bⱼ φⱼ e^{-√λⱼ y}` of `X₀^{1/2}` over the cylinder.
#[derive(Clone, Debug)]
pub struct ExtensionField<T> {
    basis: Arc<SpectralBasis<T>>,
    coeffs: Vec<T>,
}

impl<T: Scalar> ExtensionField<T> {
    pub fn new(basis: Arc<SpectralBasis<T>>, coeffs: Vec<T>) -> Result<Self> {
        if coeffs.len() != basis.len() {
            return Err(Error::LengthMismatch {
                expected: basis.len(),
                got: coeffs.len(),
            });
        }
        Ok(Self { basis, coeffs })
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn basis(&self) -> &Arc<SpectralBasis<T>> {
        &self.basis
    }

    /// `Tr(w)(x) = w(x, 0)`.
    pub fn trace(&self) -> Field<T> {
        Field {
            basis: self.basis.clone(),
            coeffs: self.coeffs.clone(),
        }
    }

    /// `‖w‖_X = (∫_C |∇w|²)^{1/2}` in closed form: `(Σ bⱼ² λⱼ^{1/2})^{1/2}`.
    pub fn x_norm(&self) -> T {
        h_norm_sq(self.basis.sqrt_eigenvalues(), &self.coeffs).sqrt()
    }

    /// `w(x, y)` at a point of the cylinder.
    pub fn eval(&self, x: &[T], y: T) -> T {
        self.coeffs
            .iter()
            .zip(self.basis.sqrt_eigenvalues())
            .enumerate()
            .map(|(j, (&b, &s))| b * self.basis.eval(j, x) * (-s * y).exp())
            .sum()
    }

    /// `‖Tr w‖²_{L²}` by Parseval.
    pub fn trace_l2_sq(&self) -> T {
        self.coeffs.iter().map(|&b| b * b).sum()
    }
}

/// Second route to `‖w‖_X`: x-quadrature of the basis products, with the
/// `y`-integrals `∫₀^∞ e^{-(√λᵢ+√λⱼ)y} dy = 1/(√λᵢ+√λⱼ)` done exactly.
///
/// `‖w‖² = Σᵢⱼ bᵢ bⱼ (Sᵢⱼ + √λᵢ√λⱼ Mᵢⱼ) / (√λᵢ + √λⱼ)` with `S`, `M` the
/// quadrature stiffness and mass matrices. Nothing here assumes the basis is
/// orthogonal, so agreement with [`ExtensionField::x_norm`] is a real check.
#[derive(Clone, Debug)]
pub struct ExtensionQuadrature<T> {
    size: usize,
    kernel: Vec<T>,
}

impl<T: Scalar> ExtensionQuadrature<T> {
    pub fn new(basis: Arc<SpectralBasis<T>>, grid: Arc<QuadratureGrid<T>>) -> Result<Self> {
        let table = BasisTable::new(basis.clone(), grid.clone())?;
        let mass = mass_matrix(&table);
        let stiff = stiffness_matrix(&basis, &grid)?;
        let s = basis.sqrt_eigenvalues();
        let n = basis.len();
        let mut kernel = vec![T::zero(); n * n];
        for i in 0..n {
            for j in 0..n {
                let k = i * n + j;
                kernel[k] = (stiff[k] + s[i] * s[j] * mass[k]) / (s[i] + s[j]);
            }
        }
        Ok(Self { size: n, kernel })
    }

    pub fn x_norm(&self, w: &ExtensionField<T>) -> T {
        let b = w.coeffs();
        let n = self.size;
        let mut acc = T::zero();
        for i in 0..n {
            let row = &self.kernel[i * n..(i + 1) * n];
            acc = acc + b[i] * crate::scalar::dot(row, b);
        }
        acc.max(T::zero()).sqrt()
    }
}

/// Smallest Rayleigh quotient `‖w‖²_X / ‖Tr w‖²_{L²}` over a set of trial
/// extension fields. Bounded below by `λ₁^{1/2}`, attained by the first mode.
pub fn rayleigh_min<'a, T: Scalar>(
    trials: impl IntoIterator<Item = &'a ExtensionField<T>>,
) -> Option<T> {
    trials
        .into_iter()
        .filter_map(|w| {
            let den = w.trace_l2_sq();
            (den > T::zero()).then(|| w.x_norm().powi(2) / den)
        })
        .fold(None, |acc: Option<T>, q| Some(acc.map_or(q, |a| a.min(q))))
}

/// Random coefficients `aⱼ ~ U[-1, 1] / j` (1-based `j`), a decaying
/// spectrum used for property checks and random starts.
pub fn random_coeffs<T: Scalar, R: Rng + ?Sized>(rng: &mut R, len: usize) -> Vec<T> {
    (1..=len)
        .map(|j| T::lit(rng.gen_range(-1.0..=1.0) / j as f64))
        .collect()
}

pub fn random_field<T: Scalar, R: Rng + ?Sized>(
    rng: &mut R,
    basis: Arc<SpectralBasis<T>>,
) -> Field<T> {
    let coeffs = random_coeffs(rng, basis.len());
    Field { basis, coeffs }
}
