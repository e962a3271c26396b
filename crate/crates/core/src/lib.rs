//! Spectral Galerkin solver for the nonlocal Dirichlet problem
//! `A_{1/2} u = λ β(x) f(u)` on intervals and rectangles.
//!
//! The unknown is expanded in the first `J` Dirichlet eigenfunctions of the
//! Laplacian, where `A_{1/2}` acts diagonally (`aⱼ ↦ λⱼ^{1/2} aⱼ`). Solutions
//! are critical points of `J_λ(u) = ½‖u‖²_{H₀^{1/2}} − λ∫β F(u)`, found by
//! [`solvers::minimize`] (the negative-energy minimiser) and
//! [`solvers::mountain_pass`] (the positive-energy saddle).
//! [`thresholds`] computes the a-priori bounds bracketing the parameter
//! range where those solutions exist.
//!
//! Everything is generic over [`Scalar`] (`f32` or `f64`); the `*64`
//! aliases below fix `f64`.

// `!(x > 0)` is deliberate: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod domain;
pub mod energy;
pub mod error;
pub mod field;
pub mod io;
pub mod nonlinearity;
pub mod scalar;
pub mod solvers;
pub mod thresholds;
pub mod verify;

pub use domain::{BasisTable, Domain, Mode, QuadratureGrid, SpectralBasis};
pub use energy::{EnergyModel, Weight};
pub use error::{Error, Result};
pub use field::{ExtensionField, ExtensionQuadrature, Field};
pub use nonlinearity::{CfEstimate, Hypotheses, Nonlinearity};
pub use scalar::Scalar;
pub use solvers::{CriticalKind, CriticalPoint, Outcome, SolveReport, SolverConfig};
pub use thresholds::{ConeParams, ThresholdCertificate, WeightBounds};

pub type Domain64 = Domain<f64>;
pub type SpectralBasis64 = SpectralBasis<f64>;
pub type QuadratureGrid64 = QuadratureGrid<f64>;
pub type Field64 = Field<f64>;
pub type ExtensionField64 = ExtensionField<f64>;
pub type Nonlinearity64 = Nonlinearity<f64>;
pub type Weight64 = Weight<f64>;
pub type Model64 = EnergyModel<f64>;
pub type SolverConfig64 = SolverConfig<f64>;
pub type CriticalPoint64 = CriticalPoint<f64>;
pub type SolveReport64 = SolveReport<f64>;
pub type ThresholdCertificate64 = ThresholdCertificate<f64>;

pub type Field32 = Field<f32>;
pub type Model32 = EnergyModel<f32>;

/// Crate version, embedded in every report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
