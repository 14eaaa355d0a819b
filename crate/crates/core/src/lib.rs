//! # qfivol-core
//!
//! Quantum Fisher information (QFI) metrics built from normalized symmetric
//! operator monotone functions, and numerical machinery for the volume form
//! of the dynamical uncertainty principle
//!
//! ```text
//! det{Cov_ρ(A_h, A_j)}  ≥  det{ (f(0)/2) ⟨i[ρ,A_h], i[ρ,A_j]⟩_{ρ,f} }
//! ```
//!
//! for `N` observables.
//!
//! ## Layout
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`matrix`] | Hermitian and density matrices, spectral decomposition, centering, eigenframes, small determinants |
//! | [`random`] | Seeded, counter-based samplers for the matrix ensembles |
//! | [`monotone`] | Operator monotone function registry, tilde transform, scalar Kubo-Ando means |
//! | [`metrics`] | Covariance, QFI inner product, metric adjusted correlation |
//! | [`volume`] | Gram matrices, the gap `F(f)`, conjecture checks, Robertson baseline |
//! | [`decomposition`] | The `H`/`K` expansions of `F(f)` for `N = 1, 2, 3` |
//! | [`hessian`] | Classical generalized-variance Hessian |
//!
//! ## Quick start
//!
//! ```rust
//! use qfivol_core::{monotone::MonotoneFunction, matrix::{DensityMatrix, HermitianMatrix}};
//! use qfivol_core::metrics::MetricContext;
//!
//! let rho = DensityMatrix::diagonal(&[0.75, 0.25]).unwrap();
//! let sx = HermitianMatrix::pauli_x();
//! let ctx = MetricContext::new(&rho, &MonotoneFunction::wy()).unwrap();
//! let skew = ctx.f_correlation(&sx, &sx).unwrap();
//! assert!((skew - (1.0 - 3f64.sqrt() / 2.0)).abs() < 1e-12);
//! ```

#![forbid(unsafe_code)]

pub mod decomposition;
pub mod error;
pub mod hessian;
pub mod matrix;
pub mod metrics;
pub mod monotone;
pub mod random;
pub mod volume;

pub use error::{Error, Result};
pub use matrix::{DensityMatrix, EigenframeMatrix, HermitianMatrix};
pub use metrics::MetricContext;
pub use monotone::MonotoneFunction;
pub use volume::{GramSpec, Verdict, VolumeReport};

/// Complex scalar used throughout.
pub type C64 = nalgebra::Complex<f64>;
/// Dense complex matrix.
pub type CMatrix = nalgebra::DMatrix<C64>;
/// Dense real matrix.
pub type RMatrix = nalgebra::DMatrix<f64>;
