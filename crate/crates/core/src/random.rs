//! Counter-based samplers for the matrix ensembles.
//!
//! Every draw is a pure function of `(seed, ensemble, dim, index)`. The
//! generator seed is derived by a splitmix64 chain
//!
//! ```text
//! s = mix(seed); s = mix(s ^ tag(ensemble)); s = mix(s ^ dim); s = mix(s ^ index)
//! ```
//!
//! and handed to `ChaCha8Rng::seed_from_u64`. Workers never share generator
//! state, so parallel sweeps reproduce serial ones bit for bit.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::matrix::{DensityMatrix, HermitianMatrix};
use crate::{CMatrix, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Ensemble {
    /// `(M + M†)/2` with standard complex Gaussian entries.
    ComplexHermitian,
    /// `(M + Mᵀ)/2` with standard real Gaussian entries.
    RealSymmetric,
    /// `GG†/Tr(GG†)` with complex Ginibre `G`.
    Density,
    /// `GGᵀ/Tr(GGᵀ)` with real Ginibre `G`.
    RealDensity,
    /// Triple `(A, B, C)`: arbitrary Hermitian, Hermitian with zero
    /// diagonal, real diagonal.
    PauliLikeStructured,
    /// Diagonal state with flat-Dirichlet probabilities.
    DiagonalDensity,
}

impl Ensemble {
    pub const ALL: [Ensemble; 6] = [
        Ensemble::ComplexHermitian,
        Ensemble::RealSymmetric,
        Ensemble::Density,
        Ensemble::RealDensity,
        Ensemble::PauliLikeStructured,
        Ensemble::DiagonalDensity,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Ensemble::ComplexHermitian => "complex-hermitian",
            Ensemble::RealSymmetric => "real-symmetric",
            Ensemble::Density => "density",
            Ensemble::RealDensity => "real-density",
            Ensemble::PauliLikeStructured => "pauli-like-structured",
            Ensemble::DiagonalDensity => "diagonal-density",
        }
    }

    fn code(self) -> u64 {
        match self {
            Ensemble::ComplexHermitian => 1,
            Ensemble::RealSymmetric => 2,
            Ensemble::Density => 3,
            Ensemble::RealDensity => 4,
            Ensemble::PauliLikeStructured => 5,
            Ensemble::DiagonalDensity => 6,
        }
    }

    pub fn produces_state(self) -> bool {
        matches!(self, Ensemble::Density | Ensemble::RealDensity | Ensemble::DiagonalDensity)
    }
}

impl fmt::Display for Ensemble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Ensemble {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ensemble::ALL
            .into_iter()
            .find(|e| e.tag() == s)
            .ok_or_else(|| Error::UnknownEnsemble(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomSpec {
    pub seed: u64,
    pub dim: usize,
    pub ensemble: Ensemble,
}

impl RandomSpec {
    pub fn new(seed: u64, dim: usize, ensemble: Ensemble) -> Self {
        Self { seed, dim, ensemble }
    }
}

/// One draw from an ensemble.
#[derive(Debug, Clone)]
pub enum Sample {
    Hermitian(HermitianMatrix),
    Density(DensityMatrix),
    Structured([HermitianMatrix; 3]),
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of the generator used for draw `index` of `spec`.
pub fn derive_seed(spec: &RandomSpec, index: u64) -> u64 {
    let mut s = splitmix64(spec.seed);
    s = splitmix64(s ^ spec.ensemble.code());
    s = splitmix64(s ^ spec.dim as u64);
    splitmix64(s ^ index)
}

fn rng_for(spec: &RandomSpec, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(spec, index))
}

fn gauss(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// Complex Gaussian with `E|z|² = 1`.
fn cgauss(rng: &mut ChaCha8Rng) -> C64 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    C64::new(s * gauss(rng), s * gauss(rng))
}

fn ginibre(rng: &mut ChaCha8Rng, n: usize, real: bool) -> CMatrix {
    CMatrix::from_fn(n, n, |_, _| if real { C64::new(gauss(rng), 0.0) } else { cgauss(rng) })
}

fn hermitian_part(m: &CMatrix) -> HermitianMatrix {
    HermitianMatrix::new((m + m.adjoint()) * C64::new(0.5, 0.0)).expect("(M+M†)/2 is self-adjoint")
}

fn density_from(g: &CMatrix) -> Result<DensityMatrix> {
    let w = g * g.adjoint();
    let tr: f64 = (0..w.nrows()).map(|h| w[(h, h)].re).sum();
    DensityMatrix::from_matrix(w / C64::new(tr, 0.0))
}

/// Draw number `index` from `spec`.
pub fn sample(spec: &RandomSpec, index: u64) -> Result<Sample> {
    let n = spec.dim;
    if n == 0 {
        return Err(Error::InvalidParameter("dimension must be positive".into()));
    }
    let mut rng = rng_for(spec, index);
    Ok(match spec.ensemble {
        Ensemble::ComplexHermitian => Sample::Hermitian(hermitian_part(&ginibre(&mut rng, n, false))),
        Ensemble::RealSymmetric => Sample::Hermitian(hermitian_part(&ginibre(&mut rng, n, true))),
        Ensemble::Density => Sample::Density(density_from(&ginibre(&mut rng, n, false))?),
        Ensemble::RealDensity => Sample::Density(density_from(&ginibre(&mut rng, n, true))?),
        Ensemble::DiagonalDensity => {
            let w: Vec<f64> = (0..n).map(|_| cgauss(&mut rng).norm_sqr()).collect();
            let total: f64 = w.iter().sum();
            let p: Vec<f64> = w.iter().map(|v| v / total).collect();
            Sample::Density(DensityMatrix::diagonal(&p)?)
        }
        Ensemble::PauliLikeStructured => {
            let a = hermitian_part(&ginibre(&mut rng, n, false));
            let mut bm = ginibre(&mut rng, n, false);
            for h in 0..n {
                bm[(h, h)] = C64::new(0.0, 0.0);
            }
            let b = hermitian_part(&bm);
            let c: Vec<f64> = (0..n).map(|_| gauss(&mut rng)).collect();
            Sample::Structured([a, b, HermitianMatrix::from_diagonal(&c)])
        }
    })
}

/// Draws a Hermitian observable; fails for state and structured ensembles.
pub fn sample_hermitian(spec: &RandomSpec, index: u64) -> Result<HermitianMatrix> {
    match sample(spec, index)? {
        Sample::Hermitian(h) => Ok(h),
        _ => Err(Error::InvalidParameter(format!("ensemble {} does not produce a single observable", spec.ensemble))),
    }
}

pub fn sample_density(spec: &RandomSpec, index: u64) -> Result<DensityMatrix> {
    match sample(spec, index)? {
        Sample::Density(d) => Ok(d),
        _ => Err(Error::InvalidParameter(format!("ensemble {} does not produce a state", spec.ensemble))),
    }
}

pub fn sample_structured(spec: &RandomSpec, index: u64) -> Result<[HermitianMatrix; 3]> {
    match sample(spec, index)? {
        Sample::Structured(t) => Ok(t),
        _ => Err(Error::InvalidParameter(format!("ensemble {} does not produce a structured triple", spec.ensemble))),
    }
}

/// Haar-random pure state: projector onto a normalized complex Gaussian
/// vector. Uses the `density` ensemble stream with a distinct index space.
pub fn sample_pure(seed: u64, dim: usize, index: u64) -> Result<DensityMatrix> {
    let spec = RandomSpec::new(seed ^ 0x5055_5245, dim, Ensemble::Density);
    let mut rng = rng_for(&spec, index);
    let psi: Vec<C64> = (0..dim).map(|_| cgauss(&mut rng)).collect();
    DensityMatrix::pure(&psi)
}
