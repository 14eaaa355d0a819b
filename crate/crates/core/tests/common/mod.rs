#![allow(dead_code)]

use qfivol_core::matrix::{DensityMatrix, HermitianMatrix};
use qfivol_core::monotone::MonotoneFunction;
use qfivol_core::random::{sample_density, sample_hermitian, sample_pure, Ensemble, RandomSpec};
use qfivol_core::CMatrix;

pub fn state(seed: u64, dim: usize, real: bool) -> DensityMatrix {
    let e = if real { Ensemble::RealDensity } else { Ensemble::Density };
    sample_density(&RandomSpec::new(seed, dim, e), 0).unwrap()
}

pub fn observables(seed: u64, dim: usize, count: usize, real: bool) -> Vec<HermitianMatrix> {
    let e = if real { Ensemble::RealSymmetric } else { Ensemble::ComplexHermitian };
    let spec = RandomSpec::new(seed, dim, e);
    (0..count as u64).map(|k| sample_hermitian(&spec, k).unwrap()).collect()
}

/// Rank-two state in dimension ≥ 3, so not faithful.
pub fn rank_two_state(seed: u64, dim: usize) -> DensityMatrix {
    let p = sample_pure(seed, dim, 0).unwrap();
    let q = sample_pure(seed, dim, 1).unwrap();
    let m: CMatrix = p.as_matrix().map(|z| z * 0.6) + q.as_matrix().map(|z| z * 0.4);
    DensityMatrix::from_matrix(m).unwrap()
}

pub fn regular_builtins() -> Vec<MonotoneFunction> {
    vec![MonotoneFunction::sld(), MonotoneFunction::wy(), MonotoneFunction::wyd(0.25).unwrap()]
}

pub fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}
