//! Complex matrix substrate: Hermitian observables, density matrices with a
//! cached spectral decomposition, centering, eigenframe transforms,
//! commutators and small determinants.
//!
//! Inner products are conjugate-linear in the first slot, `⟨u|v⟩ = u†v`, so
//! the eigenframe matrix of an observable is `a = U† A₀ U` where the columns
//! of `U` are the eigenvectors of the state.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::{CMatrix, RMatrix, C64};

/// Self-adjointness tolerance applied at construction.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Allowed deviation of a density matrix trace from one.
pub const TRACE_TOL: f64 = 1e-12;
/// Eigenvalues of a state below this are clamped to zero.
pub const FAITHFUL_CUTOFF: f64 = 1e-12;
/// Iteration cap handed to the eigen-solver.
pub const MAX_EIGEN_ITERATIONS: usize = 10_000;

const ZERO: C64 = C64::new(0.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

fn check_square(m: &CMatrix) -> Result<usize> {
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(m.nrows())
}

fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// Returns `(m + m†)/2` with an exactly real diagonal; the result is
/// bitwise self-adjoint.
fn symmetrize(m: &CMatrix) -> CMatrix {
    let n = m.nrows();
    CMatrix::from_fn(n, n, |h, j| {
        if h == j {
            C64::new(m[(h, h)].re, 0.0)
        } else {
            (m[(h, j)] + m[(j, h)].conj()) * 0.5
        }
    })
}

/// An `n × n` complex self-adjoint matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    m: CMatrix,
}

impl HermitianMatrix {
    /// Validates self-adjointness within [`HERMITIAN_TOL`] and symmetrizes.
    pub fn new(m: CMatrix) -> Result<Self> {
        let n = check_square(&m)?;
        let mut worst = 0.0f64;
        for h in 0..n {
            for j in h..n {
                worst = worst.max((m[(j, h)] - m[(h, j)].conj()).norm());
            }
        }
        if !(worst <= HERMITIAN_TOL) {
            return Err(Error::NotHermitian(worst));
        }
        Ok(Self { m: symmetrize(&m) })
    }

    /// Row-major real entries.
    pub fn from_real_rows(n: usize, data: &[f64]) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: data.len(),
            });
        }
        Self::new(CMatrix::from_fn(n, n, |h, j| C64::new(data[h * n + j], 0.0)))
    }

    /// Row-major complex entries.
    pub fn from_complex_rows(n: usize, data: &[C64]) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: data.len(),
            });
        }
        Self::new(CMatrix::from_fn(n, n, |h, j| data[h * n + j]))
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self {
            m: CMatrix::from_fn(n, n, |h, j| if h == j { C64::new(diag[h], 0.0) } else { ZERO }),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            m: CMatrix::identity(n, n),
        }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            m: CMatrix::zeros(n, n),
        }
    }

    pub fn pauli_x() -> Self {
        Self::from_real_rows(2, &[0.0, 1.0, 1.0, 0.0]).unwrap()
    }

    pub fn pauli_y() -> Self {
        Self::from_complex_rows(2, &[ZERO, -I, I, ZERO]).unwrap()
    }

    pub fn pauli_z() -> Self {
        Self::from_diagonal(&[1.0, -1.0])
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn as_matrix(&self) -> &CMatrix {
        &self.m
    }

    pub fn into_matrix(self) -> CMatrix {
        self.m
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|h| self.m[(h, h)].re).sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { m: &self.m * C64::new(s, 0.0) }
    }

    /// `self + s · other`.
    pub fn add_scaled(&self, other: &Self, s: f64) -> Result<Self> {
        check_dims(self.dim(), other.dim())?;
        Ok(Self {
            m: symmetrize(&(&self.m + &other.m * C64::new(s, 0.0))),
        })
    }

    /// True when every imaginary part is at most `tol` in magnitude.
    pub fn is_real(&self, tol: f64) -> bool {
        self.m.iter().all(|z| z.im.abs() <= tol)
    }

    pub fn max_abs(&self) -> f64 {
        self.m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Eigenvalues sorted descending with the matching unitary.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl Spectrum {
    /// `U diag(λ) U†`.
    pub fn reconstruct(&self) -> CMatrix {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for (j, &l) in self.values.iter().enumerate() {
            for h in 0..n {
                scaled[(h, j)] *= l;
            }
        }
        scaled * self.vectors.adjoint()
    }
}

/// Hermitian eigendecomposition with a reproducible basis.
///
/// Post-processing applied to the solver output, in this order:
///
/// 1. eigenpairs are sorted by eigenvalue, descending; ties keep the
///    solver's column order;
/// 2. within every run of eigenvalues closer than `1e-12 · max(1, |λ|)` the
///    columns are re-orthonormalized by modified Gram-Schmidt, left to right;
/// 3. each column is multiplied by a unit phase making its first
///    largest-modulus component real and positive.
pub fn spectral_decompose(a: &HermitianMatrix) -> Result<Spectrum> {
    let n = a.dim();
    let eig = SymmetricEigen::try_new(a.m.clone(), f64::EPSILON, MAX_EIGEN_ITERATIONS)
        .ok_or(Error::DecompositionFailure(MAX_EIGEN_ITERATIONS))?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&p, &q| eig.eigenvalues[q].total_cmp(&eig.eigenvalues[p]));
    let values: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::DecompositionFailure(MAX_EIGEN_ITERATIONS));
    }
    let mut vectors = CMatrix::from_fn(n, n, |h, j| eig.eigenvectors[(h, order[j])]);

    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && (values[end - 1] - values[end]).abs() <= 1e-12 * values[end - 1].abs().max(1.0) {
            end += 1;
        }
        if end - start > 1 {
            gram_schmidt(&mut vectors, start, end);
        }
        start = end;
    }

    for j in 0..n {
        let mut best = 0;
        let mut best_norm = -1.0;
        for h in 0..n {
            let v = vectors[(h, j)].norm();
            if v > best_norm {
                best_norm = v;
                best = h;
            }
        }
        let z = vectors[(best, j)];
        if best_norm > 0.0 {
            let phase = z.conj() / best_norm;
            for h in 0..n {
                vectors[(h, j)] *= phase;
            }
            vectors[(best, j)] = C64::new(vectors[(best, j)].re, 0.0);
        }
    }

    Ok(Spectrum { values, vectors })
}

fn gram_schmidt(u: &mut CMatrix, start: usize, end: usize) {
    let n = u.nrows();
    for j in start..end {
        for k in start..j {
            let mut proj = ZERO;
            for h in 0..n {
                proj += u[(h, k)].conj() * u[(h, j)];
            }
            for h in 0..n {
                let v = u[(h, k)];
                u[(h, j)] -= proj * v;
            }
        }
        let norm = (0..n).map(|h| u[(h, j)].norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.0 {
            for h in 0..n {
                u[(h, j)] /= norm;
            }
        }
    }
}

/// A positive semidefinite unit-trace Hermitian matrix with its spectral
/// decomposition.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    m: CMatrix,
    eigenvalues: Vec<f64>,
    eigenvectors: CMatrix,
    faithful: bool,
}

impl DensityMatrix {
    /// Validates trace and positivity. Eigenvalues in `[-1e-12, 1e-12)` are
    /// clamped to zero and mark the state non-faithful.
    pub fn new(h: HermitianMatrix) -> Result<Self> {
        let tr = h.trace();
        if !((tr - 1.0).abs() <= TRACE_TOL) {
            return Err(Error::InvalidDensity(format!("trace {tr} differs from 1")));
        }
        let spectrum = spectral_decompose(&h)?;
        let min = *spectrum.values.last().unwrap();
        if min < -FAITHFUL_CUTOFF {
            return Err(Error::InvalidDensity(format!("negative eigenvalue {min:e}")));
        }
        let mut faithful = true;
        let eigenvalues = spectrum
            .values
            .into_iter()
            .map(|v| {
                if v < FAITHFUL_CUTOFF {
                    faithful = false;
                    0.0
                } else {
                    v
                }
            })
            .collect();
        Ok(Self {
            m: h.m,
            eigenvalues,
            eigenvectors: spectrum.vectors,
            faithful,
        })
    }

    pub fn from_matrix(m: CMatrix) -> Result<Self> {
        Self::new(HermitianMatrix::new(m)?)
    }

    /// Diagonal state with the given probabilities.
    pub fn diagonal(probs: &[f64]) -> Result<Self> {
        Self::new(HermitianMatrix::from_diagonal(probs))
    }

    /// `I/n`.
    pub fn maximally_mixed(n: usize) -> Self {
        Self::diagonal(&vec![1.0 / n as f64; n]).unwrap()
    }

    /// Rank-one projector onto `psi / ‖psi‖`.
    pub fn pure(psi: &[C64]) -> Result<Self> {
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) {
            return Err(Error::InvalidDensity("zero state vector".into()));
        }
        let n = psi.len();
        let v: Vec<C64> = psi.iter().map(|z| z / norm).collect();
        Self::from_matrix(CMatrix::from_fn(n, n, |h, j| v[h] * v[j].conj()))
    }

    /// `(1 − eps) ρ + eps I/n`.
    pub fn depolarize(&self, eps: f64) -> Result<Self> {
        let n = self.dim();
        let mixed = CMatrix::identity(n, n) * C64::new(eps / n as f64, 0.0);
        Self::from_matrix(&self.m * C64::new(1.0 - eps, 0.0) + mixed)
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn as_matrix(&self) -> &CMatrix {
        &self.m
    }

    /// Eigenvalues, descending, after clamping.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Unitary whose columns are the eigenvectors.
    pub fn eigenvectors(&self) -> &CMatrix {
        &self.eigenvectors
    }

    pub fn is_faithful(&self) -> bool {
        self.faithful
    }

    /// Exactly one non-zero eigenvalue.
    pub fn is_pure(&self) -> bool {
        self.eigenvalues.iter().filter(|&&l| l > 0.0).count() == 1
    }

    /// Off-diagonal entries all at most `tol` in modulus.
    pub fn is_diagonal(&self, tol: f64) -> bool {
        let n = self.dim();
        (0..n).all(|h| (0..n).all(|j| h == j || self.m[(h, j)].norm() <= tol))
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.m.iter().all(|z| z.im.abs() <= tol)
    }

    /// `Re Tr(ρ X)`.
    pub fn expectation(&self, x: &HermitianMatrix) -> Result<f64> {
        check_dims(self.dim(), x.dim())?;
        Ok(trace_product(&self.m, &x.m).re)
    }
}

/// `Tr(X Y)` without forming the product.
pub fn trace_product(x: &CMatrix, y: &CMatrix) -> C64 {
    let n = x.nrows();
    let mut acc = ZERO;
    for h in 0..n {
        for j in 0..n {
            acc += x[(h, j)] * y[(j, h)];
        }
    }
    acc
}

/// `A − Tr(ρA) I`.
pub fn center(a: &HermitianMatrix, rho: &DensityMatrix) -> Result<HermitianMatrix> {
    let mean = rho.expectation(a)?;
    let mut m = a.m.clone();
    for h in 0..a.dim() {
        m[(h, h)] -= mean;
    }
    Ok(HermitianMatrix { m })
}

/// An observable expressed in a state's eigenbasis after centering: the
/// entries are `a_{hj} = φ_h† A₀ φ_j`.
#[derive(Debug, Clone)]
pub struct EigenframeMatrix {
    entries: CMatrix,
    weights: Vec<f64>,
}

impl EigenframeMatrix {
    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    #[inline]
    pub fn get(&self, h: usize, j: usize) -> C64 {
        self.entries[(h, j)]
    }

    /// Eigenvalues of the source state, in the frame's index order.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.weights
    }

    /// `Σ_h λ_h a_{hh}`, which is `Tr(ρ A₀)` and vanishes up to rounding.
    pub fn weighted_diagonal(&self) -> f64 {
        self.weights
            .iter()
            .enumerate()
            .map(|(h, l)| l * self.entries[(h, h)].re)
            .sum()
    }
}

/// Centers `a` against `rho` and rotates it into `rho`'s eigenframe.
pub fn to_eigenframe(a: &HermitianMatrix, rho: &DensityMatrix) -> Result<EigenframeMatrix> {
    let centered = center(a, rho)?;
    Ok(EigenframeMatrix {
        entries: rotate_into(&centered, rho),
        weights: rho.eigenvalues.clone(),
    })
}

/// `U† X U` for the state's eigenvectors `U`, symmetrized. No centering.
pub(crate) fn rotate_into(x: &HermitianMatrix, rho: &DensityMatrix) -> CMatrix {
    let u = &rho.eigenvectors;
    symmetrize(&(u.adjoint() * &x.m * u))
}

/// `U X U†`, the inverse rotation, symmetrized.
pub(crate) fn rotate_out(x: &CMatrix, rho: &DensityMatrix) -> HermitianMatrix {
    let u = &rho.eigenvectors;
    HermitianMatrix {
        m: symmetrize(&(u * x * u.adjoint())),
    }
}

/// `i(ρA − Aρ)`, a traceless Hermitian matrix.
pub fn commutator_i(rho: &DensityMatrix, a: &HermitianMatrix) -> Result<HermitianMatrix> {
    check_dims(rho.dim(), a.dim())?;
    let c = (&rho.m * &a.m - &a.m * &rho.m) * I;
    Ok(HermitianMatrix { m: symmetrize(&c) })
}

/// Determinant of a small real square matrix: cofactor expansion up to
/// `3 × 3`, partial-pivoting elimination above. An empty matrix has
/// determinant one.
pub fn det_small(g: &RMatrix) -> f64 {
    assert_eq!(g.nrows(), g.ncols(), "det_small needs a square matrix");
    match g.nrows() {
        0 => 1.0,
        1 => g[(0, 0)],
        2 => g[(0, 0)] * g[(1, 1)] - g[(0, 1)] * g[(1, 0)],
        3 => {
            g[(0, 0)] * (g[(1, 1)] * g[(2, 2)] - g[(1, 2)] * g[(2, 1)])
                - g[(0, 1)] * (g[(1, 0)] * g[(2, 2)] - g[(1, 2)] * g[(2, 0)])
                + g[(0, 2)] * (g[(1, 0)] * g[(2, 1)] - g[(1, 1)] * g[(2, 0)])
        }
        n => {
            let mut m = g.clone();
            let mut det = 1.0;
            for col in 0..n {
                let mut pivot = col;
                for r in col + 1..n {
                    if m[(r, col)].abs() > m[(pivot, col)].abs() {
                        pivot = r;
                    }
                }
                if m[(pivot, col)] == 0.0 {
                    return 0.0;
                }
                if pivot != col {
                    m.swap_rows(pivot, col);
                    det = -det;
                }
                let p = m[(col, col)];
                det *= p;
                for r in col + 1..n {
                    let factor = m[(r, col)] / p;
                    if factor != 0.0 {
                        for c in col..n {
                            let v = m[(col, c)];
                            m[(r, c)] -= factor * v;
                        }
                    }
                }
            }
            det
        }
    }
}

/// Smallest singular value of the `N × 2n²` real matrix whose rows are the
/// vectorized (real and imaginary parts) observables. Zero when `N > 2n²`.
pub fn min_singular_value(observables: &[HermitianMatrix]) -> f64 {
    let rows = observables.len();
    if rows == 0 {
        return 0.0;
    }
    let n = observables[0].dim();
    let cols = 2 * n * n;
    if rows > cols {
        return 0.0;
    }
    let v = DMatrix::from_fn(rows, cols, |r, c| {
        let z = observables[r].m[((c / 2) / n, (c / 2) % n)];
        if c % 2 == 0 {
            z.re
        } else {
            z.im
        }
    });
    v.singular_values().iter().cloned().fold(f64::INFINITY, f64::min)
}
