//! State-dependent bilinear forms.
//!
//! Everything is evaluated in the eigenframe of the state, where the
//! superoperators `L_ρ`, `R_ρ` act diagonally and `m_f(L_ρ, R_ρ)` multiplies
//! entry `(h, j)` by `m_f(λ_h, λ_j)`. Two independent routes compute the
//! metric adjusted correlation:
//!
//! * the tilde form `Cov_ρ(A,B) − Σ m_f̃(λ_h,λ_j) Re{a_{hj} b_{jh}}`, valid on
//!   non-faithful states and used by default;
//! * the direct form `(f(0)/2) ⟨i[ρ,A], i[ρ,B]⟩_{ρ,f}`, which needs a faithful
//!   state and exists to cross-check the first.

use crate::error::{Error, Result};
use crate::matrix::{commutator_i, rotate_into, rotate_out, to_eigenframe, DensityMatrix, EigenframeMatrix, HermitianMatrix};
use crate::monotone::MonotoneFunction;
use crate::RMatrix;

/// Contract for [`MetricContext::identity_residual`].
pub const IDENTITY_TOL: f64 = 1e-9;

fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// `Σ_{hj} w_{hj} Re{a_{hj} b_{jh}}`.
pub(crate) fn weighted_pairing(w: &RMatrix, a: &EigenframeMatrix, b: &EigenframeMatrix) -> f64 {
    let n = a.dim();
    let mut acc = 0.0;
    for h in 0..n {
        for j in 0..n {
            acc += w[(h, j)] * (a.get(h, j) * b.get(j, h)).re;
        }
    }
    acc
}

/// `½ Σ (λ_h + λ_j) Re{a_{hj} b_{jh}}`.
pub fn covariance_frames(a: &EigenframeMatrix, b: &EigenframeMatrix) -> f64 {
    let l = a.eigenvalues();
    let n = a.dim();
    let mut acc = 0.0;
    for h in 0..n {
        for j in 0..n {
            acc += 0.5 * (l[h] + l[j]) * (a.get(h, j) * b.get(j, h)).re;
        }
    }
    acc
}

/// `Cov_ρ(A, B) = Re Tr(ρ A₀ B₀)`.
pub fn covariance(rho: &DensityMatrix, a: &HermitianMatrix, b: &HermitianMatrix) -> Result<f64> {
    check_dims(rho.dim(), a.dim())?;
    check_dims(rho.dim(), b.dim())?;
    Ok(covariance_frames(&to_eigenframe(a, rho)?, &to_eigenframe(b, rho)?))
}

/// A state paired with a regular function and its eigenframe mean tables.
#[derive(Debug, Clone)]
pub struct MetricContext {
    state: DensityMatrix,
    function: MonotoneFunction,
    tilde: MonotoneFunction,
    mean_f: RMatrix,
    mean_tilde: RMatrix,
}

impl MetricContext {
    pub fn new(state: &DensityMatrix, function: &MonotoneFunction) -> Result<Self> {
        let tilde = function.tilde()?;
        let l = state.eigenvalues();
        let n = l.len();
        let mean_f = RMatrix::from_fn(n, n, |h, j| function.mean(l[h], l[j]));
        let mean_tilde = RMatrix::from_fn(n, n, |h, j| tilde.mean(l[h], l[j]));
        Ok(Self {
            state: state.clone(),
            function: function.clone(),
            tilde,
            mean_f,
            mean_tilde,
        })
    }

    pub fn state(&self) -> &DensityMatrix {
        &self.state
    }

    pub fn function(&self) -> &MonotoneFunction {
        &self.function
    }

    pub fn tilde_function(&self) -> &MonotoneFunction {
        &self.tilde
    }

    /// `m_f(λ_h, λ_j)`.
    pub fn mean_table_f(&self) -> &RMatrix {
        &self.mean_f
    }

    /// `m_f̃(λ_h, λ_j)`; zero whenever either eigenvalue is zero.
    pub fn mean_table_tilde(&self) -> &RMatrix {
        &self.mean_tilde
    }

    pub fn eigenframe(&self, a: &HermitianMatrix) -> Result<EigenframeMatrix> {
        to_eigenframe(a, &self.state)
    }

    pub fn covariance(&self, a: &HermitianMatrix, b: &HermitianMatrix) -> Result<f64> {
        covariance(&self.state, a, b)
    }

    /// `Tr(m_f̃(L_ρ, R_ρ)(A₀) B₀)` on eigenframe inputs.
    pub fn tilde_trace_frames(&self, a: &EigenframeMatrix, b: &EigenframeMatrix) -> f64 {
        weighted_pairing(&self.mean_tilde, a, b)
    }

    pub fn tilde_trace(&self, a: &HermitianMatrix, b: &HermitianMatrix) -> Result<f64> {
        Ok(self.tilde_trace_frames(&self.eigenframe(a)?, &self.eigenframe(b)?))
    }

    /// Metric adjusted correlation on eigenframe inputs.
    pub fn f_correlation_frames(&self, a: &EigenframeMatrix, b: &EigenframeMatrix) -> f64 {
        covariance_frames(a, b) - self.tilde_trace_frames(a, b)
    }

    /// `Corr^f_ρ(A, B) = Cov_ρ(A, B) − Tr(m_f̃(L_ρ, R_ρ)(A₀) B₀)`. For `A = B`
    /// this is the metric adjusted skew information.
    pub fn f_correlation(&self, a: &HermitianMatrix, b: &HermitianMatrix) -> Result<f64> {
        Ok(self.f_correlation_frames(&self.eigenframe(a)?, &self.eigenframe(b)?))
    }

    /// Applies `m_f(L_ρ, R_ρ)` (or `m_f̃` with `use_tilde`) to `A₀`.
    pub fn mean_superop_apply(&self, a: &HermitianMatrix, use_tilde: bool) -> Result<HermitianMatrix> {
        let frame = self.eigenframe(a)?;
        let table = if use_tilde { &self.mean_tilde } else { &self.mean_f };
        let scaled = frame.entries().component_mul(&table.map(|v| crate::C64::new(v, 0.0)));
        Ok(rotate_out(&scaled, &self.state))
    }

    /// `⟨X, Y⟩_{ρ,f} = Tr(X · m_f(L_ρ, R_ρ)^{-1}(Y))`. Requires a faithful
    /// state.
    pub fn qfi_inner(&self, x: &HermitianMatrix, y: &HermitianMatrix) -> Result<f64> {
        if !self.state.is_faithful() {
            return Err(Error::NonFaithful);
        }
        check_dims(self.state.dim(), x.dim())?;
        check_dims(self.state.dim(), y.dim())?;
        let xf = rotate_into(x, &self.state);
        let yf = rotate_into(y, &self.state);
        let n = xf.nrows();
        let mut acc = 0.0;
        for h in 0..n {
            for j in 0..n {
                acc += (xf[(h, j)] * yf[(h, j)].conj()).re / self.mean_f[(h, j)];
            }
        }
        Ok(acc)
    }

    /// `(f(0)/2) ⟨i[ρ,A], i[ρ,B]⟩_{ρ,f}` by the direct route.
    pub fn scaled_qfi_on_commutators(&self, a: &HermitianMatrix, b: &HermitianMatrix) -> Result<f64> {
        let ca = commutator_i(&self.state, a)?;
        let cb = commutator_i(&self.state, b)?;
        Ok(0.5 * self.function.value_at_zero() * self.qfi_inner(&ca, &cb)?)
    }

    /// `|(f(0)/2) ⟨i[ρ,A], i[ρ,B]⟩_{ρ,f} − Corr^f_ρ(A,B)|`; expected to stay
    /// below `1e-9 · max(1, |Corr|)`.
    pub fn identity_residual(&self, a: &HermitianMatrix, b: &HermitianMatrix) -> Result<f64> {
        let direct = self.scaled_qfi_on_commutators(a, b)?;
        Ok((direct - self.f_correlation(a, b)?).abs())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::center;
    use approx::assert_relative_eq;

    fn diag(p: f64) -> DensityMatrix {
        DensityMatrix::diagonal(&[p, 1.0 - p]).unwrap()
    }

    #[test]
    fn covariance_examples() {
        let sx = HermitianMatrix::pauli_x();
        let rho = DensityMatrix::maximally_mixed(2);
        assert_relative_eq!(covariance(&rho, &sx, &sx).unwrap(), 1.0, max_relative = 1e-15);
        assert_eq!(covariance(&rho, &HermitianMatrix::identity(2), &sx).unwrap(), 0.0);
        assert!(covariance(&DensityMatrix::maximally_mixed(3), &sx, &sx).is_err());
    }

    #[test]
    fn mean_superop_commuting_case() {
        // ρ and A diagonal: m_f(L,R)(A₀) = ρ A₀
        let rho = DensityMatrix::diagonal(&[0.5, 0.3, 0.2]).unwrap();
        let a = HermitianMatrix::from_diagonal(&[1.0, -2.0, 0.5]);
        let ctx = MetricContext::new(&rho, &MonotoneFunction::wy()).unwrap();
        let out = ctx.mean_superop_apply(&a, false).unwrap();
        let a0 = center(&a, &rho).unwrap();
        let expected = rho.as_matrix() * a0.as_matrix();
        assert!((out.as_matrix() - expected).iter().all(|z| z.norm() < 1e-15));
    }

    #[test]
    fn mean_superop_pure_state_trace_vanishes() {
        let rho = DensityMatrix::diagonal(&[1.0, 0.0, 0.0]).unwrap();
        let a = HermitianMatrix::from_real_rows(3, &[1.0, 2.0, 0.5, 2.0, -1.0, 0.3, 0.5, 0.3, 0.7]).unwrap();
        let b = HermitianMatrix::from_real_rows(3, &[0.0, 1.0, 1.0, 1.0, 2.0, -1.0, 1.0, -1.0, 0.4]).unwrap();
        let ctx = MetricContext::new(&rho, &MonotoneFunction::sld()).unwrap();
        let out = ctx.mean_superop_apply(&a, true).unwrap();
        let b0 = center(&b, &rho).unwrap();
        let tr = crate::matrix::trace_product(out.as_matrix(), b0.as_matrix());
        assert!(tr.norm() < 1e-15);
    }

    #[test]
    fn mean_superop_wy_multiplier_is_geometric_mean() {
        let p = 0.8;
        let rho = diag(p);
        let ctx = MetricContext::new(&rho, &MonotoneFunction::wy()).unwrap();
        let out = ctx.mean_superop_apply(&HermitianMatrix::pauli_x(), true).unwrap();
        assert_relative_eq!(out.as_matrix()[(0, 1)].re, (p * (1.0 - p)).sqrt(), max_relative = 1e-14);
        assert_eq!(ctx.mean_table_tilde()[(0, 1)], ctx.mean_table_tilde()[(1, 0)]);
    }

    #[test]
    fn qfi_inner_examples() {
        let rho = DensityMatrix::diagonal(&[0.6, 0.3, 0.1]).unwrap();
        let ctx = MetricContext::new(&rho, &MonotoneFunction::wy()).unwrap();
        let zero = HermitianMatrix::zeros(3);
        assert_eq!(ctx.qfi_inner(&zero, &zero).unwrap(), 0.0);

        // [A, ρ] = 0: g(A, A) = Tr(ρ⁻¹ A²)
        let a = HermitianMatrix::from_diagonal(&[0.2, -0.1, 0.4]);
        let expected = 0.2f64.powi(2) / 0.6 + 0.1f64.powi(2) / 0.3 + 0.4f64.powi(2) / 0.1;
        assert_relative_eq!(ctx.qfi_inner(&a, &a).unwrap(), expected, max_relative = 1e-14);

        // (f(0)/2) g(i[ρ,σ_x], i[ρ,σ_x]) = (2p−1)² for SLD
        let ctx = MetricContext::new(&diag(0.75), &MonotoneFunction::sld()).unwrap();
        let sx = HermitianMatrix::pauli_x();
        assert_relative_eq!(ctx.scaled_qfi_on_commutators(&sx, &sx).unwrap(), 0.25, max_relative = 1e-14);
    }

    #[test]
    fn qfi_inner_needs_faithful_state() {
        let rho = DensityMatrix::diagonal(&[1.0, 0.0]).unwrap();
        let ctx = MetricContext::new(&rho, &MonotoneFunction::wy()).unwrap();
        let sx = HermitianMatrix::pauli_x();
        assert_eq!(ctx.qfi_inner(&sx, &sx), Err(Error::NonFaithful));
        // the tilde route still works
        assert_relative_eq!(ctx.f_correlation(&sx, &sx).unwrap(), 1.0, max_relative = 1e-14);
    }

    #[test]
    fn f_correlation_wy_closed_form() {
        let ctx = MetricContext::new(&diag(0.75), &MonotoneFunction::wy()).unwrap();
        let sx = HermitianMatrix::pauli_x();
        let expected = 1.0 - 3f64.sqrt() / 2.0;
        assert_relative_eq!(ctx.f_correlation(&sx, &sx).unwrap(), expected, max_relative = 1e-13);
        assert!(ctx.identity_residual(&sx, &sx).unwrap() < 1e-14);
    }

    #[test]
    fn non_regular_function_rejected() {
        assert!(matches!(
            MetricContext::new(&diag(0.5), &MonotoneFunction::rld()),
            Err(Error::NonRegular(_))
        ));
    }

    #[test]
    fn commuting_pair_residual_zero() {
        let rho = DensityMatrix::diagonal(&[0.5, 0.3, 0.2]).unwrap();
        let a = HermitianMatrix::from_diagonal(&[1.0, 2.0, 3.0]);
        let b = HermitianMatrix::from_diagonal(&[0.0, -1.0, 1.0]);
        let ctx = MetricContext::new(&rho, &MonotoneFunction::sld()).unwrap();
        assert_eq!(ctx.scaled_qfi_on_commutators(&a, &b).unwrap(), 0.0);
        assert!(ctx.identity_residual(&a, &b).unwrap() < 1e-15);
        assert!(ctx.f_correlation(&a, &a).unwrap().abs() < 1e-15);
    }

    #[test]
    fn pure_state_limit_probe() {
        let a = HermitianMatrix::from_real_rows(2, &[0.3, 1.0, 1.0, -0.4]).unwrap();
        let pure = DensityMatrix::diagonal(&[1.0, 0.0]).unwrap();
        let cov = covariance(&pure, &a, &a).unwrap();
        // the tilde weights are at most the geometric mean √(λ₀λ₁) ≈ √(ε/2)
        for eps in [1e-4, 1e-8, 1e-11] {
            let rho = pure.depolarize(eps).unwrap();
            for f in [MonotoneFunction::sld(), MonotoneFunction::wy()] {
                let ctx = MetricContext::new(&rho, &f).unwrap();
                assert!((ctx.f_correlation(&a, &a).unwrap() - cov).abs() < 4.0 * eps.sqrt());
            }
        }
    }
}
