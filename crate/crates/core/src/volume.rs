//! Gram matrices, volumes and the gap functional
//!
//! ```text
//! F(f) = det{Cov_ρ(A_h, A_j)} − det{Cov_ρ(A_h, A_j) − Tr(m_f̃(L_ρ,R_ρ)(A_h0) A_j0)}
//! ```
//!
//! whose non-negativity is the volume inequality. The second Gram matrix is
//! `(f(0)/2) ⟨i[ρ,A_h], i[ρ,A_j]⟩_{ρ,f}` rewritten in tilde form, so it stays
//! defined on non-faithful states.

use crate::decomposition::{decompose_f, MAX_DIM_ORDER3};
use crate::error::{Error, Result};
use crate::matrix::{center, det_small, min_singular_value, trace_product, DensityMatrix, EigenframeMatrix, HermitianMatrix};
use crate::metrics::{covariance_frames, MetricContext};
use crate::monotone::{default_grid, tilde_order, FunctionId, MonotoneFunction, TildeOrder};
use crate::{RMatrix, C64};

/// Engineering cap on the number of observables.
pub const MAX_OBSERVABLES: usize = 8;
/// `F ≥ −F_TOL · scale` counts as holding.
pub const F_TOL: f64 = 1e-10;
/// Smallest singular value below which centered observables count as
/// linearly dependent.
pub const DEPENDENCE_TOL: f64 = 1e-8;
/// `|F| ≤ EQUALITY_TOL · scale` counts as equality.
pub const EQUALITY_TOL: f64 = 1e-8;
/// Slack in `V(f) ≥ V(g)`.
pub const MONOTONICITY_TOL: f64 = 1e-10;
/// Tolerance on the imaginary part of Robertson entries, relative to
/// `max(1, ‖A_h‖‖A_j‖)`.
pub const ROBERTSON_IMAG_TOL: f64 = 1e-12;

/// A state, `N` observables and a regular function.
#[derive(Debug, Clone)]
pub struct GramSpec {
    state: DensityMatrix,
    observables: Vec<HermitianMatrix>,
    function: MonotoneFunction,
}

impl GramSpec {
    pub fn new(state: DensityMatrix, observables: Vec<HermitianMatrix>, function: MonotoneFunction) -> Result<Self> {
        if observables.is_empty() || observables.len() > MAX_OBSERVABLES {
            return Err(Error::InvalidParameter(format!(
                "need 1..={MAX_OBSERVABLES} observables, got {}",
                observables.len()
            )));
        }
        if let Some(a) = observables.iter().find(|a| a.dim() != state.dim()) {
            return Err(Error::DimensionMismatch {
                expected: state.dim(),
                found: a.dim(),
            });
        }
        if !function.is_regular() {
            return Err(Error::NonRegular(function.id().to_string()));
        }
        Ok(Self {
            state,
            observables,
            function,
        })
    }

    pub fn state(&self) -> &DensityMatrix {
        &self.state
    }

    pub fn observables(&self) -> &[HermitianMatrix] {
        &self.observables
    }

    pub fn function(&self) -> &MonotoneFunction {
        &self.function
    }

    /// Same state and observables under another function.
    pub fn with_function(&self, function: MonotoneFunction) -> Result<Self> {
        Self::new(self.state.clone(), self.observables.clone(), function)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VolumeKind {
    Covariance,
    Qfi,
}

/// Both Gram matrices, their determinants and the gap.
#[derive(Debug, Clone)]
pub struct VolumeReport {
    pub cov_gram: RMatrix,
    /// `(f(0)/2) ⟨i[ρ,A_h], i[ρ,A_j]⟩_{ρ,f}`, via the tilde form.
    pub qfi_gram: RMatrix,
    pub cov_det: f64,
    pub qfi_det: f64,
    /// `cov_det − qfi_det`.
    pub f_gap: f64,
    /// `√det{Cov}`, computed from a QR factorization.
    pub cov_volume: f64,
    /// `V(f) = (f(0)/2)^{N/2} Vol^f(i[ρ,A_1], …, i[ρ,A_N])`, computed from a
    /// QR factorization.
    pub qfi_volume: f64,
    /// Present for even `N`.
    pub robertson_det: Option<f64>,
    /// `H · K` sum, present when requested and applicable.
    pub decomposition_f: Option<f64>,
}

impl VolumeReport {
    /// `max(1, |cov_det|)`, the scale of every inequality tolerance.
    pub fn scale(&self) -> f64 {
        self.cov_det.abs().max(1.0)
    }

}

fn frames(spec: &GramSpec) -> Result<Vec<EigenframeMatrix>> {
    spec.observables
        .iter()
        .map(|a| crate::matrix::to_eigenframe(a, &spec.state))
        .collect()
}

struct Grams {
    cov: RMatrix,
    qfi: RMatrix,
    cov_volume: f64,
    qfi_volume: f64,
}

/// `|Π R_ii|` from a QR factorization of the column vectors; zero when there
/// are more columns than rows.
fn column_volume(v: &RMatrix) -> f64 {
    if v.ncols() > v.nrows() {
        return 0.0;
    }
    let r = v.clone().qr().r();
    (0..v.ncols()).map(|k| r[(k, k)]).product::<f64>().abs()
}

/// Both Gram matrices, and both volumes as products of QR pivots of the
/// weighted eigenframe vectors `√w_kl (Re a_kl, Im a_kl)` whose Gram matrix
/// is the corresponding form. Unlike `√det G`, this stays at rounding level
/// when the observables are (numerically) dependent.
fn grams(spec: &GramSpec) -> Result<Grams> {
    let ctx = MetricContext::new(&spec.state, &spec.function)?;
    let fr = frames(spec)?;
    let n = fr.len();
    let mut cov = RMatrix::zeros(n, n);
    let mut qfi = RMatrix::zeros(n, n);
    for h in 0..n {
        for j in h..n {
            let c = covariance_frames(&fr[h], &fr[j]);
            let q = c - ctx.tilde_trace_frames(&fr[h], &fr[j]);
            cov[(h, j)] = c;
            cov[(j, h)] = c;
            qfi[(h, j)] = q;
            qfi[(j, h)] = q;
        }
    }
    let dim = spec.state.dim();
    let l = spec.state.eigenvalues();
    let mt = ctx.mean_table_tilde();
    let mut vc = RMatrix::zeros(2 * dim * dim, n);
    let mut vq = RMatrix::zeros(2 * dim * dim, n);
    for (col, f) in fr.iter().enumerate() {
        for k in 0..dim {
            for q in 0..dim {
                let s = 0.5 * (l[k] + l[q]);
                let (wc, wq) = (s.sqrt(), (s - mt[(k, q)]).max(0.0).sqrt());
                let z = f.get(k, q);
                let row = 2 * (k * dim + q);
                vc[(row, col)] = wc * z.re;
                vc[(row + 1, col)] = wc * z.im;
                vq[(row, col)] = wq * z.re;
                vq[(row + 1, col)] = wq * z.im;
            }
        }
    }
    Ok(Grams {
        cov,
        qfi,
        cov_volume: column_volume(&vc),
        qfi_volume: column_volume(&vq),
    })
}

/// Covariance volume `√det{Cov}` or `V(f)`, as a product of QR pivots.
pub fn volume(spec: &GramSpec, kind: VolumeKind) -> Result<f64> {
    let g = grams(spec)?;
    Ok(match kind {
        VolumeKind::Covariance => g.cov_volume,
        VolumeKind::Qfi => g.qfi_volume,
    })
}

/// Gram matrices, determinants and `F`, optionally with the `H · K`
/// decomposition (only for `N ≤ 3`, faithful states, and dimension at most
/// [`MAX_DIM_ORDER3`] when `N = 3`).
pub fn compute_report(spec: &GramSpec, with_decomposition: bool) -> Result<VolumeReport> {
    let Grams {
        cov: cov_gram,
        qfi: qfi_gram,
        cov_volume,
        qfi_volume,
    } = grams(spec)?;
    let cov_det = det_small(&cov_gram);
    let qfi_det = det_small(&qfi_gram);
    let n = spec.observables.len();
    let robertson_det = if n % 2 == 0 {
        Some(robertson_bound(&spec.state, &spec.observables)?)
    } else {
        None
    };
    let decomposable =
        n <= 3 && spec.state.is_faithful() && (n < 3 || spec.state.dim() <= MAX_DIM_ORDER3);
    let decomposition_f = if with_decomposition && decomposable {
        Some(decompose_f(spec)?)
    } else {
        None
    };
    Ok(VolumeReport {
        cov_gram,
        qfi_gram,
        cov_det,
        qfi_det,
        f_gap: cov_det - qfi_det,
        cov_volume,
        qfi_volume,
        robertson_det,
        decomposition_f,
    })
}

/// The full report, including the decomposition where it applies.
pub fn gap_f(spec: &GramSpec) -> Result<VolumeReport> {
    compute_report(spec, true)
}

/// `det{−(i/2) Tr(ρ[A_h, A_j])}` for even `N`, exactly zero for odd `N`.
pub fn robertson_bound(rho: &DensityMatrix, observables: &[HermitianMatrix]) -> Result<f64> {
    let n = observables.len();
    if let Some(a) = observables.iter().find(|a| a.dim() != rho.dim()) {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: a.dim(),
        });
    }
    if n % 2 == 1 {
        return Ok(0.0);
    }
    let half_i = C64::new(0.0, -0.5);
    let mut g = RMatrix::zeros(n, n);
    for h in 0..n {
        for j in h + 1..n {
            let (a, b) = (observables[h].as_matrix(), observables[j].as_matrix());
            let comm = a * b - b * a;
            let v = half_i * trace_product(rho.as_matrix(), &comm);
            let scale = (observables[h].max_abs() * observables[j].max_abs()).max(1.0);
            if v.im.abs() > ROBERTSON_IMAG_TOL * scale * rho.dim() as f64 {
                return Err(Error::InvalidParameter(format!("Robertson entry has imaginary part {:e}", v.im)));
            }
            g[(h, j)] = v.re;
            g[(j, h)] = -v.re;
        }
    }
    Ok(det_small(&g))
}

/// Which proved result, if any, covers the inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProvedCase {
    /// `N = 1`.
    Length,
    /// `N = 2`.
    Area,
    /// `N = 3`, real state and observables.
    RealVolume,
    /// `N = 3` with `b_ii = 0` and `c` diagonal in the eigenframe.
    StructuredVolume,
    /// Anything else; the inequality is conjectural.
    Open,
}

impl ProvedCase {
    pub fn tag(self) -> &'static str {
        match self {
            ProvedCase::Length => "length",
            ProvedCase::Area => "area",
            ProvedCase::RealVolume => "real-volume",
            ProvedCase::StructuredVolume => "structured-volume",
            ProvedCase::Open => "open",
        }
    }

    pub fn is_proved(self) -> bool {
        self != ProvedCase::Open
    }
}

/// Classifies the inputs from the data itself.
pub fn classify(spec: &GramSpec) -> Result<ProvedCase> {
    const REAL_TOL: f64 = 1e-15;
    Ok(match spec.observables.len() {
        1 => ProvedCase::Length,
        2 => ProvedCase::Area,
        3 => {
            if spec.state.is_real(REAL_TOL) && spec.observables.iter().all(|a| a.is_real(REAL_TOL)) {
                ProvedCase::RealVolume
            } else {
                let fr = frames(spec)?;
                let n = spec.state.dim();
                let tol = 1e-12 * fr.iter().flat_map(|f| f.entries().iter()).map(|z| z.norm()).fold(1.0, f64::max);
                let b_zero_diag = (0..n).all(|i| fr[1].get(i, i).norm() <= tol);
                let c_diag = (0..n).all(|i| (0..n).all(|j| i == j || fr[2].get(i, j).norm() <= tol));
                if b_zero_diag && c_diag {
                    ProvedCase::StructuredVolume
                } else {
                    ProvedCase::Open
                }
            }
        }
        _ => ProvedCase::Open,
    })
}

/// Result of comparing `V(f)` with `V(g)` under a resolved tilde ordering.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotonicityCheck {
    pub partner: FunctionId,
    pub order: TildeOrder,
    pub v_f: f64,
    pub v_g: f64,
    pub holds: bool,
}

/// `f̃ ≤ g̃ ⇒ V(f) ≥ V(g)`; `None` when the grid ordering is inconclusive.
pub fn monotonicity(
    order: TildeOrder,
    report_f: &VolumeReport,
    partner: &MonotoneFunction,
    report_g: &VolumeReport,
) -> Option<MonotonicityCheck> {
    let (v_f, v_g) = (report_f.qfi_volume, report_g.qfi_volume);
    let holds = match order {
        TildeOrder::FBelowG => v_f >= v_g - MONOTONICITY_TOL,
        TildeOrder::GBelowF => v_g >= v_f - MONOTONICITY_TOL,
        TildeOrder::Equal => (v_f - v_g).abs() <= MONOTONICITY_TOL,
        TildeOrder::Incomparable => return None,
    };
    Some(MonotonicityCheck {
        partner: partner.id().clone(),
        order,
        v_f,
        v_g,
        holds,
    })
}

/// Outcome of the conjecture checks for one input. Every outcome is data.
#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub f_gap: f64,
    pub scale: f64,
    /// `F ≥ −1e-10 · scale`.
    pub main_holds: bool,
    pub min_singular_value: f64,
    /// Centered observables numerically dependent.
    pub dependent: bool,
    /// Dependence implies `|F| ≤ 1e-8 · scale`.
    pub equality_consistent: bool,
    /// `|F| ≤ 1e-8 · scale` although the observables are independent. A
    /// finding about the unproved direction, not a violation.
    pub equality_without_dependence: bool,
    pub proved_case: ProvedCase,
    /// `F` negative beyond tolerance outside every proved case.
    pub candidate_counterexample: bool,
    pub monotonicity: Option<MonotonicityCheck>,
}

/// Builds the verdict from an existing report.
pub fn verdict_from_report(spec: &GramSpec, report: &VolumeReport) -> Result<Verdict> {
    let scale = report.scale();
    let f = report.f_gap;
    let main_holds = f >= -F_TOL * scale;
    let centered = spec
        .observables
        .iter()
        .map(|a| center(a, &spec.state))
        .collect::<Result<Vec<_>>>()?;
    let sv = min_singular_value(&centered);
    let dependent = sv < DEPENDENCE_TOL;
    let near_zero = f.abs() <= EQUALITY_TOL * scale;
    let proved_case = classify(spec)?;
    Ok(Verdict {
        f_gap: f,
        scale,
        main_holds,
        min_singular_value: sv,
        dependent,
        equality_consistent: !dependent || near_zero,
        equality_without_dependence: near_zero && !dependent,
        proved_case,
        candidate_counterexample: !main_holds && !proved_case.is_proved(),
        monotonicity: None,
    })
}

/// Runs the main inequality, the equality condition and, with a partner
/// function, the monotonicity comparison.
pub fn check_conjectures(spec: &GramSpec, partner: Option<&MonotoneFunction>) -> Result<Verdict> {
    let report = compute_report(spec, false)?;
    let mut verdict = verdict_from_report(spec, &report)?;
    if let Some(g) = partner {
        let order = tilde_order(&spec.function, g, &default_grid())?;
        let report_g = compute_report(&spec.with_function(g.clone())?, false)?;
        verdict.monotonicity = monotonicity(order, &report, g, &report_g);
    }
    Ok(verdict)
}
