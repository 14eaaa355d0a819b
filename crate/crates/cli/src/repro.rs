//! Reproductions of the explicit worked examples.

use std::fmt::Write as _;

use qfivol_core::hessian::{hessian_generalized_variance, quadratic_form};
use qfivol_core::matrix::{DensityMatrix, HermitianMatrix};
use qfivol_core::metrics::{covariance, MetricContext};
use qfivol_core::monotone::{builtins, MonotoneFunction};
use qfivol_core::random::{sample_hermitian, sample_pure, Ensemble, RandomSpec};
use qfivol_core::volume::{compute_report, GramSpec};

use crate::error::{CliError, CliResult};

/// Absolute tolerance for the worked-example values.
pub const EXAMPLE_TOL: f64 = 1e-12;
/// Pure-state volume equality tolerance.
pub const PURE_TOL: f64 = 1e-8;

fn check(name: &str, got: f64, want: f64, tol: f64, failures: &mut Vec<String>) {
    if !((got - want).abs() <= tol) {
        failures.push(format!("{name}: got {got:.17e}, expected {want:.17e} (tolerance {tol:e})"));
    }
}

fn correlation_functions() -> Vec<MonotoneFunction> {
    vec![MonotoneFunction::sld(), MonotoneFunction::wy(), MonotoneFunction::wyd(0.25).unwrap()]
}

/// The two-qubit observables `A = diag(1, 1, −1, −1)` and `B`.
pub fn entanglement_observables() -> (HermitianMatrix, HermitianMatrix) {
    let a = HermitianMatrix::from_diagonal(&[1.0, 1.0, -1.0, -1.0]);
    #[rustfmt::skip]
    let b = HermitianMatrix::from_real_rows(4, &[
        1.0, 0.0, 0.0, 1.0,
        0.0, -1.0, 0.0, 0.0,
        0.0, 0.0, 1.0, 0.0,
        1.0, 0.0, 0.0, -1.0,
    ])
    .expect("symmetric literal");
    (a, b)
}

/// The separable mixture `ρ` and the Bell state `ρ′`.
pub fn entanglement_states() -> (DensityMatrix, DensityMatrix) {
    let mixture = DensityMatrix::diagonal(&[0.5, 0.0, 0.0, 0.5]).expect("valid state");
    #[rustfmt::skip]
    let bell = HermitianMatrix::from_real_rows(4, &[
        0.5, 0.0, 0.0, 0.5,
        0.0, 0.0, 0.0, 0.0,
        0.0, 0.0, 0.0, 0.0,
        0.5, 0.0, 0.0, 0.5,
    ])
    .expect("symmetric literal");
    (mixture, DensityMatrix::new(bell).expect("valid state"))
}

#[derive(Debug, Clone)]
pub struct CorrelationRow {
    pub function: String,
    pub mixture: f64,
    pub bell: f64,
}

#[derive(Debug, Clone)]
pub struct EntanglementReport {
    pub cov_mixture: f64,
    pub cov_bell: f64,
    pub rows: Vec<CorrelationRow>,
    /// Values with the `½` prefactor applied to both observables.
    pub halved_cov_mixture: f64,
    pub halved_cov_bell: f64,
    pub halved_corr_bell: f64,
}

impl EntanglementReport {
    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        check("Cov_rho(A,B)", self.cov_mixture, 1.0, EXAMPLE_TOL, &mut out);
        check("Cov_rho'(A,B)", self.cov_bell, 1.0, EXAMPLE_TOL, &mut out);
        for r in &self.rows {
            check(&format!("Corr^{}_rho(A,B)", r.function), r.mixture, 0.0, EXAMPLE_TOL, &mut out);
            check(&format!("Corr^{}_rho'(A,B)", r.function), r.bell, 1.0, EXAMPLE_TOL, &mut out);
        }
        out
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "two-qubit correlation example");
        let _ = writeln!(s, "  Cov_rho(A,B)  (separable mixture) = {:.15}", self.cov_mixture);
        let _ = writeln!(s, "  Cov_rho'(A,B) (Bell state)        = {:.15}", self.cov_bell);
        for r in &self.rows {
            let _ = writeln!(
                s,
                "  {:<9} Corr_rho = {:>18.15}  Corr_rho' = {:>18.15}",
                r.function, r.mixture, r.bell
            );
        }
        let _ = writeln!(
            s,
            "  with A/2, B/2: Cov_rho = {:.15}, Cov_rho' = {:.15}, Corr_rho' = {:.15}",
            self.halved_cov_mixture, self.halved_cov_bell, self.halved_corr_bell
        );
        s
    }
}

pub fn entanglement() -> CliResult<EntanglementReport> {
    let (a, b) = entanglement_observables();
    let (mixture, bell) = entanglement_states();
    let mut rows = Vec::new();
    for f in correlation_functions() {
        let cm = MetricContext::new(&mixture, &f)?;
        let cb = MetricContext::new(&bell, &f)?;
        rows.push(CorrelationRow {
            function: f.id().to_string(),
            mixture: cm.f_correlation(&a, &b)?,
            bell: cb.f_correlation(&a, &b)?,
        });
    }
    let (ha, hb) = (a.scale(0.5), b.scale(0.5));
    let wy_bell = MetricContext::new(&bell, &MonotoneFunction::wy())?;
    Ok(EntanglementReport {
        cov_mixture: covariance(&mixture, &a, &b)?,
        cov_bell: covariance(&bell, &a, &b)?,
        rows,
        halved_cov_mixture: covariance(&mixture, &ha, &hb)?,
        halved_cov_bell: covariance(&bell, &ha, &hb)?,
        halved_corr_bell: wy_bell.f_correlation(&ha, &hb)?,
    })
}

#[derive(Debug, Clone)]
pub struct HessianReport {
    pub radial: f64,
    pub axis: f64,
}

impl HessianReport {
    pub fn verdict(&self) -> &'static str {
        match (self.radial > 0.0, self.axis < 0.0) {
            (true, true) => "indefinite",
            (true, false) => "not shown indefinite (no negative direction)",
            (false, true) => "not shown indefinite (no positive direction)",
            (false, false) => "not shown indefinite",
        }
    }

    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        check("rho^T H rho", self.radial, 8.0 / 3.0, EXAMPLE_TOL, &mut out);
        check("e2^T H e2", self.axis, -16.0 / 3.0, EXAMPLE_TOL, &mut out);
        if self.verdict() != "indefinite" {
            out.push(format!("verdict: {}", self.verdict()));
        }
        out
    }

    pub fn render(&self) -> String {
        format!(
            "generalized variance Hessian at rho = (1/3, 1/3, 1/3), X = (1, 0, -1), Y = (1, -2, 1)\n  rho^T H rho = {:.15}\n  e2^T H e2   = {:.15}\n  verdict: {}\n",
            self.radial,
            self.axis,
            self.verdict()
        )
    }
}

pub fn hessian() -> CliResult<HessianReport> {
    let p = [1.0 / 3.0; 3];
    let h = hessian_generalized_variance(&p, &[1.0, 0.0, -1.0], &[1.0, -2.0, 1.0])?;
    Ok(HessianReport {
        radial: quadratic_form(&h, &p)?,
        axis: quadratic_form(&h, &[0.0, 1.0, 0.0])?,
    })
}

#[derive(Debug, Clone)]
pub struct PureVolumeRow {
    pub function: String,
    pub cov_volume: f64,
    pub qfi_volume: f64,
    pub f_gap: f64,
}

#[derive(Debug, Clone)]
pub struct ProbeRow {
    pub function: String,
    pub eps: f64,
    pub volume_gap: f64,
}

#[derive(Debug, Clone)]
pub struct PureVolumeReport {
    pub dim: usize,
    pub n: usize,
    pub seed: u64,
    pub rows: Vec<PureVolumeRow>,
    pub probe: Vec<ProbeRow>,
}

/// Mixing weights of the near-pure probe `(1 − ε)|ψ⟩⟨ψ| + ε I/d`.
pub const PROBE_EPS: [f64; 3] = [1e-2, 1e-4, 1e-6];

impl PureVolumeReport {
    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        for r in &self.rows {
            check(
                &format!("{} volume gap", r.function),
                r.cov_volume - r.qfi_volume,
                0.0,
                PURE_TOL,
                &mut out,
            );
        }
        out
    }

    /// Whether the volume gap shrinks along the probe for every function.
    pub fn probe_decreasing(&self) -> bool {
        self.rows.iter().all(|r| {
            let gaps: Vec<f64> = self.probe.iter().filter(|p| p.function == r.function).map(|p| p.volume_gap).collect();
            gaps.windows(2).all(|w| w[1] <= w[0])
        })
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "pure state, dim {}, {} observables, seed {}", self.dim, self.n, self.seed);
        for r in &self.rows {
            let _ = writeln!(
                s,
                "  {:<9} cov volume {:.12e}  qfi volume {:.12e}  gap {:+.3e}  F {:+.3e}",
                r.function,
                r.cov_volume,
                r.qfi_volume,
                r.cov_volume - r.qfi_volume,
                r.f_gap
            );
        }
        let _ = writeln!(s, "  near-pure probe (volume gap):");
        for p in &self.probe {
            let _ = writeln!(s, "    {:<9} eps {:.0e}  gap {:.6e}", p.function, p.eps, p.volume_gap);
        }
        let _ = writeln!(s, "  probe decreasing: {}", self.probe_decreasing());
        s
    }
}

pub fn pure_volume(dim: usize, n: usize, seed: u64) -> CliResult<PureVolumeReport> {
    if !(1..=3).contains(&n) {
        return Err(CliError::Argument(format!("n must be 1, 2 or 3, got {n}")));
    }
    if !(2..=6).contains(&dim) {
        return Err(CliError::Argument(format!("dim must be in 2..=6, got {dim}")));
    }
    let psi = sample_pure(seed, dim, 0)?;
    let obs_spec = RandomSpec::new(seed, dim, Ensemble::ComplexHermitian);
    let observables = (0..n as u64)
        .map(|k| sample_hermitian(&obs_spec, k))
        .collect::<qfivol_core::Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    let mut probe = Vec::new();
    for f in correlation_functions() {
        let r = compute_report(&GramSpec::new(psi.clone(), observables.clone(), f.clone())?, false)?;
        rows.push(PureVolumeRow {
            function: f.id().to_string(),
            cov_volume: r.cov_volume,
            qfi_volume: r.qfi_volume,
            f_gap: r.f_gap,
        });
        for eps in PROBE_EPS {
            let rho = psi.depolarize(eps)?;
            let r = compute_report(&GramSpec::new(rho, observables.clone(), f.clone())?, false)?;
            probe.push(ProbeRow {
                function: f.id().to_string(),
                eps,
                volume_gap: r.cov_volume - r.qfi_volume,
            });
        }
    }
    Ok(PureVolumeReport {
        dim,
        n,
        seed,
        rows,
        probe,
    })
}

#[derive(Debug, Clone)]
pub struct FunctionRow {
    pub id: String,
    pub formula: String,
    pub value_at_zero: f64,
    pub regular: bool,
    pub tilde: Option<String>,
}

pub fn list_functions() -> Vec<FunctionRow> {
    builtins()
        .into_iter()
        .map(|f| FunctionRow {
            id: f.id().to_string(),
            formula: f.formula(),
            value_at_zero: f.value_at_zero(),
            regular: f.is_regular(),
            tilde: f.tilde_closed_form(),
        })
        .collect()
}

pub fn render_functions(rows: &[FunctionRow]) -> String {
    let mut s = format!("{:<10} {:<40} {:>8} {:<8} {}\n", "id", "f(x)", "f(0)", "regular", "tilde f(x)");
    for r in rows {
        let _ = writeln!(
            s,
            "{:<10} {:<40} {:>8} {:<8} {}",
            r.id,
            r.formula,
            r.value_at_zero,
            r.regular,
            r.tilde.as_deref().unwrap_or("-")
        );
    }
    s
}
