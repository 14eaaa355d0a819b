//! Seeded, parallel sweeps over random inputs.
//!
//! Sample `s` uses dimension `lo + s mod (hi − lo + 1)`, draws its state as
//! index `s` of the state ensemble and observable `k` as index `8s + k` of the
//! observable ensemble. Samples are computed in parallel blocks and written in
//! index order, so the output does not depend on the worker count.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;

use qfivol_core::matrix::{DensityMatrix, HermitianMatrix};
use qfivol_core::monotone::{default_grid, tilde_order, MonotoneFunction, TildeOrder};
use qfivol_core::random::{sample_density, sample_hermitian, sample_structured, Ensemble, RandomSpec};
use qfivol_core::volume::{compute_report, monotonicity, verdict_from_report, GramSpec, MonotonicityCheck, Verdict};
use qfivol_core::VolumeReport;

use crate::error::{CliError, CliResult};
use crate::record::{json_array, ObjectWriter};

/// Samples handed to the worker pool at a time.
const BLOCK: u64 = 2048;
/// Largest supported dimension.
pub const MAX_DIM: usize = 8;

/// State ensemble and observable ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnsemblePair {
    pub state: Ensemble,
    pub observables: Ensemble,
}

impl EnsemblePair {
    pub fn is_structured(&self) -> bool {
        self.observables == Ensemble::PauliLikeStructured
    }

    fn default_state(observables: Ensemble) -> Option<Ensemble> {
        match observables {
            Ensemble::ComplexHermitian => Some(Ensemble::Density),
            Ensemble::RealSymmetric => Some(Ensemble::RealDensity),
            Ensemble::PauliLikeStructured => Some(Ensemble::DiagonalDensity),
            _ => None,
        }
    }
}

impl fmt::Display for EnsemblePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}+{}", self.state, self.observables)
    }
}

impl FromStr for EnsemblePair {
    type Err = CliError;

    /// Accepts `STATE+OBSERVABLES`, a single observable ensemble (paired with
    /// its natural state ensemble), or the aliases `complex`, `real` and
    /// `structured`.
    fn from_str(s: &str) -> CliResult<Self> {
        let observables_only = |o: Ensemble| {
            EnsemblePair::default_state(o)
                .map(|state| EnsemblePair { state, observables: o })
                .ok_or_else(|| CliError::Argument(format!("{o} is a state ensemble; pair it as {o}+OBSERVABLES")))
        };
        let pair = match s {
            "complex" => observables_only(Ensemble::ComplexHermitian)?,
            "real" => observables_only(Ensemble::RealSymmetric)?,
            "structured" => observables_only(Ensemble::PauliLikeStructured)?,
            _ => match s.split_once('+') {
                Some((st, ob)) => EnsemblePair {
                    state: st.parse()?,
                    observables: ob.parse()?,
                },
                None => observables_only(s.parse()?)?,
            },
        };
        if !pair.state.produces_state() {
            return Err(CliError::Argument(format!("{} does not produce states", pair.state)));
        }
        if pair.observables.produces_state() {
            return Err(CliError::Argument(format!("{} does not produce observables", pair.observables)));
        }
        Ok(pair)
    }
}

/// Inclusive dimension range, written `D` or `LO-HI`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DimRange {
    pub lo: usize,
    pub hi: usize,
}

impl DimRange {
    pub fn dim_for(&self, index: u64) -> usize {
        self.lo + (index % (self.hi - self.lo + 1) as u64) as usize
    }
}

impl fmt::Display for DimRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lo == self.hi {
            write!(f, "{}", self.lo)
        } else {
            write!(f, "{}-{}", self.lo, self.hi)
        }
    }
}

impl FromStr for DimRange {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        let bad = || CliError::Argument(format!("dimension must be D or LO-HI within 2..={MAX_DIM}, got {s}"));
        let (lo, hi) = match s.split_once('-') {
            Some((a, b)) => (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?),
            None => {
                let d = s.trim().parse().map_err(|_| bad())?;
                (d, d)
            }
        };
        if lo < 2 || hi > MAX_DIM || lo > hi {
            return Err(bad());
        }
        Ok(DimRange { lo, hi })
    }
}

/// Parses a comma-separated list of regular function specs.
pub fn parse_functions(s: &str) -> CliResult<Vec<MonotoneFunction>> {
    let mut out: Vec<MonotoneFunction> = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let f: MonotoneFunction = part.parse()?;
        if !f.is_regular() {
            return Err(CliError::Argument(format!("{part} is not regular (f(0) = 0)")));
        }
        if out.iter().any(|g| g.id() == f.id()) {
            return Err(CliError::Argument(format!("{part} listed twice")));
        }
        out.push(f);
    }
    if out.is_empty() {
        return Err(CliError::Argument("no functions given".into()));
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub n: usize,
    pub dims: DimRange,
    pub samples: u64,
    pub functions: Vec<MonotoneFunction>,
    pub ensemble: EnsemblePair,
    pub seed: u64,
    pub parallelism: usize,
}

impl SweepConfig {
    pub fn validate(&self) -> CliResult<()> {
        if !(1..=3).contains(&self.n) {
            return Err(CliError::Argument(format!("n must be 1, 2 or 3, got {}", self.n)));
        }
        if self.samples == 0 {
            return Err(CliError::Argument("samples must be positive".into()));
        }
        if self.functions.is_empty() || self.functions.iter().any(|f| !f.is_regular()) {
            return Err(CliError::Argument("functions must be a non-empty list of regular functions".into()));
        }
        if self.ensemble.is_structured() && self.n != 3 {
            return Err(CliError::Argument("the structured ensemble produces triples; use n = 3".into()));
        }
        if self.parallelism == 0 {
            return Err(CliError::Argument("parallelism must be positive".into()));
        }
        Ok(())
    }
}

/// Regenerates the inputs of one sample.
pub fn draw(
    ensemble: EnsemblePair,
    seed: u64,
    dim: usize,
    n: usize,
    index: u64,
) -> CliResult<(DensityMatrix, Vec<HermitianMatrix>)> {
    let rho = sample_density(&RandomSpec::new(seed, dim, ensemble.state), index)?;
    let obs_spec = RandomSpec::new(seed, dim, ensemble.observables);
    let observables = if ensemble.is_structured() {
        if n != 3 {
            return Err(CliError::Argument("the structured ensemble produces triples".into()));
        }
        sample_structured(&obs_spec, index)?.to_vec()
    } else {
        (0..n as u64)
            .map(|k| sample_hermitian(&obs_spec, index * 8 + k))
            .collect::<qfivol_core::Result<Vec<_>>>()?
    };
    Ok((rho, observables))
}

fn order_tag(order: TildeOrder) -> &'static str {
    match order {
        TildeOrder::Equal => "equal",
        TildeOrder::FBelowG => "f-below-g",
        TildeOrder::GBelowF => "g-below-f",
        TildeOrder::Incomparable => "incomparable",
    }
}

fn monotonicity_json(m: &MonotonicityCheck) -> String {
    ObjectWriter::new()
        .str("partner", &m.partner.to_string())
        .str("order", order_tag(m.order))
        .float("v_f", m.v_f)
        .float("v_g", m.v_g)
        .bool("holds", m.holds)
        .finish()
}

/// Everything recorded for one `(sample, function)` pair.
#[derive(Debug, Clone)]
pub struct SampleRecord {
    pub index: u64,
    pub seed: u64,
    pub ensemble: EnsemblePair,
    pub dim: usize,
    pub n: usize,
    pub function: String,
    pub report: VolumeReport,
    pub verdict: Verdict,
    pub monotonicity: Vec<MonotonicityCheck>,
}

impl SampleRecord {
    pub fn to_json(&self) -> String {
        let v = &self.verdict;
        let r = &self.report;
        let mono: Vec<String> = self.monotonicity.iter().map(monotonicity_json).collect();
        ObjectWriter::new()
            .str("kind", "sample")
            .int("index", self.index)
            .int("seed", self.seed)
            .str("ensemble", &self.ensemble.to_string())
            .int("dim", self.dim as u64)
            .int("n", self.n as u64)
            .str("function", &self.function)
            .float("cov_det", r.cov_det)
            .float("qfi_det", r.qfi_det)
            .float("F", r.f_gap)
            .float("scale", v.scale)
            .float("cov_volume", r.cov_volume)
            .float("v_f", r.qfi_volume)
            .float("min_singular_value", v.min_singular_value)
            .bool("main_holds", v.main_holds)
            .bool("dependent", v.dependent)
            .bool("equality_consistent", v.equality_consistent)
            .bool("equality_without_dependence", v.equality_without_dependence)
            .str("proved_case", v.proved_case.tag())
            .bool("candidate_counterexample", v.candidate_counterexample)
            .opt_float("robertson_det", r.robertson_det)
            .raw("monotonicity", &json_array(&mono))
            .finish()
    }
}

/// Runs every configured function on sample `index`.
pub fn compute_sample(config: &SweepConfig, orders: &[Vec<TildeOrder>], index: u64) -> CliResult<Vec<SampleRecord>> {
    let dim = config.dims.dim_for(index);
    let (rho, observables) = draw(config.ensemble, config.seed, dim, config.n, index)?;
    let mut specs = Vec::with_capacity(config.functions.len());
    let mut reports = Vec::with_capacity(config.functions.len());
    for f in &config.functions {
        let spec = GramSpec::new(rho.clone(), observables.clone(), f.clone())?;
        reports.push(compute_report(&spec, false)?);
        specs.push(spec);
    }
    let mut out = Vec::with_capacity(specs.len());
    for (i, spec) in specs.iter().enumerate() {
        let verdict = verdict_from_report(spec, &reports[i])?;
        let mono = (0..specs.len())
            .filter(|&j| j != i)
            .filter_map(|j| monotonicity(orders[i][j], &reports[i], &config.functions[j], &reports[j]))
            .collect();
        out.push(SampleRecord {
            index,
            seed: config.seed,
            ensemble: config.ensemble,
            dim,
            n: config.n,
            function: spec.function().id().to_string(),
            report: reports[i].clone(),
            verdict,
            monotonicity: mono,
        });
    }
    Ok(out)
}

/// Pairwise tilde orderings, `orders[i][j]` relating function `i` to `j`.
pub fn pairwise_orders(functions: &[MonotoneFunction]) -> CliResult<Vec<Vec<TildeOrder>>> {
    let grid = default_grid();
    functions
        .iter()
        .map(|f| {
            functions
                .iter()
                .map(|g| tilde_order(f, g, &grid).map_err(CliError::from))
                .collect()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct FunctionStats {
    pub function: String,
    pub min_f: f64,
    pub mean_f: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSummary {
    pub samples: u64,
    pub records: u64,
    pub min_f: f64,
    pub argmin_index: u64,
    pub argmin_function: String,
    /// Records with `F < −1e-10 · scale`, in any case.
    pub violations: u64,
    /// Violations outside every proved case.
    pub candidates: u64,
    pub monotonicity_failures: u64,
    pub equality_without_dependence: u64,
    pub per_function: Vec<FunctionStats>,
}

impl SweepSummary {
    pub fn to_json(&self) -> String {
        let per: Vec<String> = self
            .per_function
            .iter()
            .map(|s| {
                ObjectWriter::new()
                    .str("function", &s.function)
                    .float("min_F", s.min_f)
                    .float("mean_F", s.mean_f)
                    .finish()
            })
            .collect();
        ObjectWriter::new()
            .str("kind", "summary")
            .int("samples", self.samples)
            .int("records", self.records)
            .float("min_F", self.min_f)
            .int("argmin_index", self.argmin_index)
            .str("argmin_function", &self.argmin_function)
            .int("violations", self.violations)
            .int("candidates", self.candidates)
            .int("monotonicity_failures", self.monotonicity_failures)
            .int("equality_without_dependence", self.equality_without_dependence)
            .raw("per_function", &json_array(&per))
            .finish()
    }

    /// Whether `--strict` should fail the run.
    pub fn has_findings(&self) -> bool {
        self.violations + self.candidates + self.monotonicity_failures > 0
    }
}

impl fmt::Display for SweepSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "samples: {}  records: {}", self.samples, self.records)?;
        writeln!(
            f,
            "min F: {:.6e} at index {} ({})",
            self.min_f, self.argmin_index, self.argmin_function
        )?;
        writeln!(
            f,
            "violations: {}  candidate counterexamples: {}  monotonicity failures: {}  near-equality without dependence: {}",
            self.violations, self.candidates, self.monotonicity_failures, self.equality_without_dependence
        )?;
        for s in &self.per_function {
            writeln!(f, "  {:<10} min F {:>14.6e}  mean F {:>14.6e}", s.function, s.min_f, s.mean_f)?;
        }
        Ok(())
    }
}

struct Accumulator {
    summary: SweepSummary,
    sums: Vec<f64>,
    counts: Vec<u64>,
}

impl Accumulator {
    fn new(config: &SweepConfig) -> Self {
        Self {
            summary: SweepSummary {
                samples: config.samples,
                records: 0,
                min_f: f64::INFINITY,
                argmin_index: 0,
                argmin_function: String::new(),
                violations: 0,
                candidates: 0,
                monotonicity_failures: 0,
                equality_without_dependence: 0,
                per_function: config
                    .functions
                    .iter()
                    .map(|f| FunctionStats {
                        function: f.id().to_string(),
                        min_f: f64::INFINITY,
                        mean_f: 0.0,
                    })
                    .collect(),
            },
            sums: vec![0.0; config.functions.len()],
            counts: vec![0; config.functions.len()],
        }
    }

    fn add(&mut self, slot: usize, rec: &SampleRecord) {
        let s = &mut self.summary;
        let f = rec.report.f_gap;
        s.records += 1;
        if f < s.min_f {
            s.min_f = f;
            s.argmin_index = rec.index;
            s.argmin_function = rec.function.clone();
        }
        s.violations += u64::from(!rec.verdict.main_holds);
        s.candidates += u64::from(rec.verdict.candidate_counterexample);
        s.equality_without_dependence += u64::from(rec.verdict.equality_without_dependence);
        s.monotonicity_failures += rec.monotonicity.iter().filter(|m| !m.holds).count() as u64;
        let stats = &mut s.per_function[slot];
        stats.min_f = stats.min_f.min(f);
        self.sums[slot] += f;
        self.counts[slot] += 1;
    }

    fn finish(mut self) -> SweepSummary {
        for (k, stats) in self.summary.per_function.iter_mut().enumerate() {
            stats.mean_f = self.sums[k] / self.counts[k].max(1) as f64;
        }
        self.summary
    }
}

/// Runs the sweep, writing one line per record and the summary last.
pub fn run_sweep<W: Write>(config: &SweepConfig, mut out: W) -> CliResult<SweepSummary> {
    config.validate()?;
    let orders = pairwise_orders(&config.functions)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.parallelism)
        .build()
        .map_err(|e| CliError::Argument(format!("cannot start worker pool: {e}")))?;
    let mut acc = Accumulator::new(config);
    let mut start = 0;
    while start < config.samples {
        let end = (start + BLOCK).min(config.samples);
        let block: Vec<CliResult<Vec<SampleRecord>>> =
            pool.install(|| (start..end).into_par_iter().map(|i| compute_sample(config, &orders, i)).collect());
        for records in block {
            for (slot, rec) in records?.iter().enumerate() {
                writeln!(out, "{}", rec.to_json())?;
                acc.add(slot, rec);
            }
        }
        start = end;
    }
    let summary = acc.finish();
    writeln!(out, "{}", summary.to_json())?;
    out.flush()?;
    Ok(summary)
}

/// Outcome of recomputing one record.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplayOutcome {
    pub index: u64,
    pub function: String,
    pub recorded_f: f64,
    pub recomputed_f: f64,
}

impl ReplayOutcome {
    pub fn matches(&self) -> bool {
        self.recorded_f.to_bits() == self.recomputed_f.to_bits()
    }
}

/// Regenerates the inputs of a sample record and recomputes `F`.
pub fn replay(record: &serde_json::Value) -> CliResult<ReplayOutcome> {
    use crate::record::{field_f64, field_str, field_u64};
    let kind = field_str(record, "kind")?;
    if kind != "sample" {
        return Err(CliError::Argument(format!("cannot replay a {kind} record")));
    }
    let index = field_u64(record, "index")?;
    let seed = field_u64(record, "seed")?;
    let ensemble: EnsemblePair = field_str(record, "ensemble")?.parse()?;
    let dim = field_u64(record, "dim")? as usize;
    let n = field_u64(record, "n")? as usize;
    let function: MonotoneFunction = field_str(record, "function")?.parse()?;
    let recorded_f = field_f64(record, "F")?;
    let (rho, observables) = draw(ensemble, seed, dim, n, index)?;
    let spec = GramSpec::new(rho, observables, function)?;
    let report = compute_report(&spec, false)?;
    Ok(ReplayOutcome {
        index,
        function: spec.function().id().to_string(),
        recorded_f,
        recomputed_f: report.f_gap,
    })
}
