//! Normalized symmetric operator monotone functions, their tilde transform,
//! and the scalar Kubo-Ando means `m_f(x, y) = y f(x/y)`.
//!
//! Operator monotonicity itself cannot be checked numerically. Registration
//! only verifies normalization, symmetry and the harmonic/arithmetic
//! sandwich on a fixed log-grid, which are necessary conditions.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Number of points in the registration and ordering grid.
pub const GRID_POINTS: usize = 64;
/// Grid range `[1e-6, 1e6]`, log-spaced.
pub const GRID_RANGE: (f64, f64) = (1e-6, 1e6);

const NORMALIZATION_TOL: f64 = 1e-12;
const SYMMETRY_TOL: f64 = 1e-10;
const SANDWICH_TOL: f64 = 1e-12;
const ORDER_TOL: f64 = 1e-12;

/// Identity tag of a function.
#[derive(Debug, Clone, PartialEq)]
pub enum FunctionId {
    /// Symmetric logarithmic derivative, `(1+x)/2`.
    Sld,
    /// Wigner-Yanase, `((1+√x)/2)²`.
    Wy,
    /// Right logarithmic derivative, `2x/(1+x)`.
    Rld,
    /// Wigner-Yanase-Dyson with parameter `β ∈ (0, ½)`.
    Wyd(f64),
    /// `f̃` for the wrapped function.
    Tilde(Box<FunctionId>),
    Custom(String),
}

impl fmt::Display for FunctionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionId::Sld => f.write_str("sld"),
            FunctionId::Wy => f.write_str("wy"),
            FunctionId::Rld => f.write_str("rld"),
            FunctionId::Wyd(b) => write!(f, "wyd:{b}"),
            FunctionId::Tilde(inner) => write!(f, "tilde({inner})"),
            FunctionId::Custom(name) => f.write_str(name),
        }
    }
}

type Evaluator = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Kind {
    Sld,
    Wy,
    Rld,
    Wyd(f64),
    TildeOf(Arc<MonotoneFunction>),
    Custom(Evaluator),
}

/// A normalized symmetric operator monotone function `f: (0,∞) → (0,∞)`.
#[derive(Clone)]
pub struct MonotoneFunction {
    id: FunctionId,
    kind: Kind,
    value_at_zero: f64,
}

impl fmt::Debug for MonotoneFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MonotoneFunction")
            .field("id", &self.id)
            .field("value_at_zero", &self.value_at_zero)
            .finish()
    }
}

impl PartialEq for MonotoneFunction {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id && self.value_at_zero == other.value_at_zero
    }
}

fn wyd_eval(beta: f64, x: f64) -> f64 {
    if x > 1.0 {
        return x * wyd_eval(beta, 1.0 / x);
    }
    if x == 1.0 {
        return 1.0;
    }
    let d = x - 1.0;
    // x − 1 is exact on [½, 1]; below that it drops digits of x
    let u = if x >= 0.5 { d.ln_1p() } else { x.ln() };
    beta * (1.0 - beta) * d * d / ((beta * u).exp_m1() * ((1.0 - beta) * u).exp_m1())
}

impl MonotoneFunction {
    pub fn sld() -> Self {
        Self {
            id: FunctionId::Sld,
            kind: Kind::Sld,
            value_at_zero: 0.5,
        }
    }

    pub fn wy() -> Self {
        Self {
            id: FunctionId::Wy,
            kind: Kind::Wy,
            value_at_zero: 0.25,
        }
    }

    pub fn rld() -> Self {
        Self {
            id: FunctionId::Rld,
            kind: Kind::Rld,
            value_at_zero: 0.0,
        }
    }

    /// Wigner-Yanase-Dyson function; `beta` must lie in `(0, ½)`.
    pub fn wyd(beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta < 0.5) {
            return Err(Error::InvalidParameter(format!("WYD parameter {beta} outside (0, 1/2)")));
        }
        Ok(Self {
            id: FunctionId::Wyd(beta),
            kind: Kind::Wyd(beta),
            value_at_zero: beta * (1.0 - beta),
        })
    }

    /// Builtin by tag; `beta` is required for (and only for) WYD.
    pub fn builtin(id: &FunctionId) -> Result<Self> {
        match id {
            FunctionId::Sld => Ok(Self::sld()),
            FunctionId::Wy => Ok(Self::wy()),
            FunctionId::Rld => Ok(Self::rld()),
            FunctionId::Wyd(b) => Self::wyd(*b),
            FunctionId::Tilde(inner) => Self::builtin(inner)?.tilde(),
            FunctionId::Custom(name) => Err(Error::UnknownFunction(name.clone())),
        }
    }

    /// Registers a user-supplied function after the grid checks.
    pub fn custom<F>(name: &str, value_at_zero: f64, evaluate: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !(value_at_zero >= 0.0 && value_at_zero <= 0.5) {
            return Err(Error::Registration {
                name: name.into(),
                reason: format!("f(0) = {value_at_zero} outside [0, 1/2]"),
            });
        }
        let f = Self {
            id: FunctionId::Custom(name.into()),
            kind: Kind::Custom(Arc::new(evaluate)),
            value_at_zero,
        };
        f.validate()?;
        Ok(f)
    }

    pub fn id(&self) -> &FunctionId {
        &self.id
    }

    /// `f(0) = lim_{x→0} f(x)`.
    pub fn value_at_zero(&self) -> f64 {
        self.value_at_zero
    }

    pub fn is_regular(&self) -> bool {
        self.value_at_zero > 0.0
    }

    /// Evaluates `f(x)` for `x ≥ 0`; `NaN` for negative input.
    pub fn evaluate(&self, x: f64) -> f64 {
        if x == 0.0 {
            return self.value_at_zero;
        }
        if !(x > 0.0) {
            return f64::NAN;
        }
        match &self.kind {
            Kind::Sld => 0.5 * (1.0 + x),
            Kind::Wy => {
                let r = 0.5 * (1.0 + x.sqrt());
                r * r
            }
            Kind::Rld => 2.0 * x / (1.0 + x),
            Kind::Wyd(b) => wyd_eval(*b, x),
            Kind::TildeOf(base) => match &base.kind {
                Kind::Sld => 2.0 * x / (1.0 + x),
                Kind::Wy => x.sqrt(),
                Kind::Wyd(b) => 0.5 * (x.powf(*b) + x.powf(1.0 - b)),
                _ => base.tilde_generic(x),
            },
            Kind::Custom(e) => e(x),
        }
    }

    /// `½[(x+1) − (x−1)² f(0)/f(x)]` evaluated literally.
    pub fn tilde_generic(&self, x: f64) -> f64 {
        if x == 0.0 {
            return 0.0;
        }
        let d = x - 1.0;
        0.5 * ((x + 1.0) - d * d * self.value_at_zero / self.evaluate(x))
    }

    /// The non-regular function `f̃`. Builtins use closed forms.
    pub fn tilde(&self) -> Result<Self> {
        if !self.is_regular() {
            return Err(Error::NonRegular(self.id.to_string()));
        }
        let f = Self {
            id: FunctionId::Tilde(Box::new(self.id.clone())),
            kind: Kind::TildeOf(Arc::new(self.clone())),
            value_at_zero: 0.0,
        };
        f.validate()?;
        Ok(f)
    }

    /// Human-readable formula.
    pub fn formula(&self) -> String {
        match &self.kind {
            Kind::Sld => "(1+x)/2".into(),
            Kind::Wy => "((1+sqrt(x))/2)^2".into(),
            Kind::Rld => "2x/(1+x)".into(),
            Kind::Wyd(b) => format!("{b}(1-{b})(x-1)^2/((x^{b}-1)(x^(1-{b})-1))"),
            Kind::TildeOf(base) => base
                .tilde_closed_form()
                .unwrap_or_else(|| "((x+1)-(x-1)^2 f(0)/f(x))/2".into()),
            Kind::Custom(_) => "custom".into(),
        }
    }

    /// Closed form of `f̃` where one is known.
    pub fn tilde_closed_form(&self) -> Option<String> {
        match &self.kind {
            Kind::Sld => Some("2x/(x+1)".into()),
            Kind::Wy => Some("sqrt(x)".into()),
            Kind::Wyd(b) => Some(format!("(x^{b}+x^(1-{b}))/2")),
            _ => None,
        }
    }

    /// Registration checks on the fixed grid: `f(1) = 1`, `f(x) = x f(1/x)`,
    /// and `2x/(1+x) ≤ f(x) ≤ (1+x)/2`.
    pub fn validate(&self) -> Result<()> {
        let fail = |reason: String| Error::Registration {
            name: self.id.to_string(),
            reason,
        };
        let one = self.evaluate(1.0);
        if !((one - 1.0).abs() <= NORMALIZATION_TOL) {
            return Err(fail(format!("f(1) = {one}")));
        }
        for x in default_grid() {
            let fx = self.evaluate(x);
            if !fx.is_finite() || fx <= 0.0 {
                return Err(fail(format!("f({x}) = {fx}")));
            }
            let mirrored = x * self.evaluate(1.0 / x);
            if (fx - mirrored).abs() > SYMMETRY_TOL * fx.abs().max(mirrored.abs()) {
                return Err(fail(format!("asymmetric at x = {x}: {fx} vs {mirrored}")));
            }
            let lo = 2.0 * x / (1.0 + x);
            let hi = 0.5 * (1.0 + x);
            // rounding floor of tilde-type evaluations, which cancel at O(1 + x)
            let floor = 16.0 * f64::EPSILON * (1.0 + x);
            if fx < lo * (1.0 - SANDWICH_TOL) - floor || fx > hi * (1.0 + SANDWICH_TOL) + floor {
                return Err(fail(format!("f({x}) = {fx} outside [{lo}, {hi}]")));
            }
        }
        Ok(())
    }

    /// `m_f(x, y)` for `x, y ≥ 0` without input validation.
    #[inline]
    pub fn mean(&self, x: f64, y: f64) -> f64 {
        if x == y {
            return x;
        }
        let (lo, hi) = if x < y { (x, y) } else { (y, x) };
        if lo == 0.0 {
            return hi * self.value_at_zero;
        }
        hi * self.evaluate(lo / hi)
    }
}

impl FromStr for MonotoneFunction {
    type Err = Error;

    /// Parses `sld`, `wy`, `rld` or `wyd:<beta>`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        match t.as_str() {
            "sld" => Ok(Self::sld()),
            "wy" => Ok(Self::wy()),
            "rld" => Ok(Self::rld()),
            _ => match t.strip_prefix("wyd:") {
                Some(b) => {
                    let beta: f64 = b.parse().map_err(|_| Error::UnknownFunction(s.to_string()))?;
                    Self::wyd(beta)
                }
                None => Err(Error::UnknownFunction(s.to_string())),
            },
        }
    }
}

/// The builtin catalog: SLD, WY, RLD, WYD(0.25).
pub fn builtins() -> Vec<MonotoneFunction> {
    vec![
        MonotoneFunction::sld(),
        MonotoneFunction::wy(),
        MonotoneFunction::rld(),
        MonotoneFunction::wyd(0.25).unwrap(),
    ]
}

/// 64 log-spaced points on `[1e-6, 1e6]`.
pub fn default_grid() -> Vec<f64> {
    let (lo, hi) = (GRID_RANGE.0.log10(), GRID_RANGE.1.log10());
    (0..GRID_POINTS)
        .map(|k| 10f64.powf(lo + (hi - lo) * k as f64 / (GRID_POINTS - 1) as f64))
        .collect()
}

/// Kubo-Ando mean of two non-negative scalars, `max · f(min/max)`, with
/// `m(x, x) = x` and `m(x, 0) = x f(0)`.
pub fn scalar_mean(f: &MonotoneFunction, x: f64, y: f64) -> Result<f64> {
    if !(x >= 0.0 && y >= 0.0) {
        return Err(Error::InvalidParameter(format!("mean of negative arguments ({x}, {y})")));
    }
    Ok(f.mean(x, y))
}

/// Cached `(x, y, m_f(x, y))` triples.
#[derive(Debug, Clone)]
pub struct ScalarMeanTable {
    pub function: FunctionId,
    pub pairs: Vec<(f64, f64, f64)>,
}

impl ScalarMeanTable {
    pub fn build(f: &MonotoneFunction, points: &[(f64, f64)]) -> Result<Self> {
        let pairs = points
            .iter()
            .map(|&(x, y)| scalar_mean(f, x, y).map(|m| (x, y, m)))
            .collect::<Result<_>>()?;
        Ok(Self {
            function: f.id().clone(),
            pairs,
        })
    }
}

/// Pointwise ordering of two tilde functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TildeOrder {
    /// Both orderings hold on the grid.
    Equal,
    /// `f̃ ≤ g̃`.
    FBelowG,
    /// `g̃ ≤ f̃`.
    GBelowF,
    Incomparable,
}

impl TildeOrder {
    pub fn f_le_g(self) -> bool {
        matches!(self, TildeOrder::Equal | TildeOrder::FBelowG)
    }

    pub fn g_le_f(self) -> bool {
        matches!(self, TildeOrder::Equal | TildeOrder::GBelowF)
    }
}

/// Decides `f̃ ≤ g̃` through the equivalent condition
/// `f(0)/f(t) ≥ g(0)/g(t)` sampled at every grid point.
pub fn tilde_order(f: &MonotoneFunction, g: &MonotoneFunction, grid: &[f64]) -> Result<TildeOrder> {
    for h in [f, g] {
        if !h.is_regular() {
            return Err(Error::NonRegular(h.id().to_string()));
        }
    }
    let (mut f_above, mut g_above) = (false, false);
    for &t in grid {
        let rf = f.value_at_zero() / f.evaluate(t);
        let rg = g.value_at_zero() / g.evaluate(t);
        let tol = ORDER_TOL * rf.abs().max(rg.abs());
        // rf < rg means f̃(t) > g̃(t)
        if rg - rf > tol {
            f_above = true;
        }
        if rf - rg > tol {
            g_above = true;
        }
    }
    Ok(match (f_above, g_above) {
        (false, false) => TildeOrder::Equal,
        (false, true) => TildeOrder::FBelowG,
        (true, false) => TildeOrder::GBelowF,
        (true, true) => TildeOrder::Incomparable,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn builtin_values() {
        assert_eq!(MonotoneFunction::sld().evaluate(1.0), 1.0);
        assert_eq!(MonotoneFunction::wy().value_at_zero(), 0.25);
        assert_eq!(MonotoneFunction::wyd(0.25).unwrap().value_at_zero(), 0.1875);
        assert!(!MonotoneFunction::rld().is_regular());
        for f in builtins() {
            f.validate().unwrap();
        }
    }

    #[test]
    fn wyd_parameter_range() {
        for b in [0.0, 0.5, -0.1, 0.7, f64::NAN] {
            assert!(matches!(MonotoneFunction::wyd(b), Err(Error::InvalidParameter(_))));
        }
    }

    #[test]
    fn wyd_continuous_through_one() {
        let f = MonotoneFunction::wyd(0.25).unwrap();
        // f(x) ≈ 1 + (x−1)/2 near 1
        for k in 1..12 {
            let h = 10f64.powi(-k);
            for x in [1.0 - h, 1.0 + h] {
                let v = f.evaluate(x);
                assert!((v - (1.0 + 0.5 * (x - 1.0))).abs() < 0.1 * h * h + 1e-15, "x = {x}: {v}");
            }
        }
        assert_eq!(f.evaluate(1.0), 1.0);
        // and against the literal formula away from 1
        let b: f64 = 0.25;
        let x: f64 = 3.7;
        let literal = b * (1.0 - b) * (x - 1.0).powi(2) / ((x.powf(b) - 1.0) * (x.powf(1.0 - b) - 1.0));
        assert_relative_eq!(f.evaluate(x), literal, max_relative = 1e-13);
    }

    #[test]
    fn tilde_closed_forms() {
        assert_relative_eq!(MonotoneFunction::sld().tilde().unwrap().evaluate(4.0), 1.6, max_relative = 1e-15);
        assert_relative_eq!(MonotoneFunction::wy().tilde().unwrap().evaluate(4.0), 2.0, max_relative = 1e-15);
        let t = MonotoneFunction::wyd(0.25).unwrap().tilde().unwrap();
        assert_relative_eq!(t.evaluate(16.0), 5.0, max_relative = 1e-14);
        assert_eq!(t.value_at_zero(), 0.0);
    }

    #[test]
    fn tilde_closed_forms_match_literal_formula() {
        for f in [MonotoneFunction::sld(), MonotoneFunction::wy(), MonotoneFunction::wyd(0.1).unwrap()] {
            let t = f.tilde().unwrap();
            for x in [1e-3, 0.2, 0.9, 1.0, 1.3, 7.0, 250.0] {
                assert_relative_eq!(t.evaluate(x), f.tilde_generic(x), max_relative = 1e-11);
            }
        }
    }

    #[test]
    fn tilde_of_non_regular_fails() {
        assert!(matches!(MonotoneFunction::rld().tilde(), Err(Error::NonRegular(_))));
        let t = MonotoneFunction::sld().tilde().unwrap();
        assert!(matches!(t.tilde(), Err(Error::NonRegular(_))));
    }

    #[test]
    fn scalar_mean_examples() {
        assert_eq!(scalar_mean(&MonotoneFunction::sld(), 1.0, 3.0).unwrap(), 2.0);
        assert_relative_eq!(scalar_mean(&MonotoneFunction::rld(), 1.0, 3.0).unwrap(), 1.5, max_relative = 1e-15);
        for f in builtins().into_iter().filter(|f| f.is_regular()) {
            let t = f.tilde().unwrap();
            assert_eq!(scalar_mean(&t, 0.7, 0.0).unwrap(), 0.0);
            assert_eq!(scalar_mean(&t, 0.0, 0.7).unwrap(), 0.0);
            assert_eq!(scalar_mean(&f, 0.7, 0.0).unwrap(), 0.7 * f.value_at_zero());
        }
        assert_eq!(scalar_mean(&MonotoneFunction::wy(), 0.0, 0.0).unwrap(), 0.0);
        assert_eq!(scalar_mean(&MonotoneFunction::wy(), 0.3, 0.3).unwrap(), 0.3);
        assert!(scalar_mean(&MonotoneFunction::wy(), -1.0, 0.3).is_err());
    }

    #[test]
    fn tilde_order_examples() {
        let grid = default_grid();
        let sld = MonotoneFunction::sld();
        let wy = MonotoneFunction::wy();
        let wyd = MonotoneFunction::wyd(0.25).unwrap();
        assert_eq!(tilde_order(&sld, &wy, &grid).unwrap(), TildeOrder::FBelowG);
        assert_eq!(tilde_order(&wy, &sld, &grid).unwrap(), TildeOrder::GBelowF);
        assert_eq!(tilde_order(&wy, &wy, &grid).unwrap(), TildeOrder::Equal);
        assert!(tilde_order(&wy, &wy, &grid).unwrap().f_le_g());
        assert!(tilde_order(&wy, &wy, &grid).unwrap().g_le_f());
        assert_eq!(tilde_order(&wy, &wyd, &grid).unwrap(), TildeOrder::FBelowG);
        let wyd1 = MonotoneFunction::wyd(0.1).unwrap();
        assert_eq!(tilde_order(&wyd, &wyd1, &grid).unwrap(), TildeOrder::FBelowG);
        assert!(tilde_order(&MonotoneFunction::rld(), &wy, &grid).is_err());
    }

    #[test]
    fn custom_registration() {
        // SLD again under another name passes.
        let f = MonotoneFunction::custom("arith", 0.5, |x| 0.5 * (1.0 + x)).unwrap();
        assert!(f.is_regular());
        // x ↦ x is not symmetric.
        assert!(matches!(
            MonotoneFunction::custom("identity", 0.0, |x| x),
            Err(Error::Registration { .. })
        ));
        // (1+x)/2 · 1.01 is not normalized.
        assert!(MonotoneFunction::custom("scaled", 0.5, |x| 0.505 * (1.0 + x)).is_err());
        // generic tilde path for a custom function
        let t = f.tilde().unwrap();
        assert_relative_eq!(t.evaluate(3.0), 1.5, max_relative = 1e-14);
    }

    #[test]
    fn parse_specs() {
        assert_eq!("sld".parse::<MonotoneFunction>().unwrap(), MonotoneFunction::sld());
        assert_eq!("WY".parse::<MonotoneFunction>().unwrap(), MonotoneFunction::wy());
        assert_eq!("wyd:0.25".parse::<MonotoneFunction>().unwrap().id().to_string(), "wyd:0.25");
        assert!("wyd:0.6".parse::<MonotoneFunction>().is_err());
        assert!("bures".parse::<MonotoneFunction>().is_err());
    }

    #[test]
    fn grid_shape() {
        let g = default_grid();
        assert_eq!(g.len(), 64);
        assert_relative_eq!(g[0], 1e-6, max_relative = 1e-12);
        assert_relative_eq!(g[63], 1e6, max_relative = 1e-12);
    }
}
