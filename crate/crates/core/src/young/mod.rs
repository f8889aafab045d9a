//! Young's functions: evaluation, inverses, complementary functions and
//! grid-certified growth conditions.
//!
//! A Young's function here is the restriction to `[0, inf)` of an even
//! convex function with `Φ(0) = 0`, `Φ(x) > 0` for `x > 0` and
//! `Φ(x)/x -> inf`. Evaluation that overflows returns `+inf`; callers treat
//! that as the true (unrepresentable) value.

mod growth;

pub use growth::{
    check_growth, check_growth_fn, grid_young_check, is_young_composition, CompositionReport,
    GrowthCondition, GrowthReport, YoungCheck,
};

use serde::{Deserialize, Serialize};

use crate::error::{bail, Error, Result};
use crate::numeric::{invert_increasing, log_space, maximize_unimodal};

/// The 64-point log-spaced grid on `[1e-3, 1e3]` used by every grid
/// certification unless a caller supplies its own.
pub fn standard_grid() -> Vec<f64> {
    log_space(1e-3, 1e3, 64)
}

/// Hölder conjugate exponent `p' = p / (p - 1)`.
pub fn conjugate_exponent(p: f64) -> f64 {
    p / (p - 1.0)
}

/// A Young's function, tagged by family.
///
/// Serialized as `{"family": "power_scaled", "p": 2.0}` and similar;
/// `tabulated` takes `{"family": "tabulated", "table": [[x, y], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum YoungFunction {
    /// `x^p`
    Power { p: f64 },
    /// `x^p / p`
    PowerScaled { p: f64 },
    /// `exp(x^p) - x^p - 1`
    ExpPower { p: f64 },
    /// `(1 + x^p) ln(1 + x^p) - x^p`
    Entropy { p: f64 },
    /// `x^2 / ln(e + x)`
    LogQuotient,
    /// `exp(x^4) - 1`
    ExpQuartic,
    /// Monotone log-log interpolation through strictly increasing samples.
    Tabulated { table: Vec<[f64; 2]> },
    /// The complementary function `sup { x y - Φ(x) }`.
    ConjugateOf { of: Box<YoungFunction> },
    /// `outer(inner(x))`, or `outer(inner⁻¹(x))` when `invert_inner`.
    ComposeOf {
        outer: Box<YoungFunction>,
        inner: Box<YoungFunction>,
        #[serde(default)]
        invert_inner: bool,
    },
    /// `x ↦ Φ(scale·x)`.
    Dilated { of: Box<YoungFunction>, scale: f64 },
}

impl YoungFunction {
    pub fn power(p: f64) -> Self {
        Self::Power { p }
    }

    pub fn power_scaled(p: f64) -> Self {
        Self::PowerScaled { p }
    }

    pub fn exp_power(p: f64) -> Self {
        Self::ExpPower { p }
    }

    pub fn entropy(p: f64) -> Self {
        Self::Entropy { p }
    }

    pub fn log_quotient() -> Self {
        Self::LogQuotient
    }

    pub fn exp_quartic() -> Self {
        Self::ExpQuartic
    }

    /// Builds a tabulated function, rejecting tables that are not strictly
    /// increasing in both coordinates.
    pub fn tabulated(table: Vec<[f64; 2]>) -> Result<Self> {
        let f = Self::Tabulated { table };
        f.validate()?;
        Ok(f)
    }

    /// `outer ∘ inner⁻¹`.
    pub fn compose_inverse(outer: YoungFunction, inner: YoungFunction) -> Self {
        Self::ComposeOf { outer: Box::new(outer), inner: Box::new(inner), invert_inner: true }
    }

    /// `outer ∘ inner`.
    pub fn compose(outer: YoungFunction, inner: YoungFunction) -> Self {
        Self::ComposeOf { outer: Box::new(outer), inner: Box::new(inner), invert_inner: false }
    }

    /// `x ↦ self(scale·x)`.
    pub fn dilate(self, scale: f64) -> Self {
        Self::Dilated { of: Box::new(self), scale }
    }

    /// Short human-readable name used in reports.
    pub fn label(&self) -> String {
        match self {
            Self::Power { p } => format!("power({p})"),
            Self::PowerScaled { p } => format!("power_scaled({p})"),
            Self::ExpPower { p } => format!("exp_power({p})"),
            Self::Entropy { p } => format!("entropy({p})"),
            Self::LogQuotient => "log_quotient".into(),
            Self::ExpQuartic => "exp_quartic".into(),
            Self::Tabulated { table } => format!("tabulated[{}]", table.len()),
            Self::ConjugateOf { of } => format!("conjugate_of({})", of.label()),
            Self::ComposeOf { outer, inner, invert_inner } => {
                let inv = if *invert_inner { "⁻¹" } else { "" };
                format!("{}∘{}{inv}", outer.label(), inner.label())
            }
            Self::Dilated { of, scale } => format!("{}({scale}·x)", of.label()),
        }
    }

    /// Checks family parameters and table shape.
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Power { p } | Self::PowerScaled { p } => {
                if !(p.is_finite() && *p > 1.0) {
                    bail!(Argument, "power exponent must be finite and > 1, got {p}");
                }
            }
            Self::ExpPower { p } | Self::Entropy { p } => {
                if !(p.is_finite() && *p >= 1.0) {
                    bail!(Argument, "exponent must be finite and >= 1, got {p}");
                }
            }
            Self::LogQuotient | Self::ExpQuartic => {}
            Self::Tabulated { table } => {
                if table.len() < 2 {
                    bail!(Argument, "tabulated function needs at least two samples");
                }
                for pt in table {
                    if !(pt[0] > 0.0 && pt[1] > 0.0 && pt[0].is_finite() && pt[1].is_finite()) {
                        bail!(Argument, "table samples must be positive and finite, got {pt:?}");
                    }
                }
                for w in table.windows(2) {
                    if !(w[1][0] > w[0][0] && w[1][1] > w[0][1]) {
                        bail!(Argument, "table must be strictly increasing at {:?} -> {:?}", w[0], w[1]);
                    }
                }
            }
            Self::ConjugateOf { of } => of.validate()?,
            Self::Dilated { of, scale } => {
                if !(scale.is_finite() && *scale > 0.0) {
                    bail!(Argument, "dilation scale must be finite and > 0, got {scale}");
                }
                of.validate()?;
            }
            Self::ComposeOf { outer, inner, .. } => {
                outer.validate()?;
                inner.validate()?;
            }
        }
        Ok(())
    }

    /// `Φ(x)` for `x >= 0`.
    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(x >= 0.0) {
            bail!(Domain, "Young function evaluated at {x}");
        }
        if x == 0.0 {
            return Ok(0.0);
        }
        Ok(match self {
            Self::Power { p } => x.powf(*p),
            Self::PowerScaled { p } => x.powf(*p) / p,
            Self::ExpPower { p } => exp_minus_linear(x.powf(*p)),
            Self::Entropy { p } => entropy_kernel(x.powf(*p)),
            Self::LogQuotient => x * x / (std::f64::consts::E + x).ln(),
            Self::ExpQuartic => x.powi(4).exp_m1(),
            Self::Tabulated { table } => tabulated_eval(table, x)?,
            Self::ConjugateOf { of } => of.conjugate_eval(x)?,
            Self::ComposeOf { outer, inner, invert_inner } => {
                let y = if *invert_inner { inner.inverse(x)? } else { inner.eval(x)? };
                if y.is_infinite() {
                    f64::INFINITY
                } else {
                    outer.eval(y)?
                }
            }
            Self::Dilated { of, scale } => of.eval(scale * x)?,
        })
    }

    /// `Φ⁻¹(y)`: the unique `x >= 0` with `Φ(x) = y`.
    pub fn inverse(&self, y: f64) -> Result<f64> {
        if !(y >= 0.0) {
            bail!(Domain, "inverse evaluated at {y}");
        }
        if y == 0.0 {
            return Ok(0.0);
        }
        if y == f64::INFINITY {
            return Ok(f64::INFINITY);
        }
        match self {
            Self::Tabulated { table } => tabulated_inverse(table, y),
            Self::Dilated { of, scale } => Ok(of.inverse(y)? / scale),
            _ => invert_increasing(|x| self.eval(x), y),
        }
    }

    /// `Φ*(y) = sup { x y - Φ(x) : x >= 0 }`.
    pub fn conjugate_eval(&self, y: f64) -> Result<f64> {
        if !(y >= 0.0) {
            bail!(Domain, "conjugate evaluated at {y}");
        }
        if y == 0.0 {
            return Ok(0.0);
        }
        match self {
            Self::PowerScaled { p } => {
                let q = conjugate_exponent(*p);
                Ok(y.powf(q) / q)
            }
            Self::Power { p } => {
                let q = conjugate_exponent(*p);
                Ok((p - 1.0) * (y / p).powf(q))
            }
            Self::Tabulated { table } => {
                let x_max = table[table.len() - 1][0];
                let m = maximize_unimodal(|x| {
                    if x > x_max {
                        return Ok(f64::NEG_INFINITY);
                    }
                    Ok(x * y - tabulated_eval_extended(table, x))
                })?;
                if m.arg >= x_max * (1.0 - 1e-8) {
                    bail!(Numeric, "conjugate maximizer for y = {y} lies beyond the table");
                }
                Ok(m.value)
            }
            Self::Dilated { of, scale } => of.conjugate_eval(y / scale),
            _ => Ok(maximize_unimodal(|x| Ok(x * y - self.eval(x)?))?.value),
        }
    }

    /// The complementary Young's function. Power-scaled functions map to
    /// the conjugate exponent exactly; everything else is wrapped.
    pub fn conjugate(&self) -> YoungFunction {
        match self {
            Self::PowerScaled { p } => Self::PowerScaled { p: conjugate_exponent(*p) },
            other => Self::ConjugateOf { of: Box::new(other.clone()) },
        }
    }

    /// `Φ*⁻¹(y)`.
    pub fn conjugate_inverse(&self, y: f64) -> Result<f64> {
        self.conjugate().inverse(y)
    }
}

/// `e^t - t - 1` without cancellation for small `t`.
fn exp_minus_linear(t: f64) -> f64 {
    if t < 1e-2 {
        let mut term = t * t / 2.0;
        let mut sum = term;
        for k in 3..12 {
            term *= t / k as f64;
            sum += term;
        }
        sum
    } else {
        t.exp_m1() - t
    }
}

/// `(1 + s) ln(1 + s) - s` without cancellation for small `s`.
fn entropy_kernel(s: f64) -> f64 {
    if s < 1e-2 {
        // sum_{k >= 2} (-1)^k s^k / (k (k - 1))
        let mut pow = s * s;
        let mut sum = 0.0;
        for k in 2..14 {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            sum += sign * pow / (k * (k - 1)) as f64;
            pow *= s;
        }
        sum
    } else {
        (1.0 + s) * s.ln_1p() - s
    }
}

fn segment(table: &[[f64; 2]], x: f64) -> usize {
    // index i with table[i][0] <= x <= table[i + 1][0]
    let i = table.partition_point(|pt| pt[0] <= x);
    i.clamp(1, table.len() - 1) - 1
}

fn loglog(a: [f64; 2], b: [f64; 2], x: f64) -> f64 {
    let slope = (b[1].ln() - a[1].ln()) / (b[0].ln() - a[0].ln());
    (a[1].ln() + slope * (x.ln() - a[0].ln())).exp()
}

fn tabulated_eval(table: &[[f64; 2]], x: f64) -> Result<f64> {
    let (lo, hi) = (table[0][0], table[table.len() - 1][0]);
    if x < lo || x > hi {
        return Err(Error::Range(format!("{x} outside table range [{lo}, {hi}]")));
    }
    let i = segment(table, x);
    Ok(loglog(table[i], table[i + 1], x))
}

/// Table evaluation that continues the first log-log segment down to 0.
fn tabulated_eval_extended(table: &[[f64; 2]], x: f64) -> f64 {
    if x < table[0][0] {
        loglog(table[0], table[1], x)
    } else {
        tabulated_eval(table, x).unwrap_or(f64::INFINITY)
    }
}

fn tabulated_inverse(table: &[[f64; 2]], y: f64) -> Result<f64> {
    let (lo, hi) = (table[0][1], table[table.len() - 1][1]);
    if y < lo || y > hi {
        return Err(Error::Range(format!("{y} outside table value range [{lo}, {hi}]")));
    }
    let i = table.partition_point(|pt| pt[1] <= y).clamp(1, table.len() - 1) - 1;
    let swap = |pt: [f64; 2]| [pt[1], pt[0]];
    Ok(loglog(swap(table[i]), swap(table[i + 1]), y))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn eval_examples() {
        let phi = YoungFunction::power_scaled(2.0);
        assert_eq!(phi.eval(0.0).unwrap(), 0.0);
        assert_eq!(phi.eval(2.0).unwrap(), 2.0);
        let e = YoungFunction::exp_power(1.0).eval(1.0).unwrap();
        assert!((e - (std::f64::consts::E - 2.0)).abs() < 1e-15);
    }

    #[test]
    fn negative_argument_is_domain_error() {
        let phi = YoungFunction::power_scaled(2.0);
        assert!(matches!(phi.eval(-1.0), Err(Error::Domain(_))));
        assert!(matches!(phi.eval(f64::NAN), Err(Error::Domain(_))));
        assert!(matches!(phi.inverse(-1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn small_argument_series_match_direct_formula() {
        // at t = 0.02 both branches are accurate; compare across the switch
        let t: f64 = 0.0099999;
        let series = exp_minus_linear(t);
        let direct = t.exp_m1() - t;
        assert!(rel(series, direct) < 1e-10);
        let s: f64 = 0.0099999;
        assert!(rel(entropy_kernel(s), (1.0 + s) * s.ln_1p() - s) < 1e-10);
    }

    #[test]
    fn inverse_examples() {
        let phi = YoungFunction::power_scaled(2.0);
        assert!((phi.inverse(2.0).unwrap() - 2.0).abs() < 1e-13);
        for f in builtins() {
            assert_eq!(f.inverse(0.0).unwrap(), 0.0);
        }
        let x = YoungFunction::exp_power(1.0).inverse(std::f64::consts::E - 2.0).unwrap();
        assert!((x - 1.0).abs() < 1e-8);
    }

    #[test]
    fn conjugate_examples() {
        let phi = YoungFunction::power_scaled(2.0);
        assert!((phi.conjugate_eval(3.0).unwrap() - 4.5).abs() < 1e-12);
        for f in builtins() {
            assert_eq!(f.conjugate_eval(0.0).unwrap(), 0.0);
        }
        // frozen from a dense grid scan of x - (e^x - x - 1), see tests/young.rs
        let v = YoungFunction::exp_power(1.0).conjugate_eval(1.0).unwrap();
        assert!((v - 0.386_294_361_119_890_6).abs() < 1e-8);
    }

    #[test]
    fn conjugate_of_power_scaled_is_closed_form() {
        assert_eq!(YoungFunction::power_scaled(2.0).conjugate(), YoungFunction::power_scaled(2.0));
        assert_eq!(YoungFunction::power_scaled(3.0).conjugate(), YoungFunction::power_scaled(1.5));
        assert!(matches!(YoungFunction::exp_power(2.0).conjugate(), YoungFunction::ConjugateOf { .. }));
    }

    #[test]
    fn power_conjugate_closed_form_matches_numeric() {
        let phi = YoungFunction::power(2.5);
        for y in [0.01, 0.5, 3.0, 40.0] {
            let closed = phi.conjugate_eval(y).unwrap();
            let numeric = maximize_unimodal(|x| Ok(x * y - x.powf(2.5))).unwrap().value;
            assert!(rel(closed, numeric) < 1e-9, "{y}: {closed} vs {numeric}");
        }
    }

    #[test]
    fn tabulated_rejects_non_increasing() {
        assert!(YoungFunction::tabulated(vec![[1.0, 1.0], [2.0, 1.0]]).is_err());
        assert!(YoungFunction::tabulated(vec![[1.0, 1.0], [0.5, 2.0]]).is_err());
        assert!(YoungFunction::tabulated(vec![[1.0, 1.0]]).is_err());
    }

    #[test]
    fn tabulated_interpolates_power_law_exactly() {
        let table: Vec<[f64; 2]> = [0.1, 1.0, 10.0].iter().map(|&x| [x, x * x]).collect();
        let phi = YoungFunction::tabulated(table).unwrap();
        assert!(rel(phi.eval(3.0).unwrap(), 9.0) < 1e-12);
        assert!(rel(phi.inverse(9.0).unwrap(), 3.0) < 1e-12);
        assert!(matches!(phi.eval(20.0), Err(Error::Range(_))));
        assert!(matches!(phi.eval(0.01), Err(Error::Range(_))));
        // x^2 has conjugate y^2/4, maximizer y/2 must stay inside the table
        assert!(rel(phi.conjugate_eval(4.0).unwrap(), 4.0) < 1e-9);
        assert!(matches!(phi.conjugate_eval(100.0), Err(Error::Numeric(_))));
    }

    #[test]
    fn serde_shape() {
        let phi: YoungFunction = serde_json::from_str(r#"{"family": "power_scaled", "p": 2.0}"#).unwrap();
        assert_eq!(phi, YoungFunction::power_scaled(2.0));
        let t: YoungFunction =
            serde_json::from_str(r#"{"family": "tabulated", "table": [[1, 1], [2, 4]]}"#).unwrap();
        assert!(t.validate().is_ok());
        let c: YoungFunction =
            serde_json::from_str(r#"{"family": "conjugate_of", "of": {"family": "exp_quartic"}}"#).unwrap();
        assert_eq!(c, YoungFunction::exp_quartic().conjugate());
    }

    #[test]
    fn overflow_is_infinite() {
        assert_eq!(YoungFunction::exp_power(2.0).eval(100.0).unwrap(), f64::INFINITY);
        assert_eq!(YoungFunction::exp_quartic().eval(10.0).unwrap(), f64::INFINITY);
    }

    pub(crate) fn builtins() -> Vec<YoungFunction> {
        vec![
            YoungFunction::power_scaled(3.0),
            YoungFunction::power(2.0),
            YoungFunction::exp_power(2.0),
            YoungFunction::entropy(2.0),
            YoungFunction::log_quotient(),
            YoungFunction::exp_quartic(),
        ]
    }
}
