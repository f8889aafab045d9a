//! Grid certification of the Δ₂, Δ', ∇' and ≺ growth conditions, and of
//! Young-function shape for derived functions such as `Φ* ∘ Ψ*⁻¹`.
//!
//! "Global" means the defining ratio is finite over the whole grid and does
//! not trend toward divergence at either end; "eventual" only looks at the
//! upper half of the grid. Neither is a proof.

use serde::{Deserialize, Serialize};

use super::YoungFunction;
use crate::error::{bail, Result};

/// A ratio that grows monotonically by more than this factor across the
/// last (or first) decade of the grid is read as divergent.
const DECADE_GROWTH: f64 = 1.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GrowthCondition {
    /// `Φ(2x) <= k Φ(x)`
    Delta2,
    /// `Φ(xy) <= c Φ(x) Φ(y)`
    DeltaPrime,
    /// `Φ(bxy) >= Φ(x) Φ(y)`
    NablaPrime,
    /// `Ψ(x) <= Φ(ax)`, i.e. `Ψ ≺ Φ`
    Precedes,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    pub condition: GrowthCondition,
    pub holds_globally: bool,
    pub holds_eventually: bool,
    /// `k`, `c`, `b` or `a` depending on the condition.
    pub witness_constant: f64,
    pub threshold_x0: f64,
    pub grid: Vec<f64>,
}

fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.len() < 32 {
        bail!(Argument, "growth grid needs at least 32 points, got {}", grid.len());
    }
    if !grid.windows(2).all(|w| w[0] < w[1]) || grid[0] <= 0.0 {
        bail!(Argument, "growth grid must be positive and strictly increasing");
    }
    if grid[0] > 1e-3 * (1.0 + 1e-12) || grid[grid.len() - 1] < 1e3 * (1.0 - 1e-12) {
        bail!(Argument, "growth grid must span at least [1e-3, 1e3]");
    }
    Ok(())
}

/// Checks `condition` for `phi` on `grid`. For [`GrowthCondition::Precedes`]
/// the report is about `psi ≺ phi`, i.e. `psi(x) <= phi(a x)`.
pub fn check_growth(
    phi: &YoungFunction,
    condition: GrowthCondition,
    grid: &[f64],
    psi: Option<&YoungFunction>,
) -> Result<GrowthReport> {
    match (condition, psi) {
        (GrowthCondition::Precedes, None) => {
            bail!(Argument, "the precedes condition needs a second function")
        }
        (GrowthCondition::Precedes, Some(psi)) => {
            validate_grid(grid)?;
            let a = grid
                .iter()
                .map(|&x| {
                    let target = psi.eval(x)?;
                    Ok(phi.inverse(target)? / x)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(summarize(condition, grid, Ratios::Single(a)))
        }
        _ => check_growth_fn(|x| phi.eval(x), |y| phi.inverse(y), condition, grid),
    }
}

/// [`check_growth`] for an arbitrary increasing function given by its
/// evaluation and inverse, e.g. `Ψ*⁻¹` or a composition. `Precedes` is not
/// accepted here.
pub fn check_growth_fn<F, G>(f: F, f_inv: G, condition: GrowthCondition, grid: &[f64]) -> Result<GrowthReport>
where
    F: Fn(f64) -> Result<f64>,
    G: Fn(f64) -> Result<f64>,
{
    validate_grid(grid)?;
    let values = grid.iter().map(|&x| f(x)).collect::<Result<Vec<_>>>()?;
    let n = grid.len();
    let ratios = match condition {
        GrowthCondition::Delta2 => Ratios::Single(
            grid.iter()
                .zip(&values)
                .map(|(&x, &v)| Ok(f(2.0 * x)? / v))
                .collect::<Result<Vec<_>>>()?,
        ),
        GrowthCondition::DeltaPrime => {
            let mut m = vec![0.0; n * n];
            for i in 0..n {
                for j in i..n {
                    let r = f(grid[i] * grid[j])? / (values[i] * values[j]);
                    m[i * n + j] = r;
                    m[j * n + i] = r;
                }
            }
            Ratios::Pairs(m)
        }
        GrowthCondition::NablaPrime => {
            let mut m = vec![0.0; n * n];
            for i in 0..n {
                for j in i..n {
                    let prod = values[i] * values[j];
                    let r = if prod.is_finite() { f_inv(prod)? / (grid[i] * grid[j]) } else { f64::INFINITY };
                    m[i * n + j] = r;
                    m[j * n + i] = r;
                }
            }
            Ratios::Pairs(m)
        }
        GrowthCondition::Precedes => bail!(Argument, "use check_growth for the precedes condition"),
    };
    Ok(summarize(condition, grid, ratios))
}

enum Ratios {
    Single(Vec<f64>),
    /// Row-major `n x n` symmetric matrix.
    Pairs(Vec<f64>),
}

impl Ratios {
    /// Largest ratio with every index `>= from`, per row index `>= from`.
    fn profile(&self, n: usize, from: usize) -> Vec<f64> {
        match self {
            Ratios::Single(v) => v[from..].to_vec(),
            Ratios::Pairs(m) => (from..n).map(|i| max_nan_inf(&m[i * n + from..i * n + n])).collect(),
        }
    }
}

fn max_nan_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |acc, &x| if x.is_nan() { f64::INFINITY } else { acc.max(x) })
}

/// True when the profile, read outward over its last (or first) decade,
/// is non-finite or grows monotonically by more than [`DECADE_GROWTH`].
fn diverges(profile: &[f64], grid: &[f64], top: bool) -> bool {
    let mut window: Vec<f64> = if top {
        let cut = grid[grid.len() - 1] / 10.0;
        grid.iter().zip(profile).filter(|(x, _)| **x >= cut).map(|(_, v)| *v).collect()
    } else {
        let cut = grid[0] * 10.0;
        grid.iter().zip(profile).filter(|(x, _)| **x <= cut).map(|(_, v)| *v).rev().collect()
    };
    if window.iter().any(|v| !v.is_finite()) {
        return true;
    }
    if window.len() < 2 {
        return false;
    }
    let first = window[0];
    let last = window.pop().unwrap();
    let monotone = window.windows(2).all(|w| w[1] >= w[0]) && last >= *window.last().unwrap();
    monotone && last > DECADE_GROWTH * first
}

fn summarize(condition: GrowthCondition, grid: &[f64], ratios: Ratios) -> GrowthReport {
    let n = grid.len();
    let full = ratios.profile(n, 0);
    let all_finite = full.iter().all(|v| v.is_finite());
    let holds_globally = all_finite && !diverges(&full, grid, true) && !diverges(&full, grid, false);

    let mid = n / 2;
    let upper = ratios.profile(n, mid);
    let upper_ok = upper.iter().all(|v| v.is_finite()) && !diverges(&upper, &grid[mid..], true);
    let holds_eventually = holds_globally || upper_ok;

    let (witness_constant, threshold_x0) = if holds_globally {
        (max_nan_inf(&full), 0.0)
    } else if holds_eventually {
        let witness = max_nan_inf(&upper);
        // smallest t such that every ratio with indices >= t is within the witness
        let slack = witness * (1.0 + 1e-12);
        let t = (0..=mid).find(|&t| max_nan_inf(&ratios.profile(n, t)) <= slack).unwrap_or(mid);
        (witness, grid[t])
    } else {
        (max_nan_inf(&full), grid[n - 1])
    };
    GrowthReport {
        condition,
        holds_globally,
        holds_eventually,
        witness_constant,
        threshold_x0,
        grid: grid.to_vec(),
    }
}

/// Grid verdict on whether a function behaves like a Young's function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct YoungCheck {
    pub zero_at_zero: bool,
    pub positive: bool,
    pub nondecreasing: bool,
    pub midpoint_convex: bool,
    pub superlinear: bool,
    /// Superlinear, but only barely on this grid.
    pub superlinearity_inconclusive: bool,
    /// Name of the first failed check, in the order listed above.
    pub first_violation: Option<String>,
}

impl YoungCheck {
    pub fn passed(&self) -> bool {
        self.first_violation.is_none()
    }

    /// Everything except superlinearity holds: the function is convex,
    /// vanishes at 0 and is therefore still superadditive.
    pub fn convex_superadditive(&self) -> bool {
        self.zero_at_zero && self.positive && self.nondecreasing && self.midpoint_convex
    }
}

pub fn grid_young_check<F>(f: F, grid: &[f64]) -> Result<YoungCheck>
where
    F: Fn(f64) -> Result<f64>,
{
    let values = grid.iter().map(|&x| f(x)).collect::<Result<Vec<_>>>()?;
    let zero_at_zero = f(0.0)?.abs() <= 1e-300;
    let positive = values.iter().all(|&v| v > 0.0);
    let nondecreasing = values.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-12));
    let mut midpoint_convex = true;
    'outer: for i in 0..grid.len() {
        for j in i + 1..grid.len() {
            let avg = 0.5 * (values[i] + values[j]);
            if !avg.is_finite() {
                continue;
            }
            let mid = f(0.5 * (grid[i] + grid[j]))?;
            if mid > avg * (1.0 + 1e-9) + 1e-300 {
                midpoint_convex = false;
                break 'outer;
            }
        }
    }
    let (lo, hi) = (0, grid.len() - 1);
    let slope_lo = values[lo] / grid[lo];
    let slope_hi = values[hi] / grid[hi];
    let growth = slope_hi / slope_lo;
    let superlinear = growth > 1.0 + 1e-6;
    let superlinearity_inconclusive = superlinear && growth < 1.01;
    let checks = [
        ("zero_at_zero", zero_at_zero),
        ("positive", positive),
        ("nondecreasing", nondecreasing),
        ("midpoint_convex", midpoint_convex),
        ("superlinear", superlinear),
    ];
    let first_violation = checks.iter().find(|(_, ok)| !ok).map(|(name, _)| name.to_string());
    Ok(YoungCheck {
        zero_at_zero,
        positive,
        nondecreasing,
        midpoint_convex,
        superlinear,
        superlinearity_inconclusive,
        first_violation,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompositionReport {
    pub is_young: bool,
    pub check: YoungCheck,
    pub composed: YoungFunction,
}

/// Whether `outer ∘ inner⁻¹` passes the Young-function grid checks on the
/// standard grid.
pub fn is_young_composition(outer: &YoungFunction, inner: &YoungFunction) -> Result<CompositionReport> {
    let composed = YoungFunction::compose_inverse(outer.clone(), inner.clone());
    let check = grid_young_check(|x| composed.eval(x), &super::standard_grid())?;
    Ok(CompositionReport { is_young: check.passed(), check, composed })
}
