//! Level sets of block-constant criterion functions, the level index β,
//! essential-norm sandwiches and truncation curves.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::criteria::{Atoms, GchConstant};
use crate::error::{bail, Result};
use crate::space::{BlockKind, MeasurableFn, SubAlgebra};
use crate::wct::{op_norm_lower, OperatorSpec, Strategy};
use crate::young::YoungFunction;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LevelClass {
    FinitelyManyAtoms,
    InfinitelyManyAtoms,
    ContainsNonAtomicMass,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelSetReport {
    pub epsilon: f64,
    /// Block labels, or `A{n}` for symbolic atoms.
    pub members: Vec<String>,
    /// For an infinite symbolic level set: every atom from this index on
    /// belongs to it (in addition to `members`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tail_from: Option<usize>,
    pub classification: LevelClass,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BetaSource {
    AtomicLimsup,
    NonAtomicEsssup,
    MaxOfBoth,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaResult {
    #[serde(with = "crate::serde_ext::float")]
    pub beta: f64,
    pub source: BetaSource,
    /// The symbolic tail was monotone on the inspected window, so the
    /// limit was extrapolated rather than read off as a maximum.
    pub monotone_tail: bool,
}

/// Block-constant nonnegative values split into atoms and carrier blocks.
struct LevelData {
    atoms: Vec<(String, f64)>,
    carrier: Vec<(String, f64)>,
    symbolic: bool,
}

fn finite_levels(alg: &SubAlgebra, per_block: &[f64]) -> LevelData {
    let mut d = LevelData { atoms: vec![], carrier: vec![], symbolic: false };
    for (b, block) in alg.blocks().iter().enumerate() {
        let entry = (block.label.clone(), per_block[b]);
        match block.kind {
            BlockKind::AAtom => d.atoms.push(entry),
            BlockKind::Carrier => d.carrier.push(entry),
        }
    }
    d
}

fn levels_of(h: Atoms<'_>, map: impl Fn(f64) -> Result<f64>) -> Result<LevelData> {
    match h {
        Atoms::Finite { alg, u } => {
            u.check_space(alg)?;
            if !u.is_block_constant(alg, 1e-12 * u.sup_abs()) {
                bail!(Argument, "the level function must be constant on every block");
            }
            let per_block =
                alg.blocks().iter().map(|b| map(u.values()[b.cells[0]].norm())).collect::<Result<Vec<_>>>()?;
            Ok(finite_levels(alg, &per_block))
        }
        Atoms::Symbolic(seq) => {
            seq.validate()?;
            let atoms = seq
                .values()
                .into_iter()
                .enumerate()
                .map(|(i, v)| Ok((format!("A{}", i + 1), map(v.abs())?)))
                .collect::<Result<Vec<_>>>()?;
            Ok(LevelData { atoms, carrier: vec![], symbolic: true })
        }
    }
}

/// `lim sup` of a sequence from its first `n_max` terms.
///
/// A monotone tail is extrapolated with Aitken's Δ² on the terms at
/// `n_max/4`, `n_max/2` and `n_max`; a growing tail that does not
/// decelerate is unbounded. Otherwise the maximum over the second half.
fn limsup(values: &[f64]) -> (f64, bool) {
    let n = values.len();
    if n == 0 {
        return (0.0, false);
    }
    if n < 8 {
        return (values[n / 2..].iter().copied().fold(0.0, f64::max), false);
    }
    let window = &values[n / 2..];
    let up = window.windows(2).all(|w| w[1] >= w[0]);
    let down = window.windows(2).all(|w| w[1] <= w[0]);
    if !(up || down) {
        return (window.iter().copied().fold(0.0, f64::max), false);
    }
    let (x0, x1, x2) = (values[n / 4 - 1], values[n / 2 - 1], values[n - 1]);
    let (d1, d2) = (x1 - x0, x2 - x1);
    if d2 == 0.0 {
        return (x2, true);
    }
    let decelerating = d2.abs() < d1.abs() && d1 * d2 > 0.0;
    if !decelerating {
        return (if up { f64::INFINITY } else { x2 }, true);
    }
    let aitken = x2 - d2 * d2 / (d2 - d1);
    let limit = if up { aitken.max(x2) } else { aitken.clamp(0.0, x2) };
    (limit, true)
}

fn beta_of(d: &LevelData) -> BetaResult {
    let ess = d.carrier.iter().map(|c| c.1).fold(0.0, f64::max);
    if !d.symbolic {
        let source = if d.carrier.is_empty() { BetaSource::AtomicLimsup } else { BetaSource::NonAtomicEsssup };
        return BetaResult { beta: ess, source, monotone_tail: false };
    }
    let values: Vec<f64> = d.atoms.iter().map(|a| a.1).collect();
    let (l, monotone_tail) = limsup(&values);
    let source = if d.carrier.is_empty() { BetaSource::AtomicLimsup } else { BetaSource::MaxOfBoth };
    BetaResult { beta: l.max(ess), source, monotone_tail }
}

fn level_set_of(d: &LevelData, eps: f64) -> Result<LevelSetReport> {
    if !(eps > 0.0) {
        bail!(Argument, "epsilon must be positive, got {eps}");
    }
    let carrier_hit: Vec<String> = d.carrier.iter().filter(|c| c.1 >= eps).map(|c| c.0.clone()).collect();
    let atom_hits = |upto: usize| d.atoms[..upto].iter().filter(|a| a.1 >= eps).map(|a| a.0.clone());
    let mut tail_from = None;
    let mut members: Vec<String>;
    if d.symbolic {
        let l = beta_of(&LevelData { atoms: d.atoms.clone(), carrier: vec![], symbolic: true }).beta;
        let last = d.atoms.last().map_or(0.0, |a| a.1);
        let infinite = eps < l || (eps <= l && last >= eps);
        if infinite {
            let mut from = d.atoms.len();
            while from > 0 && d.atoms[from - 1].1 >= eps {
                from -= 1;
            }
            tail_from = Some(from + 1);
            members = atom_hits(from).collect();
        } else {
            members = atom_hits(d.atoms.len()).collect();
        }
    } else {
        members = atom_hits(d.atoms.len()).collect();
    }
    let classification = if !carrier_hit.is_empty() {
        LevelClass::ContainsNonAtomicMass
    } else if tail_from.is_some() {
        LevelClass::InfinitelyManyAtoms
    } else {
        LevelClass::FinitelyManyAtoms
    };
    members.extend(carrier_hit);
    Ok(LevelSetReport { epsilon: eps, members, tail_from, classification })
}

/// `{ h >= ε }` for a block-constant `h` or a symbolic sequence.
pub fn level_set(h: Atoms<'_>, eps: f64) -> Result<LevelSetReport> {
    level_set_of(&levels_of(h, Ok)?, eps)
}

/// `inf { ε > 0 : { |h| >= ε } consists of finitely many 𝒜-atoms }`.
pub fn beta(h: Atoms<'_>) -> Result<BetaResult> {
    Ok(beta_of(&levels_of(h, Ok)?))
}

/// Caller-declared hypotheses, echoed in the sandwich.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SandwichHypotheses {
    /// `(E, Φ)` satisfies the GCH inequality with the given constant.
    pub gch: bool,
    /// Atom masses tend to 0 or have no convergent subsequence.
    pub masses_vanish: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sandwich {
    #[serde(with = "crate::serde_ext::float")]
    pub lower: f64,
    #[serde(with = "crate::serde_ext::float")]
    pub upper: f64,
    pub lower_beta: BetaResult,
    pub upper_beta: BetaResult,
    pub gch: GchConstant,
    pub hypotheses: SandwichHypotheses,
}

/// `β(|E(u)|) <= ‖R_u‖_e <= C·β(Φ*⁻¹(E(Φ*(|u|))))`.
pub fn ess_norm_sandwich(
    u: Atoms<'_>,
    phi: &YoungFunction,
    gch: GchConstant,
    hypotheses: SandwichHypotheses,
) -> Result<Sandwich> {
    let phi_star = phi.conjugate();
    let (lower_data, upper_data) = match u {
        Atoms::Finite { alg, u } => {
            u.check_space(alg)?;
            let eu = crate::space::cond_exp(u, alg)?;
            let lower: Vec<f64> = alg.blocks().iter().map(|b| eu.values()[b.cells[0]].norm()).collect();
            let conj = u.abs().into_iter().map(|a| phi_star.eval(a)).collect::<Result<Vec<_>>>()?;
            let upper = alg.block_means(&conj).into_iter().map(|e| phi_star.inverse(e)).collect::<Result<Vec<_>>>()?;
            (finite_levels(alg, &lower), finite_levels(alg, &upper))
        }
        Atoms::Symbolic(_) => (levels_of(u, Ok)?, levels_of(u, |a| phi_star.inverse(phi_star.eval(a)?))?),
    };
    let lower_beta = beta_of(&lower_data);
    let mut upper_beta = beta_of(&upper_data);
    upper_beta.beta *= gch.value;
    Ok(Sandwich { lower: lower_beta.beta, upper: upper_beta.beta, lower_beta, upper_beta, gch, hypotheses })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub k: usize,
    /// Running maximum from the right of `raw`; still a lower estimate.
    #[serde(with = "crate::serde_ext::float")]
    pub distance: f64,
    /// `op_norm_lower` of the remainder operator.
    #[serde(with = "crate::serde_ext::float")]
    pub raw: f64,
    pub candidates: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveOptions {
    pub budget: usize,
    pub seed: u64,
    /// Also keep cells where `Φ*⁻¹(E(Φ*(|u|)))` is at least this level.
    pub level: Option<f64>,
}

impl Default for CurveOptions {
    fn default() -> Self {
        Self { budget: 16, seed: crate::wct::DEFAULT_SEED, level: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruncationCurve {
    /// Number of atoms of the finite model.
    pub depth: usize,
    pub points: Vec<CurvePoint>,
}

/// Distances `‖R_u − R_{u_k}‖` estimated from below, where `u_k` keeps `u`
/// on the first `k` 𝒜-atoms (and on the optional high level set).
/// Symbolic sequences are cut at `min(n_max, 2·max k)` atoms.
pub fn truncation_distance_curve(
    u: Atoms<'_>,
    phi: &YoungFunction,
    ks: &[usize],
    options: CurveOptions,
) -> Result<TruncationCurve> {
    if ks.is_empty() || !ks.windows(2).all(|w| w[0] < w[1]) {
        bail!(Argument, "ks must be a nonempty strictly increasing list");
    }
    let owned;
    let (alg, weight) = match u {
        Atoms::Finite { alg, u } => (alg, u),
        Atoms::Symbolic(seq) => {
            let depth = seq.n_max.min(2 * ks[ks.len() - 1]).max(1);
            owned = seq.to_finite(depth)?;
            (&owned.0, &owned.1)
        }
    };
    weight.check_space(alg)?;
    let n = alg.space().len();
    let mut keep_level = vec![false; n];
    if let Some(level) = options.level {
        let phi_star = phi.conjugate();
        let conj = weight.abs().into_iter().map(|a| phi_star.eval(a)).collect::<Result<Vec<_>>>()?;
        let crit = alg.block_means(&conj).into_iter().map(|e| phi_star.inverse(e)).collect::<Result<Vec<_>>>()?;
        for (c, keep) in keep_level.iter_mut().enumerate() {
            *keep = crit[alg.block_of(c)] >= level;
        }
    }
    let atom_blocks: Vec<usize> =
        alg.blocks().iter().enumerate().filter(|(_, b)| b.kind == BlockKind::AAtom).map(|(i, _)| i).collect();
    let raw = ks
        .par_iter()
        .map(|&k| -> Result<(f64, usize)> {
            let mut rest = keep_level.iter().map(|&keep| !keep).collect::<Vec<_>>();
            for &b in atom_blocks.iter().take(k) {
                for &c in &alg.blocks()[b].cells {
                    rest[c] = false;
                }
            }
            let values =
                weight.values().iter().zip(&rest).map(|(&v, &r)| if r { v } else { v * 0.0 }).collect::<Vec<_>>();
            let w = MeasurableFn::new(alg.space().clone(), values)?;
            let op = OperatorSpec::wct(w, alg.clone(), phi.clone(), phi.clone())?;
            let seed = options.seed ^ (k as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
            let est = op_norm_lower(&op, Strategy::All, options.budget, seed)?;
            Ok((est.lower_bound, est.candidates_tried))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut points: Vec<CurvePoint> = ks
        .iter()
        .zip(&raw)
        .map(|(&k, &(r, candidates))| CurvePoint { k, distance: r, raw: r, candidates })
        .collect();
    for i in (0..points.len().saturating_sub(1)).rev() {
        points[i].distance = points[i].distance.max(points[i + 1].distance);
    }
    Ok(TruncationCurve { depth: n, points })
}
