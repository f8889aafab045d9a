//! Boundedness criteria for `R_u : L^Φ → L^Ψ` and the conditional Hölder
//! (GCH) constant, on finite spaces and on symbolic atom sequences.
//!
//! Sufficient conditions that come with an explicit norm estimate emit it in
//! [`CriterionReport::bound`]; those bounds are sound for every operator the
//! hypotheses admit, so `op_norm_lower` can never exceed them.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{bail, Result};
use crate::orlicz::{lux_norm_abs, modular_abs, product_inequality_violation};
use crate::serde_ext;
use crate::space::{BlockKind, MeasurableFn, SubAlgebra, SymbolicAtomSequence};
use crate::young::{
    check_growth, check_growth_fn, conjugate_exponent, is_young_composition, standard_grid, GrowthCondition,
    GrowthReport, YoungFunction,
};

/// Terms above this value count as unbounded in tail analysis.
pub const DIVERGENCE_CEILING: f64 = 1e12;
/// Absolute tolerance for "vanishes on the non-atomic part".
pub const ZERO_ON_CARRIER_TOL: f64 = 1e-12;
/// A monotone increasing tail whose relative growth over the inspected
/// window stays below this is treated as settled.
const SETTLED_GROWTH: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CriterionId {
    #[serde(rename = "thm22a_i")]
    ExpectationBounded,
    #[serde(rename = "thm22a_ii")]
    ConjugateLevelBounded,
    #[serde(rename = "thm22b")]
    OrderingSufficiency,
    #[serde(rename = "thm23a_delta")]
    AtomDeltaSufficiency,
    #[serde(rename = "thm23a")]
    AtomThetaSufficiency,
    #[serde(rename = "thm23b")]
    AtomNecessity,
    #[serde(rename = "prop24")]
    CompositeAtomSufficiency,
    #[serde(rename = "rem26")]
    PowerAtomBound,
    #[serde(rename = "rem29")]
    PowerAtomSummability,
    #[serde(rename = "thm28ii")]
    ConjugateModularFinite,
    #[serde(rename = "thm28i")]
    ProductNormBound,
}

impl CriterionId {
    pub const ALL: [CriterionId; 11] = [
        Self::ExpectationBounded,
        Self::ConjugateLevelBounded,
        Self::OrderingSufficiency,
        Self::AtomThetaSufficiency,
        Self::AtomDeltaSufficiency,
        Self::AtomNecessity,
        Self::CompositeAtomSufficiency,
        Self::PowerAtomBound,
        Self::PowerAtomSummability,
        Self::ProductNormBound,
        Self::ConjugateModularFinite,
    ];

    /// The identifier used in reports.
    pub fn as_str(self) -> &'static str {
        match self {
            Self::ExpectationBounded => "thm22a_i",
            Self::ConjugateLevelBounded => "thm22a_ii",
            Self::OrderingSufficiency => "thm22b",
            Self::AtomThetaSufficiency => "thm23a",
            Self::AtomDeltaSufficiency => "thm23a_delta",
            Self::AtomNecessity => "thm23b",
            Self::CompositeAtomSufficiency => "prop24",
            Self::PowerAtomBound => "rem26",
            Self::PowerAtomSummability => "rem29",
            Self::ProductNormBound => "thm28i",
            Self::ConjugateModularFinite => "thm28ii",
        }
    }
}

impl CriterionId {
    /// Descriptive alias accepted wherever an identifier is parsed.
    pub fn role_name(self) -> &'static str {
        match self {
            Self::ExpectationBounded => "expectation-bounded",
            Self::ConjugateLevelBounded => "conjugate-level-bounded",
            Self::OrderingSufficiency => "ordering-sufficiency",
            Self::AtomThetaSufficiency => "atom-theta-sufficiency",
            Self::AtomDeltaSufficiency => "atom-delta-sufficiency",
            Self::AtomNecessity => "atom-necessity",
            Self::CompositeAtomSufficiency => "composite-atom-sufficiency",
            Self::PowerAtomBound => "power-atom-bound",
            Self::PowerAtomSummability => "power-atom-summability",
            Self::ProductNormBound => "product-norm-bound",
            Self::ConjugateModularFinite => "conjugate-modular-finite",
        }
    }
}

impl std::fmt::Display for CriterionId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for CriterionId {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|id| id.as_str() == s || id.role_name() == s)
            .ok_or_else(|| crate::Error::Parse(format!("unknown criterion id {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Satisfied,
    Violated,
    Diverges,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GchProvenance {
    /// Supplied by the caller, e.g. a published value.
    Stated,
    /// A sampled lower estimate from [`gch_constant`].
    Estimated,
    /// The partition bound of [`certified_gch_constant`].
    Certified,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GchConstant {
    pub value: f64,
    pub provenance: GchProvenance,
}

impl GchConstant {
    pub fn stated(value: f64) -> Self {
        Self { value, provenance: GchProvenance::Stated }
    }

    pub fn certified(alg: &SubAlgebra) -> Self {
        Self { value: certified_gch_constant(alg), provenance: GchProvenance::Certified }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub n: usize,
    #[serde(with = "serde_ext::float")]
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub criterion_id: CriterionId,
    #[serde(with = "serde_ext::float")]
    pub quantity: f64,
    pub verdict: Verdict,
    pub per_atom_trace: Vec<TracePoint>,
    #[serde(default, with = "serde_ext::opt_float", skip_serializing_if = "Option::is_none")]
    pub bound: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gch: Option<GchConstant>,
    /// Auxiliary numbers: hypothesis witnesses, alternative sup forms, etc.
    #[serde(default, with = "serde_ext::float_map")]
    pub details: BTreeMap<String, f64>,
    /// Hypotheses that could not be certified, and similar remarks.
    #[serde(default)]
    pub notes: Vec<String>,
}

impl CriterionReport {
    fn new(criterion_id: CriterionId) -> Self {
        Self {
            criterion_id,
            quantity: 0.0,
            verdict: Verdict::Inconclusive,
            per_atom_trace: vec![],
            bound: None,
            gch: None,
            details: BTreeMap::new(),
            notes: vec![],
        }
    }

    fn detail(&mut self, key: &str, v: f64) {
        self.details.insert(key.to_string(), v);
    }
}

/// Where the 𝒜-atoms and the weight come from.
#[derive(Debug, Clone, Copy)]
pub enum Atoms<'a> {
    Finite { alg: &'a SubAlgebra, u: &'a MeasurableFn },
    Symbolic(&'a SymbolicAtomSequence),
}

/// `E(F(|u|))` on the 𝒜-atoms plus its largest value on carrier blocks.
struct Profile {
    n: Vec<usize>,
    mass: Vec<f64>,
    value: Vec<f64>,
    carrier_max: f64,
    symbolic: bool,
}

fn block_means_of<F>(alg: &SubAlgebra, u: &MeasurableFn, f: F) -> Result<Vec<f64>>
where
    F: Fn(f64) -> Result<f64>,
{
    u.check_space(alg)?;
    let cellwise = u.abs().into_iter().map(|a| if a == 0.0 { Ok(0.0) } else { f(a) }).collect::<Result<Vec<_>>>()?;
    Ok(alg.block_means(&cellwise))
}

fn profile<F>(atoms: Atoms<'_>, f: F) -> Result<Profile>
where
    F: Fn(f64) -> Result<f64>,
{
    match atoms {
        Atoms::Finite { alg, u } => {
            let means = block_means_of(alg, u, f)?;
            let mut p = Profile { n: vec![], mass: vec![], value: vec![], carrier_max: 0.0, symbolic: false };
            for (b, block) in alg.blocks().iter().enumerate() {
                match block.kind {
                    BlockKind::AAtom => {
                        p.n.push(p.n.len() + 1);
                        p.mass.push(block.mass);
                        p.value.push(means[b]);
                    }
                    BlockKind::Carrier => p.carrier_max = p.carrier_max.max(means[b]),
                }
            }
            Ok(p)
        }
        Atoms::Symbolic(seq) => {
            seq.validate()?;
            let value = seq
                .values()
                .into_iter()
                .map(|v| if v == 0.0 { Ok(0.0) } else { f(v.abs()) })
                .collect::<Result<Vec<_>>>()?;
            Ok(Profile { n: (1..=seq.n_max).collect(), mass: seq.masses(), value, carrier_max: 0.0, symbolic: true })
        }
    }
}

/// Decides whether a sequence of nonnegative terms has a finite supremum.
///
/// Finite atom lists are bounded as soon as every term is finite. Symbolic
/// sequences are judged on the window `[n_max/2, n_max]`.
pub fn tail_verdict(terms: &[f64], symbolic: bool) -> Verdict {
    if terms.iter().any(|t| !t.is_finite()) {
        return Verdict::Diverges;
    }
    if !symbolic || terms.len() < 4 {
        return Verdict::Satisfied;
    }
    let window = &terms[terms.len() / 2..];
    let increasing = window.windows(2).all(|w| w[1] >= w[0]) && window[window.len() - 1] > window[0];
    let decreasing = window.windows(2).all(|w| w[1] <= w[0]);
    let last = window[window.len() - 1];
    let max = window.iter().copied().fold(0.0, f64::max);
    if increasing {
        if last > DIVERGENCE_CEILING {
            return Verdict::Diverges;
        }
        if last - window[0] <= SETTLED_GROWTH * last {
            return Verdict::Satisfied;
        }
        return Verdict::Inconclusive;
    }
    if decreasing || max <= DIVERGENCE_CEILING {
        return Verdict::Satisfied;
    }
    Verdict::Inconclusive
}

fn trace(n: &[usize], terms: &[f64]) -> Vec<TracePoint> {
    n.iter().zip(terms).map(|(&n, &value)| TracePoint { n, value }).collect()
}

fn sup(terms: &[f64]) -> f64 {
    terms.iter().copied().fold(0.0, |a, b| if b.is_nan() || a.is_nan() { f64::NAN } else { a.max(b) })
}

/// `w·x·y` with the convention `0·∞ = 0`.
fn product(w: f64, factors: &[f64]) -> f64 {
    if w == 0.0 {
        return 0.0;
    }
    factors.iter().fold(w, |acc, f| acc * f)
}

fn growth_note(report: &GrowthReport, global: bool, what: &str, notes: &mut Vec<String>) -> bool {
    let ok = if global { report.holds_globally } else { report.holds_eventually };
    if !ok {
        let scope = if global { "globally" } else { "eventually" };
        notes.push(format!("hypothesis not certified on the grid: {what} {scope}"));
    }
    ok
}

// ---------------------------------------------------------------- GCH

/// Largest block-mass to cell-mass ratio. For any pair of Young's functions
/// `Φ₁, Φ₂` this constant satisfies
/// `E(|fg|) <= C·Φ₁⁻¹(E(Φ₁(|f|)))·Φ₂⁻¹(E(Φ₂(|g|)))` on the cell model.
pub fn certified_gch_constant(alg: &SubAlgebra) -> f64 {
    let m = alg.space().masses();
    alg.blocks()
        .iter()
        .map(|b| b.mass / b.cells.iter().map(|&c| m[c]).fold(f64::INFINITY, f64::min))
        .fold(1.0, f64::max)
}

/// Worst block ratio `E(|fg|) / [Φ₁⁻¹(E Φ₁|f|)·Φ₂⁻¹(E Φ₂|g|)]` for one pair;
/// blocks where the denominator vanishes are skipped.
pub fn gch_ratio(
    phi: &YoungFunction,
    partner: &YoungFunction,
    alg: &SubAlgebra,
    f: &MeasurableFn,
    g: &MeasurableFn,
) -> Result<f64> {
    f.check_space(alg)?;
    g.check_space(alg)?;
    gch_ratio_abs(phi, partner, alg, &f.abs(), &g.abs())
}

fn gch_ratio_abs(phi: &YoungFunction, partner: &YoungFunction, alg: &SubAlgebra, f: &[f64], g: &[f64]) -> Result<f64> {
    let m = alg.space().masses();
    let mut worst = 0.0f64;
    for b in alg.blocks() {
        let (mut fg, mut pf, mut pg) = (0.0, 0.0, 0.0);
        for &c in &b.cells {
            fg += f[c] * g[c] * m[c];
            if f[c] > 0.0 {
                pf += phi.eval(f[c])? * m[c];
            }
            if g[c] > 0.0 {
                pg += partner.eval(g[c])? * m[c];
            }
        }
        if fg == 0.0 {
            continue;
        }
        let den = phi.inverse(pf / b.mass)? * partner.inverse(pg / b.mass)?;
        if den > 0.0 {
            worst = worst.max(fg / b.mass / den);
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone)]
pub struct GchEstimate {
    /// Largest ratio found; a lower bound for the best constant.
    pub estimate: f64,
    pub worst_pair: Option<(MeasurableFn, MeasurableFn)>,
    pub pairs_tried: usize,
}

/// Estimates the GCH constant of `(E, Φ)` from below over spikes, block
/// indicators and `samples` seeded random pairs. `partner` defaults to `Φ*`.
pub fn gch_constant(
    phi: &YoungFunction,
    partner: Option<&YoungFunction>,
    alg: &SubAlgebra,
    samples: usize,
    seed: u64,
) -> Result<GchEstimate> {
    if samples < 1 {
        bail!(Argument, "samples must be at least 1");
    }
    let conj;
    let partner = match partner {
        Some(p) => p,
        None => {
            conj = phi.conjugate();
            &conj
        }
    };
    let n = alg.space().len();
    let mut best = (0.0, None::<(Vec<f64>, Vec<f64>)>);
    let mut tried = 0;
    let mut consider = |f: Vec<f64>, g: Vec<f64>| -> Result<()> {
        tried += 1;
        let r = gch_ratio_abs(phi, partner, alg, &f, &g)?;
        if r > best.0 {
            best = (r, Some((f, g)));
        }
        Ok(())
    };
    let scales = [0.1, 1.0, 10.0];
    for b in alg.blocks() {
        for &c in &b.cells {
            for &s in &scales {
                for &t in &scales {
                    let mut f = vec![0.0; n];
                    let mut g = vec![0.0; n];
                    f[c] = s;
                    g[c] = t;
                    consider(f.clone(), g.clone())?;
                    for &d in &b.cells {
                        g[d] = t;
                    }
                    consider(f, g.clone())?;
                    let mut spike = vec![0.0; n];
                    spike[c] = s;
                    consider(g, spike)?;
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let random = |rng: &mut ChaCha8Rng| -> Vec<f64> {
        let density: f64 = rng.gen_range(0.05..1.0);
        (0..n)
            .map(|_| if rng.gen::<f64>() < density { 10f64.powf(rng.gen_range(-1.0..1.0)) } else { 0.0 })
            .collect()
    };
    for _ in 0..samples {
        let f = random(&mut rng);
        let g = random(&mut rng);
        consider(f, g)?;
    }
    let space = alg.space().clone();
    let worst_pair = match best.1 {
        Some((f, g)) => Some((MeasurableFn::real(space.clone(), f)?, MeasurableFn::real(space, g)?)),
        None => None,
    };
    Ok(GchEstimate { estimate: best.0, worst_pair, pairs_tried: tried })
}

// ---------------------------------------------------------------- orderings

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderingReports {
    pub a_i: CriterionReport,
    pub a_ii: CriterionReport,
    pub b: CriterionReport,
}

/// Necessary conditions under `Φ ≼ Ψ` and the sufficient condition with its
/// norm bound under `Ψ ≼ Φ`. With `finite_measure` the orderings need only
/// hold eventually; otherwise globally.
///
/// The bound is `a·C·M·(N+1)` where `Ψ(t) <= Φ(a t)` for `t >= T`,
/// `N = Ψ(T)·μ(Ω)` and `M = ‖Ψ*⁻¹(E(Ψ*(|u|)))‖∞`.
pub fn ordering_check(
    u: &MeasurableFn,
    phi: &YoungFunction,
    psi: &YoungFunction,
    alg: &SubAlgebra,
    finite_measure: bool,
    gch: GchConstant,
) -> Result<OrderingReports> {
    u.check_space(alg)?;
    let grid = standard_grid();
    let global = !finite_measure;
    let psi_star = psi.conjugate();
    let phi_below_psi = check_growth(psi, GrowthCondition::Precedes, &grid, Some(phi))?;
    let psi_below_phi = check_growth(phi, GrowthCondition::Precedes, &grid, Some(psi))?;

    let mut a_i = CriterionReport::new(CriterionId::ExpectationBounded);
    let ok_a = growth_note(&phi_below_psi, global, "Φ ≼ Ψ", &mut a_i.notes);
    let eu = crate::space::cond_exp(u, alg)?;
    let per_block: Vec<f64> = alg.blocks().iter().map(|b| eu.values()[b.cells[0]].norm()).collect();
    let n: Vec<usize> = (1..=per_block.len()).collect();
    a_i.quantity = sup(&per_block);
    a_i.per_atom_trace = trace(&n, &per_block);
    a_i.verdict = if ok_a { tail_verdict(&per_block, false) } else { Verdict::Inconclusive };

    let mut a_ii = CriterionReport::new(CriterionId::ConjugateLevelBounded);
    let mut ok_aii = growth_note(&phi_below_psi, global, "Φ ≼ Ψ", &mut a_ii.notes);
    let dp = check_growth(psi, GrowthCondition::DeltaPrime, &grid, None)?;
    ok_aii &= growth_note(&dp, true, "Ψ ∈ Δ'", &mut a_ii.notes);
    let means = block_means_of(alg, u, |a| psi_star.eval(a))?;
    let levels = means.iter().map(|&e| psi_star.inverse(e)).collect::<Result<Vec<_>>>()?;
    let m = sup(&levels);
    a_ii.quantity = m;
    a_ii.per_atom_trace = trace(&n, &levels);
    a_ii.verdict = if ok_aii { tail_verdict(&levels, false) } else { Verdict::Inconclusive };

    let mut b = CriterionReport::new(CriterionId::OrderingSufficiency);
    b.gch = Some(gch);
    let ok_b = growth_note(&psi_below_phi, global, "Ψ ≼ Φ", &mut b.notes);
    b.quantity = m;
    b.per_atom_trace = a_ii.per_atom_trace.clone();
    if ok_b {
        let a = psi_below_phi.witness_constant;
        let t = if psi_below_phi.holds_globally { 0.0 } else { psi_below_phi.threshold_x0 };
        let big_n = if finite_measure { psi.eval(t)? * alg.space().total_mass() } else { 0.0 };
        b.detail("a", a);
        b.detail("threshold_t", t);
        b.detail("n", big_n);
        b.detail("m", m);
        b.bound = Some(a * gch.value * m * (big_n + 1.0));
        b.verdict = tail_verdict(&levels, false);
        if gch.provenance == GchProvenance::Estimated {
            b.notes.push("the GCH constant is a sampled lower estimate; the bound is not certified".into());
        }
    }
    Ok(OrderingReports { a_i, a_ii, b })
}

// ---------------------------------------------------------------- atom criteria

/// Which form of the atom criterion to evaluate.
#[derive(Debug, Clone)]
pub enum AtomVariant {
    /// Necessity: `Φ*∘Ψ*⁻¹` Young, `Φ* ∈ ∇'`; terms
    /// `E(Φ*(|u|))(A_n)·μ(A_n)·Φ*(Ψ*⁻¹(1/μ(A_n)))`.
    Necessity,
    /// Sufficiency with `Φ*∘Ψ*⁻¹ ≼ Θ`, `Φ* ∈ Δ'`, `Θ ∈ ∇'`; terms
    /// `E(Φ*(|u|))(A_n)·μ(A_n) / Φ*(Ψ*⁻¹(μ(A_n)))`.
    Theta(YoungFunction),
    /// Sufficiency with `Φ*, Ψ*⁻¹ ∈ Δ'`; product-form terms.
    DeltaPrime,
}

pub fn atom_check(atoms: Atoms<'_>, phi: &YoungFunction, psi: &YoungFunction, variant: &AtomVariant) -> Result<CriterionReport> {
    let grid = standard_grid();
    let phi_star = phi.conjugate();
    let psi_star = psi.conjugate();
    let id = match variant {
        AtomVariant::Necessity => CriterionId::AtomNecessity,
        AtomVariant::Theta(_) => CriterionId::AtomThetaSufficiency,
        AtomVariant::DeltaPrime => CriterionId::AtomDeltaSufficiency,
    };
    let mut r = CriterionReport::new(id);
    let mut ok = true;
    match variant {
        AtomVariant::Necessity => {
            let comp = is_young_composition(&phi_star, &psi_star)?;
            if !comp.is_young {
                ok = false;
                r.notes.push(format!(
                    "hypothesis not certified: Φ*∘Ψ*⁻¹ is not a Young's function ({})",
                    comp.check.first_violation.unwrap_or_default()
                ));
            }
            let np = check_growth(&phi_star, GrowthCondition::NablaPrime, &grid, None)?;
            ok &= growth_note(&np, true, "Φ* ∈ ∇'", &mut r.notes);
        }
        AtomVariant::Theta(theta) => {
            let comp = YoungFunction::compose_inverse(phi_star.clone(), psi_star.clone());
            let prec = check_growth(theta, GrowthCondition::Precedes, &grid, Some(&comp))?;
            ok &= growth_note(&prec, true, "Φ*∘Ψ*⁻¹ ≼ Θ", &mut r.notes);
            let dp = check_growth(&phi_star, GrowthCondition::DeltaPrime, &grid, None)?;
            ok &= growth_note(&dp, true, "Φ* ∈ Δ'", &mut r.notes);
            let np = check_growth(theta, GrowthCondition::NablaPrime, &grid, None)?;
            ok &= growth_note(&np, true, "Θ ∈ ∇'", &mut r.notes);
        }
        AtomVariant::DeltaPrime => {
            let dp = check_growth(&phi_star, GrowthCondition::DeltaPrime, &grid, None)?;
            ok &= growth_note(&dp, true, "Φ* ∈ Δ'", &mut r.notes);
            let dpi = check_growth_fn(
                |x| psi_star.inverse(x),
                |y| psi_star.eval(y),
                GrowthCondition::DeltaPrime,
                &grid,
            )?;
            ok &= growth_note(&dpi, true, "Ψ*⁻¹ ∈ Δ'", &mut r.notes);
        }
    }
    let p = profile(atoms, |a| phi_star.eval(a))?;
    let terms = p
        .value
        .iter()
        .zip(&p.mass)
        .map(|(&e, &m)| {
            if e == 0.0 {
                return Ok(0.0);
            }
            Ok(match variant {
                AtomVariant::Theta(_) => e * m / phi_star.eval(psi_star.inverse(m)?)?,
                _ => product(e, &[m, phi_star.eval(psi_star.inverse(1.0 / m)?)?]),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    r.quantity = sup(&terms);
    r.per_atom_trace = trace(&p.n, &terms);
    r.detail("carrier_max", p.carrier_max);
    r.verdict = if !ok {
        Verdict::Inconclusive
    } else if p.carrier_max > ZERO_ON_CARRIER_TOL {
        r.notes.push("E(Φ*(|u|)) does not vanish on the non-atomic part".into());
        Verdict::Violated
    } else {
        tail_verdict(&terms, p.symbolic)
    };
    Ok(r)
}

// ---------------------------------------------------------------- composite atom criterion

/// Sufficient atom condition under `Φ, Ψ ∈ Δ'` and GCH for `(E, Φ)`.
///
/// With `K = Ψ∘Φ⁻¹` (or `x ↦ Θ(a x)` when `K` is not convex and `K ≼ Θ`)
/// the terms are `Ψ(Φ*⁻¹(E(Φ*(|u|))(A_n)))·μ(A_n)·K(1/μ(A_n))` and
/// `‖R_u‖ <= κ·c_Ψ·c_K·K(1)·M + 1`, where `M` is their supremum, `c_Ψ`, `c_K`
/// are Δ' constants and `κ = max(1, c_Ψ·Ψ(C))` absorbs the GCH constant.
/// The quotient `Φ(Φ*⁻¹(E(Φ*(|u|))))·μ / Ψ(Φ⁻¹(1/μ))` is reported as
/// `details["quotient_sup"]`.
pub fn composite_atom_check(
    atoms: Atoms<'_>,
    phi: &YoungFunction,
    psi: &YoungFunction,
    theta: Option<&YoungFunction>,
    gch: GchConstant,
) -> Result<CriterionReport> {
    let grid = standard_grid();
    let phi_star = phi.conjugate();
    let mut r = CriterionReport::new(CriterionId::CompositeAtomSufficiency);
    r.gch = Some(gch);
    let mut ok = true;
    let dp_phi = check_growth(phi, GrowthCondition::DeltaPrime, &grid, None)?;
    ok &= growth_note(&dp_phi, true, "Φ ∈ Δ'", &mut r.notes);
    let dp_psi = check_growth(psi, GrowthCondition::DeltaPrime, &grid, None)?;
    ok &= growth_note(&dp_psi, true, "Ψ ∈ Δ'", &mut r.notes);
    let comp = is_young_composition(psi, phi)?;
    let k = if comp.check.convex_superadditive() {
        comp.composed
    } else if let Some(theta) = theta {
        let prec = check_growth(theta, GrowthCondition::Precedes, &grid, Some(&comp.composed))?;
        ok &= growth_note(&prec, true, "Ψ∘Φ⁻¹ ≼ Θ", &mut r.notes);
        r.detail("theta_scale", prec.witness_constant);
        theta.clone().dilate(prec.witness_constant)
    } else {
        bail!(
            Argument,
            "Ψ∘Φ⁻¹ is not a Young's function ({}) and no Θ was supplied",
            comp.check.first_violation.unwrap_or_default()
        );
    };
    let dp_k = check_growth(&k, GrowthCondition::DeltaPrime, &grid, None)?;
    ok &= growth_note(&dp_k, true, "K ∈ Δ'", &mut r.notes);

    let p = profile(atoms, |a| phi_star.eval(a))?;
    let mut terms = Vec::with_capacity(p.n.len());
    let mut quotient = Vec::with_capacity(p.n.len());
    for (&e, &m) in p.value.iter().zip(&p.mass) {
        if e == 0.0 {
            terms.push(0.0);
            quotient.push(0.0);
            continue;
        }
        let v = phi_star.inverse(e)?;
        terms.push(product(psi.eval(v)?, &[m, k.eval(1.0 / m)?]));
        quotient.push(phi.eval(v)? * m / psi.eval(phi.inverse(1.0 / m)?)?);
    }
    let m_sup = sup(&terms);
    r.quantity = m_sup;
    r.per_atom_trace = trace(&p.n, &terms);
    r.detail("quotient_sup", sup(&quotient));
    r.detail("carrier_max", p.carrier_max);
    r.verdict = if !ok {
        Verdict::Inconclusive
    } else if p.carrier_max > ZERO_ON_CARRIER_TOL {
        r.notes.push("E(Φ*(|u|)) does not vanish on the non-atomic part".into());
        Verdict::Violated
    } else {
        tail_verdict(&terms, p.symbolic)
    };
    if r.verdict == Verdict::Satisfied {
        let c_psi = dp_psi.witness_constant;
        let c_k = dp_k.witness_constant;
        let kappa = if gch.value <= 1.0 { 1.0 } else { (c_psi * psi.eval(gch.value)?).max(1.0) };
        let k1 = k.eval(1.0)?;
        r.detail("c_psi", c_psi);
        r.detail("c_k", c_k);
        r.detail("kappa", kappa);
        r.detail("k_at_one", k1);
        r.bound = Some(kappa * c_psi * c_k * k1 * m_sup + 1.0);
    }
    Ok(r)
}

// ---------------------------------------------------------------- L^p → L^q

/// The power-function specialization. For `p < q` the terms are
/// `E(|u|^{p'})(A_n) / μ(A_n)^{p'/q' - 1}` together with vanishing on the
/// non-atomic part; for `p > q` the quantity is `‖(E(|u|^{p'}))^{1/p'}‖_r`
/// with `r = pq/(p - q)`.
pub fn power_pair_check(p: f64, q: f64, atoms: Atoms<'_>) -> Result<CriterionReport> {
    if !(p > 1.0 && q > 1.0 && p.is_finite() && q.is_finite()) {
        bail!(Argument, "exponents must be finite and > 1, got p = {p}, q = {q}");
    }
    if p == q {
        bail!(Argument, "p = q is plain L^p boundedness and is not handled here");
    }
    let pp = conjugate_exponent(p);
    let qq = conjugate_exponent(q);
    if p < q {
        let mut r = CriterionReport::new(CriterionId::PowerAtomBound);
        let pr = profile(atoms, |a| Ok(a.powf(pp)))?;
        let expo = pp / qq - 1.0;
        let terms: Vec<f64> = pr.value.iter().zip(&pr.mass).map(|(&e, &m)| if e == 0.0 { 0.0 } else { e / m.powf(expo) }).collect();
        r.quantity = sup(&terms);
        r.per_atom_trace = trace(&pr.n, &terms);
        r.detail("carrier_max", pr.carrier_max);
        r.detail("mass_exponent", expo);
        r.verdict = if pr.carrier_max > ZERO_ON_CARRIER_TOL {
            r.notes.push("E(|u|^p') does not vanish on the non-atomic part".into());
            Verdict::Violated
        } else {
            tail_verdict(&terms, pr.symbolic)
        };
        return Ok(r);
    }
    let mut r = CriterionReport::new(CriterionId::PowerAtomSummability);
    let rr = p * q / (p - q);
    r.detail("r", rr);
    // h^r · mass per block, with h = (E|u|^{p'})^{1/p'}
    let (n, terms, symbolic) = match atoms {
        Atoms::Finite { alg, u } => {
            let means = block_means_of(alg, u, |a| Ok(a.powf(pp)))?;
            let terms: Vec<f64> =
                means.iter().zip(alg.blocks()).map(|(&e, b)| e.powf(rr / pp) * b.mass).collect();
            ((1..=terms.len()).collect::<Vec<_>>(), terms, false)
        }
        Atoms::Symbolic(seq) => {
            seq.validate()?;
            let terms: Vec<f64> =
                seq.values().iter().zip(seq.masses()).map(|(&v, m)| v.abs().powf(rr) * m).collect();
            ((1..=seq.n_max).collect(), terms, true)
        }
    };
    let total: f64 = terms.iter().sum();
    r.quantity = total.powf(1.0 / rr);
    let mut partial = 0.0;
    let partial_norms: Vec<f64> = terms
        .iter()
        .map(|t| {
            partial += t;
            partial.powf(1.0 / rr)
        })
        .collect();
    r.per_atom_trace = trace(&n, &partial_norms);
    r.verdict = if !total.is_finite() {
        Verdict::Diverges
    } else if !symbolic {
        Verdict::Satisfied
    } else {
        series_verdict(&terms)
    };
    Ok(r)
}

/// Convergence of `Σ terms` judged on consecutive dyadic block sums: a
/// ratio of at most 0.75 converges, ratios of at least 0.99 diverge.
fn series_verdict(terms: &[f64]) -> Verdict {
    let mut blocks = vec![];
    let mut start = 1;
    while 2 * start - 1 <= terms.len() {
        blocks.push(terms[start - 1..2 * start - 1].iter().sum::<f64>());
        start *= 2;
    }
    if terms.iter().all(|&t| t == 0.0) {
        return Verdict::Satisfied;
    }
    if blocks.len() < 3 {
        return Verdict::Inconclusive;
    }
    let (a, b) = (blocks[blocks.len() - 2], blocks[blocks.len() - 1]);
    if b <= 0.75 * a {
        Verdict::Satisfied
    } else if a > 0.0 && b >= 0.99 * a && a >= 0.99 * blocks[blocks.len() - 3] {
        Verdict::Diverges
    } else {
        Verdict::Inconclusive
    }
}

// ---------------------------------------------------------------- product inequality

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductReports {
    pub i: CriterionReport,
    pub ii: CriterionReport,
}

/// (i) Under `Ψ(xy) <= Φ(x) + Θ(y)` (certified on `pair_grid`) and GCH for
/// `(E, Φ)`: quantity `N_Θ(Φ*⁻¹(E(Φ*(|u|))))` and bound `2·C` times it.
/// (ii) With `Θ₂ = Ψ*∘Φ*⁻¹`: quantity `I_{Θ₂*}(E(Φ*(|u|)))`.
pub fn product_check(
    u: &MeasurableFn,
    phi: &YoungFunction,
    psi: &YoungFunction,
    theta: &YoungFunction,
    alg: &SubAlgebra,
    gch: GchConstant,
    pair_grid: &[f64],
) -> Result<ProductReports> {
    u.check_space(alg)?;
    if let Some((x, y)) = product_inequality_violation(phi, theta, psi, pair_grid)? {
        bail!(PreconditionNotCertified, "Ψ(xy) <= Φ(x) + Θ(y) fails at x = {x}, y = {y}");
    }
    let grid = standard_grid();
    let phi_star = phi.conjugate();
    let means = block_means_of(alg, u, |a| phi_star.eval(a))?;
    let levels = means.iter().map(|&e| phi_star.inverse(e)).collect::<Result<Vec<_>>>()?;
    let masses = alg.block_masses();
    let n: Vec<usize> = (1..=levels.len()).collect();

    let mut i = CriterionReport::new(CriterionId::ProductNormBound);
    i.gch = Some(gch);
    let norm = lux_norm_abs(theta, &levels, &masses)?.value;
    i.quantity = norm;
    i.per_atom_trace = trace(&n, &levels);
    i.detail("stated_bound", norm);
    i.verdict = if norm.is_finite() { Verdict::Satisfied } else { Verdict::Diverges };
    i.bound = Some(2.0 * gch.value * norm);
    if pair_grid.iter().copied().fold(0.0, f64::max) < 1e3 {
        i.notes.push(format!(
            "the product inequality was certified on [{}, {}] only",
            pair_grid[0],
            pair_grid[pair_grid.len() - 1]
        ));
    }

    let mut ii = CriterionReport::new(CriterionId::ConjugateModularFinite);
    let mut ok = true;
    let psi_star = psi.conjugate();
    let comp = is_young_composition(&psi_star, &phi_star)?;
    if !comp.is_young {
        ok = false;
        ii.notes.push("hypothesis not certified: Ψ*∘Φ*⁻¹ is not a Young's function".into());
    }
    let theta2 = comp.composed;
    let d2 = check_growth(&theta2, GrowthCondition::Delta2, &grid, None)?;
    ok &= growth_note(&d2, true, "Θ ∈ Δ₂", &mut ii.notes);
    let d2s = check_growth(&phi_star, GrowthCondition::Delta2, &grid, None)?;
    ok &= growth_note(&d2s, true, "Φ* ∈ Δ₂", &mut ii.notes);
    let value = modular_abs(&theta2.conjugate(), &means, &masses)?;
    ii.quantity = value;
    ii.per_atom_trace = trace(&n, &means);
    ii.verdict = if !ok {
        Verdict::Inconclusive
    } else if value.is_finite() {
        Verdict::Satisfied
    } else {
        Verdict::Diverges
    };
    Ok(ProductReports { i, ii })
}

/// Cellwise weight `|u|` as a real function, convenient for callers that
/// build symbolic weights.
pub fn abs_weight(u: &MeasurableFn) -> Result<MeasurableFn> {
    u.map(|v| Complex64::new(v.norm(), 0.0))
}
