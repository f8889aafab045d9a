//! The weighted conditional type operator `R_u f = E(uf)`, the
//! multiplication operator `M_u f = uf`, and lower estimates of their norms
//! between Orlicz spaces.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{bail, Result};
use crate::orlicz::lux_norm_abs;
use crate::space::{cond_exp, integrate, MeasurableFn, SubAlgebra};
use crate::young::YoungFunction;

/// Seed used when the caller does not supply one.
pub const DEFAULT_SEED: u64 = 7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OperatorKind {
    Wct,
    Mult,
}

#[derive(Debug, Clone)]
pub struct OperatorSpec {
    pub weight: MeasurableFn,
    pub alg: SubAlgebra,
    pub domain_phi: YoungFunction,
    pub codomain_psi: YoungFunction,
    pub kind: OperatorKind,
}

impl OperatorSpec {
    pub fn new(
        weight: MeasurableFn,
        alg: SubAlgebra,
        domain_phi: YoungFunction,
        codomain_psi: YoungFunction,
        kind: OperatorKind,
    ) -> Result<Self> {
        weight.check_space(&alg)?;
        Ok(Self { weight, alg, domain_phi, codomain_psi, kind })
    }

    pub fn wct(weight: MeasurableFn, alg: SubAlgebra, phi: YoungFunction, psi: YoungFunction) -> Result<Self> {
        Self::new(weight, alg, phi, psi, OperatorKind::Wct)
    }

    /// `‖Tf‖_Ψ / ‖f‖_Φ`, or 0 when `f` vanishes.
    pub fn ratio(&self, f: &MeasurableFn) -> Result<f64> {
        f.check_space(&self.alg)?;
        self.ratio_values(f.values())
    }

    fn ratio_values(&self, f: &[Complex64]) -> Result<f64> {
        let space = self.alg.space();
        let abs: Vec<f64> = f.iter().map(|v| v.norm()).collect();
        let den = lux_norm_abs(&self.domain_phi, &abs, space.masses())?.value;
        if den == 0.0 {
            return Ok(0.0);
        }
        let u = self.weight.values();
        let num = match self.kind {
            OperatorKind::Mult => {
                let uf: Vec<f64> = f.iter().zip(u).map(|(a, b)| (a * b).norm()).collect();
                lux_norm_abs(&self.codomain_psi, &uf, space.masses())?.value
            }
            OperatorKind::Wct => {
                // the image is block-constant, so its norm lives on blocks
                let m = space.masses();
                let per_block: Vec<f64> = self
                    .alg
                    .blocks()
                    .iter()
                    .map(|b| {
                        let s: Complex64 = b.cells.iter().map(|&c| f[c] * u[c] * m[c]).sum();
                        (s / b.mass).norm()
                    })
                    .collect();
                lux_norm_abs(&self.codomain_psi, &per_block, &self.alg.block_masses())?.value
            }
        };
        Ok(num / den)
    }
}

pub fn apply(op: &OperatorSpec, f: &MeasurableFn) -> Result<MeasurableFn> {
    f.check_space(&op.alg)?;
    let uf = op.weight.mul(f)?;
    match op.kind {
        OperatorKind::Wct => cond_exp(&uf, &op.alg),
        OperatorKind::Mult => Ok(uf),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    Atoms,
    Random,
    Ascent,
    All,
}

#[derive(Debug, Clone)]
pub struct NormEstimate {
    pub lower_bound: f64,
    /// Normalized so that its domain norm is 1.
    pub witness: MeasurableFn,
    pub candidates_tried: usize,
}

/// Lower estimate of `‖T‖` over block and cell indicators, phase-aligned
/// weights, seeded random vectors, and coordinate ascent from the best
/// candidate. Deterministic for a fixed seed.
pub fn op_norm_lower(op: &OperatorSpec, strategy: Strategy, budget: usize, seed: u64) -> Result<NormEstimate> {
    if budget < 1 {
        bail!(Argument, "budget must be at least 1");
    }
    let n = op.alg.space().len();
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let mut candidates: Vec<Vec<Complex64>> = Vec::new();
    if strategy != Strategy::Random {
        for b in op.alg.blocks() {
            let mut f = vec![zero; n];
            for &c in &b.cells {
                f[c] = one;
            }
            candidates.push(f);
        }
        if op.alg.blocks().len() < n {
            for c in 0..n {
                let mut f = vec![zero; n];
                f[c] = one;
                candidates.push(f);
            }
        }
    }
    if matches!(strategy, Strategy::Random | Strategy::All) {
        let u = op.weight.values();
        candidates.push(u.iter().map(|v| v.conj()).collect());
        candidates.push(u.iter().map(|v| if v.norm() > 0.0 { v.conj() / v.norm() } else { zero }).collect());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..budget {
            let density: f64 = rng.gen_range(0.1..1.0);
            let f: Vec<Complex64> = (0..n)
                .map(|_| {
                    if rng.gen::<f64>() > density {
                        return zero;
                    }
                    let mag = 10f64.powf(rng.gen_range(-2.0..2.0));
                    let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
                    Complex64::new(sign * mag, 0.0)
                })
                .collect();
            candidates.push(f);
        }
    }
    let scores: Vec<f64> = candidates.par_iter().map(|f| op.ratio_values(f)).collect::<Result<_>>()?;
    let mut tried = candidates.len();
    let (mut best, mut best_ratio) = (vec![zero; n], 0.0);
    for (i, &s) in scores.iter().enumerate() {
        if s > best_ratio {
            best_ratio = s;
            best = candidates[i].clone();
        }
    }
    if matches!(strategy, Strategy::Ascent | Strategy::All) && best_ratio > 0.0 {
        let (f, r, evals) = ascend(op, best, best_ratio, budget)?;
        best = f;
        best_ratio = r;
        tried += evals;
    }
    let space = op.alg.space().clone();
    let witness = if best_ratio > 0.0 {
        let abs: Vec<f64> = best.iter().map(|v| v.norm()).collect();
        let nf = lux_norm_abs(&op.domain_phi, &abs, space.masses())?.value;
        MeasurableFn::new(space, best.iter().map(|v| v / nf).collect())?
    } else {
        MeasurableFn::zero(space)
    };
    Ok(NormEstimate { lower_bound: best_ratio, witness, candidates_tried: tried })
}

/// Coordinate ascent with multiplicative steps; the step is refined once a
/// full sweep brings no improvement.
fn ascend(op: &OperatorSpec, mut f: Vec<Complex64>, mut best: f64, budget: usize) -> Result<(Vec<Complex64>, f64, usize)> {
    let n = f.len();
    let mut step = 2.0f64;
    let mut evals = 0;
    let u = op.weight.values();
    for _ in 0..budget {
        let mut improved = false;
        for c in 0..n {
            let old = f[c];
            let moves: Vec<Complex64> = if old.norm() > 0.0 {
                vec![old * step, old / step, -old, Complex64::new(0.0, 0.0)]
            } else {
                let scale = f.iter().map(|v| v.norm()).fold(0.0, f64::max);
                let phase = if u[c].norm() > 0.0 { u[c].conj() / u[c].norm() } else { Complex64::new(1.0, 0.0) };
                vec![phase * scale, -phase * scale, phase * scale / 8.0]
            };
            for m in moves {
                f[c] = m;
                evals += 1;
                let r = op.ratio_values(&f)?;
                if r > best * (1.0 + 1e-12) {
                    best = r;
                    improved = true;
                    break;
                }
                f[c] = old;
            }
        }
        if !improved {
            if step - 1.0 < 1e-3 {
                break;
            }
            step = step.sqrt();
        }
    }
    Ok((f, best, evals))
}

/// `∫ E(uf)·ḡ dμ − ∫ f·u·ḡ dμ` for block-constant `g`; zero up to rounding.
pub fn adjoint_defect(op: &OperatorSpec, f: &MeasurableFn, g: &MeasurableFn) -> Result<Complex64> {
    if op.kind != OperatorKind::Wct {
        bail!(Argument, "the adjoint identity is stated for the conditional type operator");
    }
    g.check_space(&op.alg)?;
    if !g.is_block_constant(&op.alg, 1e-12 * g.sup_abs()) {
        bail!(Argument, "g is not measurable with respect to the sub-algebra");
    }
    let gbar = g.conj();
    let lhs = integrate(&apply(op, f)?.mul(&gbar)?);
    let rhs = integrate(&f.mul(&op.weight)?.mul(&gbar)?);
    Ok(lhs - rhs)
}
