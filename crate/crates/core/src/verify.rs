//! Seeded invariant suites over random functions. Each check records the
//! worst normalized excess it observed against its tolerance.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

use crate::criteria::gch_ratio;
use crate::error::Result;
use crate::orlicz::{holder_defect, lux_norm, modular};
use crate::space::{cond_exp, integrate_cells, MeasurableFn, MeasureSpace, SubAlgebra};
use crate::wct::{adjoint_defect, OperatorSpec};
use crate::young::{standard_grid, YoungFunction};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    #[serde(with = "crate::serde_ext::float")]
    pub worst: f64,
    pub tolerance: f64,
    pub cases: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Suite {
    pub name: String,
    pub checks: Vec<Check>,
}

impl Suite {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

struct Tally {
    name: &'static str,
    tolerance: f64,
    worst: f64,
    cases: usize,
}

impl Tally {
    fn new(name: &'static str, tolerance: f64) -> Self {
        Self { name, tolerance, worst: f64::NEG_INFINITY, cases: 0 }
    }

    fn record(&mut self, excess: f64) {
        self.cases += 1;
        self.worst = if excess.is_nan() { f64::INFINITY } else { self.worst.max(excess) };
    }

    fn finish(self) -> Check {
        let worst = if self.cases == 0 { 0.0 } else { self.worst };
        Check { name: self.name.into(), passed: worst <= self.tolerance, worst, tolerance: self.tolerance, cases: self.cases }
    }
}

/// Random complex function with log-uniform moduli in `[0.1, 10]`, random
/// phases and a random fraction of zero cells.
pub fn random_fn(space: &Arc<MeasureSpace>, rng: &mut impl Rng) -> MeasurableFn {
    let density: f64 = rng.gen_range(0.3..1.0);
    let values = (0..space.len())
        .map(|_| {
            if rng.gen::<f64>() < density {
                Complex64::from_polar(10f64.powf(rng.gen_range(-1.0..1.0)), rng.gen_range(0.0..std::f64::consts::TAU))
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    MeasurableFn::new(space.clone(), values).expect("finite random values")
}

fn random_block_constant(alg: &SubAlgebra, rng: &mut impl Rng) -> MeasurableFn {
    let per_block: Vec<Complex64> = alg
        .blocks()
        .iter()
        .map(|_| Complex64::from_polar(10f64.powf(rng.gen_range(-1.0..1.0)), rng.gen_range(0.0..std::f64::consts::TAU)))
        .collect();
    MeasurableFn::new(alg.space().clone(), alg.spread(&per_block)).expect("finite random values")
}

fn rel(diff: f64, scale: f64) -> f64 {
    diff / (1.0 + scale)
}

/// Averaging, pull-out, Jensen (for `phi`), positivity, support,
/// idempotence and Luxemburg contraction of `E`.
pub fn cond_exp_suite(alg: &SubAlgebra, phi: &YoungFunction, samples: usize, seed: u64) -> Result<Suite> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let space = alg.space().clone();
    let masses = space.masses();
    let mut averaging = Tally::new("averaging", 1e-12);
    let mut pull_out = Tally::new("pull-out", 1e-12);
    let mut jensen = Tally::new("jensen", 1e-12);
    let mut positivity = Tally::new("positivity", 0.0);
    let mut support = Tally::new("support", 0.0);
    let mut idempotence = Tally::new("idempotence", 1e-12);
    let mut contraction = Tally::new("contraction", 1e-9);
    for _ in 0..samples {
        let f = random_fn(&space, &mut rng);
        let ef = cond_exp(&f, alg)?;
        for b in alg.blocks() {
            let lhs = integrate_cells(&ef, &b.cells);
            let rhs = integrate_cells(&f, &b.cells);
            let scale: f64 = b.cells.iter().map(|&c| f.values()[c].norm() * masses[c]).sum();
            averaging.record(rel((lhs - rhs).norm(), scale));
        }
        let g = random_block_constant(alg, &mut rng);
        let lhs = cond_exp(&g.mul(&f)?, alg)?;
        let rhs = g.mul(&ef)?;
        for (a, b) in lhs.values().iter().zip(rhs.values()) {
            pull_out.record(rel((a - b).norm(), b.norm()));
        }
        let phi_f = f.abs().into_iter().map(|a| phi.eval(a)).collect::<Result<Vec<_>>>()?;
        let e_phi = alg.average(&phi_f);
        for (v, bound) in ef.values().iter().zip(&e_phi) {
            let lhs = phi.eval(v.norm())?;
            jensen.record(if bound.is_infinite() { f64::NEG_INFINITY } else { rel(lhs - bound, *bound) });
        }
        let abs = MeasurableFn::real(space.clone(), f.abs())?;
        let e_abs = cond_exp(&abs, alg)?;
        for (v, a) in e_abs.values().iter().zip(f.abs()) {
            positivity.record((-v.re).max(v.im.abs()));
            support.record(if a > 0.0 && v.re <= 0.0 { 1.0 } else { 0.0 });
        }
        let eef = cond_exp(&ef, alg)?;
        for (a, b) in eef.values().iter().zip(ef.values()) {
            idempotence.record(rel((a - b).norm(), b.norm()));
        }
        let n_ef = lux_norm(phi, &ef)?.value;
        let n_f = lux_norm(phi, &f)?.value;
        contraction.record((n_ef - n_f) / n_f.max(1e-300));
    }
    Ok(Suite {
        name: "conditional-expectation".into(),
        checks: [averaging, pull_out, jensen, positivity, support, idempotence, contraction]
            .into_iter()
            .map(Tally::finish)
            .collect(),
    })
}

/// Unit-ball boundary of the Luxemburg norm, the Hölder inequality and the
/// indicator identity `N_Φ(χ_E) = 1/Φ⁻¹(1/μ(E))`.
pub fn norm_suite(phi: &YoungFunction, space: &Arc<MeasureSpace>, samples: usize, seed: u64) -> Result<Suite> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut boundary = Tally::new("unit-ball-boundary", 1e-9);
    let mut tight = Tally::new("norm-is-tight", 1e-9);
    let mut holder = Tally::new("holder", 1e-9);
    let mut indicator = Tally::new("indicator-norm", 1e-9);
    for _ in 0..samples {
        let f = random_fn(space, &mut rng);
        let g = random_fn(space, &mut rng);
        let n = lux_norm(phi, &f)?;
        if n.value > 0.0 {
            boundary.record(modular(phi, &f.scale(Complex64::new(1.0 / n.value, 0.0)))? - 1.0);
            let shrunk = n.value * (1.0 - 1e-6);
            tight.record(1.0 - modular(phi, &f.scale(Complex64::new(1.0 / shrunk, 0.0)))?);
        }
        let scale = lux_norm(phi, &f)?.value * lux_norm(&phi.conjugate(), &g)?.value;
        holder.record(-holder_defect(phi, &f, &g)? / (1.0 + scale));
        let cells: Vec<usize> = (0..space.len()).filter(|_| rng.gen::<f64>() < 0.5).collect();
        if !cells.is_empty() {
            let chi = MeasurableFn::indicator(space.clone(), &cells);
            let mu: f64 = cells.iter().map(|&c| space.masses()[c]).sum();
            let expected = 1.0 / phi.inverse(1.0 / mu)?;
            indicator.record((lux_norm(phi, &chi)?.value - expected).abs() / expected);
        }
    }
    Ok(Suite {
        name: format!("norm[{}]", phi.label()),
        checks: [boundary, tight, holder, indicator].into_iter().map(Tally::finish).collect(),
    })
}

/// Young's inequality on grid pairs and `a < Φ⁻¹(a)·Φ*⁻¹(a) <= 2a`.
pub fn young_suite(phi: &YoungFunction) -> Result<Suite> {
    let grid = standard_grid();
    let mut young = Tally::new("young-inequality", 1e-9);
    let mut inverse_product = Tally::new("inverse-product", 1e-8);
    let conj: Vec<f64> = grid.iter().map(|&y| phi.conjugate_eval(y)).collect::<Result<_>>()?;
    for &x in &grid {
        let fx = phi.eval(x)?;
        for (&y, &cy) in grid.iter().zip(&conj) {
            let rhs = fx + cy;
            young.record(if rhs.is_infinite() { 0.0 } else { (x * y - rhs) / (1.0 + rhs) });
        }
        let a = x;
        let prod = phi.inverse(a)? * phi.conjugate_inverse(a)?;
        let over = (prod - 2.0 * a) / a;
        let under = if prod > a { f64::NEG_INFINITY } else { 1.0 };
        inverse_product.record(over.max(under));
    }
    Ok(Suite { name: format!("young[{}]", phi.label()), checks: vec![young.finish(), inverse_product.finish()] })
}

/// `∫ E(uf) ḡ = ∫ f u ḡ` for `𝒜`-measurable `g`.
pub fn adjoint_suite(op: &OperatorSpec, samples: usize, seed: u64) -> Result<Suite> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut adjoint = Tally::new("adjoint", 1e-10);
    let space = op.alg.space().clone();
    for _ in 0..samples {
        let f = random_fn(&space, &mut rng);
        let g = random_block_constant(&op.alg, &mut rng);
        adjoint.record(adjoint_defect(op, &f, &g)?.norm());
    }
    Ok(Suite { name: "adjoint".into(), checks: vec![adjoint.finish()] })
}

/// Ratio of `E(|fg|)` to the GCH right-hand side with constant 1, over
/// random pairs; passes when it never exceeds `constant`.
pub fn gch_suite(
    phi: &YoungFunction,
    partner: &YoungFunction,
    alg: &SubAlgebra,
    constant: f64,
    samples: usize,
    seed: u64,
) -> Result<Suite> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gch = Tally::new("gch", 1e-9);
    let space = alg.space().clone();
    for _ in 0..samples {
        let f = random_fn(&space, &mut rng);
        let g = random_fn(&space, &mut rng);
        gch.record(gch_ratio(phi, partner, alg, &f, &g)? - constant);
    }
    Ok(Suite { name: format!("gch[C={constant}]"), checks: vec![gch.finish()] })
}
