//! Deterministic workloads shared by the benchmarks.

use num_complex::Complex64;
use orlicz_core::space::{build_atomic_space, build_symmetric_space};
use orlicz_core::{MeasurableFn, OperatorSpec, SubAlgebra, SymbolicAtomSequence, YoungFunction};

/// A smooth complex function on the symmetric space with `n_cells` cells.
pub fn symmetric_workload(n_cells: usize) -> (SubAlgebra, MeasurableFn) {
    let (space, alg) = build_symmetric_space(n_cells).expect("valid cell count");
    let values = space
        .cells()
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let w = c.coord.unwrap_or(i as f64);
            Complex64::new(1.0 + w * w, (3.0 * w).sin())
        })
        .collect();
    let f = MeasurableFn::new(space, values).expect("matching length");
    (alg, f)
}

/// Weighted conditional type operator on the symmetric space.
pub fn wct_workload(n_cells: usize) -> OperatorSpec {
    let (alg, u) = symmetric_workload(n_cells);
    OperatorSpec::wct(u, alg, YoungFunction::exp_power(2.0), YoungFunction::power_scaled(2.0)).expect("same space")
}

/// `n` atoms of equal mass with the full σ-algebra and weight `1 + 1/k`.
pub fn atomic_workload(n: usize) -> (SubAlgebra, MeasurableFn) {
    let (space, alg) = build_atomic_space(&vec![1.0 / n as f64; n]).expect("positive masses");
    let values = (1..=n).map(|k| 1.0 + 1.0 / k as f64).collect();
    (alg, MeasurableFn::real(space, values).expect("matching length"))
}

pub fn dyadic_sequence(value_fn: &str, n_max: usize) -> SymbolicAtomSequence {
    SymbolicAtomSequence::parse("2^(-n)", value_fn, n_max).expect("valid expressions")
}
