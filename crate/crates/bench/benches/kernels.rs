use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use orlicz_bench::{atomic_workload, dyadic_sequence, symmetric_workload, wct_workload};
use orlicz_core::criteria::{power_pair_check, AtomVariant};
use orlicz_core::essnorm::{truncation_distance_curve, CurveOptions};
use orlicz_core::orlicz::lux_norm;
use orlicz_core::space::cond_exp;
use orlicz_core::wct::op_norm_lower;
use orlicz_core::young::standard_grid;
use orlicz_core::{Atoms, Strategy, YoungFunction};

fn young(c: &mut Criterion) {
    let grid = standard_grid();
    let mut g = c.benchmark_group("young");
    for phi in [YoungFunction::power_scaled(3.0), YoungFunction::exp_power(2.0), YoungFunction::log_quotient()] {
        g.bench_with_input(BenchmarkId::new("conjugate_eval", phi.label()), &phi, |b, phi| {
            b.iter(|| grid.iter().map(|&x| phi.conjugate_eval(black_box(x)).unwrap()).sum::<f64>())
        });
        g.bench_with_input(BenchmarkId::new("inverse", phi.label()), &phi, |b, phi| {
            b.iter(|| grid.iter().map(|&x| phi.inverse(black_box(x)).unwrap()).sum::<f64>())
        });
    }
    g.finish();
}

fn norms(c: &mut Criterion) {
    let mut g = c.benchmark_group("lux_norm");
    for n in [64, 1024] {
        let (_, f) = symmetric_workload(n);
        let phi = YoungFunction::exp_power(2.0);
        g.bench_with_input(BenchmarkId::from_parameter(n), &f, |b, f| b.iter(|| lux_norm(&phi, black_box(f)).unwrap()));
    }
    g.finish();
}

fn conditional_expectation(c: &mut Criterion) {
    let (alg, f) = symmetric_workload(1024);
    c.bench_function("cond_exp/1024", |b| b.iter(|| cond_exp(black_box(&f), &alg).unwrap()));
}

fn operator_norm(c: &mut Criterion) {
    let op = wct_workload(64);
    let mut g = c.benchmark_group("op_norm_lower");
    g.sample_size(10);
    for strategy in [Strategy::Atoms, Strategy::Random, Strategy::All] {
        g.bench_with_input(BenchmarkId::from_parameter(format!("{strategy:?}")), &strategy, |b, &s| {
            b.iter(|| op_norm_lower(&op, s, 8, 7).unwrap())
        });
    }
    g.finish();
}

fn criteria(c: &mut Criterion) {
    let seq = dyadic_sequence("1", 256);
    c.bench_function("power_pair_check/256", |b| b.iter(|| power_pair_check(2.0, 3.0, Atoms::Symbolic(&seq)).unwrap()));
    let (alg, u) = atomic_workload(32);
    let (phi, psi) = (YoungFunction::power_scaled(2.0), YoungFunction::power_scaled(3.0));
    c.bench_function("atom_check/32", |b| {
        b.iter(|| {
            orlicz_core::criteria::atom_check(Atoms::Finite { alg: &alg, u: &u }, &phi, &psi, &AtomVariant::Necessity)
                .unwrap()
        })
    });
}

fn essential_norm(c: &mut Criterion) {
    let seq = dyadic_sequence("1 + 1/n", 256);
    let phi = YoungFunction::power_scaled(2.0);
    let mut g = c.benchmark_group("truncation_curve");
    g.sample_size(10);
    g.bench_function("k<=16", |b| {
        b.iter(|| truncation_distance_curve(Atoms::Symbolic(&seq), &phi, &[1, 4, 16], CurveOptions::default()).unwrap())
    });
    g.finish();
}

criterion_group!(benches, young, norms, conditional_expectation, operator_norm, criteria, essential_norm);
criterion_main!(benches);
