use orlicz_core::criteria::GchConstant;
use orlicz_core::essnorm::{
    beta, ess_norm_sandwich, level_set, truncation_distance_curve, BetaSource, CurveOptions, LevelClass,
    SandwichHypotheses,
};
use orlicz_core::space::SpaceSpec;
use orlicz_core::{Atoms, MeasurableFn, SymbolicAtomSequence, YoungFunction};
use proptest::prelude::*;

fn seq(value: &str, n_max: usize) -> SymbolicAtomSequence {
    SymbolicAtomSequence::parse("2^(-n)", value, n_max).unwrap()
}

#[test]
fn level_set_examples() {
    let s = seq("1 + 1/n", 256);
    let r = level_set(Atoms::Symbolic(&s), 1.5).unwrap();
    // 1 + 1/n >= 3/2 exactly for n <= 2
    assert_eq!(r.members, vec!["A1", "A2"]);
    assert_eq!(r.classification, LevelClass::FinitelyManyAtoms);
    let r = level_set(Atoms::Symbolic(&s), 0.5).unwrap();
    assert_eq!(r.classification, LevelClass::InfinitelyManyAtoms);
}

#[test]
fn carrier_level_sets_have_positive_mass() {
    let spec: SpaceSpec = serde_json::from_str(
        r#"{"atoms":[{"id":"a1","mass":0.4},{"id":"a2","mass":0.3}],
            "fragments":[{"id":"f1","mass":0.1},{"id":"f2","mass":0.2}],
            "blocks":[{"label":"A1","cells":["a1"],"kind":"a-atom"},{"label":"A2","cells":["a2"],"kind":"a-atom"},
                      {"label":"B","cells":["f1","f2"],"kind":"carrier"}]}"#,
    )
    .unwrap();
    let (space, alg) = spec.build().unwrap();
    let h = MeasurableFn::real(space, vec![2.0, 0.1, 0.7, 0.7]).unwrap();
    let b = beta(Atoms::Finite { alg: &alg, u: &h }).unwrap();
    assert_eq!((b.beta, b.source), (0.7, BetaSource::NonAtomicEsssup));
}

#[test]
fn sandwich_examples() {
    let h = SandwichHypotheses { gch: true, masses_vanish: true };
    let s = seq("1 + 1/n", 256);
    let r = ess_norm_sandwich(Atoms::Symbolic(&s), &YoungFunction::power_scaled(2.0), GchConstant::stated(1.0), h).unwrap();
    assert!((r.lower - 1.0).abs() < 1e-9 && (r.upper - 1.0).abs() < 1e-9);
    let s = seq("1/n", 256);
    let r = ess_norm_sandwich(Atoms::Symbolic(&s), &YoungFunction::power_scaled(2.0), GchConstant::stated(1.0), h).unwrap();
    assert!(r.lower < 1e-12 && r.upper < 1e-12);
    assert_eq!(r.hypotheses, h);
}

#[test]
fn truncation_curves_follow_tail_suprema() {
    let ps2 = YoungFunction::power_scaled(2.0);
    let ks = [1, 2, 4, 8, 16];
    let s = seq("1 + 1/n", 256);
    let c = truncation_distance_curve(Atoms::Symbolic(&s), &ps2, &ks, CurveOptions::default()).unwrap();
    assert_eq!(c.depth, 32);
    for p in &c.points {
        let tail_sup = 1.0 + 1.0 / (p.k + 1) as f64;
        assert!((p.distance - tail_sup).abs() < 1e-6, "k = {}: {}", p.k, p.distance);
    }
    let s = seq("1/n", 256);
    let c = truncation_distance_curve(Atoms::Symbolic(&s), &ps2, &ks, CurveOptions::default()).unwrap();
    for p in &c.points {
        assert!((p.distance - 1.0 / (p.k + 1) as f64).abs() < 1e-6, "k = {}: {}", p.k, p.distance);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn beta_is_the_level_threshold(limit in 0.1f64..5.0, amp in -2.0f64..2.0, rate in 0.2f64..2.0) {
        let value = format!("{limit} + {amp} * n^(-{rate})");
        let s = SymbolicAtomSequence::parse("1/n^2", &value, 2000).unwrap();
        prop_assume!(s.values().iter().all(|v| *v > 0.0));
        let b = beta(Atoms::Symbolic(&s)).unwrap().beta;
        prop_assert!((b - limit).abs() < 1e-2 * limit.max(1.0), "{} vs {}", b, limit);
        let tol = 1e-6 * (1.0 + b);
        for i in 1..=16 {
            let above = b + tol + i as f64 * 0.05;
            let r = level_set(Atoms::Symbolic(&s), above).unwrap();
            prop_assert_eq!(r.classification, LevelClass::FinitelyManyAtoms);
            let below = b - tol - i as f64 * b / 20.0;
            if below > 0.0 {
                let r = level_set(Atoms::Symbolic(&s), below).unwrap();
                prop_assert_ne!(r.classification, LevelClass::FinitelyManyAtoms);
            }
        }
    }
}
