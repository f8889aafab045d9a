use num_complex::Complex64;
use orlicz_core::numeric::linear_grid;
use orlicz_core::orlicz::{holder_defect, lux_norm, modular, product_inequality_violation, product_norm_defect};
use orlicz_core::space::build_atomic_space;
use orlicz_core::verify::random_fn;
use orlicz_core::{Error, MeasurableFn, YoungFunction};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn closed_form(p: f64, f: &MeasurableFn) -> f64 {
    let s: f64 = f.abs().iter().zip(f.space().masses()).map(|(a, m)| a.powf(p) * m).sum();
    p.powf(-1.0 / p) * s.powf(1.0 / p)
}

#[test]
fn power_scaled_norm_matches_closed_form() {
    let masses = vec![1.0 / 64.0; 64];
    let (space, _) = build_atomic_space(&masses).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for p in [1.5, 2.0, 3.0] {
        for _ in 0..50 {
            let f = random_fn(&space, &mut rng);
            let got = lux_norm(&YoungFunction::power_scaled(p), &f).unwrap().value;
            let want = closed_form(p, &f);
            assert!(((got - want) / want).abs() < 1e-8, "p = {p}: {got} vs {want}");
        }
    }
    let (space, _) = build_atomic_space(&[1.0]).unwrap();
    let one = MeasurableFn::constant(space, Complex64::new(1.0, 0.0));
    let n = lux_norm(&YoungFunction::power_scaled(2.0), &one).unwrap().value;
    assert!((n - 0.5f64.sqrt()).abs() < 1e-12);
}

#[test]
fn modular_and_holder_examples() {
    let (space, _) = build_atomic_space(&[1.0]).unwrap();
    let one = MeasurableFn::constant(space, Complex64::new(1.0, 0.0));
    let m = modular(&YoungFunction::exp_power(1.0), &one).unwrap();
    assert!((m - (std::f64::consts::E - 2.0)).abs() < 1e-15);
    let d = holder_defect(&YoungFunction::power_scaled(2.0), &one, &one).unwrap();
    assert!(d.abs() < 1e-11);
}

#[test]
fn indicator_norm_identity() {
    let (space, _) = build_atomic_space(&[0.1, 0.2, 0.3, 0.4]).unwrap();
    for phi in [YoungFunction::exp_power(2.0), YoungFunction::log_quotient(), YoungFunction::entropy(1.5)] {
        for cells in [vec![0], vec![1, 3], vec![0, 1, 2, 3]] {
            let mu: f64 = cells.iter().map(|&c| space.masses()[c]).sum();
            let chi = MeasurableFn::indicator(space.clone(), &cells);
            let got = lux_norm(&phi, &chi).unwrap().value;
            let want = 1.0 / phi.inverse(1.0 / mu).unwrap();
            assert!(((got - want) / want).abs() < 1e-10, "{}: {got} vs {want}", phi.label());
        }
    }
}

#[test]
fn product_inequality_examples() {
    let ps2 = YoungFunction::power_scaled(2.0);
    let grid = linear_grid(0.0, 3.0, 31);
    assert!(product_inequality_violation(&ps2, &ps2, &ps2, &grid).unwrap().is_some());
    let (space, _) = build_atomic_space(&[0.5, 0.5]).unwrap();
    let f = MeasurableFn::real(space, vec![0.5, 1.0]).unwrap();
    let err = product_norm_defect(&ps2, &ps2, &ps2, &f, &f, &grid).unwrap_err();
    assert!(matches!(err, Error::PreconditionNotCertified(_)));

    let unit = linear_grid(0.0, 1.0, 41);
    let (phi, theta) = (YoungFunction::exp_power(2.0), YoungFunction::entropy(2.0));
    assert_eq!(product_inequality_violation(&phi, &theta, &ps2, &unit).unwrap(), None);
    let g = MeasurableFn::real(f.space().clone(), vec![0.25, 0.75]).unwrap();
    assert!(product_norm_defect(&phi, &theta, &ps2, &f, &g, &unit).unwrap() >= 0.0);
}

fn values() -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(prop_oneof![Just(0.0), 0.01f64..20.0], 1..20)
}

fn phi() -> impl Strategy<Value = YoungFunction> {
    prop_oneof![
        (1.2f64..4.0).prop_map(YoungFunction::power_scaled),
        (1.0f64..2.5).prop_map(YoungFunction::exp_power),
        Just(YoungFunction::log_quotient()),
        (1.0f64..3.0).prop_map(YoungFunction::entropy),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn norm_sits_on_unit_ball_boundary(phi in phi(), v in values()) {
        let masses = vec![1.0 / v.len() as f64; v.len()];
        let (space, _) = build_atomic_space(&masses).unwrap();
        let f = MeasurableFn::real(space, v).unwrap();
        let n = lux_norm(&phi, &f).unwrap();
        if n.value == 0.0 {
            prop_assert!(f.sup_abs() == 0.0);
        } else {
            prop_assert!(n.modular_at_value <= 1.0 + 1e-9);
            let inside = f.scale(Complex64::new(1.0 / (n.value * (1.0 - 1e-6)), 0.0));
            prop_assert!(modular(&phi, &inside).unwrap() > 1.0 - 1e-9);
        }
    }

    #[test]
    fn norm_is_homogeneous_and_subadditive(phi in phi(), v in values(), w in values(), c in 0.01f64..50.0) {
        let n = v.len().min(w.len());
        let masses = vec![0.3; n];
        let (space, _) = build_atomic_space(&masses).unwrap();
        let f = MeasurableFn::real(space.clone(), v[..n].to_vec()).unwrap();
        let g = MeasurableFn::real(space, w[..n].to_vec()).unwrap();
        let nf = lux_norm(&phi, &f).unwrap().value;
        let ng = lux_norm(&phi, &g).unwrap().value;
        let ncf = lux_norm(&phi, &f.scale(Complex64::new(0.0, c))).unwrap().value;
        prop_assert!((ncf - c * nf).abs() <= 1e-9 * (1.0 + c * nf));
        let nsum = lux_norm(&phi, &f.add(&g).unwrap()).unwrap().value;
        prop_assert!(nsum <= (nf + ng) * (1.0 + 1e-9) + 1e-12);
    }

    #[test]
    fn holder_defect_is_nonnegative(seed in 0u64..10_000) {
        let (space, _) = build_atomic_space(&[1.0 / 16.0; 16]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_fn(&space, &mut rng);
        let g = random_fn(&space, &mut rng);
        prop_assert!(holder_defect(&YoungFunction::power_scaled(3.0), &f, &g).unwrap() >= -1e-9);
    }
}
