use orlicz_core::numeric::log_space;
use orlicz_core::young::{check_growth, is_young_composition, GrowthCondition};
use orlicz_core::young::standard_grid;
use orlicz_core::YoungFunction;
use proptest::prelude::*;

fn families() -> Vec<YoungFunction> {
    vec![
        YoungFunction::power(2.5),
        YoungFunction::power_scaled(3.0),
        YoungFunction::exp_power(2.0),
        YoungFunction::entropy(2.0),
        YoungFunction::log_quotient(),
        YoungFunction::exp_quartic(),
    ]
}

/// Brute-force `sup_x (x y - Φ(x))` over a uniform grid on `[0, x_max]`.
fn dense_conjugate(phi: impl Fn(f64) -> f64, y: f64, x_max: f64, steps: usize) -> f64 {
    (0..=steps)
        .map(|i| {
            let x = x_max * i as f64 / steps as f64;
            x * y - phi(x)
        })
        .fold(0.0, f64::max)
}

#[test]
fn exp_power_one_conjugate_at_one_matches_dense_scan() {
    let oracle = dense_conjugate(|x| x.exp() - x - 1.0, 1.0, 4.0, 4_000_000);
    let got = YoungFunction::exp_power(1.0).conjugate_eval(1.0).unwrap();
    assert!((got - oracle).abs() < 1e-8, "{got} vs {oracle}");
    assert!((got - (2.0 * 2f64.ln() - 1.0)).abs() < 1e-10);
}

#[test]
fn dense_scan_agrees_for_other_families() {
    type Case = (YoungFunction, Box<dyn Fn(f64) -> f64>);
    let cases: Vec<Case> = vec![
        (YoungFunction::log_quotient(), Box::new(|x: f64| x * x / (std::f64::consts::E + x).ln())),
        (YoungFunction::entropy(2.0), Box::new(|x: f64| (1.0 + x * x) * (1.0 + x * x).ln() - x * x)),
        (YoungFunction::exp_quartic(), Box::new(|x: f64| x.powi(4).exp() - 1.0)),
    ];
    for (phi, f) in cases {
        for y in [0.5, 2.0] {
            let oracle = dense_conjugate(&f, y, 6.0, 600_000);
            let got = phi.conjugate_eval(y).unwrap();
            assert!((got - oracle).abs() <= 1e-7 * (1.0 + oracle), "{} at {y}: {got} vs {oracle}", phi.label());
        }
    }
}

#[test]
fn eval_and_inverse_examples() {
    let e = YoungFunction::exp_power(1.0);
    assert!((e.eval(1.0).unwrap() - (std::f64::consts::E - 2.0)).abs() < 1e-15);
    assert!((e.inverse(std::f64::consts::E - 2.0).unwrap() - 1.0).abs() < 1e-8);
    assert_eq!(YoungFunction::power_scaled(2.0).conjugate_eval(3.0).unwrap(), 4.5);
}

#[test]
fn power_scaled_conjugates_are_closed_form() {
    for p in [1.5, 2.0, 3.0, 10.0] {
        let q = p / (p - 1.0);
        let c = YoungFunction::power_scaled(p).conjugate();
        assert_eq!(c, YoungFunction::power_scaled(q));
        let wrapped = YoungFunction::ConjugateOf { of: Box::new(YoungFunction::power_scaled(p)) };
        for x in standard_grid() {
            let generic = wrapped.eval(x).unwrap();
            let exact = x.powf(q) / q;
            assert!(((generic - exact) / exact).abs() <= 1e-6, "p = {p}, x = {x}");
        }
    }
}

#[test]
fn biconjugate_recovers_each_family() {
    for phi in families() {
        let bi = YoungFunction::ConjugateOf { of: Box::new(YoungFunction::ConjugateOf { of: Box::new(phi.clone()) }) };
        for x in standard_grid() {
            let a = phi.eval(x).unwrap();
            let b = bi.eval(x).unwrap();
            if a.is_infinite() {
                assert!(b > 1e300, "{} at {x}", phi.label());
                continue;
            }
            assert!(((a - b) / a).abs() <= 1e-6, "{} at {x}: {a} vs {b}", phi.label());
        }
    }
}

#[test]
fn inverse_product_is_between_a_and_2a() {
    for phi in families() {
        for a in log_space(1e-3, 1e3, 64) {
            let prod = phi.inverse(a).unwrap() * phi.conjugate_inverse(a).unwrap();
            assert!(a < prod && prod <= 2.0 * a + 1e-8, "{} at {a}: {prod}", phi.label());
        }
    }
}

#[test]
fn growth_examples_against_direct_ratios() {
    let g = standard_grid();
    let r = check_growth(&YoungFunction::power_scaled(2.0), GrowthCondition::Delta2, &g, None).unwrap();
    let direct = g.iter().map(|x| (2.0 * x).powi(2) / x.powi(2)).fold(0.0, f64::max);
    assert!(r.holds_globally && (r.witness_constant - direct).abs() < 1e-12);
    let r = check_growth(&YoungFunction::exp_power(2.0), GrowthCondition::Delta2, &g, None).unwrap();
    assert!(!r.holds_globally);

    let (psi, phi) = (YoungFunction::power_scaled(2.0), YoungFunction::power_scaled(3.0));
    let r = check_growth(&phi, GrowthCondition::Precedes, &g, Some(&psi)).unwrap();
    assert!(r.holds_eventually && !r.holds_globally);
    // x²/2 <= (a x)³/3 for x >= x0 iff a >= (3 / (2 x0))^(1/3)
    let x0: f64 = r.threshold_x0;
    let a_needed = (1.5 / x0).cbrt();
    assert!(r.witness_constant >= a_needed * (1.0 - 1e-9), "{} vs {a_needed}", r.witness_constant);
    for &x in g.iter().filter(|&&x| x >= x0) {
        assert!(x * x / 2.0 <= (r.witness_constant * x).powi(3) / 3.0 * (1.0 + 1e-9));
    }
}

#[test]
fn composition_examples() {
    let ps = YoungFunction::power_scaled;
    let r = is_young_composition(&ps(2.0), &ps(1.5)).unwrap();
    assert!(r.is_young);
    let r = is_young_composition(&ps(3.0), &ps(2.0)).unwrap();
    assert!(r.is_young);
    let r = is_young_composition(&ps(1.5), &ps(3.0)).unwrap();
    assert!(!r.is_young);
    assert_eq!(r.check.first_violation.as_deref(), Some("midpoint_convex"));
}

#[test]
fn serde_round_trip() {
    let f = YoungFunction::compose_inverse(YoungFunction::exp_power(2.0), YoungFunction::power_scaled(3.0)).dilate(2.0);
    let s = serde_json::to_string(&f).unwrap();
    assert_eq!(serde_json::from_str::<YoungFunction>(&s).unwrap(), f);
    let v: YoungFunction = serde_json::from_str(r#"{"family":"power_scaled","p":2}"#).unwrap();
    assert_eq!(v, YoungFunction::power_scaled(2.0));
}

fn family() -> impl Strategy<Value = YoungFunction> {
    prop_oneof![
        (1.1f64..6.0).prop_map(YoungFunction::power),
        (1.1f64..6.0).prop_map(YoungFunction::power_scaled),
        (1.0f64..3.0).prop_map(YoungFunction::exp_power),
        (1.0f64..3.0).prop_map(YoungFunction::entropy),
        Just(YoungFunction::log_quotient()),
        Just(YoungFunction::exp_quartic()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn young_inequality(phi in family(), lx in -3.0f64..1.5, ly in -3.0f64..2.0) {
        let (x, y) = (10f64.powf(lx), 10f64.powf(ly));
        let rhs = phi.eval(x).unwrap() + phi.conjugate_eval(y).unwrap();
        prop_assert!(x * y <= rhs * (1.0 + 1e-9) + 1e-12);
    }

    #[test]
    fn inverse_round_trip(phi in family(), lx in -2.0f64..1.0) {
        let x = 10f64.powf(lx);
        let y = phi.eval(x).unwrap();
        prop_assume!(y.is_finite() && y > 1e-280);
        let back = phi.inverse(y).unwrap();
        prop_assert!(((back - x) / x).abs() < 1e-8, "{} vs {}", back, x);
    }

    #[test]
    fn convex_nondecreasing_and_zero_at_zero(phi in family(), lx in -3.0f64..1.0, t in 0.0f64..1.0) {
        prop_assert_eq!(phi.eval(0.0).unwrap(), 0.0);
        let (x, y) = (10f64.powf(lx), 10f64.powf(lx) * 3.0);
        let (fx, fy) = (phi.eval(x).unwrap(), phi.eval(y).unwrap());
        prop_assert!(fy >= fx);
        let mid = phi.eval(t * x + (1.0 - t) * y).unwrap();
        prop_assert!(mid <= (t * fx + (1.0 - t) * fy) * (1.0 + 1e-10) + 1e-300);
    }
}
