//! Modulars, Luxemburg norms and Hölder-type product inequalities.

use serde::{Deserialize, Serialize};

use crate::error::{bail, Result};
use crate::numeric::MAX_ITER;
use crate::space::MeasurableFn;
use crate::young::YoungFunction;

/// Relative width at which the norm bisection stops.
pub const NORM_REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormResult {
    pub value: f64,
    /// `∫ Φ(|f| / value) dμ`; at most 1 for a nonzero `f`.
    pub modular_at_value: f64,
    pub iterations: usize,
}

/// `Σ Φ(|f(c)|)·mass(c)`.
pub fn modular(phi: &YoungFunction, f: &MeasurableFn) -> Result<f64> {
    modular_abs(phi, &f.abs(), f.space().masses())
}

/// Modular of a nonnegative cellwise array.
pub fn modular_abs(phi: &YoungFunction, abs: &[f64], masses: &[f64]) -> Result<f64> {
    let mut acc = 0.0;
    for (&a, &m) in abs.iter().zip(masses) {
        if a > 0.0 {
            acc += phi.eval(a)? * m;
        }
    }
    Ok(acc)
}

/// `N_Φ(f) = inf { k > 0 : ∫ Φ(|f|/k) dμ <= 1 }`, with `N_Φ(0) = 0`.
pub fn lux_norm(phi: &YoungFunction, f: &MeasurableFn) -> Result<NormResult> {
    lux_norm_abs(phi, &f.abs(), f.space().masses())
}

pub fn lux_norm_abs(phi: &YoungFunction, abs: &[f64], masses: &[f64]) -> Result<NormResult> {
    let k0 = abs.iter().copied().fold(0.0, f64::max);
    if !k0.is_finite() {
        bail!(Domain, "norm of a function with non-finite values");
    }
    if k0 == 0.0 {
        return Ok(NormResult { value: 0.0, modular_at_value: 0.0, iterations: 0 });
    }
    let at = |k: f64| -> Result<f64> {
        let mut acc = 0.0;
        for (&a, &m) in abs.iter().zip(masses) {
            if a > 0.0 {
                acc += phi.eval(a / k)? * m;
                if acc.is_infinite() {
                    break;
                }
            }
        }
        Ok(acc)
    };
    let mut iterations = 0;
    // bracket: modular(lo) > 1 >= modular(hi)
    let m0 = at(k0)?;
    let (mut lo, mut hi, mut m_hi) = if m0 <= 1.0 {
        let (mut hi, mut m_hi) = (k0, m0);
        loop {
            iterations += 1;
            let k = hi / 2.0;
            if k == 0.0 || iterations > 4096 {
                bail!(Numeric, "could not bracket the norm from below");
            }
            let m = at(k)?;
            if m > 1.0 {
                break (k, hi, m_hi);
            }
            (hi, m_hi) = (k, m);
        }
    } else {
        let mut lo = k0;
        loop {
            iterations += 1;
            let k = lo * 2.0;
            if !k.is_finite() || iterations > 4096 {
                bail!(Numeric, "could not bracket the norm from above");
            }
            let m = at(k)?;
            if m <= 1.0 {
                break (lo, k, m);
            }
            lo = k;
        }
    };
    for _ in 0..MAX_ITER {
        if hi - lo <= NORM_REL_TOL * hi {
            break;
        }
        iterations += 1;
        let mid = 0.5 * (lo + hi);
        let m = at(mid)?;
        if m > 1.0 {
            lo = mid;
        } else {
            (hi, m_hi) = (mid, m);
        }
    }
    Ok(NormResult { value: hi, modular_at_value: m_hi, iterations })
}

/// `2·N_Φ(f)·N_{Φ*}(g) − ∫|fg| dμ`; nonnegative by the Hölder inequality.
pub fn holder_defect(phi: &YoungFunction, f: &MeasurableFn, g: &MeasurableFn) -> Result<f64> {
    let fg = f.mul(g)?;
    let nf = lux_norm(phi, f)?.value;
    let ng = lux_norm(&phi.conjugate(), g)?.value;
    let integral: f64 = fg.abs().iter().zip(fg.space().masses()).map(|(a, m)| a * m).sum();
    Ok(2.0 * nf * ng - integral)
}

/// First grid pair `(x, y)` with `Φ₃(xy) > Φ₁(x) + Φ₂(y)`, if any.
pub fn product_inequality_violation(
    phi1: &YoungFunction,
    phi2: &YoungFunction,
    phi3: &YoungFunction,
    grid: &[f64],
) -> Result<Option<(f64, f64)>> {
    if grid.is_empty() || grid.iter().any(|x| !(*x >= 0.0 && x.is_finite())) {
        bail!(Argument, "pair grid must be nonempty, finite and nonnegative");
    }
    let left: Vec<f64> = grid.iter().map(|&x| phi1.eval(x)).collect::<Result<_>>()?;
    let right: Vec<f64> = grid.iter().map(|&y| phi2.eval(y)).collect::<Result<_>>()?;
    for (i, &x) in grid.iter().enumerate() {
        for (j, &y) in grid.iter().enumerate() {
            let rhs = left[i] + right[j];
            if rhs.is_infinite() {
                continue;
            }
            let lhs = phi3.eval(x * y)?;
            if lhs > rhs + 1e-12 * rhs.max(1e-300) {
                return Ok(Some((x, y)));
            }
        }
    }
    Ok(None)
}

/// `2·N_{Φ₁}(f₁)·N_{Φ₂}(f₂) − N_{Φ₃}(f₁f₂)`, claimed only after the
/// hypothesis `Φ₃(xy) <= Φ₁(x) + Φ₂(y)` is certified on all grid pairs.
pub fn product_norm_defect(
    phi1: &YoungFunction,
    phi2: &YoungFunction,
    phi3: &YoungFunction,
    f1: &MeasurableFn,
    f2: &MeasurableFn,
    grid: &[f64],
) -> Result<f64> {
    if let Some((x, y)) = product_inequality_violation(phi1, phi2, phi3, grid)? {
        bail!(
            PreconditionNotCertified,
            "{}(xy) <= {}(x) + {}(y) fails at x = {x}, y = {y}",
            phi3.label(),
            phi1.label(),
            phi2.label()
        );
    }
    let prod = f1.mul(f2)?;
    let n1 = lux_norm(phi1, f1)?.value;
    let n2 = lux_norm(phi2, f2)?.value;
    let n3 = lux_norm(phi3, &prod)?.value;
    Ok(2.0 * n1 * n2 - n3)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::linear_grid;
    use crate::space::{build_atomic_space, build_symmetric_space};
    use crate::young::standard_grid;
    use num_complex::Complex64;

    #[test]
    fn modular_examples() {
        let (space, _) = build_atomic_space(&[0.5, 0.5]).unwrap();
        let chi = MeasurableFn::indicator(space.clone(), &[0]);
        assert_eq!(modular(&YoungFunction::power_scaled(2.0), &chi).unwrap(), 0.25);
        let one = MeasurableFn::constant(space.clone(), Complex64::new(1.0, 0.0));
        let m = modular(&YoungFunction::exp_power(1.0), &one).unwrap();
        assert!((m - (std::f64::consts::E - 2.0)).abs() < 1e-15);
        assert_eq!(modular(&YoungFunction::exp_quartic(), &MeasurableFn::zero(space)).unwrap(), 0.0);
    }

    #[test]
    fn norm_closed_forms() {
        let (space, _) = build_atomic_space(&[1.0]).unwrap();
        let one = MeasurableFn::constant(space.clone(), Complex64::new(1.0, 0.0));
        let r = lux_norm(&YoungFunction::power_scaled(2.0), &one).unwrap();
        assert!((r.value - 0.5f64.sqrt()).abs() < 1e-12);
        assert!(r.modular_at_value <= 1.0);
        assert_eq!(lux_norm(&YoungFunction::power_scaled(2.0), &MeasurableFn::zero(space)).unwrap().value, 0.0);

        let (space, _) = build_atomic_space(&[0.3, 0.7]).unwrap();
        let chi = MeasurableFn::indicator(space, &[0]);
        for phi in [YoungFunction::exp_power(2.0), YoungFunction::entropy(2.0), YoungFunction::exp_quartic()] {
            let expected = 1.0 / phi.inverse(1.0 / 0.3).unwrap();
            let got = lux_norm(&phi, &chi).unwrap().value;
            assert!((got - expected).abs() < 1e-10 * expected, "{phi:?}: {got} vs {expected}");
        }
    }

    #[test]
    fn overflow_is_infinite_modular() {
        let (space, _) = build_atomic_space(&[1.0]).unwrap();
        let big = MeasurableFn::constant(space, Complex64::new(1e6, 0.0));
        let r = lux_norm(&YoungFunction::exp_quartic(), &big).unwrap();
        assert!((r.value / 1e6 - 1.0 / std::f64::consts::LN_2.powf(0.25)).abs() < 1e-9);
    }

    #[test]
    fn holder_examples() {
        let (space, _) = build_atomic_space(&[1.0]).unwrap();
        let one = MeasurableFn::constant(space.clone(), Complex64::new(1.0, 0.0));
        let d = holder_defect(&YoungFunction::power_scaled(2.0), &one, &one).unwrap();
        assert!(d.abs() < 1e-11);
        let zero = MeasurableFn::zero(space);
        assert!(holder_defect(&YoungFunction::power_scaled(2.0), &zero, &one).unwrap() >= 0.0);
    }

    #[test]
    fn product_precondition() {
        let ps2 = YoungFunction::power_scaled(2.0);
        let (space, _) = build_symmetric_space(20).unwrap();
        let f = MeasurableFn::constant(space, Complex64::new(0.5, 0.0));
        let err = product_norm_defect(&ps2, &ps2, &ps2, &f, &f, &standard_grid()).unwrap_err();
        assert!(matches!(err, crate::Error::PreconditionNotCertified(_)));

        let grid = linear_grid(0.0, 1.0, 41);
        let (phi, psi, theta) =
            (YoungFunction::exp_power(2.0), YoungFunction::power_scaled(2.0), YoungFunction::entropy(2.0));
        let d = product_norm_defect(&phi, &theta, &psi, &f, &f, &grid).unwrap();
        assert!(d >= 0.0);
    }
}
