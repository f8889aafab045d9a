//! Scalar root bracketing, bisection and golden-section search.
//!
//! All searches run in log-space so that arguments spanning many orders of
//! magnitude (tiny inverses near zero, conjugate maximizers near overflow)
//! are resolved to relative precision.

use crate::error::{bail, Result};

/// Relative tolerance for golden-section searches.
pub const REL_TOL: f64 = 1e-10;
/// Iteration cap for bisection and golden-section refinement.
pub const MAX_ITER: usize = 200;
/// Cap on bracket-walking steps. Galloping steps cover the full `f64`
/// exponent range well before this.
pub const MAX_EXPANSIONS: usize = 128;

const LN_MIN: f64 = -744.0;
const LN_MAX: f64 = 709.7;

/// Smallest `x >= 0` with `f(x) >= target` for a nondecreasing `f` with
/// `f(0) = 0`. Bisection stops near machine precision.
pub fn invert_increasing<F>(f: F, target: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if !(target >= 0.0) || !target.is_finite() {
        bail!(Domain, "cannot invert at {target}");
    }
    if target == 0.0 {
        return Ok(0.0);
    }
    // walk t = ln x until f(e^lo) < target <= f(e^hi)
    let mut t = 0.0_f64;
    let mut step = std::f64::consts::LN_2;
    let (mut lo, mut hi);
    if f(1.0)? >= target {
        hi = t;
        loop {
            let next = (t - step).max(LN_MIN);
            if f(next.exp())? < target {
                lo = next;
                break;
            }
            hi = next;
            if next <= LN_MIN {
                return Ok(0.0);
            }
            t = next;
            step *= 2.0;
        }
    } else {
        lo = t;
        let mut steps = 0;
        loop {
            let next = (t + step).min(LN_MAX);
            if f(next.exp())? >= target {
                hi = next;
                break;
            }
            lo = next;
            steps += 1;
            if next >= LN_MAX || steps > MAX_EXPANSIONS {
                bail!(Numeric, "failed to bracket inverse at {target}");
            }
            t = next;
            step *= 2.0;
        }
    }
    for _ in 0..MAX_ITER {
        if hi - lo <= 1e-15 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if f(mid.exp())? >= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi.exp())
}

/// Outcome of [`maximize_unimodal`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Maximum {
    pub arg: f64,
    pub value: f64,
}

/// Maximizes a function that is unimodal on `(0, inf)` and equals 0 at
/// `x = 0`. The result is never below 0. An objective that reaches `+inf`
/// is reported as an infinite maximum.
pub fn maximize_unimodal<G>(g: G) -> Result<Maximum>
where
    G: Fn(f64) -> Result<f64>,
{
    let eval = |t: f64| -> Result<f64> {
        let v = g(t.exp())?;
        Ok(if v.is_nan() { f64::NEG_INFINITY } else { v })
    };
    let zero = Maximum { arg: 0.0, value: 0.0 };
    let mut mid = 0.0_f64;
    let mut g_mid = eval(mid)?;
    let mut step = std::f64::consts::LN_2;
    let right = eval(mid + step)?;
    let (lo, hi);
    if right > g_mid {
        let mut prev = mid;
        mid += step;
        g_mid = right;
        let mut steps = 0;
        loop {
            if g_mid == f64::INFINITY {
                return Ok(Maximum { arg: mid.exp(), value: f64::INFINITY });
            }
            step *= 2.0;
            let next = (mid + step).min(LN_MAX);
            let g_next = eval(next)?;
            if g_next <= g_mid {
                lo = prev;
                hi = next;
                break;
            }
            if next >= LN_MAX {
                if g_next.is_finite() {
                    bail!(Numeric, "maximization unbounded within the f64 range");
                }
                return Ok(Maximum { arg: next.exp(), value: f64::INFINITY });
            }
            steps += 1;
            if steps > MAX_EXPANSIONS {
                bail!(Numeric, "maximization failed to bracket");
            }
            prev = mid;
            mid = next;
            g_mid = g_next;
        }
    } else {
        let mut prev = mid + step;
        let mut steps = 0;
        loop {
            let next = (mid - step).max(LN_MIN);
            let g_next = eval(next)?;
            if g_next <= g_mid {
                lo = next;
                hi = prev;
                break;
            }
            if next <= LN_MIN {
                return Ok(if g_next > 0.0 { Maximum { arg: next.exp(), value: g_next } } else { zero });
            }
            steps += 1;
            if steps > MAX_EXPANSIONS {
                bail!(Numeric, "maximization failed to bracket");
            }
            prev = mid;
            mid = next;
            g_mid = g_next;
            step *= 2.0;
        }
    }
    let best = golden_section(&eval, lo, hi)?;
    let best = if best.1 >= g_mid { best } else { (mid, g_mid) };
    Ok(if best.1 > 0.0 { Maximum { arg: best.0.exp(), value: best.1 } } else { zero })
}

/// Golden-section search for the maximum of a unimodal `f` on `[a, b]`.
/// Returns the best `(argument, value)` pair evaluated.
pub fn golden_section<F>(f: &F, mut a: f64, mut b: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    for _ in 0..MAX_ITER {
        if (b - a).abs() <= REL_TOL {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d)?;
        }
    }
    Ok(if fc >= fd { (c, fc) } else { (d, fd) })
}

/// `n` log-spaced points in `[lo, hi]`.
pub fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && n >= 2);
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| {
            if i == n - 1 {
                hi
            } else {
                (a + (b - a) * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}

/// `n` evenly spaced points in `[lo, hi]`.
pub fn linear_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(hi > lo && n >= 2);
    (0..n).map(|i| if i == n - 1 { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverts_square() {
        let x = invert_increasing(|x| Ok(x * x), 2.0).unwrap();
        assert!((x - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn inverts_tiny_and_huge_targets() {
        let x = invert_increasing(|x| Ok(x.powi(4)), 1e-200).unwrap();
        assert!((x / 1e-50 - 1.0).abs() < 1e-13);
        let x = invert_increasing(|x| Ok(x.powi(2)), 1e300).unwrap();
        assert!((x / 1e150 - 1.0).abs() < 1e-13);
    }

    #[test]
    fn maximizes_concave() {
        // sup x*3 - x^2/2 = 4.5 at x = 3
        let m = maximize_unimodal(|x| Ok(3.0 * x - x * x / 2.0)).unwrap();
        assert!((m.value - 4.5).abs() < 1e-12);
        assert!((m.arg - 3.0).abs() < 1e-6);
    }

    #[test]
    fn maximum_at_origin_is_zero() {
        let m = maximize_unimodal(|x| Ok(-x)).unwrap();
        assert_eq!(m.value, 0.0);
    }

    #[test]
    fn overflow_objective_is_infinite() {
        let m = maximize_unimodal(|x| Ok(x * 1e300)).unwrap();
        assert_eq!(m.value, f64::INFINITY);
    }

    #[test]
    fn log_space_endpoints() {
        let g = log_space(1e-3, 1e3, 64);
        assert_eq!(g.len(), 64);
        assert!((g[0] - 1e-3).abs() < 1e-18);
        assert_eq!(g[63], 1e3);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }
}
