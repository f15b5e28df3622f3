//! Bracketed scalar root finding.

use crate::error::{Error, Result};

const MAX_ITERATIONS: usize = 200;

/// Finds a root of `f` inside `[lo, hi]` by secant steps safeguarded with
/// bisection.
///
/// The bracket must contain a sign change. Iteration stops once the bracket
/// width drops below `rel_tol · |x|` (or `rel_tol` near zero) or `f` hits zero
/// exactly.
pub fn bracketed_root<F>(f: F, lo: f64, hi: f64, rel_tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::Solver(format!("invalid bracket [{lo}, {hi}]")));
    }
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if !fa.is_finite() || !fb.is_finite() {
        return Err(Error::Solver(format!("non-finite value on bracket [{lo}, {hi}]")));
    }
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Solver(format!(
            "no sign change on [{lo}, {hi}] (f = {fa:e}, {fb:e})"
        )));
    }

    for _ in 0..MAX_ITERATIONS {
        let width = b - a;
        let mid = 0.5 * (a + b);
        if width <= rel_tol * mid.abs().max(1.0) {
            return Ok(mid);
        }
        let secant = b - fb * (b - a) / (fb - fa);
        let x = if secant > a && secant < b { secant } else { mid };
        let fx = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if fx.signum() == fa.signum() {
            a = x;
            fa = fx;
        } else {
            b = x;
            fb = fx;
        }
        // A secant step that lands next to an endpoint barely shrinks the
        // bracket; follow it with a bisection of the remaining interval.
        if (b - a) > 0.5 * width {
            let m = 0.5 * (a + b);
            let fm = f(m);
            if fm == 0.0 {
                return Ok(m);
            }
            if fm.signum() == fa.signum() {
                a = m;
                fa = fm;
            } else {
                b = m;
                fb = fm;
            }
        }
    }
    Err(Error::Solver(format!(
        "no convergence after {MAX_ITERATIONS} iterations on [{lo}, {hi}]"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_sqrt_two() {
        let r = bracketed_root(|x| x * x - 2.0, 0.0, 2.0, 1e-14).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn rejects_bracket_without_sign_change() {
        let err = bracketed_root(|x| x * x + 1.0, -1.0, 1.0, 1e-12).unwrap_err();
        assert!(matches!(err, Error::Solver(_)));
    }

    #[test]
    fn handles_flat_then_steep_function() {
        let r = bracketed_root(|x: f64| x.powi(9) - 1e-9, 0.0, 1.0, 1e-13).unwrap();
        assert!((r - 0.1).abs() < 1e-12);
    }
}
