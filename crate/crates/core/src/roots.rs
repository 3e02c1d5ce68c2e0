//! Bracketed scalar root finding.

use crate::error::{Error, Result};

/// Bisection on a bracket where `f(lo) < 0 < f(hi)`, run until the bracket
/// collapses to adjacent floating-point numbers or `rel_width` is reached.
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, rel_width: f64) -> (f64, f64) {
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= rel_width * hi.abs().max(lo.abs()) {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

/// Grows `hi` geometrically from `start` until `f(hi) > 0`.
pub fn grow_upper<F: FnMut(f64) -> f64>(mut f: F, start: f64) -> Result<f64> {
    let mut hi = start;
    for _ in 0..200 {
        if f(hi) > 0.0 {
            return Ok(hi);
        }
        hi *= 2.0;
    }
    Err(Error::Convergence(format!("no sign change found up to {hi}")))
}

/// One Newton step from `x`, kept only if it stays inside `[lo, hi]` and
/// does not increase `|f|`.
pub fn newton_polish<F: FnMut(f64) -> f64, D: FnMut(f64) -> f64>(
    mut f: F,
    mut df: D,
    x: f64,
    lo: f64,
    hi: f64,
) -> f64 {
    let fx = f(x);
    let d = df(x);
    if d == 0.0 || !d.is_finite() {
        return x;
    }
    let next = x - fx / d;
    if next >= lo && next <= hi && f(next).abs() <= fx.abs() {
        next
    } else {
        x
    }
}
