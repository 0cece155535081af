//! Bracketed scalar root finding.
//!
//! Every equation solved in this crate is monotone on a known interval, so
//! bisection is all that is needed. Iteration continues until the bracket
//! collapses to adjacent floating-point numbers, which gives full *relative*
//! precision even for roots many orders of magnitude below the bracket width.

use crate::error::{Error, Result};

const MAX_ITER: usize = 2_200;

/// Root of `f` on `[lo, hi]`. The endpoint values must differ in sign (or
/// one of them must be zero).
pub fn bisect<F>(mut f: F, lo: f64, hi: f64, what: &'static str) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let (mut lo, mut hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let f_lo = f(lo);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    let f_hi = f(hi);
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.is_nan() || f_hi.is_nan() || (f_lo > 0.0) == (f_hi > 0.0) {
        return Err(Error::NoBracket(what));
    }
    let lo_positive = f_lo > 0.0;
    for _ in 0..MAX_ITER {
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if (f_mid > 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo + 0.5 * (hi - lo))
}

/// Root of an increasing function, expanding `[lo, hi]` geometrically
/// (`lo` shrinks toward zero, `hi` grows) until it brackets `target`.
/// Intended for positive unknowns.
pub fn bisect_increasing_expand<F>(mut f: F, target: f64, lo: f64, hi: f64, what: &'static str) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let (mut lo, mut hi) = (lo, hi);
    let mut expansions = 0;
    while f(lo) > target {
        lo *= 0.5;
        expansions += 1;
        if expansions > 2_000 || lo == 0.0 {
            return Err(Error::NoBracket(what));
        }
    }
    expansions = 0;
    while f(hi) < target {
        hi *= 2.0;
        expansions += 1;
        if expansions > 2_000 || !hi.is_finite() {
            return Err(Error::NoBracket(what));
        }
    }
    bisect(|x| f(x) - target, lo, hi, what)
}
