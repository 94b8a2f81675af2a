use super::Interval;
use crate::error::{Error, Result};

const MAX_ITER: usize = 400;

/// Bracketing root finder: Illinois false-position steps interleaved with
/// bisection, so the bracket at least halves every two evaluations.
///
/// Returns the bracket endpoint with the smaller residual once the bracket is
/// no wider than `tol` (or cannot be split further in floating point).
pub fn find_root<F: Fn(f64) -> f64>(f: F, iv: Interval, tol: f64) -> Result<f64> {
    let (mut lo, mut hi) = (iv.lo(), iv.hi());
    let (mut flo, mut fhi) = (f(lo), f(hi));
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if !(flo.is_finite() && fhi.is_finite()) || flo.signum() == fhi.signum() {
        return Err(Error::Bracket { lo, hi, f_lo: flo, f_hi: fhi });
    }

    // Illinois bookkeeping: which side was retained last time.
    let mut side = 0i8;
    for iter in 0..MAX_ITER {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let mut x = if iter % 2 == 0 { hi - fhi * (hi - lo) / (fhi - flo) } else { mid };
        if !(x > lo && x < hi) {
            x = mid;
        }
        let fx = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if fx.signum() == flo.signum() {
            lo = x;
            flo = fx;
            if side == -1 {
                fhi *= 0.5;
            }
            side = -1;
        } else {
            hi = x;
            fhi = fx;
            if side == 1 {
                flo *= 0.5;
            }
            side = 1;
        }
    }
    // halved residuals are only weights; re-evaluate for the final choice
    let (rl, rh) = (f(lo).abs(), f(hi).abs());
    Ok(if rl <= rh { lo } else { hi })
}
