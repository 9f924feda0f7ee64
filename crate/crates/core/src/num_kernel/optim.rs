use super::Real;
use crate::error::{Error, Result};

/// Number of grid intervals scanned by [`maximize_1d`] before refinement.
pub const GRID_INTERVALS: usize = 10_000;

const MAX_ITER: usize = 500;

fn checked<T: Real>(x: T, v: T) -> Result<T> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Evaluation { x: x.as_f64(), value: v.as_f64() })
    }
}

/// Maximizes `f` on `[lo, hi]`: uniform grid scan (leftmost winner on ties),
/// then golden-section search on the neighbouring grid cells down to `tol`.
pub fn maximize_1d<T: Real, F: FnMut(T) -> T>(mut f: F, lo: T, hi: T, tol: T) -> Result<(T, T)> {
    if !(lo < hi) || !(tol > T::zero()) {
        return Err(Error::Contract(format!("need lo < hi and tol > 0, got [{lo}, {hi}], tol {tol}")));
    }
    let n = T::from_usize(GRID_INTERVALS).unwrap();
    let at = |i: usize| {
        if i == GRID_INTERVALS {
            hi
        } else {
            lo + (hi - lo) * T::from_usize(i).unwrap() / n
        }
    };
    let mut best_i = 0;
    let mut best_v = checked(lo, f(lo))?;
    for i in 1..=GRID_INTERVALS {
        let x = at(i);
        let v = checked(x, f(x))?;
        if v > best_v {
            best_i = i;
            best_v = v;
        }
    }
    let mut best_x = at(best_i);

    let mut a = at(best_i.saturating_sub(1));
    let mut b = at((best_i + 1).min(GRID_INTERVALS));
    let g = (T::lit(5.0).sqrt() - T::one()) / T::lit(2.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let mut fc = checked(c, f(c))?;
    let mut fd = checked(d, f(d))?;
    let mut iter = 0;
    while b - a > tol && iter < MAX_ITER {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = checked(c, f(c))?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = checked(d, f(d))?;
        }
        iter += 1;
    }
    let mid = (a + b) / T::lit(2.0);
    let fm = checked(mid, f(mid))?;
    if fm > best_v {
        best_x = mid;
        best_v = fm;
    }
    Ok((best_x, best_v))
}

/// Bisection root finder. Returns the bracket midpoint once its width is at
/// most `tol`. An endpoint with `f == 0` is returned as is.
pub fn find_root<T: Real, F: FnMut(T) -> T>(mut f: F, lo: T, hi: T, tol: T) -> Result<T> {
    if !(lo < hi) || !(tol > T::zero()) {
        return Err(Error::Contract(format!("need lo < hi and tol > 0, got [{lo}, {hi}], tol {tol}")));
    }
    let mut a = lo;
    let mut b = hi;
    let fa = checked(a, f(a))?;
    let fb = checked(b, f(b))?;
    if fa == T::zero() {
        return Ok(a);
    }
    if fb == T::zero() {
        return Ok(b);
    }
    if (fa < T::zero()) == (fb < T::zero()) {
        return Err(Error::Bracketing {
            lo: lo.as_f64(),
            hi: hi.as_f64(),
            f_lo: fa.as_f64(),
            f_hi: fb.as_f64(),
        });
    }
    let neg_at_a = fa < T::zero();
    let mut iter = 0;
    while b - a > tol && iter < MAX_ITER {
        let m = (a + b) / T::lit(2.0);
        if m <= a || m >= b {
            break;
        }
        let fm = checked(m, f(m))?;
        if fm == T::zero() {
            return Ok(m);
        }
        if (fm < T::zero()) == neg_at_a {
            a = m;
        } else {
            b = m;
        }
        iter += 1;
    }
    Ok((a + b) / T::lit(2.0))
}
