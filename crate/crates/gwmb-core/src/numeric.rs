//! Small numerical toolbox: bracketing root searches, adaptive quadrature,
//! one-dimensional minimisation, and binomial confidence intervals.
//!
//! Everything operates on `f64` closures and reports failures through
//! [`Error`](crate::Error) instead of returning NaN.

use alloc::vec::Vec;

use crate::{Error, Result};

/// 97.5% standard-normal quantile, used for 95% Wilson intervals.
pub const Z_95: f64 = 1.959_963_984_540_054;

/// Bisect `f` on `[lo, hi]` down to an interval of width `tol`.
///
/// Requires a sign change (`f(lo) * f(hi) <= 0`); returns the midpoint of
/// the final bracket. Exact zeros at either endpoint are returned directly.
pub fn bisect<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64, max_iter: u32) -> Result<f64> {
    let (mut lo, mut hi) = (lo, hi);
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo * fhi > 0.0 {
        return Err(Error::NoSignChange { lo, hi });
    }
    for _ in 0..max_iter {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol || mid <= lo || mid >= hi {
            return Ok(mid);
        }
        let fmid = f(mid);
        if fmid == 0.0 {
            return Ok(mid);
        }
        if flo * fmid < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            flo = fmid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Scan `f` on a uniform `n`-cell grid over `[lo, hi]` and return every cell
/// `(a, b)` across which the sign changes (or a zero is straddled).
pub fn sign_change_cells<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, n: usize) -> Vec<(f64, f64)> {
    let mut cells = Vec::new();
    let mut a = lo;
    let mut fa = f(a);
    for i in 1..=n {
        let b = lo + (hi - lo) * (i as f64) / (n as f64);
        let fb = f(b);
        if fa == 0.0 || fa * fb < 0.0 {
            cells.push((a, b));
        }
        a = b;
        fa = fb;
    }
    if fa == 0.0 {
        cells.push((a, a));
    }
    cells
}

/// Smallest root of `f` on `[lo, hi]`: grid scan for the first sign change,
/// then bisection. Errors if the grid sees no sign change at all.
pub fn smallest_root<F: Fn(f64) -> f64 + Copy>(
    f: F,
    lo: f64,
    hi: f64,
    grid: usize,
    tol: f64,
) -> Result<f64> {
    let cells = sign_change_cells(f, lo, hi, grid);
    match cells.first() {
        Some(&(a, b)) if a == b => Ok(a),
        Some(&(a, b)) => bisect(f, a, b, tol, 200),
        None => Err(Error::NoSignChange { lo, hi }),
    }
}

/// Golden-section minimisation of a unimodal `f` on `[lo, hi]`.
///
/// Returns `(argmin, min)` after shrinking the bracket below `tol` (or 200
/// iterations, whichever comes first).
pub fn golden_min<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if b - a < tol {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute tolerance
/// `tol` (recursion depth capped at 60).
pub fn adaptive_simpson<F: Fn(f64) -> f64 + Copy>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    fn recurse<F: Fn(f64) -> f64 + Copy>(
        f: F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = simpson(fa, flm, fm, a, m);
        let right = simpson(fm, frm, fb, m, b);
        let delta = left + right - whole;
        if depth == 0 || libm::fabs(delta) <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
                + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = simpson(fa, fm, fb, a, b);
    recurse(f, a, b, fa, fm, fb, whole, tol, 60)
}

/// 95% Wilson score interval for `successes` out of `trials`.
///
/// Returns `(p_hat, lo, hi)`; degenerate inputs (`trials == 0`) yield the
/// vacuous interval `(0, 0, 1)`.
pub fn wilson_interval(successes: u64, trials: u64) -> (f64, f64, f64) {
    if trials == 0 {
        return (0.0, 0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = Z_95 * Z_95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z_95 * libm::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    // center - half is 0 (resp. 1) in exact arithmetic at the extremes
    let lo = if successes == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if successes == trials { 1.0 } else { (center + half).min(1.0) };
    (p, lo, hi)
}

/// Compensated (Kahan) sum of an iterator of `f64`s.
pub fn kahan_sum<I: IntoIterator<Item = f64>>(xs: I) -> f64 {
    let mut sum = 0.0;
    let mut c = 0.0;
    for x in xs {
        let y = x - c;
        let t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    sum
}
