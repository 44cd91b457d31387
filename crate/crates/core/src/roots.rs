//! Bracketed scalar root finding.

use crate::error::{Error, Result};
use crate::math::abs;

/// Brent's method on a sign-changing bracket `[a, b]`.
///
/// Stops when the bracket is narrower than `xtol` (plus a few ulps of the
/// root) or `f` is exactly zero.
pub fn brent<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, xtol: f64) -> Result<f64> {
    let (mut a, mut b) = (a, b);
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if (fa > 0.0) == (fb > 0.0) || fa.is_nan() || fb.is_nan() {
        return Err(Error::Numeric {
            what: "root not bracketed",
            estimate: if abs(fa) < abs(fb) { a } else { b },
        });
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
        if (fb > 0.0) == (fc > 0.0) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if abs(fc) < abs(fb) {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * abs(b) + 0.5 * xtol;
        let m = 0.5 * (c - b);
        if abs(m) <= tol || fb == 0.0 {
            return Ok(b);
        }
        if abs(e) >= tol && abs(fa) > abs(fb) {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - abs(tol * q)).min(abs(e * q)) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if abs(d) > tol {
            d
        } else if m > 0.0 {
            tol
        } else {
            -tol
        };
        fb = f(b);
    }
    Err(Error::Numeric {
        what: "brent iteration limit",
        estimate: b,
    })
}

/// Grow `hi` geometrically from `lo` until `f(hi)` has the sign opposite to
/// `f(lo)`. Returns the bracket.
pub fn expand_upper<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64) -> Result<(f64, f64)> {
    let f_lo = f(lo);
    let mut lo = lo;
    let mut hi = hi;
    for _ in 0..200 {
        let f_hi = f(hi);
        if (f_hi > 0.0) != (f_lo > 0.0) || f_hi == 0.0 {
            return Ok((lo, hi));
        }
        lo = hi;
        hi *= 2.0;
    }
    Err(Error::Numeric {
        what: "bracket expansion failed",
        estimate: hi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_simple_roots() {
        let r = brent(|x| x * x - 2.0, 0.0, 2.0, 1e-15).unwrap();
        assert!((r - core::f64::consts::SQRT_2).abs() < 1e-15);
        let r = brent(|x| libm::cos(x) - x, 0.0, 1.0, 1e-15).unwrap();
        assert!((libm::cos(r) - r).abs() < 1e-15);
    }

    #[test]
    fn unbracketed_fails() {
        assert!(brent(|x| x * x + 1.0, -1.0, 1.0, 1e-12).is_err());
    }

    #[test]
    fn expansion() {
        let (lo, hi) = expand_upper(|x| x - 1000.0, 1.0, 2.0).unwrap();
        assert!(lo < 1000.0 && hi >= 1000.0);
    }
}
