//! Thin float helpers over `libm` so the crate stays `no_std`.

pub(crate) use libm::{atan, atan2, cos, exp, fabs as abs, log, sin, sqrt};

pub(crate) const PI: f64 = core::f64::consts::PI;

pub(crate) fn acos(x: f64) -> f64 {
    libm::acos(x.clamp(-1.0, 1.0))
}

pub(crate) fn hypot(x: f64, y: f64) -> f64 {
    libm::hypot(x, y)
}

pub(crate) fn sq(x: f64) -> f64 {
    x * x
}

pub(crate) fn signum_pos(t: f64) -> f64 {
    if t < 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// `atan(x)/x`, continuous through 0.
pub(crate) fn atanc(x: f64) -> f64 {
    if abs(x) < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 3.0 + x2 * x2 / 5.0
    } else {
        atan(x) / x
    }
}

pub(crate) fn asin_clamped(x: f64) -> f64 {
    libm::asin(x.clamp(-1.0, 1.0))
}
