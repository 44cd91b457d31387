//! Central finite-difference stencils.

/// Fourth-order first derivative.
pub fn d1<F: FnMut(f64) -> f64>(mut f: F, x: f64, h: f64) -> f64 {
    (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h)
}

/// Second-order first derivative.
pub fn d1_central<F: FnMut(f64) -> f64>(mut f: F, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// Fourth-order first derivative of a vector-valued map.
pub fn d1_vec<const N: usize, F: FnMut(f64) -> [f64; N]>(mut f: F, x: f64, h: f64) -> [f64; N] {
    let a = f(x - 2.0 * h);
    let b = f(x - h);
    let c = f(x + h);
    let d = f(x + 2.0 * h);
    core::array::from_fn(|i| (a[i] - 8.0 * b[i] + 8.0 * c[i] - d[i]) / (12.0 * h))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sine() {
        let d = d1(libm::sin, 0.4, 1e-3);
        assert!((d - libm::cos(0.4)).abs() < 1e-12);
        let d = d1_central(libm::sin, 0.4, 1e-5);
        assert!((d - libm::cos(0.4)).abs() < 1e-9);
    }
}
