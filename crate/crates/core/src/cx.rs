//! Small complex helpers that `num_complex` does not provide.

use num_complex::Complex64;

pub const I: Complex64 = Complex64::new(0.0, 1.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn r(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// `exp(w) - 1` without cancellation for small `|w|`.
pub fn expm1(w: Complex64) -> Complex64 {
    let a = w.re.exp_m1();
    let half = (0.5 * w.im).sin();
    let re = a * w.im.cos() - 2.0 * half * half;
    let im = w.re.exp() * w.im.sin();
    Complex64::new(re, im)
}

/// Relative distance `|a - b| / max(|a|, |b|, floor)`.
pub fn rel_diff(a: Complex64, b: Complex64) -> f64 {
    let scale = a.norm().max(b.norm()).max(1e-300);
    (a - b).norm() / scale
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expm1_matches_naive_for_large_arguments() {
        let w = c(0.7, -1.3);
        assert!((expm1(w) - (w.exp() - 1.0)).norm() < 1e-15);
    }

    #[test]
    fn expm1_is_accurate_near_zero() {
        let w = c(1e-12, 2e-12);
        let got = expm1(w);
        assert!((got - w).norm() < 1e-23);
    }
}
