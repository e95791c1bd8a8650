//! Small floating-point kernels shared across modules.

use num_complex::Complex64;
use std::f64::consts::PI;

/// Error-free sum: `a + b = s + e` exactly.
#[inline]
pub fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

/// Error-free product via fused multiply-add: `a * b = p + e` exactly.
#[inline]
pub fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// `sin(x)/x` with `sinc(0) = 1`.
#[inline]
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 * (1.0 - x2 / 20.0)
    } else {
        x.sin() / x
    }
}

/// Derivative of [`sinc`].
#[inline]
pub fn sinc_prime(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        -x / 3.0 * (1.0 - x2 / 10.0)
    } else {
        (x * x.cos() - x.sin()) / (x * x)
    }
}

/// `exp(2 pi i x)`, reducing `x` modulo 1 first.
#[inline]
pub fn cis_turns(x: f64) -> Complex64 {
    let r = x - x.round();
    let (s, c) = (2.0 * PI * r).sin_cos();
    Complex64::new(c, s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sinc_branches_meet() {
        for &x in &[0.0, 5e-5, 9.999e-5, 1.0001e-4, 0.3, -2.0] {
            let direct = if x == 0.0 { 1.0 } else { f64::sin(x) / x };
            assert!((sinc(x) - direct).abs() < 1e-15, "{x}");
        }
        assert_eq!(sinc_prime(0.0), 0.0);
        let h = 1e-6;
        for &x in &[0.5, 1.7, -3.2] {
            let fd = (sinc(x + h) - sinc(x - h)) / (2.0 * h);
            assert!((fd - sinc_prime(x)).abs() < 1e-9);
        }
    }

    #[test]
    fn two_prod_is_exact() {
        let (p, e) = two_prod(1.0 + f64::EPSILON, 1.0 - f64::EPSILON);
        assert_eq!(p, 1.0);
        assert_eq!(e, -f64::EPSILON * f64::EPSILON);
    }
}
