//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64;

/// Gauss-Legendre nodes and weights on [−1, 1] by Newton iteration on P_n.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 1..=n {
        let mut x = (PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// `∫_a^b f` by composite Gauss-Legendre over `panels` equal panels.
pub fn integrate<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, panels: usize, rule: &[(f64, f64)]) -> Complex64 {
    let h = (b - a) / panels as f64;
    let mut s = Complex64::new(0.0, 0.0);
    for p in 0..panels {
        let lo = a + p as f64 * h;
        for &(x, w) in rule {
            s += f(lo + 0.5 * h * (x + 1.0)) * (0.5 * h * w);
        }
    }
    s
}

/// Golden ratio and conjugate from their defining equations, not the crate's constants.
pub fn tau() -> f64 {
    (1.0 + 5f64.sqrt()) / 2.0
}

pub fn tau_conj() -> f64 {
    (1.0 - 5f64.sqrt()) / 2.0
}

/// All `m + nτ` with `|m|, |n| ≤ bound`, star in `[wlo, whi)` and value in `[lo, hi]`.
pub fn brute_force_direct(bound: i64, wlo: f64, whi: f64, lo: f64, hi: f64) -> Vec<(i64, i64)> {
    let (t, tc) = (tau(), tau_conj());
    let mut out = Vec::new();
    for m in -bound..=bound {
        for n in -bound..=bound {
            let x = m as f64 + n as f64 * t;
            let s = m as f64 + n as f64 * tc;
            if s >= wlo && s < whi && x >= lo && x <= hi {
                out.push((m, n));
            }
        }
    }
    out.sort_by(|a, b| (a.0 as f64 + a.1 as f64 * t).total_cmp(&(b.0 as f64 + b.1 as f64 * t)));
    out
}

/// Dual points from lattice coordinates `(M, N)`: value and star of
/// `(N − M + Mτ)/√5`, computed through the basis `(1, τ)` scaled by `1/√5`.
pub fn dual_value_star(m: i64, n: i64) -> (f64, f64) {
    let s5 = 5f64.sqrt();
    let u = (n - m) as f64 + m as f64 * tau();
    let us = (n - m) as f64 + m as f64 * tau_conj();
    (u / s5, -us / s5)
}
