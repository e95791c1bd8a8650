mod common;

use common::{brute_force_direct, tau};
use fibdiff_core::cps::{enumerate, fibonacci_points, max_gap, nearest_nonzero};
use fibdiff_core::{LatticePoint, ModelSetQuery, Side, Window};
use proptest::prelude::*;

fn coords(q: &ModelSetQuery) -> Vec<(i64, i64)> {
    enumerate(q)
        .unwrap()
        .points
        .iter()
        .map(|p| match p.point {
            LatticePoint::Direct(x) => (x.m, x.n),
            LatticePoint::Dual(_) => unreachable!(),
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fibonacci_matches_brute_force(lo in -60.0f64..60.0, len in 0.0f64..40.0) {
        let q = ModelSetQuery::fibonacci(lo, lo + len).unwrap();
        let t = tau();
        prop_assert_eq!(coords(&q), brute_force_direct(120, -1.0, t - 1.0, lo, lo + len));
    }

    #[test]
    fn arbitrary_window_matches_brute_force(c in -2.0f64..2.0, w in 0.05f64..2.0, lo in -30.0f64..30.0) {
        let window = Window::new(c - w, c + w, true, false).unwrap();
        let q = ModelSetQuery::new(Side::Direct, window, Window::closed(lo, lo + 25.0).unwrap());
        prop_assert_eq!(coords(&q), brute_force_direct(200, c - w, c + w, lo, lo + 25.0));
    }

    /// Translating the range by a lattice point with x⋆ = 0 is impossible, so
    /// instead compare enumeration over a union with the two halves.
    #[test]
    fn enumeration_is_additive(lo in -100.0f64..100.0, a in 0.0f64..30.0, b in 0.0f64..30.0) {
        let whole = fibonacci_points(lo, lo + a + b).unwrap().len();
        let left = enumerate(&ModelSetQuery::new(
            Side::Direct, Window::fibonacci(), Window::new(lo, lo + a, true, false).unwrap(),
        )).unwrap().len();
        let right = fibonacci_points(lo + a, lo + a + b).unwrap().len();
        prop_assert_eq!(whole, left + right);
    }
}

#[test]
fn fibonacci_gaps_are_one_and_tau() {
    let pts = fibonacci_points(-500.0, 500.0).unwrap();
    let t = tau();
    for w in pts.windows(2) {
        let g = w[1].position - w[0].position;
        assert!((g - 1.0).abs() < 1e-9 || (g - t).abs() < 1e-9, "{g}");
    }
    let density = pts.len() as f64 / 1000.0;
    assert!((density - t / 5f64.sqrt()).abs() < 3e-3, "{density}");
}

#[test]
fn fibonacci_examples() {
    let pts = fibonacci_points(-2.0, 2.0).unwrap();
    let xs: Vec<f64> = pts.iter().map(|p| p.position).collect();
    assert_eq!(xs.len(), 3);
    assert!((xs[0] + 1.0).abs() < 1e-15 && xs[1] == 0.0 && (xs[2] - tau()).abs() < 1e-15);
    assert!(fibonacci_points(0.1, 0.5).unwrap().is_empty());
}

#[test]
fn dual_model_set_gap() {
    let q =
        ModelSetQuery::new(Side::Dual, Window::closed(-0.1, 0.1).unwrap(), Window::closed(-1000.0, 1000.0).unwrap());
    let e = enumerate(&q).unwrap();
    let gap = max_gap(&e.positions(), -1000.0, 1000.0).unwrap();
    assert!(gap <= 8.472, "{gap}");
    for p in &e.points {
        assert!(p.star.abs() <= 0.1);
    }
}

#[test]
fn nearest_nonzero_is_sorted_and_nonzero() {
    let w = Window::closed(-1e-4, 1e-4).unwrap();
    let pts = nearest_nonzero(Side::Dual, w, 12).unwrap();
    assert_eq!(pts.len(), 12);
    for p in &pts {
        assert!(p.position != 0.0 && p.star.abs() <= 1e-4);
    }
    for pair in pts.windows(2) {
        assert!(pair[0].position.abs() <= pair[1].position.abs());
    }
}
