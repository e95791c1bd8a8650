use fibdiff_core::cps::{b_epsilon, s_chi, EpsDualParams};
use fibdiff_core::diffraction::{
    amplitudes, bragg_intensity_amplitude, bragg_intensity_autocorr, figure1_data, smoothed_periodogram,
    verify_bragg_lower_bounds, BraggOptions, Frequency,
};
use fibdiff_core::measures::autocorrelation_with_lag;
use fibdiff_core::subset::SubsetSpec;
use fibdiff_core::{Atom, WeightedComb, Window, TAU};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const N: f64 = 1e4;

fn fib_density() -> f64 {
    ((1.0 + 5f64.sqrt()) / 2.0) / 5f64.sqrt()
}

fn realize(spec: &str) -> WeightedComb {
    spec.parse::<SubsetSpec>().unwrap().realize(N).unwrap()
}

#[test]
fn full_fibonacci_density_and_central_peak() {
    let fib = realize("full");
    let ac = autocorrelation_with_lag(&fib, N, N / 2.0).unwrap();
    assert!((ac.density - 0.72360).abs() < 0.01, "{}", ac.density);
    let i0 = bragg_intensity_autocorr(&ac, 0.0).intensity;
    assert!((i0 - fib_density().powi(2)).abs() < 0.01, "{i0}");
    let third = bragg_intensity_amplitude(&fib, N, 1.0 / 3.0).unwrap().intensity;
    assert!(third <= 0.02, "{third}");
}

#[test]
fn bernoulli_density_within_three_sigma() {
    let p = 0.5;
    let fib = realize("full").len() as f64;
    let thin = realize("bernoulli:p=0.5:seed=2024");
    let ac = autocorrelation_with_lag(&thin, N, 1.0).unwrap();
    let sigma = (fib * p * (1.0 - p)).sqrt() / (2.0 * N);
    assert!((ac.density - p * fib_density()).abs() < 3.0 * sigma + fib_density() * 1e-3, "{}", ac.density);
}

#[test]
fn estimators_agree_on_random_frequencies() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let ks: Vec<f64> = (0..50).map(|_| rng.random_range(-5.0..5.0)).collect();
    for spec in ["full", "bernoulli:p=0.5:seed=1", "bernoulli:p=0.3:seed=2"] {
        let comb = realize(spec);
        let ac = autocorrelation_with_lag(&comb, N, N / 2.0).unwrap();
        for &k in &ks {
            let a = bragg_intensity_autocorr(&ac, k).intensity;
            let b = bragg_intensity_amplitude(&comb, N, k).unwrap().intensity;
            assert!((a - b).abs() <= 0.02, "{spec} k={k}: {a} vs {b}");
        }
    }
}

#[test]
fn amplitudes_match_direct_sum() {
    let comb = realize("bernoulli:p=0.4:seed=9");
    let peaks = b_epsilon(&EpsDualParams::fibonacci(0.9).unwrap(), Window::closed(-3.0, 3.0).unwrap()).unwrap();
    let mut ks: Vec<Frequency> = peaks
        .points
        .iter()
        .map(|p| match p.point {
            fibdiff_core::LatticePoint::Dual(d) => Frequency::from(d),
            _ => unreachable!(),
        })
        .collect();
    ks.push(Frequency::from(0.123));
    let fast = amplitudes(&comb, &ks);
    for (k, f) in ks.iter().zip(fast) {
        let slow: Complex64 = comb
            .atoms()
            .iter()
            .map(|a| a.weight * Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * k.k * a.position))
            .sum();
        assert!((f - slow).norm() < 1e-6 * comb.len() as f64, "k={}: {f} vs {slow}", k.k);
    }
}

#[test]
fn lower_bounds_hold_for_random_subsets() {
    let floor = 0.2 * fib_density();
    for spec in
        ["bernoulli:p=0.3:seed=11", "bernoulli:p=0.6:seed=12", "bernoulli:p=0.9:seed=13", "stride:k=2", "stride:k=3"]
    {
        let comb = realize(spec);
        let v =
            verify_bragg_lower_bounds(&comb, N, 0.9, Window::closed(-20.0, 20.0).unwrap(), &BraggOptions::default())
                .unwrap();
        assert!(v.density >= floor, "{spec}: density {}", v.density);
        assert!(!v.reports.is_empty());
        for r in &v.reports {
            let tol = 0.05 * v.intensity_zero;
            assert!(r.measured >= r.bound - tol, "{spec} k={}: {} < {}", r.k, r.measured, r.bound);
        }
    }
}

#[test]
fn bound_chain_is_ordered() {
    let top = 1.0 / (2.0 * std::f64::consts::PI * TAU);
    for i in 0..=1000 {
        let ks = top * i as f64 / 1000.0;
        assert!(s_chi(ks, TAU) <= 2.0 * std::f64::consts::PI * ks * TAU + 1e-12, "{ks}");
    }
}

#[test]
fn integer_lattice_peaks_are_equal() {
    let n = 37.0;
    let comb = WeightedComb::new((-37..=37).map(|m| Atom::new(m as f64, Complex64::new(1.0, 0.0))).collect());
    let ac = autocorrelation_with_lag(&comb, n, n).unwrap();
    let i0 = bragg_intensity_amplitude(&comb, n, 0.0).unwrap().intensity;
    let a0 = bragg_intensity_autocorr(&ac, 0.0).intensity;
    for m in [-3.0, 1.0, 2.0, 5.0] {
        assert!((bragg_intensity_amplitude(&comb, n, m).unwrap().intensity - i0).abs() <= 1e-12 * i0);
        assert!((bragg_intensity_autocorr(&ac, m).intensity - a0).abs() <= 1e-12 * a0);
    }
}

#[test]
fn periodogram_background() {
    let ks = [0.3, 1.3, 2.7];
    let full = smoothed_periodogram(&realize("full"), N, &ks, 0.05).unwrap();
    for p in &full {
        assert!(p.density <= 0.02, "full k={}: {}", p.k, p.density);
    }
    let same = smoothed_periodogram(&realize("bernoulli:p=1:seed=0"), N, &ks, 0.05).unwrap();
    assert_eq!(same, full);
    let p = 0.5;
    let thin = smoothed_periodogram(&realize("bernoulli:p=0.5:seed=77"), N, &ks, 0.05).unwrap();
    let expect = p * (1.0 - p) * fib_density();
    for q in &thin {
        assert!((q.density - expect).abs() <= 0.2 * expect, "k={}: {} vs {expect}", q.k, q.density);
    }
}

#[test]
fn figure1_fractions() {
    let rows = figure1_data(&[0.5, 0.9], Window::closed(-500.0, 500.0).unwrap()).unwrap();
    let zero = rows.iter().find(|r| r.k == 0.0).unwrap();
    assert_eq!(zero.fraction, 1.0);
    for r in &rows {
        assert!(r.fraction > 0.0 && r.fraction <= 1.0);
    }
    for w in rows.windows(2) {
        assert!(w[1].k - w[0].k <= 8.62);
    }
}
