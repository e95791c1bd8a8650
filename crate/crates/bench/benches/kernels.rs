use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fibdiff_core::cps::{enumerate, fibonacci_points};
use fibdiff_core::diffraction::{amplitudes, Frequency};
use fibdiff_core::measures::{autocorrelation_with_lag, window_norm};
use fibdiff_core::pingpong::{omega_hat_comb, PiecewisePoly};
use fibdiff_core::{LatticePoint, ModelSetQuery, Side, Surd, WeightedComb, Window};

fn bench_enumerate(c: &mut Criterion) {
    let mut g = c.benchmark_group("enumerate");
    for n in [1e3, 1e4, 1e5] {
        let q = ModelSetQuery::fibonacci(-n, n).unwrap();
        g.bench_with_input(BenchmarkId::new("fib", n), &q, |b, q| b.iter(|| enumerate(black_box(q)).unwrap()));
    }
    let dual =
        ModelSetQuery::new(Side::Dual, Window::closed(-50.0, 50.0).unwrap(), Window::closed(-100.0, 101.0).unwrap());
    g.bench_function("dual_strip_Y50", |b| b.iter(|| enumerate(black_box(&dual)).unwrap()));
    g.finish();
}

fn bench_autocorrelation(c: &mut Criterion) {
    let mut g = c.benchmark_group("autocorrelation");
    g.sample_size(10);
    for n in [1e3, 1e4] {
        let comb = WeightedComb::from_points(&fibonacci_points(-n, n).unwrap());
        g.bench_with_input(BenchmarkId::new("lag_n/2", n), &comb, |b, comb| {
            b.iter(|| autocorrelation_with_lag(black_box(comb), n, n / 2.0).unwrap())
        });
    }
    g.finish();
}

fn bench_amplitudes(c: &mut Criterion) {
    let n = 1e4;
    let comb = WeightedComb::from_points(&fibonacci_points(-n, n).unwrap());
    let q = ModelSetQuery::new(Side::Dual, Window::closed(-1.0, 1.0).unwrap(), Window::closed(-5.0, 5.0).unwrap());
    let tagged: Vec<Frequency> = enumerate(&q)
        .unwrap()
        .points
        .iter()
        .filter_map(|p| match p.point {
            LatticePoint::Dual(d) => Some(Frequency::from(d)),
            _ => None,
        })
        .collect();
    let untagged: Vec<Frequency> = tagged.iter().map(|k| Frequency::from(k.k)).collect();
    let mut g = c.benchmark_group("amplitudes");
    g.bench_function("tagged", |b| b.iter(|| amplitudes(black_box(&comb), black_box(&tagged))));
    g.bench_function("untagged", |b| b.iter(|| amplitudes(black_box(&comb), black_box(&untagged))));
    g.finish();
}

fn bench_window_norm(c: &mut Criterion) {
    let (comb, _) = omega_hat_comb(50.0, -100.0, 101.0, 2.0).unwrap();
    c.bench_function("window_norm/omega_Y50", |b| b.iter(|| window_norm(black_box(&comb), -0.5, 1.5).unwrap()));
}

fn bench_box_convolve(c: &mut Criterion) {
    let third = Surd::rational(1, 3).unwrap();
    let r = Surd::tau() + Surd::ONE;
    let base = PiecewisePoly::indicator(-r, r, Surd::ONE).unwrap();
    c.bench_function("box_convolve/h", |b| {
        b.iter(|| {
            let mut p = base.clone();
            for _ in 0..3 {
                p = p.box_convolve(black_box(third)).unwrap();
            }
            p
        })
    });
}

criterion_group!(
    benches,
    bench_enumerate,
    bench_autocorrelation,
    bench_amplitudes,
    bench_window_norm,
    bench_box_convolve
);
criterion_main!(benches);
