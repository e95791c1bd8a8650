//! Bragg intensities of finite weighted subsets of Fib, the lower bounds
//! they must satisfy, and a smoothed periodogram for the continuous part.

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cps::{self, s_chi, EpsDualParams, Window};
use crate::error::{Error, Result};
use crate::measures::{autocorrelation_with_lag, Atom, AutocorrEstimate, WeightedComb};
use crate::numerics::cis_turns;
use crate::quadfield::{DualPoint, LatticePoint, SQRT5, TAU};

/// Steps of the phase recurrence between exact re-evaluations.
const RESEED: usize = 128;

/// A frequency, optionally tagged with its exact dual-lattice point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Frequency {
    pub k: f64,
    pub tag: Option<DualPoint>,
}

impl Frequency {
    pub fn star(&self) -> Option<f64> {
        self.tag.map(|t| t.star())
    }
}

impl From<f64> for Frequency {
    fn from(k: f64) -> Self {
        Frequency { k, tag: None }
    }
}

impl From<DualPoint> for Frequency {
    fn from(p: DualPoint) -> Self {
        Frequency { k: p.value(), tag: Some(p) }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BraggMethod {
    AutocorrSum,
    AmplitudeSq,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BraggEstimate {
    pub k: Frequency,
    pub intensity: f64,
    /// Imaginary part of the autocorrelation sum; zero for the amplitude method.
    pub imag_residual: f64,
    pub n: f64,
    pub method: BraggMethod,
}

/// `e^{−2πikx}`, exact in phase when `k` is dual-tagged and `x` direct-tagged,
/// through `kx + k⋆x⋆ ∈ ℤ`.
#[inline]
fn character(k: &Frequency, kstar: Option<f64>, a: &Atom) -> Complex64 {
    match (kstar, a.tag) {
        (Some(ks), Some(LatticePoint::Direct(q))) => cis_turns(ks * q.embed_star()),
        _ => cis_turns(-k.k * a.position),
    }
}

/// Bragg intensity from the autocorrelation:
/// `(1/2m) Σ_{|z|≤m} e^{−2πikz} η̂_n(z) · 2n/(2n − |z|)`, with `m` the lag
/// radius of the estimate. The last factor undoes the shrinking overlap of
/// `A_n` with its translate by `z`.
pub fn bragg_intensity_autocorr(ac: &AutocorrEstimate, k: impl Into<Frequency>) -> BraggEstimate {
    let k = k.into();
    let kstar = k.star();
    let m = ac.lag_radius.min(2.0 * ac.n);
    let two_n = 2.0 * ac.n;
    let mut sum = Complex64::new(0.0, 0.0);
    for a in ac.comb.atoms() {
        let z = a.position.abs();
        if z > m + 1e-12 || z >= two_n {
            continue;
        }
        sum += character(&k, kstar, a) * a.weight * (two_n / (two_n - z));
    }
    let scale = if m > 0.0 { 1.0 / (2.0 * m) } else { 1.0 };
    BraggEstimate {
        k,
        intensity: sum.re * scale,
        imag_residual: sum.im * scale,
        n: ac.n,
        method: BraggMethod::AutocorrSum,
    }
}

fn check_inside(comb: &WeightedComb, n: f64) -> Result<()> {
    let outside = comb.atoms().iter().filter(|a| a.position.abs() > n).count();
    if outside > 0 {
        return Err(Error::OutsideWindow { count: outside, n });
    }
    Ok(())
}

/// Bragg intensity from the amplitude: `|(1/2n) Σ c_x e^{−2πikx}|²`.
pub fn bragg_intensity_amplitude(comb: &WeightedComb, n: f64, k: impl Into<Frequency>) -> Result<BraggEstimate> {
    let k = k.into();
    Ok(bragg_intensities_amplitude(comb, n, &[k])?[0])
}

/// Batched [`bragg_intensity_amplitude`].
pub fn bragg_intensities_amplitude(comb: &WeightedComb, n: f64, ks: &[Frequency]) -> Result<Vec<BraggEstimate>> {
    check_inside(comb, n)?;
    let amps = amplitudes(comb, ks);
    let s = 1.0 / (2.0 * n);
    Ok(ks
        .iter()
        .zip(amps)
        .map(|(&k, f)| BraggEstimate {
            k,
            intensity: (f * s).norm_sqr(),
            imag_residual: 0.0,
            n,
            method: BraggMethod::AmplitudeSq,
        })
        .collect())
}

/// Unnormalized Fourier sums `Σ c_x e^{−2πikx}` for every `k`.
///
/// Dual-tagged frequencies against a direct-tagged comb are evaluated in
/// internal space, grouped by the first lattice coordinate so that the phase
/// advances by a fixed rotation along each group.
pub fn amplitudes(comb: &WeightedComb, ks: &[Frequency]) -> Vec<Complex64> {
    let atoms = comb.atoms();
    let mut out = vec![Complex64::new(0.0, 0.0); ks.len()];
    if atoms.is_empty() || ks.is_empty() {
        return out;
    }
    let tagged: Vec<usize> =
        if comb.all_direct() { (0..ks.len()).filter(|&i| ks[i].tag.is_some()).collect() } else { Vec::new() };
    let mut is_tagged = vec![false; ks.len()];
    for &i in &tagged {
        is_tagged[i] = true;
    }
    if !tagged.is_empty() {
        let pts: Vec<DualPoint> = tagged.iter().map(|&i| ks[i].tag.unwrap()).collect();
        let vals = amplitudes_dual_grouped(atoms, &pts);
        for (&i, v) in tagged.iter().zip(vals) {
            out[i] = v;
        }
    }
    let rest: Vec<usize> = (0..ks.len()).filter(|&i| !is_tagged[i]).collect();
    let vals: Vec<Complex64> = rest
        .par_iter()
        .map(|&i| {
            let k = ks[i];
            let kstar = if comb.all_direct() { k.star() } else { None };
            atoms.iter().map(|a| a.weight * character(&k, kstar, a)).sum()
        })
        .collect();
    for (&i, v) in rest.iter().zip(vals) {
        out[i] = v;
    }
    out
}

fn amplitudes_dual_grouped(atoms: &[Atom], ks: &[DualPoint]) -> Vec<Complex64> {
    let stars: Vec<f64> = atoms.iter().map(|a| a.tag.unwrap().star()).collect();
    let mut order: Vec<usize> = (0..ks.len()).collect();
    order.sort_by_key(|&i| ks[i].lattice_coords());
    let mut groups: Vec<&[usize]> = Vec::new();
    let mut start = 0;
    for i in 1..=order.len() {
        if i == order.len() || ks[order[i]].lattice_coords().0 != ks[order[start]].lattice_coords().0 {
            groups.push(&order[start..i]);
            start = i;
        }
    }
    let results: Vec<Vec<Complex64>> = groups
        .par_iter()
        .map(|g| {
            // k⋆ = (Mτ − N)/√5, so each unit step in N rotates by e^{−2πi x⋆/√5}.
            let kstars: Vec<f64> = g.iter().map(|&i| ks[i].star()).collect();
            let ns: Vec<i64> = g.iter().map(|&i| ks[i].lattice_coords().1).collect();
            let mut acc = vec![Complex64::new(0.0, 0.0); g.len()];
            for (a, &xs) in atoms.iter().zip(&stars) {
                let step = cis_turns(-xs / SQRT5);
                let mut z = cis_turns(kstars[0] * xs);
                let mut since = 0usize;
                for t in 0..g.len() {
                    if t > 0 {
                        let gap = ns[t] - ns[t - 1];
                        since += gap as usize;
                        if gap > 4 || since >= RESEED {
                            z = cis_turns(kstars[t] * xs);
                            since = 0;
                        } else {
                            for _ in 0..gap {
                                z *= step;
                            }
                        }
                    }
                    acc[t] += a.weight * z;
                }
            }
            acc
        })
        .collect();
    let mut out = vec![Complex64::new(0.0, 0.0); ks.len()];
    for (g, vals) in groups.iter().zip(results) {
        for (&i, v) in g.iter().zip(vals) {
            out[i] = v;
        }
    }
    out
}

/// `Σ c_x e^{−2πi(k0 + j·dk)x}` for `j = 0..count`, by phase rotation.
pub fn amplitudes_uniform(comb: &WeightedComb, k0: f64, dk: f64, count: usize) -> Vec<Complex64> {
    let atoms = comb.atoms();
    let chunks: Vec<usize> = (0..count).step_by(RESEED).collect();
    let parts: Vec<Vec<Complex64>> = chunks
        .par_iter()
        .map(|&j0| {
            let len = RESEED.min(count - j0);
            let mut acc = vec![Complex64::new(0.0, 0.0); len];
            let k_start = k0 + j0 as f64 * dk;
            for a in atoms {
                let step = cis_turns(-dk * a.position);
                let mut z = a.weight * cis_turns(-k_start * a.position);
                for v in acc.iter_mut() {
                    *v += z;
                    z *= step;
                }
            }
            acc
        })
        .collect();
    parts.into_iter().flatten().collect()
}

/// Options for [`verify_bragg_lower_bounds`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BraggOptions {
    /// Lag radius of the autocorrelation as a fraction of `n`.
    pub lag_fraction: f64,
    /// Absolute tolerance; `None` selects `0.05·I·sqrt(10⁴/n)`.
    pub finite_size_tol: Option<f64>,
    /// Allowed gap between the two estimators.
    pub agreement_tol: f64,
}

impl Default for BraggOptions {
    fn default() -> Self {
        BraggOptions { lag_fraction: 0.5, finite_size_tol: None, agreement_tol: 0.02 }
    }
}

/// Default finite-size tolerance `0.05·I` at `n = 10⁴`, scaling as `n^{−1/2}`.
pub fn default_finite_size_tol(intensity: f64, n: f64) -> f64 {
    0.05 * intensity * (1e4 / n).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundReport {
    pub k: f64,
    pub k_star: f64,
    pub tag: DualPoint,
    /// `(1 − 2π|k⋆|τ)·I`.
    pub bound: f64,
    /// `(1 − s(χ))·I`.
    pub bound_s: f64,
    /// `(1 − ε)·I`.
    pub bound_eps: f64,
    /// Autocorrelation estimate.
    pub measured: f64,
    /// Amplitude estimate.
    pub measured_amplitude: f64,
    pub imag_residual: f64,
    pub finite_size_tol: f64,
    /// `measured ≥ bound − finite_size_tol`.
    pub pass: bool,
    /// `measured ≥ bound_s − finite_size_tol`.
    pub pass_s: bool,
    /// The two estimators agree within the agreement tolerance.
    pub agree: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BraggVerification {
    pub n: f64,
    pub epsilon: f64,
    /// `I = γ̂({0})` from the autocorrelation estimator.
    pub intensity_zero: f64,
    pub intensity_zero_amplitude: f64,
    /// Estimated `γ({0})`.
    pub density: f64,
    /// True when `I ≤ 0`: the lower bounds say nothing.
    pub vacuous: bool,
    pub finite_size_tol: f64,
    pub agreement_tol: f64,
    pub reports: Vec<LowerBoundReport>,
}

impl BraggVerification {
    pub fn all_pass(&self) -> bool {
        self.vacuous || self.reports.iter().all(|r| r.pass && r.agree)
    }

    pub fn failures(&self) -> Vec<&LowerBoundReport> {
        if self.vacuous {
            return Vec::new();
        }
        self.reports.iter().filter(|r| !(r.pass && r.agree)).collect()
    }
}

/// Checks `γ̂({k}) ≥ (1 − 2π|k⋆|τ)·I − tol` for every `k ∈ B_ε ∩ range`.
pub fn verify_bragg_lower_bounds(
    comb: &WeightedComb,
    n: f64,
    epsilon: f64,
    range: Window,
    opts: &BraggOptions,
) -> Result<BraggVerification> {
    let params = EpsDualParams::fibonacci(epsilon)?;
    check_inside(comb, n)?;
    let ac = autocorrelation_with_lag(comb, n, opts.lag_fraction * n)?;
    let i0 = bragg_intensity_autocorr(&ac, DualPoint::ZERO).intensity;
    let i0_amp = bragg_intensity_amplitude(comb, n, DualPoint::ZERO)?.intensity;
    let tol = opts.finite_size_tol.unwrap_or_else(|| default_finite_size_tol(i0.max(0.0), n));
    let mut out = BraggVerification {
        n,
        epsilon,
        intensity_zero: i0,
        intensity_zero_amplitude: i0_amp,
        density: ac.density,
        vacuous: !(i0 > 0.0),
        finite_size_tol: tol,
        agreement_tol: opts.agreement_tol,
        reports: Vec::new(),
    };
    if out.vacuous {
        return Ok(out);
    }
    let ks: Vec<DualPoint> = cps::b_epsilon(&params, range)?
        .points
        .iter()
        .filter_map(|p| match p.point {
            LatticePoint::Dual(d) => Some(d),
            LatticePoint::Direct(_) => None,
        })
        .collect();
    let freqs: Vec<Frequency> = ks.iter().map(|&d| d.into()).collect();
    let amps = bragg_intensities_amplitude(comb, n, &freqs)?;
    out.reports = ks
        .par_iter()
        .zip(amps.par_iter())
        .map(|(&d, amp)| {
            let est = bragg_intensity_autocorr(&ac, d);
            let ks = d.star();
            let bound = (1.0 - 2.0 * PI * ks.abs() * TAU) * i0;
            let bound_s = (1.0 - s_chi(ks, TAU)) * i0;
            LowerBoundReport {
                k: d.value(),
                k_star: ks,
                tag: d,
                bound,
                bound_s,
                bound_eps: (1.0 - epsilon) * i0,
                measured: est.intensity,
                measured_amplitude: amp.intensity,
                imag_residual: est.imag_residual,
                finite_size_tol: tol,
                pass: est.intensity >= bound - tol,
                pass_s: est.intensity >= bound_s - tol,
                agree: (est.intensity - amp.intensity).abs() <= opts.agreement_tol,
            }
        })
        .collect();
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Figure1Row {
    pub k: f64,
    pub k_star: f64,
    /// `1 − 2π|k⋆|τ`: guaranteed intensity as a fraction of `I`.
    pub fraction: f64,
    /// Smallest grid value `ε` with `k ∈ B_ε`, if any.
    pub min_epsilon: Option<f64>,
}

/// Every `k ∈ B₁ ∩ range` with its guaranteed intensity fraction.
pub fn figure1_data(eps_grid: &[f64], range: Window) -> Result<Vec<Figure1Row>> {
    let mut grid: Vec<f64> = eps_grid.iter().copied().filter(|e| *e > 0.0 && *e <= 1.0).collect();
    grid.sort_by(f64::total_cmp);
    let b1 = cps::b_epsilon_unchecked(1.0, TAU, range)?;
    Ok(b1
        .points
        .iter()
        .filter_map(|p| {
            let level = 2.0 * PI * p.star.abs() * TAU;
            let fraction = 1.0 - level;
            (fraction > 0.0).then(|| Figure1Row {
                k: p.position,
                k_star: p.star,
                fraction,
                min_epsilon: grid.iter().copied().find(|&e| level <= e),
            })
        })
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeriodogramPoint {
    pub k: f64,
    pub density: f64,
}

/// Kernel-smoothed periodogram `P(q) = |Σ c_x e^{−2πiqx}|²/(2n)` around each
/// `k`, on a grid of spacing `1/(4n)` over `[k − h, k + h]`.
///
/// The smoother is an Epanechnikov-weighted median divided by `ln 2`
/// (the median-to-mean ratio of an exponential law), which ignores the
/// sparse spikes left by Bragg peaks outside B₁.
pub fn smoothed_periodogram(
    comb: &WeightedComb,
    n: f64,
    k_grid: &[f64],
    bandwidth: f64,
) -> Result<Vec<PeriodogramPoint>> {
    if !(bandwidth > 0.0 && bandwidth.is_finite()) {
        return Err(Error::InvalidArgument(format!("bandwidth {bandwidth} must be positive")));
    }
    check_inside(comb, n)?;
    for &k in k_grid {
        let near = cps::b_epsilon_unchecked(1.0, TAU, Window::closed(k - 2.0 * bandwidth, k + 2.0 * bandwidth)?)?;
        if let Some(p) = near.points.first() {
            return Err(Error::InvalidArgument(format!(
                "k = {k} lies within 2·bandwidth of the B_1 peak at {}",
                p.position
            )));
        }
    }
    let dq = 1.0 / (4.0 * n);
    let half = (bandwidth / dq).floor() as usize;
    let count = 2 * half + 1;
    k_grid
        .iter()
        .map(|&k| {
            let amps = amplitudes_uniform(comb, k - half as f64 * dq, dq, count);
            let mut samples: Vec<(f64, f64)> = amps
                .iter()
                .enumerate()
                .map(|(j, f)| {
                    let u = (j as f64 - half as f64) / (half as f64 + 1.0);
                    (f.norm_sqr() / (2.0 * n), 1.0 - u * u)
                })
                .collect();
            samples.sort_by(|a, b| a.0.total_cmp(&b.0));
            let total: f64 = samples.iter().map(|s| s.1).sum();
            let mut acc = 0.0;
            let mut med = samples.last().map(|s| s.0).unwrap_or(0.0);
            for (v, w) in &samples {
                acc += w;
                if acc >= 0.5 * total {
                    med = *v;
                    break;
                }
            }
            Ok(PeriodogramPoint { k, density: med / LN_2 })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{autocorrelation, Atom};
    use crate::quadfield::QuadInt;

    #[test]
    fn single_atom_amplitude() {
        let comb = WeightedComb::new(vec![Atom::new(0.0, Complex64::new(1.0, 0.0))]);
        let e = bragg_intensity_amplitude(&comb, 1.0, 0.3).unwrap();
        assert!((e.intensity - 0.25).abs() < 1e-15);
        assert_eq!(e.method, BraggMethod::AmplitudeSq);
    }

    #[test]
    fn autocorr_at_zero_is_weighted_sum() {
        let comb = WeightedComb::from_positions(&[-1.0, 0.0, 2.0]);
        let ac = autocorrelation(&comb, 3.0).unwrap();
        let m = ac.lag_radius;
        let expected: f64 =
            ac.comb.atoms().iter().map(|a| a.weight.re * 6.0 / (6.0 - a.position.abs())).sum::<f64>() / (2.0 * m);
        let e = bragg_intensity_autocorr(&ac, 0.0);
        assert!((e.intensity - expected).abs() < 1e-14);
    }

    #[test]
    fn integer_lattice_peaks_are_equal() {
        // For Λ ⊆ ℤ every integer frequency sees the same intensity.
        let comb = WeightedComb::from_positions(&[-7.0, -3.0, -2.0, 0.0, 1.0, 5.0, 8.0]);
        let ac = autocorrelation(&comb, 10.0).unwrap();
        let i0 = bragg_intensity_autocorr(&ac, 0.0).intensity;
        let a0 = bragg_intensity_amplitude(&comb, 10.0, 0.0).unwrap().intensity;
        for m in [-3.0, 1.0, 2.0, 17.0] {
            assert!((bragg_intensity_autocorr(&ac, m).intensity - i0).abs() < 1e-12);
            assert!((bragg_intensity_amplitude(&comb, 10.0, m).unwrap().intensity - a0).abs() < 1e-12);
        }
    }

    #[test]
    fn grouped_amplitudes_match_direct_sums() {
        let pts = cps::fibonacci_points(-200.0, 200.0).unwrap();
        let comb = WeightedComb::from_points(&pts);
        let mut ks = Vec::new();
        for m in -3..=3 {
            for n in -40..=40 {
                if n % 7 != 3 {
                    ks.push(Frequency::from(DualPoint::from_lattice_coords(m, n).unwrap()));
                }
            }
        }
        let fast = amplitudes(&comb, &ks);
        for (k, f) in ks.iter().zip(&fast) {
            let slow: Complex64 = comb.atoms().iter().map(|a| cis_turns(-k.k * a.position)).sum();
            assert!((slow - f).norm() < 1e-9, "{k:?}");
        }
    }

    #[test]
    fn uniform_amplitudes_match_direct_sums() {
        let comb = WeightedComb::from_positions(&[-3.3, 0.1, 2.0, 9.7]);
        let vals = amplitudes_uniform(&comb, 0.2, 0.013, 300);
        for (j, v) in vals.iter().enumerate() {
            let k = 0.2 + j as f64 * 0.013;
            let d: Complex64 = comb.atoms().iter().map(|a| cis_turns(-k * a.position)).sum();
            assert!((d - v).norm() < 1e-12);
        }
    }

    #[test]
    fn empty_subset_is_vacuous() {
        let v = verify_bragg_lower_bounds(
            &WeightedComb::empty(),
            100.0,
            0.5,
            Window::closed(-5.0, 5.0).unwrap(),
            &BraggOptions::default(),
        )
        .unwrap();
        assert!(v.vacuous);
        assert!(v.all_pass());
    }

    #[test]
    fn figure1_rows() {
        let rows = figure1_data(&[0.1, 0.5, 1.0], Window::closed(-50.0, 50.0).unwrap()).unwrap();
        let zero = rows.iter().find(|r| r.k == 0.0).unwrap();
        assert_eq!(zero.fraction, 1.0);
        assert_eq!(zero.min_epsilon, Some(0.1));
        assert!(rows.iter().all(|r| r.fraction > 0.0 && r.fraction <= 1.0));
    }

    #[test]
    fn periodogram_rejects_peaks_and_bad_bandwidth() {
        let comb = WeightedComb::from_points(&cps::fibonacci_points(-100.0, 100.0).unwrap());
        assert!(smoothed_periodogram(&comb, 100.0, &[0.0], 0.05).is_err());
        assert!(smoothed_periodogram(&comb, 100.0, &[0.3], 0.0).is_err());
    }

    #[test]
    fn exact_phase_matches_float_phase() {
        let comb = WeightedComb::from_points(&cps::fibonacci_points(-50.0, 50.0).unwrap());
        let k = DualPoint::new(QuadInt::new(5, -2));
        let a = bragg_intensity_amplitude(&comb, 50.0, k).unwrap().intensity;
        let b = bragg_intensity_amplitude(&comb, 50.0, k.value()).unwrap().intensity;
        assert!((a - b).abs() < 1e-12);
    }
}
