//! The ping-pong function `h`, its Fourier side `ω̂`, norm-almost-period
//! certificates and a finite check of `γ̂ = ω̂ ∗ ν`.

mod piecewise;

pub use piecewise::{PiecewisePoly, Poly};

use std::cmp::Ordering;
use std::collections::HashMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cps::{enumerate, nearest_nonzero, ModelSetQuery, Side, Window};
use crate::diffraction::{amplitudes, Frequency};
use crate::error::{Error, Result};
use crate::measures::{window_norm, Atom, WeightedComb};
use crate::numerics::{sinc, sinc_prime};
use crate::quadfield::{DualPoint, LatticePoint, Surd, SQRT5, TAU};

/// `(3 + √5)/√5`, the weight of `ω̂` at the origin.
pub const OMEGA_PREFACTOR: f64 = (3.0 + SQRT5) / SQRT5;

/// `1/(2π(τ+1)(2π/3)³)`: `|g(y)| ≤ C/y⁴`.
pub const DECAY_CONSTANT: f64 = 1.0 / (2.0 * PI * (TAU + 1.0) * (2.0 * PI / 3.0) * (2.0 * PI / 3.0) * (2.0 * PI / 3.0));

/// Upper limit (exclusive) on `|t⋆|` for the almost-period bound.
pub const ALPHA_MAX: f64 = 1.0 / 81.0;

/// Constant of the almost-period bound `2507 α^{3/4}`.
pub const BOUND_CONSTANT: f64 = 2507.0;

/// `h = (27/8) 1_{[−τ−1, τ+1]} ∗ 1_{[−1/3,1/3]}^{∗3}`.
pub fn build_h() -> PiecewisePoly {
    let third = Surd::rational(1, 3).unwrap();
    let r = Surd::tau() + Surd::ONE;
    let mut p = PiecewisePoly::indicator(-r, r, Surd::rational(27, 8).unwrap()).unwrap();
    for _ in 0..3 {
        p = p.box_convolve(third).unwrap();
    }
    p.simplify()
}

/// Which quantity of φ is normalized to 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhiNormalization {
    /// `∫φ = 1`.
    UnitIntegral,
    /// `(φ ∗ φ̃)(0) = 1`.
    UnitAutocorrelation,
}

/// `φ = c · 1_{[−b,b]} ∗ 1_{[−b,b]}`, a triangle on `[−2b, 2b]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Phi {
    pub halfwidth: Surd,
    pub normalization: PhiNormalization,
    /// `c`, exact when it lies in ℚ(√5).
    pub scale_exact: Option<Surd>,
    pub scale: f64,
    /// `c²`, always exact.
    pub scale_sq: Surd,
    /// The unnormalized triangle.
    pub shape: PiecewisePoly,
    /// The unnormalized `shape ∗ shape~`.
    pub autocorr_shape: PiecewisePoly,
}

/// Box half-width used by the identity check. Wider boxes let translates of
/// `φ ∗ φ̃` reach lattice points with `h(x⋆) < 1`.
pub fn ping_phi_halfwidth() -> Surd {
    Surd::rational(1, 20).unwrap()
}

/// The half-width `1/8`.
pub fn default_phi_halfwidth() -> Surd {
    Surd::rational(1, 8).unwrap()
}

/// `b − 10⁻⁶`, giving supp φ strictly inside `(−2b, 2b)`.
pub fn strict_halfwidth(b: Surd) -> Surd {
    b - Surd::rational(1, 1_000_000).unwrap()
}

pub fn build_phi(halfwidth: Surd, normalization: PhiNormalization) -> Result<Phi> {
    if halfwidth.signum() != Ordering::Greater {
        return Err(Error::InvalidArgument(format!("half-width {halfwidth} must be positive")));
    }
    let shape = PiecewisePoly::indicator(-halfwidth, halfwidth, Surd::ONE)?.box_convolve(halfwidth)?;
    // φ is even, so φ̃ = φ and φ ∗ φ̃ = c² · box^{∗4}.
    let autocorr_shape = shape.box_convolve(halfwidth)?.box_convolve(halfwidth)?;
    let overflow = || Error::Overflow("φ normalization");
    let (scale_exact, scale_sq) = match normalization {
        PhiNormalization::UnitIntegral => {
            let c = shape.integral().checked_recip().ok_or_else(overflow)?;
            (Some(c), c.checked_mul(c).ok_or_else(overflow)?)
        }
        PhiNormalization::UnitAutocorrelation => {
            let c2 = autocorr_shape.eval_exact(Surd::ZERO).checked_recip().ok_or_else(overflow)?;
            (None, c2)
        }
    };
    let scale = scale_exact.map_or_else(|| scale_sq.to_f64().sqrt(), Surd::to_f64);
    Ok(Phi { halfwidth, normalization, scale_exact, scale, scale_sq, shape, autocorr_shape })
}

impl Phi {
    pub fn eval(&self, x: f64) -> f64 {
        self.scale * self.shape.eval(x)
    }

    pub fn integral(&self) -> f64 {
        match self.scale_exact {
            Some(c) => (c * self.shape.integral()).to_f64(),
            None => self.scale * self.shape.integral().to_f64(),
        }
    }

    /// `∫φ`, when exact.
    pub fn integral_exact(&self) -> Option<Surd> {
        self.scale_exact.map(|c| c * self.shape.integral())
    }

    /// `(φ ∗ φ̃)(x)`, exact.
    pub fn autocorr_exact(&self, x: Surd) -> Surd {
        self.scale_sq * self.autocorr_shape.eval_exact(x)
    }

    pub fn autocorr(&self, x: f64) -> f64 {
        self.scale_sq.to_f64() * self.autocorr_shape.eval(x)
    }

    /// `|φ̌(q)|² = c² (2b)⁴ sinc⁴(2πbq)`.
    pub fn transform_sq(&self, q: f64) -> f64 {
        let b = self.halfwidth.to_f64();
        let s = sinc(2.0 * PI * b * q);
        self.transform_sq_peak() * s * s * s * s
    }

    /// `|φ̌(0)|²`.
    pub fn transform_sq_peak(&self) -> f64 {
        let w = Surd::from_int(2) * self.halfwidth;
        (self.scale_sq * w * w * w * w).to_f64()
    }
}

/// `g(y) = sinc(2π(τ+1)y) sinc³(2πy/3)`.
#[inline]
pub fn g(y: f64) -> f64 {
    let s = sinc(2.0 * PI * y / 3.0);
    sinc(2.0 * PI * (TAU + 1.0) * y) * s * s * s
}

/// `ĥ(k) = ∫ h(x) e^{2πikx} dx`.
pub fn h_hat(k: f64) -> f64 {
    let r = TAU + 1.0;
    let s = sinc(2.0 * PI * k / 3.0);
    27.0 / 8.0 * 2.0 * r * sinc(2.0 * PI * r * k) * (8.0 / 27.0) * s * s * s
}

/// `ω̂ = ((3+√5)/√5) Σ_{y ∈ L⁰} g(y⋆) δ_y`, truncated to `|y⋆| ≤ Y`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OmegaHatWeights {
    pub prefactor: f64,
    pub truncation_radius: f64,
}

impl OmegaHatWeights {
    pub fn new(truncation_radius: f64) -> Result<Self> {
        check_truncation(truncation_radius)?;
        Ok(OmegaHatWeights { prefactor: OMEGA_PREFACTOR, truncation_radius })
    }

    pub fn weight(&self, y_star: f64) -> f64 {
        self.prefactor * g(y_star)
    }

    /// Bound on `|ω̂|` of the discarded atoms in any closed window of length
    /// `len`, for truncation radius `y`.
    pub fn tail_bound(&self, len: f64) -> f64 {
        tail_bound(self.truncation_radius, len)
    }
}

fn check_truncation(y: f64) -> Result<()> {
    if !(y.is_finite() && y >= 0.3) {
        return Err(Error::InvalidArgument(format!("truncation radius {y} must be at least 0.3")));
    }
    Ok(())
}

/// Certified mass of `ω̂` on `|y⋆| > y` inside a window of length `len`.
///
/// A closed `2 × 1/10` cell of the (physical, internal) plane holds at most
/// one point of `L⁰`. Strips `j/10 ≤ |y⋆| < (j+1)/10` for `j ≥ N = ⌊10y⌋ − 1`
/// cover the discarded region; each meets the window in `⌈len/2⌉` cells per
/// sign, each with weight at most `C (10/j)⁴`; then `Σ_{j≥N} j⁻⁴ ≤ 1/(3(N−1)³)`.
pub fn tail_bound(y: f64, len: f64) -> f64 {
    let n = (10.0 * y).floor() - 1.0;
    let cells = (len / 2.0).ceil().max(1.0);
    OMEGA_PREFACTOR * cells * 2.0 * DECAY_CONSTANT * 1e4 / (3.0 * (n - 1.0).powi(3))
}

/// Dual points with `|y⋆| ≤ y` in `[lo, hi]`.
fn dual_strip(y: f64, lo: f64, hi: f64) -> Result<Vec<DualPoint>> {
    let q = ModelSetQuery::new(Side::Dual, Window::closed(-y, y)?, Window::closed(lo, hi)?);
    Ok(enumerate(&q)?
        .points
        .into_iter()
        .filter_map(|p| match p.point {
            LatticePoint::Dual(d) => Some(d),
            _ => None,
        })
        .collect())
}

/// `ω̂` restricted to `|y⋆| ≤ y` and `[lo, hi]`, with the tail bound per
/// window of length `len`.
pub fn omega_hat_comb(y: f64, lo: f64, hi: f64, len: f64) -> Result<(WeightedComb, f64)> {
    let w = OmegaHatWeights::new(y)?;
    let atoms = dual_strip(y, lo, hi)?
        .into_iter()
        .map(|d| Atom::tagged(LatticePoint::Dual(d), Complex64::new(w.weight(d.star()), 0.0)))
        .collect();
    Ok((WeightedComb::new(atoms), w.tail_bound(len)))
}

/// Settings for [`certify_almost_period`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertifyOptions {
    /// Truncation radius in internal space.
    pub y: f64,
    pub k_lo: f64,
    pub k_hi: f64,
    /// Translates of K are swept over `[−R, R]`.
    pub physical_range: f64,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions { y: 50.0, k_lo: -0.5, k_hi: 1.5, physical_range: 100.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlmostPeriodReport {
    pub t: f64,
    pub t_tag: DualPoint,
    pub t_star: f64,
    /// `|t⋆|`.
    pub alpha: f64,
    pub truncated_norm: f64,
    pub tail_bound: f64,
    /// `2507 α^{3/4}`; the field name is part of the certificate record format.
    pub paper_bound: f64,
    pub pass: bool,
    #[serde(rename = "Y")]
    pub y: f64,
    #[serde(rename = "K")]
    pub k: [f64; 2],
    pub physical_range: f64,
    pub attained_at: f64,
}

/// `2507 α^{3/4}`.
pub fn almost_period_bound(alpha: f64) -> f64 {
    BOUND_CONSTANT * alpha.powf(0.75)
}

fn check_options(o: &CertifyOptions) -> Result<()> {
    check_truncation(o.y)?;
    if !(o.k_hi > o.k_lo && o.k_lo.is_finite() && o.k_hi.is_finite()) {
        return Err(Error::InvalidArgument(format!("window [{}, {}] is empty", o.k_lo, o.k_hi)));
    }
    if !(o.physical_range > 0.0 && o.physical_range.is_finite()) {
        return Err(Error::InvalidArgument(format!("physical range {} must be positive", o.physical_range)));
    }
    Ok(())
}

fn check_alpha(t: DualPoint) -> Result<f64> {
    let alpha = t.star().abs();
    if alpha >= ALPHA_MAX {
        return Err(Error::Hypothesis(format!("|t*| = {alpha} is not below 1/81")));
    }
    Ok(alpha)
}

/// Support of `ω̂_Y` on the swept range, shared by a batch of certificates.
struct OmegaSupport {
    points: Vec<DualPoint>,
}

impl OmegaSupport {
    fn new(o: &CertifyOptions) -> Result<Self> {
        let r = o.physical_range;
        Ok(OmegaSupport { points: dual_strip(o.y, -r + o.k_lo, r + o.k_hi)? })
    }

    fn certify(&self, t: DualPoint, o: &CertifyOptions) -> Result<AlmostPeriodReport> {
        let alpha = check_alpha(t)?;
        let ts = t.star();
        // (T_t ω̂ − ω̂)({z}) = w(z⋆ − t⋆) − w(z⋆) on the truncated support.
        let atoms: Vec<Atom> = if t.is_zero() {
            Vec::new()
        } else {
            self.points
                .iter()
                .map(|&z| {
                    let zs = z.star();
                    let w = OMEGA_PREFACTOR * (g(zs - ts) - g(zs));
                    Atom::tagged(LatticePoint::Dual(z), Complex64::new(w, 0.0))
                })
                .collect()
        };
        let norm = window_norm(&WeightedComb::new(atoms), o.k_lo, o.k_hi)?;
        let tail = if t.is_zero() { 0.0 } else { 2.0 * tail_bound(o.y - alpha, o.k_hi - o.k_lo) };
        let bound = almost_period_bound(alpha);
        let pass = t.is_zero() || norm.value + tail < bound;
        Ok(AlmostPeriodReport {
            t: t.value(),
            t_tag: t,
            t_star: ts,
            alpha,
            truncated_norm: norm.value,
            tail_bound: tail,
            paper_bound: bound,
            pass,
            y: o.y,
            k: [o.k_lo, o.k_hi],
            physical_range: o.physical_range,
            attained_at: norm.attained_at,
        })
    }
}

/// Certificate for `‖T_t ω̂ − ω̂‖_K < 2507 |t⋆|^{3/4}`.
pub fn certify_almost_period(t: DualPoint, o: &CertifyOptions) -> Result<AlmostPeriodReport> {
    certify_almost_periods(&[t], o).map(|mut v| v.remove(0))
}

/// Batched certificates sharing one enumeration of the support.
pub fn certify_almost_periods(ts: &[DualPoint], o: &CertifyOptions) -> Result<Vec<AlmostPeriodReport>> {
    check_options(o)?;
    for &t in ts {
        check_alpha(t)?;
    }
    let support = OmegaSupport::new(o)?;
    ts.par_iter().map(|&t| support.certify(t, o)).collect()
}

/// The `count` nonzero points of `Λ*([−α, α])` nearest the origin.
pub fn sample_almost_periods(alpha: f64, count: usize) -> Result<Vec<DualPoint>> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidArgument(format!("alpha {alpha} must be positive")));
    }
    Ok(nearest_nonzero(Side::Dual, Window::closed(-alpha, alpha)?, count)?
        .into_iter()
        .filter_map(|p| match p.point {
            LatticePoint::Dual(d) => Some(d),
            _ => None,
        })
        .collect())
}

/// `4 ε^{4/3} / 10⁵`.
pub fn epsilon_alpha(epsilon: f64) -> f64 {
    4.0 * epsilon.powf(4.0 / 3.0) / 1e5
}

/// Settings for [`certify_diffraction_almost_period`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiffractionCertOptions {
    /// Bragg atoms kept: `|k⋆| ≤ y_bragg`.
    pub y_bragg: f64,
    /// Left endpoints of `[s, s+1]` are swept over `[−R, R]`.
    pub physical_range: f64,
    pub omega: CertifyOptions,
    pub epsilon: Option<f64>,
    pub tol: f64,
}

impl Default for DiffractionCertOptions {
    fn default() -> Self {
        DiffractionCertOptions {
            y_bragg: 10.0,
            physical_range: 10.0,
            omega: CertifyOptions::default(),
            epsilon: None,
            tol: 0.05,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiffractionAlmostPeriodReport {
    pub t: f64,
    pub t_tag: DualPoint,
    pub t_star: f64,
    pub n: f64,
    /// `η̂(0) = Σ|c|²/2n`.
    pub density: f64,
    /// `‖T_t γ̂ − γ̂‖_{[0,1]}` over the kept Bragg atoms.
    pub norm: f64,
    pub bragg_atoms: usize,
    pub omega: AlmostPeriodReport,
    /// `d · (truncated_norm + tail_bound)` of the `ω̂` certificate.
    pub omega_bound: f64,
    pub omega_pass: bool,
    pub epsilon: Option<f64>,
    pub epsilon_pass: Option<bool>,
    pub tol: f64,
    pub pass: bool,
}

/// Compares `‖T_t γ̂ − γ̂‖_{[0,1]}` for the amplitude estimate of `γ̂` with
/// `d ‖T_t ω̂ − ω̂‖_{[−1/2,3/2]}`, and with ε when given.
pub fn certify_diffraction_almost_period(
    comb: &WeightedComb,
    n: f64,
    t: DualPoint,
    o: &DiffractionCertOptions,
) -> Result<DiffractionAlmostPeriodReport> {
    if !(n > 0.0 && n.is_finite()) {
        return Err(Error::InvalidArgument(format!("averaging radius {n} must be positive")));
    }
    if let Some(a) = comb.atoms().iter().find(|a| a.position.abs() > n) {
        return Err(Error::OutsideWindow { count: 1, n: a.position });
    }
    let omega = certify_almost_period(t, &o.omega)?;
    let density = comb.atoms().iter().map(|a| a.weight.norm_sqr()).sum::<f64>() / (2.0 * n);
    let r = o.physical_range;
    // (T_t γ̂)({z}) = γ̂({z − t}); the shifted frequencies are far away in
    // physical space, so they are formed directly.
    let pts = dual_strip(o.y_bragg, -r, r + 1.0)?;
    let shifted: Vec<DualPoint> = pts.iter().map(|&z| z.checked_sub(t)).collect::<Result<_>>()?;
    let freqs: Vec<Frequency> = pts.iter().chain(&shifted).map(|&d| d.into()).collect();
    let s = 1.0 / (2.0 * n);
    let intensity: Vec<f64> = amplitudes(comb, &freqs).into_iter().map(|f| (f * s).norm_sqr()).collect();
    let (here, there) = intensity.split_at(pts.len());
    let atoms: Vec<Atom> = pts
        .iter()
        .zip(here.iter().zip(there))
        .map(|(&z, (&i0, &i1))| Atom::tagged(LatticePoint::Dual(z), Complex64::new(i1 - i0, 0.0)))
        .collect();
    let kept = pts.len();
    let norm = window_norm(&WeightedComb::new(atoms), 0.0, 1.0)?.value;
    let omega_bound = density * (omega.truncated_norm + omega.tail_bound);
    let omega_pass = norm <= omega_bound + o.tol;
    let epsilon_pass = o.epsilon.map(|e| norm < e + o.tol);
    Ok(DiffractionAlmostPeriodReport {
        t: t.value(),
        t_tag: t,
        t_star: t.star(),
        n,
        density,
        norm,
        bragg_atoms: kept,
        pass: omega_pass && epsilon_pass.unwrap_or(true),
        omega,
        omega_bound,
        omega_pass,
        epsilon: o.epsilon,
        epsilon_pass,
        tol: o.tol,
    })
}

/// Settings for [`ping_identity_check`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PingOptions {
    pub k_lo: f64,
    pub k_hi: f64,
    /// Truncation radius of `ω̂` in internal space.
    pub y: f64,
    /// γ̂ atoms checked: `|k⋆| ≤ k_star_max`.
    pub k_star_max: f64,
    /// ν atoms kept: `|q − k| ≤ q_radius`.
    pub q_radius: f64,
    pub phi_halfwidth: Surd,
    pub tol: f64,
    /// Smallest accepted `|ν|(ℝ)/η̂(0)`.
    pub min_mass_ratio: f64,
}

impl Default for PingOptions {
    fn default() -> Self {
        PingOptions {
            k_lo: 0.0,
            k_hi: 1.0,
            y: 50.0,
            k_star_max: 2.0,
            q_radius: 80.0,
            phi_halfwidth: ping_phi_halfwidth(),
            tol: 1e-2,
            min_mass_ratio: 0.9,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PingAtom {
    pub k: f64,
    pub k_star: f64,
    pub gamma_hat: f64,
    pub omega_nu: f64,
    pub error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PingReport {
    pub n: f64,
    #[serde(rename = "Y")]
    pub y: f64,
    pub k_window: [f64; 2],
    pub phi_halfwidth: f64,
    pub normalization: PhiNormalization,
    /// `η̂(0)`.
    pub density: f64,
    /// `|ν|` over the retained atoms.
    pub nu_mass: f64,
    pub nu_atoms: usize,
    pub max_abs_error: f64,
    pub worst_k: f64,
    pub truncation_budget: f64,
    pub tol: f64,
    pub pass: bool,
    pub atoms: Vec<PingAtom>,
}

/// Checks `γ̂({k}) = (ω̂ ∗ ν)({k})` with `ν = |φ̌|² γ̂` atomwise on the Bragg
/// atoms in the k-window, `γ̂` estimated by amplitudes at radius `n`.
///
/// The budget bounds the atoms dropped by `|q − k| ≤ R` and `|y⋆| ≤ Y`. It
/// uses `γ̂([x − 1/2, x + 1/2]) ≤ η̂(0)/min_{|q|≤1/2}|φ̌(q)|²`, valid while
/// the support of `φ ∗ φ̃` meets `Λ − Λ` only at 0.
pub fn ping_identity_check(comb: &WeightedComb, n: f64, o: &PingOptions) -> Result<PingReport> {
    if !(n > 0.0 && n.is_finite()) {
        return Err(Error::InvalidArgument(format!("averaging radius {n} must be positive")));
    }
    if !(o.k_hi > o.k_lo) {
        return Err(Error::InvalidArgument(format!("k-window [{}, {}] is empty", o.k_lo, o.k_hi)));
    }
    check_truncation(o.y)?;
    if !(o.q_radius > 1.0) {
        return Err(Error::InvalidArgument(format!("q radius {} must exceed 1", o.q_radius)));
    }
    if let Some(a) = comb.atoms().iter().find(|a| a.position.abs() > n) {
        return Err(Error::OutsideWindow { count: 1, n: a.position });
    }
    let phi = build_phi(o.phi_halfwidth, PhiNormalization::UnitAutocorrelation)?;
    let density = comb.atoms().iter().map(|a| a.weight.norm_sqr()).sum::<f64>() / (2.0 * n);
    if density == 0.0 {
        return Err(Error::NotPurePoint("empty comb has no diffraction to check".into()));
    }
    let ks = dual_strip(o.k_star_max, o.k_lo, o.k_hi)?;
    let qs = dual_strip(o.y + o.k_star_max, o.k_lo - o.q_radius, o.k_hi + o.q_radius)?;
    let s = 1.0 / (2.0 * n);
    let freqs: Vec<Frequency> = qs.iter().map(|&d| d.into()).collect();
    let gamma: Vec<f64> = amplitudes(comb, &freqs).into_iter().map(|f| (f * s).norm_sqr()).collect();
    let nu: Vec<f64> = qs.iter().zip(&gamma).map(|(q, &gm)| phi.transform_sq(q.value()) * gm).collect();
    let nu_mass: f64 = nu.iter().sum();
    if nu_mass / density < o.min_mass_ratio {
        return Err(Error::NotPurePoint(format!(
            "pure-point part carries {:.4} of eta(0); continuous part present",
            nu_mass / density
        )));
    }
    let index: HashMap<DualPoint, usize> = qs.iter().enumerate().map(|(i, &q)| (q, i)).collect();
    let atoms: Vec<PingAtom> = ks
        .par_iter()
        .map(|&k| {
            let kv = k.value();
            let mut conv = 0.0;
            for (i, q) in qs.iter().enumerate() {
                if (q.value() - kv).abs() > o.q_radius {
                    continue;
                }
                let y = k.checked_sub(*q).expect("lattice overflow");
                if y.star().abs() <= o.y {
                    conv += OMEGA_PREFACTOR * g(y.star()) * nu[i];
                }
            }
            let gk = gamma[index[&k]];
            PingAtom { k: kv, k_star: k.star(), gamma_hat: gk, omega_nu: conv, error: (gk - conv).abs() }
        })
        .collect();
    let b = o.phi_halfwidth.to_f64();
    let psi_min = phi.transform_sq(0.5);
    let unit_mass = density / psi_min;
    let r = o.q_radius;
    let far = OMEGA_PREFACTOR * unit_mass * 2.0 * phi.transform_sq_peak()
        / (2.0 * PI * b).powi(4)
        / (3.0 * (r - 1.0).powi(3));
    let deep = OMEGA_PREFACTOR * DECAY_CONSTANT * density / o.y.powi(4);
    let budget = far + deep;
    let (max_abs_error, worst_k) =
        atoms.iter().fold((0.0f64, f64::NAN), |(m, w), a| if a.error > m { (a.error, a.k) } else { (m, w) });
    Ok(PingReport {
        n,
        y: o.y,
        k_window: [o.k_lo, o.k_hi],
        phi_halfwidth: b,
        normalization: phi.normalization,
        density,
        nu_mass,
        nu_atoms: qs.len(),
        max_abs_error,
        worst_k,
        truncation_budget: budget,
        tol: o.tol,
        pass: max_abs_error <= o.tol + budget,
        atoms,
    })
}

/// Poisson summation for the integer lattice:
/// `Σ_{x∈ℤ} (φ∗φ̃)(x) = Σ_{k∈ℤ} |φ̌(k)|²`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PsfReport {
    pub phi_halfwidth: f64,
    pub k_max: u64,
    /// Exact left side.
    pub lhs: f64,
    pub rhs: f64,
    /// Bound on `Σ_{|k|>K}`.
    pub tail_bound: f64,
    pub error: f64,
    pub tol: f64,
    pub pass: bool,
}

pub fn lattice_psf_check(phi: &Phi, k_max: u64, tol: f64) -> Result<PsfReport> {
    if k_max == 0 {
        return Err(Error::InvalidArgument("k_max must be positive".into()));
    }
    let (lo, hi) = phi.autocorr_shape.support();
    let mut lhs = Surd::ZERO;
    for x in lo.ceil()..=hi.floor() {
        lhs = lhs + phi.autocorr_exact(Surd::from_int(x));
    }
    // Compensated summation from the small terms up.
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    let mut add = |v: f64| {
        let t = sum + v;
        comp += if sum.abs() >= v.abs() { (sum - t) + v } else { (v - t) + sum };
        sum = t;
    };
    for k in (1..=k_max).rev() {
        add(2.0 * phi.transform_sq(k as f64));
    }
    add(phi.transform_sq(0.0));
    let rhs = sum + comp;
    let b = phi.halfwidth.to_f64();
    let kf = k_max as f64;
    let tail = 2.0 * phi.transform_sq_peak() / (2.0 * PI * b).powi(4) / (3.0 * kf * kf * kf);
    let lhs = lhs.to_f64();
    let error = (lhs - rhs).abs();
    Ok(PsfReport { phi_halfwidth: b, k_max, lhs, rhs, tail_bound: tail, error, tol, pass: error < tol && tail < tol })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LipschitzReport {
    pub a: f64,
    pub b: f64,
    pub grid_points: usize,
    /// Grid maximum of `|f′|` on `[0, X]`.
    pub numeric_sup: f64,
    /// `δ · sup|f″| / 2` for grid spacing δ.
    pub grid_pad: f64,
    pub tail_start: f64,
    /// Bound on `|f′|` for `x ≥ X`.
    pub tail_sup: f64,
    pub certified_sup: f64,
    pub bound: f64,
    /// Grid maximum of `|sinc′|` on `[0, 50]`.
    pub sinc_prime_sup: f64,
    pub pass: bool,
}

/// Derivative of `sinc(ax) sinc³(bx)`.
pub fn sinc_product_derivative(a: f64, b: f64, x: f64) -> f64 {
    let (sa, sb) = (sinc(a * x), sinc(b * x));
    a * sinc_prime(a * x) * sb * sb * sb + 3.0 * b * sa * sb * sb * sinc_prime(b * x)
}

/// Checks `|d/dx sinc(ax) sinc³(bx)| ≤ (a + 3b)/2` on a grid of `[0, X]`
/// padded by the second-derivative bound, with an analytic bound beyond X.
/// The function is even, so `x ≥ 0` suffices.
pub fn sinc_lipschitz_check(a: f64, b: f64, grid_points: usize) -> Result<LipschitzReport> {
    if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidArgument(format!("a = {a}, b = {b} must be positive")));
    }
    if grid_points < 2 {
        return Err(Error::InvalidArgument("need at least two grid points".into()));
    }
    let bound = (a + 3.0 * b) / 2.0;
    // |sinc′(y)| ≤ 1/|y| + 1/y², so |f′(x)| ≤ 4/x + (1/a + 3/b)/x².
    // X makes that at most half the bound.
    let half = bound / 2.0;
    let c = 1.0 / a + 3.0 / b;
    let x_end = (4.0 + (16.0 + 4.0 * half * c).sqrt()) / (2.0 * half);
    let tail_sup = 4.0 / x_end + c / (x_end * x_end);
    // |sinc| ≤ 1, |sinc′| ≤ 1/2, |sinc″| ≤ 1/3 give |f″| ≤ a²/3 + 3ab/2 + 5b²/2.
    let m2 = a * a / 3.0 + 1.5 * a * b + 2.5 * b * b;
    let delta = x_end / (grid_points - 1) as f64;
    let grid_pad = delta * m2 / 2.0;
    let numeric_sup = (0..grid_points)
        .into_par_iter()
        .map(|i| sinc_product_derivative(a, b, i as f64 * delta).abs())
        .reduce(|| 0.0, f64::max);
    let sinc_prime_sup = (0..=500_000).map(|i| sinc_prime(i as f64 * 1e-4).abs()).fold(0.0, f64::max);
    let certified_sup = (numeric_sup + grid_pad).max(tail_sup);
    Ok(LipschitzReport {
        a,
        b,
        grid_points,
        numeric_sup,
        grid_pad,
        tail_start: x_end,
        tail_sup,
        certified_sup,
        bound,
        sinc_prime_sup,
        pass: certified_sup <= bound && sinc_prime_sup <= 0.5,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cps::fibonacci_points;

    #[test]
    fn h_plateau_and_support() {
        let h = build_h();
        let tau = Surd::tau();
        let two = Surd::from_int(2);
        assert_eq!(h.support(), (-tau - two, tau + two));
        let plateau = h.pieces_meeting(-tau, tau);
        assert_eq!(plateau.len(), 1);
        assert_eq!(plateau[0].2, &Poly::constant(Surd::ONE));
        assert_eq!(h.eval_exact(Surd::ZERO), Surd::ONE);
        assert!(h.is_continuous());
        assert_eq!(h.max_degree(), 3);
        assert_eq!(h.integral(), Surd::from_int(3) + Surd::sqrt5());
        assert_eq!(h.eval(4.0), 0.0);
    }

    #[test]
    fn h_is_one_on_fib_stars() {
        let h = build_h();
        for p in fibonacci_points(-100.0, 100.0).unwrap() {
            assert_eq!(h.eval_exact(p.point.star_surd()), Surd::ONE);
        }
    }

    #[test]
    fn h_hat_values() {
        assert!((h_hat(0.0) - (3.0 + SQRT5)).abs() < 1e-14);
        assert!(h_hat(1.0 / (2.0 * (TAU + 1.0))).abs() < 1e-14);
    }

    #[test]
    fn phi_normalizations() {
        let a = build_phi(default_phi_halfwidth(), PhiNormalization::UnitIntegral).unwrap();
        assert_eq!(a.integral_exact(), Some(Surd::ONE));
        assert_eq!(a.scale_exact, Some(Surd::from_int(16)));
        let b = build_phi(default_phi_halfwidth(), PhiNormalization::UnitAutocorrelation).unwrap();
        assert_eq!(b.autocorr_exact(Surd::ZERO), Surd::ONE);
        // c² = 3/(16 b³) with b = 1/8
        assert_eq!(b.scale_sq, Surd::from_int(96));
        assert!((b.transform_sq(0.0) - 3.0 / 8.0).abs() < 1e-15);
        assert!(b.shape.is_continuous() && b.autocorr_shape.is_continuous());
        let strict = strict_halfwidth(default_phi_halfwidth());
        assert!(strict < default_phi_halfwidth());
    }

    #[test]
    fn omega_hat_weights() {
        let (comb, tail) = omega_hat_comb(10.0, -5.0, 5.0, 2.0).unwrap();
        let origin = comb.weight_at(LatticePoint::Dual(DualPoint::ZERO));
        assert!((origin.re - 2.341640786499874).abs() < 1e-14);
        assert!(comb.atoms().iter().all(|a| a.weight.im == 0.0 && a.weight.re.abs() <= OMEGA_PREFACTOR));
        let expected = OMEGA_PREFACTOR * 2.0 * DECAY_CONSTANT * 1e4 / (3.0 * 98f64.powi(3));
        assert!((tail - expected).abs() < 1e-18);
    }

    #[test]
    fn certificate_at_zero() {
        let r = certify_almost_period(DualPoint::ZERO, &CertifyOptions::default()).unwrap();
        assert_eq!(r.truncated_norm, 0.0);
        assert!(r.pass);
        let far = DualPoint::from_lattice_coords(1, 0).unwrap();
        assert!(matches!(certify_almost_period(far, &CertifyOptions::default()), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn lipschitz_unit() {
        let r = sinc_lipschitz_check(1.0, 1.0, 100_000).unwrap();
        assert_eq!(r.bound, 2.0);
        assert!(r.pass, "{r:?}");
        assert_eq!(sinc_product_derivative(1.0, 1.0, 0.0), 0.0);
        let r = sinc_lipschitz_check(2.0 * PI * (TAU + 1.0), 2.0 * PI / 3.0, 1000).unwrap();
        assert!((r.bound - PI * (TAU + 2.0)).abs() < 1e-12);
    }

    #[test]
    fn psf_degenerate() {
        let phi = build_phi(ping_phi_halfwidth(), PhiNormalization::UnitAutocorrelation).unwrap();
        let r = lattice_psf_check(&phi, 100_000, 1e-10).unwrap();
        assert_eq!(r.lhs, 1.0);
        assert!(r.pass, "{r:?}");
    }
}
