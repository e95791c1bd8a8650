//! Direct and dual model sets of the Fibonacci cut-and-project scheme.

use std::cmp::Ordering;
use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadfield::{cmp_parts, DualPoint, LatticePoint, QuadInt, Surd, SQRT5, TAU, TAU_CONJ};

/// Relative half-width of the band around a float endpoint inside which
/// a membership decision is flagged as uncertain.
pub const GUARD_BAND: f64 = 1e-12;

/// Largest coefficient magnitude the enumerator will generate.
const MAX_COEFF: f64 = 1e15;

/// An interval endpoint, exact when it lies in ℚ(√5).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Bound {
    Exact(Surd),
    Approx(f64),
}

impl Bound {
    pub fn to_f64(self) -> f64 {
        match self {
            Bound::Exact(s) => s.to_f64(),
            Bound::Approx(x) => x,
        }
    }

    fn compare(self, val: (i128, i128, i128), approx: f64, guard_hit: &mut bool) -> Ordering {
        match self {
            Bound::Exact(s) => {
                // Both floats are within a few ulps of the true values.
                let x = s.to_f64();
                if (approx - x).abs() > 1e-12 * approx.abs().max(x.abs()).max(1e-300) {
                    return approx.partial_cmp(&x).unwrap_or(Ordering::Equal);
                }
                let (a, b, d) = s.parts();
                cmp_parts(val.0, val.1, val.2, a, b, d)
            }
            Bound::Approx(x) => {
                if (approx - x).abs() <= GUARD_BAND * x.abs().max(1.0) {
                    *guard_hit = true;
                }
                approx.partial_cmp(&x).unwrap_or(Ordering::Equal)
            }
        }
    }
}

impl From<Surd> for Bound {
    fn from(s: Surd) -> Self {
        Bound::Exact(s)
    }
}

impl Bound {
    /// The exact rational value of `x` when its binary denominator is small
    /// enough, else an approximate bound.
    pub fn from_f64(x: f64) -> Bound {
        if x == 0.0 {
            return Bound::Exact(Surd::ZERO);
        }
        if !x.is_finite() {
            return Bound::Approx(x);
        }
        let bits = x.to_bits();
        let exp = ((bits >> 52) & 0x7ff) as i32;
        let frac = bits & ((1u64 << 52) - 1);
        let (mant, e) = if exp == 0 { (frac, -1074) } else { (frac | (1u64 << 52), exp - 1075) };
        let mant = if x < 0.0 { -(mant as i128) } else { mant as i128 };
        let tz = mant.trailing_zeros().min(127) as i32;
        let (mant, e) = (mant >> tz, e + tz);
        if e >= 0 {
            if e <= 70 {
                return Bound::Exact(Surd::from_int(mant << e));
            }
        } else if e >= -100 {
            if let Ok(s) = Surd::rational(mant, 1i128 << (-e)) {
                return Bound::Exact(s);
            }
        }
        Bound::Approx(x)
    }
}

impl From<f64> for Bound {
    fn from(x: f64) -> Self {
        Bound::from_f64(x)
    }
}

/// A bounded interval with per-endpoint closedness; used both for
/// acceptance windows in internal space and for physical ranges.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub lo: Bound,
    pub hi: Bound,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Window {
    pub fn new(lo: impl Into<Bound>, hi: impl Into<Bound>, lo_closed: bool, hi_closed: bool) -> Result<Self> {
        let w = Window { lo: lo.into(), hi: hi.into(), lo_closed, hi_closed };
        let (l, h) = (w.lo.to_f64(), w.hi.to_f64());
        if !l.is_finite() || !h.is_finite() {
            return Err(Error::Unbounded(format!("[{l}, {h}]")));
        }
        let ordered = match (w.lo, w.hi) {
            (Bound::Exact(a), Bound::Exact(b)) => a <= b,
            _ => l <= h,
        };
        if !ordered {
            return Err(Error::InvalidArgument(format!("window endpoints out of order: {l} > {h}")));
        }
        Ok(w)
    }

    pub fn closed(lo: impl Into<Bound>, hi: impl Into<Bound>) -> Result<Self> {
        Window::new(lo, hi, true, true)
    }

    pub fn open(lo: impl Into<Bound>, hi: impl Into<Bound>) -> Result<Self> {
        Window::new(lo, hi, false, false)
    }

    /// The Fibonacci window `[−1, τ−1)`.
    pub fn fibonacci() -> Self {
        Window {
            lo: Bound::Exact(Surd::from_int(-1)),
            hi: Bound::Exact(Surd::tau() - Surd::ONE),
            lo_closed: true,
            hi_closed: false,
        }
    }

    pub fn symmetric(halfwidth: impl Into<Bound> + Copy, closed: bool) -> Result<Self> {
        let hw: Bound = halfwidth.into();
        let lo = match hw {
            Bound::Exact(s) => Bound::Exact(-s),
            Bound::Approx(x) => Bound::Approx(-x),
        };
        Window::new(lo, hw, closed, closed)
    }

    pub fn lo_f64(&self) -> f64 {
        self.lo.to_f64()
    }

    pub fn hi_f64(&self) -> f64 {
        self.hi.to_f64()
    }

    pub fn length(&self) -> f64 {
        self.hi_f64() - self.lo_f64()
    }

    /// Exact-where-possible membership of `(a + b√5)/d`.
    fn test(&self, val: (i128, i128, i128), approx: f64, guard_hit: &mut bool) -> bool {
        let lo = self.lo.compare(val, approx, guard_hit);
        let hi = self.hi.compare(val, approx, guard_hit);
        let lo_ok = lo == Ordering::Greater || (lo == Ordering::Equal && self.lo_closed);
        let hi_ok = hi == Ordering::Less || (hi == Ordering::Equal && self.hi_closed);
        lo_ok && hi_ok
    }

    /// Membership of an exact value.
    pub fn contains_surd(&self, s: Surd) -> bool {
        let mut hit = false;
        self.test(s.parts(), s.to_f64(), &mut hit)
    }

    /// Float membership, for untagged data.
    pub fn contains_f64(&self, x: f64) -> bool {
        let (l, h) = (self.lo_f64(), self.hi_f64());
        let lo_ok = x > l || (x == l && self.lo_closed);
        let hi_ok = x < h || (x == h && self.hi_closed);
        lo_ok && hi_ok
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Direct,
    Dual,
}

/// Λ(window) ∩ range on the direct side, Λ*(window) ∩ range on the dual side.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelSetQuery {
    pub side: Side,
    pub window: Window,
    pub range: Window,
}

impl ModelSetQuery {
    pub fn new(side: Side, window: Window, range: Window) -> Self {
        ModelSetQuery { side, window, range }
    }

    /// Fib ∩ [lo, hi].
    pub fn fibonacci(lo: impl Into<Bound>, hi: impl Into<Bound>) -> Result<Self> {
        Ok(ModelSetQuery::new(Side::Direct, Window::fibonacci(), Window::closed(lo, hi)?))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelPoint {
    pub point: LatticePoint,
    pub position: f64,
    pub star: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Enumeration {
    pub points: Vec<ModelPoint>,
    /// Candidates whose membership was decided inside the float guard band.
    pub guard_band_hits: usize,
}

impl Enumeration {
    pub fn positions(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.position).collect()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

fn coeff_range(lo: f64, hi: f64) -> Result<(i64, i64)> {
    let (l, h) = (lo.floor() - 2.0, hi.ceil() + 2.0);
    if !(l.abs() < MAX_COEFF && h.abs() < MAX_COEFF) {
        return Err(Error::Overflow("enumeration coefficient range"));
    }
    Ok((l as i64, h as i64))
}

/// All lattice points with position in `q.range` and star in `q.window`,
/// sorted by position.
///
/// Membership against endpoints in ℚ(√5) is decided exactly; float
/// endpoints use a relative guard band and report how often it was hit.
pub fn enumerate(q: &ModelSetQuery) -> Result<Enumeration> {
    let (xlo, xhi) = (q.range.lo_f64(), q.range.hi_f64());
    let (wlo, whi) = (q.window.lo_f64(), q.window.hi_f64());
    let n_bounds = match q.side {
        // n = (x − x⋆)/√5
        Side::Direct => coeff_range((xlo - whi) / SQRT5, (xhi - wlo) / SQRT5)?,
        // n = p + p⋆
        Side::Dual => coeff_range(xlo + wlo, xhi + whi)?,
    };
    let slices: Vec<(Vec<ModelPoint>, usize)> = (n_bounds.0..=n_bounds.1)
        .collect::<Vec<i64>>()
        .into_par_iter()
        .with_min_len(512)
        .map(|n| slice(q, n, (xlo, xhi), (wlo, whi)))
        .collect::<Result<_>>()?;
    let mut out = Enumeration::default();
    for (pts, hits) in slices {
        out.points.extend(pts);
        out.guard_band_hits += hits;
    }
    out.points.sort_by(|a, b| {
        a.position.total_cmp(&b.position).then_with(|| a.point.position_surd().cmp(&b.point.position_surd()))
    });
    Ok(out)
}

fn slice(q: &ModelSetQuery, n: i64, x: (f64, f64), w: (f64, f64)) -> Result<(Vec<ModelPoint>, usize)> {
    let nf = n as f64;
    let (m_lo, m_hi) = match q.side {
        // x = m + nτ, x⋆ = m + nτ′
        Side::Direct => {
            coeff_range((x.0 - nf * TAU).max(w.0 - nf * TAU_CONJ), (x.1 - nf * TAU).min(w.1 - nf * TAU_CONJ))?
        }
        // 2m + n = √5(2p − n) = √5(n − 2p⋆)
        Side::Dual => {
            let lo = (SQRT5 * (2.0 * x.0 - nf)).max(SQRT5 * (nf - 2.0 * w.1));
            let hi = (SQRT5 * (2.0 * x.1 - nf)).min(SQRT5 * (nf - 2.0 * w.0));
            coeff_range((lo - nf) / 2.0, (hi - nf) / 2.0)?
        }
    };
    let mut pts = Vec::new();
    let mut hits = 0usize;
    let n128 = n as i128;
    // Candidates clearly outside by plain float arithmetic skip the exact test.
    let slack = 1e-9 * (1.0 + nf.abs() + x.0.abs().max(x.1.abs()) + w.0.abs().max(w.1.abs()));
    let outside = |v: f64, b: (f64, f64)| v < b.0 - slack || v > b.1 + slack;
    for m in m_lo..=m_hi {
        let mf = m as f64;
        let (pq, sq) = match q.side {
            Side::Direct => (mf + nf * TAU, mf + nf * TAU_CONJ),
            Side::Dual => ((nf + (2.0 * mf + nf) / SQRT5) / 2.0, (nf - (2.0 * mf + nf) / SQRT5) / 2.0),
        };
        if outside(pq, x) || outside(sq, w) {
            continue;
        }
        let m128 = m as i128;
        let (point, pos, star) = match q.side {
            Side::Direct => {
                let k = 2 * m128 + n128;
                (LatticePoint::Direct(QuadInt::new(m, n)), (k, n128, 2), (k, -n128, 2))
            }
            Side::Dual => {
                let k = 2 * m128 + n128;
                (LatticePoint::Dual(DualPoint::new(QuadInt::new(m, n))), (5 * n128, k, 10), (5 * n128, -k, 10))
            }
        };
        let (pf, sf) = (point.position(), point.star());
        let mut hit = false;
        let inside = q.range.test(pos, pf, &mut hit) && q.window.test(star, sf, &mut hit);
        if hit {
            hits += 1;
        }
        if inside {
            pts.push(ModelPoint { point, position: pf, star: sf });
        }
    }
    Ok((pts, hits))
}

/// Fib ∩ [lo, hi].
pub fn fibonacci_points(lo: f64, hi: f64) -> Result<Vec<ModelPoint>> {
    Ok(enumerate(&ModelSetQuery::fibonacci(lo, hi)?)?.points)
}

/// The `count` nonzero points of the model set with the given window that
/// lie closest to the origin, ordered by distance (ties: negative first).
pub fn nearest_nonzero(side: Side, window: Window, count: usize) -> Result<Vec<ModelPoint>> {
    if count == 0 {
        return Ok(Vec::new());
    }
    let mut radius = (count as f64 / (window.length().max(1e-300) * SQRT5)).max(1.0);
    loop {
        let q = ModelSetQuery::new(side, window, Window::closed(-radius, radius)?);
        let mut pts: Vec<ModelPoint> = enumerate(&q)?
            .points
            .into_iter()
            .filter(|p| !matches!(p.point, LatticePoint::Direct(x) if x.is_zero()))
            .filter(|p| !matches!(p.point, LatticePoint::Dual(x) if x.is_zero()))
            .collect();
        if pts.len() >= count {
            pts.sort_by(|a, b| a.position.abs().total_cmp(&b.position.abs()).then(a.position.total_cmp(&b.position)));
            // Everything within the returned radius must be inside the searched range.
            if pts[count - 1].position.abs() <= radius {
                pts.truncate(count);
                return Ok(pts);
            }
        }
        radius *= 2.0;
        if radius > 1e13 {
            return Err(Error::InsufficientPoints(format!("fewer than {count} nonzero points within |x| <= 1e13")));
        }
    }
}

/// Largest gap between consecutive points of `points ∩ [a, b]`, counting the
/// gaps from `a` to the first point and from the last point to `b`.
pub fn max_gap(points: &[f64], a: f64, b: f64) -> Result<f64> {
    let inside: Vec<f64> = points.iter().copied().filter(|&x| x >= a && x <= b).collect();
    if inside.len() < 2 {
        return Err(Error::InsufficientPoints(format!("{} points in [{a}, {b}]; need at least 2", inside.len())));
    }
    let mut gap = (inside[0] - a).max(b - inside[inside.len() - 1]);
    for w in inside.windows(2) {
        if w[1] < w[0] {
            return Err(Error::InvalidArgument("points are not sorted".into()));
        }
        gap = gap.max(w[1] - w[0]);
    }
    Ok(gap)
}

/// sup |e^{2πi χ⋆ t} − 1| over t ∈ [−c, c].
pub fn s_chi(chi_star: f64, c: f64) -> f64 {
    let x = chi_star.abs() * c;
    if x <= 0.5 {
        2.0 * (PI * x).sin()
    } else {
        2.0
    }
}

/// Parameters of B_ε: ε and the half-width `c` with W − W ⊆ (−c, c).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpsDualParams {
    pub epsilon: f64,
    pub window_halfwidth: f64,
}

impl EpsDualParams {
    pub fn new(epsilon: f64, window_halfwidth: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::InvalidArgument(format!("epsilon {epsilon} not in (0,1)")));
        }
        if !(window_halfwidth > 0.0 && window_halfwidth.is_finite()) {
            return Err(Error::InvalidArgument(format!("window half-width {window_halfwidth}")));
        }
        Ok(EpsDualParams { epsilon, window_halfwidth })
    }

    pub fn fibonacci(epsilon: f64) -> Result<Self> {
        EpsDualParams::new(epsilon, TAU)
    }

    /// W_ε = [−ε/(2πc), ε/(2πc)].
    pub fn window(&self) -> Window {
        let r = self.epsilon / (2.0 * PI * self.window_halfwidth);
        Window { lo: Bound::Approx(-r), hi: Bound::Approx(r), lo_closed: true, hi_closed: true }
    }
}

/// B_ε ∩ range.
pub fn b_epsilon(params: &EpsDualParams, range: Window) -> Result<Enumeration> {
    enumerate(&ModelSetQuery::new(Side::Dual, params.window(), range))
}

/// Dual points with `2π|k⋆|c ≤ ε` for any ε > 0, including ε ≥ 1.
pub fn b_epsilon_unchecked(epsilon: f64, c: f64, range: Window) -> Result<Enumeration> {
    if !(epsilon > 0.0) {
        return Err(Error::InvalidArgument(format!("epsilon {epsilon} must be positive")));
    }
    let r = epsilon / (2.0 * PI * c);
    let w = Window { lo: Bound::Approx(-r), hi: Bound::Approx(r), lo_closed: true, hi_closed: true };
    enumerate(&ModelSetQuery::new(Side::Dual, w, range))
}

/// Whether `[mτ, mτ + 1/5]` contains no integer, i.e. `⌈mτ⌉ > mτ + 1/5`.
pub fn check_no_integer_in(m: i64) -> Result<bool> {
    if ![-3, -2, -1, 1].contains(&m) {
        return Err(Error::InvalidArgument(format!("m = {m} not in {{-3, -2, -1, 1}}")));
    }
    let x = QuadInt::new(0, m).to_surd();
    let ceil = Surd::from_int(x.ceil());
    Ok(ceil > x + Surd::rational(1, 5)?)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscretenessReport {
    /// Dual-lattice points in the difference set [−2, 2] × [−1/10, 1/10].
    pub reduction: Vec<DualPoint>,
    /// Dual-lattice points in [−1, 3] × [0, 1/5], which is not a valid
    /// difference set for the cell and does contain a nonzero point.
    pub literal_region: Vec<DualPoint>,
    pub trials: usize,
    pub max_count: usize,
    pub rng: String,
    pub seed: u64,
    pub passed: bool,
}

/// Number of dual-lattice points in `[s − 1/2, s + 3/2] × [s⋆, s⋆ + 1/10]`.
pub fn dual_cell_count(s: f64, s_star: f64) -> Result<usize> {
    let q = ModelSetQuery::new(Side::Dual, Window::closed(s_star, s_star + 0.1)?, Window::closed(s - 0.5, s + 1.5)?);
    Ok(enumerate(&q)?.len())
}

fn dual_points_in(range: Window, window: Window) -> Result<Vec<DualPoint>> {
    Ok(enumerate(&ModelSetQuery::new(Side::Dual, window, range))?
        .points
        .iter()
        .filter_map(|p| match p.point {
            LatticePoint::Dual(d) => Some(d),
            LatticePoint::Direct(_) => None,
        })
        .collect())
}

/// Confirms that the dual lattice meets every translate of
/// `[−1/2, 3/2] × [0, 1/10]` at most once: exactly, by showing the
/// difference set `[−2, 2] × [−1/10, 1/10]` holds only the origin, and
/// empirically on random translates.
pub fn check_dual_uniform_discreteness(num_trials: usize, seed: u64) -> Result<DiscretenessReport> {
    let tenth = Surd::rational(1, 10)?;
    let reduction =
        dual_points_in(Window::closed(Surd::from_int(-2), Surd::from_int(2))?, Window::closed(-tenth, tenth)?)?;
    let literal_region = dual_points_in(
        Window::closed(Surd::from_int(-1), Surd::from_int(3))?,
        Window::closed(Surd::ZERO, Surd::rational(1, 5)?)?,
    )?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_count = 0;
    for _ in 0..num_trials {
        let s: f64 = rng.random_range(-1000.0..1000.0);
        let s_star: f64 = rng.random_range(-10.0..10.0);
        max_count = max_count.max(dual_cell_count(s, s_star)?);
    }
    let passed = reduction == [DualPoint::ZERO] && max_count <= 1;
    Ok(DiscretenessReport {
        reduction,
        literal_region,
        trials: num_trials,
        max_count,
        rng: "ChaCha8".into(),
        seed,
        passed,
    })
}
