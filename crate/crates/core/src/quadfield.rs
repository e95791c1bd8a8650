//! Exact arithmetic in ℤ[τ], (1/√5)ℤ[τ] and ℚ(√5).
//!
//! Every membership decision made elsewhere in the crate goes through the
//! exact sign tests here; floats only appear when a value is embedded.

use std::cmp::Ordering;
use std::fmt;
use std::hash::Hash;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{two_prod, two_sum};

/// The golden ratio τ = (1+√5)/2.
pub const TAU: f64 = 1.618_033_988_749_895;
/// Its Galois conjugate τ′ = (1−√5)/2.
pub const TAU_CONJ: f64 = -0.618_033_988_749_894_9;
pub const SQRT5: f64 = 2.236_067_977_499_79;

const TAU_LO: f64 = -5.432_115_203_682_506e-17;
const TAU_CONJ_LO: f64 = 5.432_115_203_682_506e-17;
const SQRT5_LO: f64 = -1.086_423_040_736_501_2e-16;

#[derive(Clone, Copy)]
enum Irrational {
    Tau,
    Sqrt5,
}

fn split_i128(v: i128) -> (f64, f64) {
    let hi = v as f64;
    let lo = (v - hi as i128) as f64;
    (hi, lo)
}

/// `a + b·θ` in double-double, returned rounded to f64.
fn lin_dd(a: i128, b: i128, c_hi: f64, c_lo: f64) -> f64 {
    let (a_hi, a_lo) = split_i128(a);
    let (b_hi, b_lo) = split_i128(b);
    let (p, pe) = two_prod(b_hi, c_hi);
    let pe = pe + b_hi * c_lo + b_lo * c_hi;
    let (s, se) = two_sum(a_hi, p);
    s + (se + pe + a_lo)
}

fn big_to_f64(v: &BigInt) -> f64 {
    v.to_f64().unwrap_or(if v.is_negative() { f64::NEG_INFINITY } else { f64::INFINITY })
}

/// Accurately embeds `a + b·θ`. Cancellation is repaired through the
/// field norm, `a + bθ = N / (a + bθ′)`.
fn embed_pair(a: i128, b: i128, irr: Irrational) -> f64 {
    let (hi, lo, chi, clo) = match irr {
        Irrational::Tau => (TAU, TAU_LO, TAU_CONJ, TAU_CONJ_LO),
        Irrational::Sqrt5 => (SQRT5, SQRT5_LO, -SQRT5, -SQRT5_LO),
    };
    let v = lin_dd(a, b, hi, lo);
    let scale = (a as f64).abs().max((b as f64).abs());
    if b == 0 || v.abs() > scale * 2f64.powi(-20) {
        return v;
    }
    let conj = lin_dd(a, b, chi, clo);
    let norm = match irr {
        Irrational::Tau => a
            .checked_mul(a)
            .and_then(|aa| a.checked_mul(b).and_then(|ab| aa.checked_add(ab)))
            .and_then(|s| b.checked_mul(b).and_then(|bb| s.checked_sub(bb))),
        Irrational::Sqrt5 => a
            .checked_mul(a)
            .and_then(|aa| b.checked_mul(b).and_then(|bb| bb.checked_mul(5)).and_then(|f| aa.checked_sub(f))),
    };
    let norm = match norm {
        Some(nv) => nv as f64,
        None => {
            let (ba, bb) = (BigInt::from(a), BigInt::from(b));
            let nv = match irr {
                Irrational::Tau => &ba * &ba + &ba * &bb - &bb * &bb,
                Irrational::Sqrt5 => &ba * &ba - BigInt::from(5) * &bb * &bb,
            };
            big_to_f64(&nv)
        }
    };
    norm / conj
}

fn sign_ab_big(a: &BigInt, b: &BigInt) -> Ordering {
    let zero = BigInt::zero();
    let (sa, sb) = (a.cmp(&zero), b.cmp(&zero));
    if sa != Ordering::Less && sb != Ordering::Less {
        return if sa == Ordering::Equal && sb == Ordering::Equal { Ordering::Equal } else { Ordering::Greater };
    }
    if sa != Ordering::Greater && sb != Ordering::Greater {
        return Ordering::Less;
    }
    let c = (a * a).cmp(&(BigInt::from(5) * b * b));
    if sa == Ordering::Greater {
        c
    } else {
        c.reverse()
    }
}

/// Sign of `a + b√5`.
fn sign_ab(a: i128, b: i128) -> Ordering {
    if a >= 0 && b >= 0 {
        return if a == 0 && b == 0 { Ordering::Equal } else { Ordering::Greater };
    }
    if a <= 0 && b <= 0 {
        return Ordering::Less;
    }
    let lhs = a.checked_mul(a);
    let rhs = b.checked_mul(b).and_then(|v| v.checked_mul(5));
    match (lhs, rhs) {
        (Some(l), Some(r)) => {
            if a > 0 {
                l.cmp(&r)
            } else {
                r.cmp(&l)
            }
        }
        _ => sign_ab_big(&BigInt::from(a), &BigInt::from(b)),
    }
}

/// Compares `(a1 + b1√5)/d1` with `(a2 + b2√5)/d2` exactly; both `d` positive.
pub(crate) fn cmp_parts(a1: i128, b1: i128, d1: i128, a2: i128, b2: i128, d2: i128) -> Ordering {
    let exact = (|| {
        let a = a1.checked_mul(d2)?.checked_sub(a2.checked_mul(d1)?)?;
        let b = b1.checked_mul(d2)?.checked_sub(b2.checked_mul(d1)?)?;
        Some((a, b))
    })();
    match exact {
        Some((a, b)) => sign_ab(a, b),
        None => {
            let big = |v: i128| BigInt::from(v);
            let a = big(a1) * big(d2) - big(a2) * big(d1);
            let b = big(b1) * big(d2) - big(b2) * big(d1);
            sign_ab_big(&a, &b)
        }
    }
}

/// Element `m + nτ` of ℤ[τ].
///
/// Arithmetic operators panic on `i64` overflow; the `checked_*` methods
/// return an error instead.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct QuadInt {
    pub m: i64,
    pub n: i64,
}

impl QuadInt {
    pub const ZERO: QuadInt = QuadInt { m: 0, n: 0 };
    pub const ONE: QuadInt = QuadInt { m: 1, n: 0 };
    pub const TAU: QuadInt = QuadInt { m: 0, n: 1 };
    /// √5 = 2τ − 1.
    pub const SQRT5: QuadInt = QuadInt { m: -1, n: 2 };

    pub const fn new(m: i64, n: i64) -> Self {
        QuadInt { m, n }
    }

    pub const fn from_int(m: i64) -> Self {
        QuadInt { m, n: 0 }
    }

    pub fn is_zero(self) -> bool {
        self.m == 0 && self.n == 0
    }

    pub fn checked_add(self, o: QuadInt) -> Result<QuadInt> {
        Ok(QuadInt {
            m: self.m.checked_add(o.m).ok_or(Error::Overflow("QuadInt add"))?,
            n: self.n.checked_add(o.n).ok_or(Error::Overflow("QuadInt add"))?,
        })
    }

    pub fn checked_sub(self, o: QuadInt) -> Result<QuadInt> {
        Ok(QuadInt {
            m: self.m.checked_sub(o.m).ok_or(Error::Overflow("QuadInt sub"))?,
            n: self.n.checked_sub(o.n).ok_or(Error::Overflow("QuadInt sub"))?,
        })
    }

    pub fn checked_neg(self) -> Result<QuadInt> {
        Ok(QuadInt {
            m: self.m.checked_neg().ok_or(Error::Overflow("QuadInt neg"))?,
            n: self.n.checked_neg().ok_or(Error::Overflow("QuadInt neg"))?,
        })
    }

    /// `(a + bτ)(c + dτ) = (ac + bd) + (ad + bc + bd)τ`.
    pub fn checked_mul(self, o: QuadInt) -> Result<QuadInt> {
        let (a, b, c, d) = (self.m as i128, self.n as i128, o.m as i128, o.n as i128);
        let over = Error::Overflow("QuadInt mul");
        let m = (a * c).checked_add(b * d).ok_or(over.clone())?;
        let n = (a * d).checked_add(b * c).and_then(|v| v.checked_add(b * d)).ok_or(over.clone())?;
        let conv = |v: i128| i64::try_from(v).map_err(|_| over.clone());
        Ok(QuadInt { m: conv(m)?, n: conv(n)? })
    }

    /// Galois conjugate: `m + nτ′ = (m+n) − nτ`.
    pub fn checked_star(self) -> Result<QuadInt> {
        Ok(QuadInt {
            m: self.m.checked_add(self.n).ok_or(Error::Overflow("QuadInt star"))?,
            n: self.n.checked_neg().ok_or(Error::Overflow("QuadInt star"))?,
        })
    }

    /// Galois conjugate. Panics only if `m + n` leaves the `i64` range.
    pub fn star(self) -> QuadInt {
        self.checked_star().expect("star overflowed i64")
    }

    /// Field norm `q·σ(q) = m² + mn − n²`.
    pub fn norm(self) -> i128 {
        let (m, n) = (self.m as i128, self.n as i128);
        m * m + m * n - n * n
    }

    /// `m + nτ` in double precision, within about 2 ulp.
    pub fn embed(self) -> f64 {
        embed_pair(self.m as i128, self.n as i128, Irrational::Tau)
    }

    /// `m + nτ′` in double precision.
    pub fn embed_star(self) -> f64 {
        let (m, n) = (self.m as i128, self.n as i128);
        embed_pair(m + n, -n, Irrational::Tau)
    }

    /// Exact value as `((2m+n) + n√5)/2`.
    pub fn to_surd(self) -> Surd {
        Surd::new_unchecked(2 * self.m as i128 + self.n as i128, self.n as i128, 2)
    }

    /// Exact conjugate value `((2m+n) − n√5)/2`.
    pub fn star_surd(self) -> Surd {
        Surd::new_unchecked(2 * self.m as i128 + self.n as i128, -(self.n as i128), 2)
    }

    /// `√5·q`, i.e. `(2n−m) + (2m+n)τ`.
    pub fn checked_mul_sqrt5(self) -> Result<QuadInt> {
        self.checked_mul(QuadInt::SQRT5)
    }
}

impl Add for QuadInt {
    type Output = QuadInt;
    fn add(self, o: QuadInt) -> QuadInt {
        self.checked_add(o).expect("QuadInt addition overflowed i64")
    }
}

impl Sub for QuadInt {
    type Output = QuadInt;
    fn sub(self, o: QuadInt) -> QuadInt {
        self.checked_sub(o).expect("QuadInt subtraction overflowed i64")
    }
}

impl Mul for QuadInt {
    type Output = QuadInt;
    fn mul(self, o: QuadInt) -> QuadInt {
        self.checked_mul(o).expect("QuadInt multiplication overflowed i64")
    }
}

impl Neg for QuadInt {
    type Output = QuadInt;
    fn neg(self) -> QuadInt {
        self.checked_neg().expect("QuadInt negation overflowed i64")
    }
}

impl PartialOrd for QuadInt {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

/// Orders by real value.
impl Ord for QuadInt {
    fn cmp(&self, o: &Self) -> Ordering {
        self.to_surd().cmp(&o.to_surd())
    }
}

impl fmt::Display for QuadInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:+}τ", self.m, self.n)
    }
}

/// Element `u/√5` of (1/√5)ℤ[τ], the physical projection of the dual lattice.
///
/// The star map is `u/√5 ↦ σ(u)/(−√5)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct DualPoint {
    pub u: QuadInt,
}

impl DualPoint {
    pub const ZERO: DualPoint = DualPoint { u: QuadInt::ZERO };

    pub const fn new(u: QuadInt) -> Self {
        DualPoint { u }
    }

    /// The dual-lattice point with integer coordinates `(m, n)`, whose value
    /// is `(n − mτ′)/√5` and star `(mτ − n)/√5`.
    pub fn from_lattice_coords(m: i64, n: i64) -> Result<Self> {
        let a = n.checked_sub(m).ok_or(Error::Overflow("DualPoint coords"))?;
        Ok(DualPoint { u: QuadInt::new(a, m) })
    }

    /// Inverse of [`DualPoint::from_lattice_coords`].
    pub fn lattice_coords(self) -> (i64, i64) {
        (self.u.n, self.u.m + self.u.n)
    }

    pub fn is_zero(self) -> bool {
        self.u.is_zero()
    }

    /// `u/√5`.
    pub fn value(self) -> f64 {
        match self.u.checked_mul_sqrt5() {
            Ok(w) => w.embed() / 5.0,
            Err(_) => self.u.embed() / SQRT5,
        }
    }

    /// `σ(u)/(−√5)`.
    pub fn star(self) -> f64 {
        match self.u.checked_mul_sqrt5() {
            Ok(w) => w.embed_star() / 5.0,
            Err(_) => -self.u.embed_star() / SQRT5,
        }
    }

    /// Exact value `(5b + (2a+b)√5)/10` for `u = a + bτ`.
    pub fn value_surd(self) -> Surd {
        let (a, b) = (self.u.m as i128, self.u.n as i128);
        Surd::new_unchecked(5 * b, 2 * a + b, 10)
    }

    /// Exact star `(5b − (2a+b)√5)/10`.
    pub fn star_surd(self) -> Surd {
        let (a, b) = (self.u.m as i128, self.u.n as i128);
        Surd::new_unchecked(5 * b, -(2 * a + b), 10)
    }

    pub fn checked_add(self, o: DualPoint) -> Result<DualPoint> {
        Ok(DualPoint { u: self.u.checked_add(o.u)? })
    }

    pub fn checked_sub(self, o: DualPoint) -> Result<DualPoint> {
        Ok(DualPoint { u: self.u.checked_sub(o.u)? })
    }

    /// Multiplication by a ring element keeps the point in (1/√5)ℤ[τ].
    pub fn checked_scale(self, q: QuadInt) -> Result<DualPoint> {
        Ok(DualPoint { u: self.u.checked_mul(q)? })
    }
}

impl Add for DualPoint {
    type Output = DualPoint;
    fn add(self, o: DualPoint) -> DualPoint {
        DualPoint { u: self.u + o.u }
    }
}

impl Sub for DualPoint {
    type Output = DualPoint;
    fn sub(self, o: DualPoint) -> DualPoint {
        DualPoint { u: self.u - o.u }
    }
}

impl Neg for DualPoint {
    type Output = DualPoint;
    fn neg(self) -> DualPoint {
        DualPoint { u: -self.u }
    }
}

impl PartialOrd for DualPoint {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for DualPoint {
    fn cmp(&self, o: &Self) -> Ordering {
        self.u.cmp(&o.u)
    }
}

impl fmt::Display for DualPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})/√5", self.u)
    }
}

/// A point of the direct lattice or of the dual lattice, as an exact tag.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "side", rename_all = "lowercase")]
pub enum LatticePoint {
    Direct(QuadInt),
    Dual(DualPoint),
}

impl LatticePoint {
    pub fn position(self) -> f64 {
        match self {
            LatticePoint::Direct(q) => q.embed(),
            LatticePoint::Dual(p) => p.value(),
        }
    }

    pub fn star(self) -> f64 {
        match self {
            LatticePoint::Direct(q) => q.embed_star(),
            LatticePoint::Dual(p) => p.star(),
        }
    }

    pub fn position_surd(self) -> Surd {
        match self {
            LatticePoint::Direct(q) => q.to_surd(),
            LatticePoint::Dual(p) => p.value_surd(),
        }
    }

    pub fn star_surd(self) -> Surd {
        match self {
            LatticePoint::Direct(q) => q.star_surd(),
            LatticePoint::Dual(p) => p.star_surd(),
        }
    }

    /// Raw coefficients `(m, n)` of the underlying ring element.
    pub fn coefficients(self) -> (i64, i64) {
        match self {
            LatticePoint::Direct(q) => (q.m, q.n),
            LatticePoint::Dual(p) => (p.u.m, p.u.n),
        }
    }

    /// Difference of two tags on the same side.
    pub fn checked_sub(self, o: LatticePoint) -> Option<LatticePoint> {
        match (self, o) {
            (LatticePoint::Direct(a), LatticePoint::Direct(b)) => a.checked_sub(b).ok().map(LatticePoint::Direct),
            (LatticePoint::Dual(a), LatticePoint::Dual(b)) => a.checked_sub(b).ok().map(LatticePoint::Dual),
            _ => None,
        }
    }

    pub fn checked_add(self, o: LatticePoint) -> Option<LatticePoint> {
        match (self, o) {
            (LatticePoint::Direct(a), LatticePoint::Direct(b)) => a.checked_add(b).ok().map(LatticePoint::Direct),
            (LatticePoint::Dual(a), LatticePoint::Dual(b)) => a.checked_add(b).ok().map(LatticePoint::Dual),
            _ => None,
        }
    }
}

/// Exact element `(a + b√5)/d` of ℚ(√5), kept in lowest terms with `d > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Surd {
    a: i128,
    b: i128,
    d: i128,
}

impl Surd {
    pub const ZERO: Surd = Surd { a: 0, b: 0, d: 1 };
    pub const ONE: Surd = Surd { a: 1, b: 0, d: 1 };

    pub fn new(a: i128, b: i128, d: i128) -> Result<Surd> {
        if d == 0 {
            return Err(Error::InvalidArgument("zero denominator".into()));
        }
        Surd::reduce(a, b, d).ok_or(Error::Overflow("Surd normalisation"))
    }

    fn new_unchecked(a: i128, b: i128, d: i128) -> Surd {
        Surd::reduce(a, b, d).expect("Surd normalisation overflowed")
    }

    fn reduce(a: i128, b: i128, d: i128) -> Option<Surd> {
        let g = a.gcd(&b).gcd(&d);
        let (mut a, mut b, mut d) = (a / g, b / g, d / g);
        if d < 0 {
            a = a.checked_neg()?;
            b = b.checked_neg()?;
            d = d.checked_neg()?;
        }
        Some(Surd { a, b, d })
    }

    pub fn from_int(v: i128) -> Surd {
        Surd { a: v, b: 0, d: 1 }
    }

    pub fn rational(p: i128, q: i128) -> Result<Surd> {
        Surd::new(p, 0, q)
    }

    pub fn sqrt5() -> Surd {
        Surd { a: 0, b: 1, d: 1 }
    }

    pub fn tau() -> Surd {
        Surd { a: 1, b: 1, d: 2 }
    }

    pub fn tau_conj() -> Surd {
        Surd { a: 1, b: -1, d: 2 }
    }

    pub fn parts(self) -> (i128, i128, i128) {
        (self.a, self.b, self.d)
    }

    pub fn is_zero(self) -> bool {
        self.a == 0 && self.b == 0
    }

    pub fn is_rational(self) -> bool {
        self.b == 0
    }

    pub fn signum(self) -> Ordering {
        sign_ab(self.a, self.b)
    }

    pub fn abs(self) -> Surd {
        if self.signum() == Ordering::Less {
            -self
        } else {
            self
        }
    }

    /// Galois conjugate `(a − b√5)/d`.
    pub fn conj(self) -> Surd {
        Surd { a: self.a, b: -self.b, d: self.d }
    }

    pub fn to_f64(self) -> f64 {
        embed_pair(self.a, self.b, Irrational::Sqrt5) / self.d as f64
    }

    pub fn checked_add(self, o: Surd) -> Option<Surd> {
        let a = self.a.checked_mul(o.d)?.checked_add(o.a.checked_mul(self.d)?)?;
        let b = self.b.checked_mul(o.d)?.checked_add(o.b.checked_mul(self.d)?)?;
        Surd::reduce(a, b, self.d.checked_mul(o.d)?)
    }

    pub fn checked_sub(self, o: Surd) -> Option<Surd> {
        self.checked_add(o.checked_neg()?)
    }

    pub fn checked_neg(self) -> Option<Surd> {
        Some(Surd { a: self.a.checked_neg()?, b: self.b.checked_neg()?, d: self.d })
    }

    pub fn checked_mul(self, o: Surd) -> Option<Surd> {
        let a = self.a.checked_mul(o.a)?.checked_add(self.b.checked_mul(o.b)?.checked_mul(5)?)?;
        let b = self.a.checked_mul(o.b)?.checked_add(self.b.checked_mul(o.a)?)?;
        Surd::reduce(a, b, self.d.checked_mul(o.d)?)
    }

    pub fn checked_recip(self) -> Option<Surd> {
        if self.is_zero() {
            return None;
        }
        let norm = self.a.checked_mul(self.a)?.checked_sub(self.b.checked_mul(self.b)?.checked_mul(5)?)?;
        let a = self.d.checked_mul(self.a)?;
        let b = self.d.checked_mul(self.b)?.checked_neg()?;
        Surd::reduce(a, b, norm)
    }

    pub fn checked_div(self, o: Surd) -> Option<Surd> {
        self.checked_mul(o.checked_recip()?)
    }

    pub fn checked_pow(self, e: u32) -> Option<Surd> {
        let mut acc = Surd::ONE;
        for _ in 0..e {
            acc = acc.checked_mul(self)?;
        }
        Some(acc)
    }

    /// Largest integer not exceeding the value.
    pub fn floor(self) -> i128 {
        let mut f = self.to_f64().floor() as i128;
        while Surd::from_int(f + 1) <= self {
            f += 1;
        }
        while Surd::from_int(f) > self {
            f -= 1;
        }
        f
    }

    pub fn ceil(self) -> i128 {
        -(-self).floor()
    }
}

impl From<QuadInt> for Surd {
    fn from(q: QuadInt) -> Surd {
        q.to_surd()
    }
}

impl From<i64> for Surd {
    fn from(v: i64) -> Surd {
        Surd::from_int(v as i128)
    }
}

impl Add for Surd {
    type Output = Surd;
    fn add(self, o: Surd) -> Surd {
        self.checked_add(o).expect("Surd addition overflowed")
    }
}

impl Sub for Surd {
    type Output = Surd;
    fn sub(self, o: Surd) -> Surd {
        self.checked_sub(o).expect("Surd subtraction overflowed")
    }
}

impl Mul for Surd {
    type Output = Surd;
    fn mul(self, o: Surd) -> Surd {
        self.checked_mul(o).expect("Surd multiplication overflowed")
    }
}

impl Div for Surd {
    type Output = Surd;
    fn div(self, o: Surd) -> Surd {
        assert!(!o.is_zero(), "Surd division by zero");
        self.checked_div(o).expect("Surd division overflowed")
    }
}

impl Neg for Surd {
    type Output = Surd;
    fn neg(self) -> Surd {
        self.checked_neg().expect("Surd negation overflowed")
    }
}

impl PartialOrd for Surd {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for Surd {
    fn cmp(&self, o: &Self) -> Ordering {
        cmp_parts(self.a, self.b, self.d, o.a, o.b, o.d)
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.b, self.d) {
            (0, 1) => write!(f, "{}", self.a),
            (0, d) => write!(f, "{}/{}", self.a, d),
            (b, 1) => write!(f, "{}{:+}√5", self.a, b),
            (b, d) => write!(f, "({}{:+}√5)/{}", self.a, b, d),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn star_examples() {
        assert_eq!(QuadInt::ZERO.star(), QuadInt::ZERO);
        let t = QuadInt::TAU.star();
        assert_eq!(t, QuadInt::new(1, -1));
        assert!((t.embed() - (-0.61803398874989)).abs() < 1e-12);
        let q = QuadInt::new(2, -3).star();
        assert!((q.embed() - (2.0 - 3.0 * (1.0 - 5f64.sqrt()) / 2.0)).abs() < 1e-12);
        assert!((q.embed() - 3.854).abs() < 1e-3);
        assert_eq!(QuadInt::new(7, -4).star().star(), QuadInt::new(7, -4));
    }

    #[test]
    fn embed_examples() {
        assert_eq!(QuadInt::ONE.embed(), 1.0);
        assert_eq!(QuadInt::TAU.embed(), TAU);
        assert_eq!(QuadInt::new(-1, 2).embed(), 5f64.sqrt());
    }

    #[test]
    fn embed_survives_cancellation() {
        // F_{k+1} − F_k τ = τ′^k.
        let (mut a, mut b) = (1i64, 1i64);
        for _ in 0..60 {
            let (na, nb) = (a + b, a);
            a = na;
            b = nb;
        }
        let q = QuadInt::new(a, -b);
        // (a, b) = (F_62, F_61), so a − bτ = τ′^61.
        let expected = TAU_CONJ.powi(61);
        let rel = (q.embed() - expected).abs() / expected.abs();
        assert!(rel < 1e-12, "{} vs {}", q.embed(), expected);
    }

    #[test]
    fn dual_examples() {
        assert_eq!(DualPoint::ZERO.value(), 0.0);
        assert_eq!(DualPoint::ZERO.star(), 0.0);
        let p = DualPoint::from_lattice_coords(1, 0).unwrap();
        assert_eq!(p.u, QuadInt::new(-1, 1));
        assert!((p.value() - 0.27639).abs() < 1e-5);
        assert!((p.star() - TAU / SQRT5).abs() < 1e-15);
        let p = DualPoint::from_lattice_coords(0, 1).unwrap();
        assert!((p.value() - 1.0 / SQRT5).abs() < 1e-15);
        assert!((p.star() + 1.0 / SQRT5).abs() < 1e-15);
        assert_eq!(p.lattice_coords(), (0, 1));
    }

    #[test]
    fn dual_surds_match_floats() {
        for &(a, b) in &[(3i64, -7i64), (0, 1), (11, 4), (-9, 13)] {
            let p = DualPoint::new(QuadInt::new(a, b));
            assert!((p.value_surd().to_f64() - p.value()).abs() < 1e-13);
            assert!((p.star_surd().to_f64() - p.star()).abs() < 1e-13);
        }
    }

    #[test]
    fn overflow_is_reported() {
        let big = QuadInt::new(i64::MAX, 1);
        assert!(big.checked_add(QuadInt::ONE).is_err());
        assert!(big.checked_mul(QuadInt::TAU).is_err());
        assert!(QuadInt::new(i64::MIN, 0).checked_neg().is_err());
    }

    #[test]
    fn surd_arithmetic() {
        let t = Surd::tau();
        assert_eq!(t * t, t + Surd::ONE);
        assert_eq!(t + Surd::tau_conj(), Surd::ONE);
        assert_eq!(Surd::sqrt5() * Surd::sqrt5(), Surd::from_int(5));
        assert_eq!((t / t), Surd::ONE);
        assert!(Surd::sqrt5() > Surd::rational(2236, 1000).unwrap());
        assert!(Surd::sqrt5() < Surd::rational(2237, 1000).unwrap());
        assert_eq!(Surd::tau().floor(), 1);
        assert_eq!((-Surd::tau()).floor(), -2);
        assert_eq!(Surd::from_int(3).floor(), 3);
        assert_eq!(format!("{}", Surd::tau()), "(1+1√5)/2");
    }

    #[test]
    fn cmp_parts_falls_back_to_bigint() {
        let huge = i128::MAX / 3;
        assert_eq!(cmp_parts(huge, 1, 7, huge, 0, 7), Ordering::Greater);
        assert_eq!(cmp_parts(huge, -1, 7, huge, -1, 7), Ordering::Equal);
        assert_eq!(cmp_parts(huge, -huge, 7, 0, 0, 1), Ordering::Less);
    }
}
