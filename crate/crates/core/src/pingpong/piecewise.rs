//! Compactly supported piecewise polynomials with coefficients and
//! breakpoints in ℚ(√5).

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadfield::Surd;

/// Polynomial `Σ c_k x^k` in the global coordinate, lowest degree first.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Poly {
    coeffs: Vec<Surd>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Surd>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: Surd) -> Self {
        Poly::new(vec![c])
    }

    pub fn coeffs(&self) -> &[Surd] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, x: Surd) -> Surd {
        self.coeffs.iter().rev().fold(Surd::ZERO, |acc, &c| acc * x + c)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c.to_f64())
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let len = self.coeffs.len().max(o.coeffs.len());
        let get = |p: &Poly, i: usize| p.coeffs.get(i).copied().unwrap_or(Surd::ZERO);
        Poly::new((0..len).map(|i| get(self, i) + get(o, i)).collect())
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.scale(-Surd::ONE))
    }

    pub fn scale(&self, s: Surd) -> Poly {
        Poly::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    /// Antiderivative vanishing at `x = 0`.
    pub fn antiderivative(&self) -> Poly {
        let mut out = vec![Surd::ZERO];
        for (k, &c) in self.coeffs.iter().enumerate() {
            out.push(c / Surd::from_int(k as i128 + 1));
        }
        Poly::new(out)
    }

    /// `x ↦ p(x + a)`.
    pub fn shift(&self, a: Surd) -> Poly {
        let mut out = vec![Surd::ZERO; self.coeffs.len()];
        for (k, &c) in self.coeffs.iter().enumerate() {
            // (x + a)^k = Σ_j C(k, j) a^{k−j} x^j
            let mut binom: i128 = 1;
            for j in (0..=k).rev() {
                let pow = a.checked_pow((k - j) as u32).expect("shift overflowed");
                out[j] = out[j] + c * pow * Surd::from_int(binom);
                binom = binom * j as i128 / (k - j + 1) as i128;
            }
        }
        Poly::new(out)
    }
}

/// Piecewise polynomial supported on `[breaks[0], breaks[last]]`; piece `i`
/// lives on `[breaks[i], breaks[i+1]]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PiecewisePoly {
    breaks: Vec<Surd>,
    pieces: Vec<Poly>,
}

impl PiecewisePoly {
    pub fn new(breaks: Vec<Surd>, pieces: Vec<Poly>) -> Result<Self> {
        if breaks.len() != pieces.len() + 1 || pieces.is_empty() {
            return Err(Error::InvalidArgument("need one more breakpoint than pieces".into()));
        }
        if breaks.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument("breakpoints must increase strictly".into()));
        }
        Ok(PiecewisePoly { breaks, pieces })
    }

    /// `height · 1_{[lo, hi]}`.
    pub fn indicator(lo: Surd, hi: Surd, height: Surd) -> Result<Self> {
        PiecewisePoly::new(vec![lo, hi], vec![Poly::constant(height)])
    }

    pub fn breakpoints(&self) -> &[Surd] {
        &self.breaks
    }

    pub fn pieces(&self) -> &[Poly] {
        &self.pieces
    }

    pub fn support(&self) -> (Surd, Surd) {
        (self.breaks[0], *self.breaks.last().unwrap())
    }

    pub fn max_degree(&self) -> usize {
        self.pieces.iter().filter_map(Poly::degree).max().unwrap_or(0)
    }

    fn piece_index(&self, x: Surd) -> Option<usize> {
        let (lo, hi) = self.support();
        if x < lo || x > hi {
            return None;
        }
        let i = self.breaks.partition_point(|b| *b <= x);
        Some(i.saturating_sub(1).min(self.pieces.len() - 1))
    }

    pub fn eval_exact(&self, x: Surd) -> Surd {
        match self.piece_index(x) {
            Some(i) => self.pieces[i].eval(x),
            None => Surd::ZERO,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let (lo, hi) = (self.breaks[0].to_f64(), self.breaks.last().unwrap().to_f64());
        if !(x >= lo && x <= hi) {
            return 0.0;
        }
        let i = self.breaks.partition_point(|b| b.to_f64() <= x);
        self.pieces[i.saturating_sub(1).min(self.pieces.len() - 1)].eval_f64(x)
    }

    pub fn scale(&self, s: Surd) -> Self {
        PiecewisePoly { breaks: self.breaks.clone(), pieces: self.pieces.iter().map(|p| p.scale(s)).collect() }
    }

    /// Exact `∫ p`.
    pub fn integral(&self) -> Surd {
        self.pieces.iter().enumerate().fold(Surd::ZERO, |acc, (i, p)| {
            let a = p.antiderivative();
            acc + a.eval(self.breaks[i + 1]) - a.eval(self.breaks[i])
        })
    }

    /// Left and right limits agree at every breakpoint, and the function
    /// vanishes at both ends of the support.
    pub fn is_continuous(&self) -> bool {
        let first = self.pieces[0].eval(self.breaks[0]).is_zero();
        let last = self.pieces.last().unwrap().eval(*self.breaks.last().unwrap()).is_zero();
        first
            && last
            && (1..self.pieces.len())
                .all(|i| self.pieces[i - 1].eval(self.breaks[i]) == self.pieces[i].eval(self.breaks[i]))
    }

    /// Merges neighbouring pieces carrying the same polynomial.
    pub fn simplify(&self) -> Self {
        let mut breaks = vec![self.breaks[0]];
        let mut pieces: Vec<Poly> = Vec::new();
        for (i, p) in self.pieces.iter().enumerate() {
            if pieces.last() == Some(p) {
                *breaks.last_mut().unwrap() = self.breaks[i + 1];
            } else {
                pieces.push(p.clone());
                breaks.push(self.breaks[i + 1]);
            }
        }
        PiecewisePoly { breaks, pieces }
    }

    /// The pieces overlapping the open interval `(lo, hi)`.
    pub fn pieces_meeting(&self, lo: Surd, hi: Surd) -> Vec<(Surd, Surd, &Poly)> {
        (0..self.pieces.len())
            .filter(|&i| self.breaks[i] < hi && self.breaks[i + 1] > lo)
            .map(|i| (self.breaks[i], self.breaks[i + 1], &self.pieces[i]))
            .collect()
    }

    /// Exact convolution with `1_{[−a, a]}`:
    /// `(p ∗ 1_{[−a,a]})(x) = F(x + a) − F(x − a)` with `F` the running integral.
    pub fn box_convolve(&self, a: Surd) -> Result<Self> {
        if a.signum() != Ordering::Greater {
            return Err(Error::InvalidArgument(format!("box half-width {a} must be positive")));
        }
        // Running integral, piece by piece, continuous across breakpoints.
        let mut running = Vec::with_capacity(self.pieces.len());
        let mut acc = Surd::ZERO;
        for (i, p) in self.pieces.iter().enumerate() {
            let anti = p.antiderivative();
            let c = acc - anti.eval(self.breaks[i]);
            let f = anti.add(&Poly::constant(c));
            acc = f.eval(self.breaks[i + 1]);
            running.push(f);
        }
        let total = acc;
        let (lo, hi) = self.support();
        let f_at = |y: Surd| -> Poly {
            if y <= lo {
                Poly::zero()
            } else if y >= hi {
                Poly::constant(total)
            } else {
                running[self.piece_index(y).unwrap()].clone()
            }
        };
        let mut breaks: Vec<Surd> = self.breaks.iter().flat_map(|&b| [b - a, b + a]).collect();
        breaks.sort();
        breaks.dedup();
        let two = Surd::from_int(2);
        let pieces: Vec<Poly> = breaks
            .windows(2)
            .map(|w| {
                let mid = (w[0] + w[1]) / two;
                f_at(mid + a).shift(a).sub(&f_at(mid - a).shift(-a))
            })
            .collect();
        PiecewisePoly::new(breaks, pieces)
    }
}
