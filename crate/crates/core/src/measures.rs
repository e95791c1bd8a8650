//! Finite weighted Dirac combs, their autocorrelation, and the sliding-window
//! norm `‖μ‖_K = sup_t |μ|(t + K)`.

use std::collections::HashMap;
use std::io::{Read, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cps::{ModelPoint, Side};
use crate::error::{Error, Result};
use crate::numerics::two_sum;
use crate::quadfield::{DualPoint, LatticePoint, QuadInt, TAU_CONJ};

/// Absolute tolerance for merging untagged atoms.
pub const MERGE_TOL: f64 = 1e-12;
/// Largest comb accepted by the pair-sum autocorrelation.
pub const MAX_PAIR_ATOMS: usize = 200_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub position: f64,
    pub weight: Complex64,
    pub tag: Option<LatticePoint>,
}

impl Atom {
    pub fn new(position: f64, weight: Complex64) -> Self {
        Atom { position, weight, tag: None }
    }

    /// Atom at an exact lattice point; the position is the tag's embedding.
    pub fn tagged(tag: LatticePoint, weight: Complex64) -> Self {
        Atom { position: tag.position(), weight, tag: Some(tag) }
    }
}

fn same_point(a: &Atom, b: &Atom) -> bool {
    match (a.tag, b.tag) {
        (Some(x), Some(y)) => x == y,
        _ => (a.position - b.position).abs() <= MERGE_TOL,
    }
}

fn tag_key(t: Option<LatticePoint>) -> (u8, i64, i64) {
    match t {
        None => (0, 0, 0),
        Some(LatticePoint::Direct(q)) => (1, q.m, q.n),
        Some(LatticePoint::Dual(p)) => (2, p.u.m, p.u.n),
    }
}

/// A finite pure-point measure `Σ c_x δ_x`, sorted by position with
/// coincident atoms merged and zero weights dropped.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct WeightedComb {
    atoms: Vec<Atom>,
}

impl WeightedComb {
    pub fn new(mut atoms: Vec<Atom>) -> Self {
        atoms.sort_by(|a, b| a.position.total_cmp(&b.position).then_with(|| tag_key(a.tag).cmp(&tag_key(b.tag))));
        let mut out: Vec<Atom> = Vec::with_capacity(atoms.len());
        for a in atoms {
            match out.last_mut() {
                Some(last) if same_point(last, &a) => {
                    last.weight += a.weight;
                    if last.tag.is_none() {
                        last.tag = a.tag;
                    }
                }
                _ => out.push(a),
            }
        }
        out.retain(|a| a.weight != Complex64::new(0.0, 0.0));
        WeightedComb { atoms: out }
    }

    pub fn empty() -> Self {
        WeightedComb::default()
    }

    /// Unit weights on the given model points, with exact tags.
    pub fn from_points(points: &[ModelPoint]) -> Self {
        WeightedComb::new(
            points
                .iter()
                .map(|p| Atom { position: p.position, weight: Complex64::new(1.0, 0.0), tag: Some(p.point) })
                .collect(),
        )
    }

    /// Unit weights at untagged positions.
    pub fn from_positions(positions: &[f64]) -> Self {
        WeightedComb::new(positions.iter().map(|&x| Atom::new(x, Complex64::new(1.0, 0.0))).collect())
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn into_atoms(self) -> Vec<Atom> {
        self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// `|μ|(ℝ)`.
    pub fn total_variation(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight.norm()).sum()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        WeightedComb::new(self.atoms.iter().map(|a| Atom { weight: a.weight * s, ..*a }).collect())
    }

    pub fn add(&self, other: &WeightedComb) -> Self {
        WeightedComb::new(self.atoms.iter().chain(other.atoms.iter()).copied().collect())
    }

    pub fn sub(&self, other: &WeightedComb) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// Atoms with position in `[lo, hi]`.
    pub fn restrict(&self, lo: f64, hi: f64) -> Self {
        WeightedComb { atoms: self.atoms.iter().filter(|a| a.position >= lo && a.position <= hi).copied().collect() }
    }

    /// Weight of the atom at `tag`, zero when absent.
    pub fn weight_at(&self, tag: LatticePoint) -> Complex64 {
        let x = tag.position();
        let start = self.atoms.partition_point(|a| a.position < x - MERGE_TOL);
        self.atoms[start..]
            .iter()
            .take_while(|a| a.position <= x + MERGE_TOL)
            .find(|a| a.tag == Some(tag))
            .map(|a| a.weight)
            .unwrap_or_default()
    }

    /// True when every atom carries a direct-lattice tag.
    pub fn all_direct(&self) -> bool {
        self.atoms.iter().all(|a| matches!(a.tag, Some(LatticePoint::Direct(_))))
    }
}

/// Finite-radius autocorrelation `η̂_n(z) = (1/2n) Σ_{x−y=z} c_x conj(c_y)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AutocorrEstimate {
    pub comb: WeightedComb,
    /// Averaging radius; A_n = [−n, n].
    pub n: f64,
    /// Largest |z| retained.
    pub lag_radius: f64,
    /// `η̂_n(0)`.
    pub density: f64,
}

impl AutocorrEstimate {
    pub fn eta_zero(&self) -> f64 {
        self.density
    }
}

/// Autocorrelation over all differences.
pub fn autocorrelation(comb: &WeightedComb, n: f64) -> Result<AutocorrEstimate> {
    autocorrelation_with_lag(comb, n, 2.0 * n)
}

/// Autocorrelation restricted to differences with `|z| ≤ lag`.
pub fn autocorrelation_with_lag(comb: &WeightedComb, n: f64, lag: f64) -> Result<AutocorrEstimate> {
    if !(n > 0.0 && n.is_finite()) {
        return Err(Error::InvalidArgument(format!("averaging radius {n} must be positive")));
    }
    if !(lag >= 0.0) {
        return Err(Error::InvalidArgument(format!("lag radius {lag} must be non-negative")));
    }
    let outside = comb.atoms.iter().filter(|a| a.position.abs() > n).count();
    if outside > 0 {
        return Err(Error::OutsideWindow { count: outside, n });
    }
    if comb.len() > MAX_PAIR_ATOMS {
        return Err(Error::TooLarge { count: comb.len(), limit: MAX_PAIR_ATOMS });
    }
    let half = if comb.all_direct() && !comb.is_empty() {
        pair_sums_direct(&comb.atoms, lag)
    } else if comb.atoms.iter().all(|a| a.tag.is_some()) && !comb.is_empty() {
        pair_sums_tagged(&comb.atoms, lag)
    } else {
        pair_sums_float(&comb.atoms, lag)
    };
    let norm = 1.0 / (2.0 * n);
    let mut atoms = Vec::with_capacity(2 * half.len());
    let mut density = 0.0;
    for a in half {
        let w = a.weight * norm;
        let is_zero = match a.tag {
            Some(t) => t.coefficients() == (0, 0),
            None => a.position == 0.0,
        };
        if is_zero {
            density = w.re;
            atoms.push(Atom { weight: Complex64::new(w.re, 0.0), ..a });
        } else {
            atoms.push(Atom { weight: w, ..a });
            let tag = a.tag.map(|t| match t {
                LatticePoint::Direct(q) => LatticePoint::Direct(-q),
                LatticePoint::Dual(p) => LatticePoint::Dual(-p),
            });
            atoms.push(Atom { position: -a.position, weight: w.conj(), tag });
        }
    }
    Ok(AutocorrEstimate { comb: WeightedComb::new(atoms), n, lag_radius: lag, density })
}

/// Pair sums for `z ≥ 0` with direct tags, bucketed in a dense array indexed by
/// `(Δn, Δm − base(Δn))`, where `base` follows `z⋆ = Δm + Δnτ′`.
fn pair_sums_direct(atoms: &[Atom], lag: f64) -> Vec<Atom> {
    let tags: Vec<QuadInt> = atoms
        .iter()
        .map(|a| match a.tag {
            Some(LatticePoint::Direct(q)) => q,
            _ => unreachable!("caller checked direct tags"),
        })
        .collect();
    let stars: Vec<f64> = tags.iter().map(|q| q.embed_star()).collect();
    let s_min = stars.iter().copied().fold(f64::INFINITY, f64::min);
    let s_max = stars.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = s_max - s_min;
    let dn_lo = ((-span) / crate::SQRT5).floor() as i64 - 2;
    let dn_hi = ((lag + span) / crate::SQRT5).ceil() as i64 + 2;
    let slots = (2.0 * span).ceil() as i64 + 4;
    let rows = (dn_hi - dn_lo + 1) as usize;
    if (rows as u128) * (slots as u128) > 50_000_000 {
        return pair_sums_tagged(atoms, lag);
    }
    let base: Vec<i64> = (dn_lo..=dn_hi).map(|dn| (-span - dn as f64 * TAU_CONJ).floor() as i64 - 1).collect();
    let slots_u = slots as usize;
    let mut acc = vec![Complex64::new(0.0, 0.0); rows * slots_u];
    let mut used = vec![false; rows * slots_u];
    let mut overflow: HashMap<(i64, i64), Complex64> = HashMap::new();
    let limit = lag * (1.0 + 1e-15) + 1e-12;
    for i in 0..atoms.len() {
        let (xi, ci, ti) = (atoms[i].position, atoms[i].weight.conj(), tags[i]);
        for j in i..atoms.len() {
            if atoms[j].position - xi > limit {
                break;
            }
            let dm = tags[j].m - ti.m;
            let dn = tags[j].n - ti.n;
            let w = atoms[j].weight * ci;
            let row = dn - dn_lo;
            let col = if row >= 0 && (row as usize) < rows { dm - base[row as usize] } else { -1 };
            if col >= 0 && col < slots {
                let idx = row as usize * slots_u + col as usize;
                acc[idx] += w;
                used[idx] = true;
            } else {
                *overflow.entry((dm, dn)).or_default() += w;
            }
        }
    }
    let mut out = Vec::new();
    for (row, b) in base.iter().enumerate() {
        for col in 0..slots_u {
            let idx = row * slots_u + col;
            if used[idx] {
                let q = QuadInt::new(b + col as i64, dn_lo + row as i64);
                out.push(Atom::tagged(LatticePoint::Direct(q), acc[idx]));
            }
        }
    }
    let mut rest: Vec<_> = overflow.into_iter().collect();
    rest.sort_by_key(|&((m, n), _)| (n, m));
    for ((m, n), w) in rest {
        out.push(Atom::tagged(LatticePoint::Direct(QuadInt::new(m, n)), w));
    }
    out
}

/// Pair sums for `z ≥ 0` grouped by exact tag difference in a hash map.
fn pair_sums_tagged(atoms: &[Atom], lag: f64) -> Vec<Atom> {
    let mut groups: HashMap<LatticePoint, Complex64> = HashMap::new();
    let limit = lag * (1.0 + 1e-15) + 1e-12;
    for i in 0..atoms.len() {
        let (xi, ci, ti) = (atoms[i].position, atoms[i].weight.conj(), atoms[i].tag.unwrap());
        for aj in &atoms[i..] {
            if aj.position - xi > limit {
                break;
            }
            match aj.tag.unwrap().checked_sub(ti) {
                Some(z) => *groups.entry(z).or_default() += aj.weight * ci,
                None => {
                    // Mixed sides cannot be grouped exactly.
                    return pair_sums_float(atoms, lag);
                }
            }
        }
    }
    let mut out: Vec<Atom> = groups.into_iter().map(|(z, w)| Atom::tagged(z, w)).collect();
    out.sort_by(|a, b| a.position.total_cmp(&b.position).then_with(|| tag_key(a.tag).cmp(&tag_key(b.tag))));
    out
}

/// Pair sums for `z ≥ 0` on untagged data: sort by difference, merge within tolerance.
fn pair_sums_float(atoms: &[Atom], lag: f64) -> Vec<Atom> {
    let mut pairs: Vec<(f64, Complex64)> = Vec::new();
    let limit = lag * (1.0 + 1e-15) + 1e-12;
    for i in 0..atoms.len() {
        let (xi, ci) = (atoms[i].position, atoms[i].weight.conj());
        for aj in &atoms[i..] {
            let z = aj.position - xi;
            if z > limit {
                break;
            }
            pairs.push((z, aj.weight * ci));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<Atom> = Vec::new();
    for (z, w) in pairs {
        match out.last_mut() {
            Some(last) if (z - last.position).abs() <= MERGE_TOL => last.weight += w,
            _ => out.push(Atom::new(if z <= MERGE_TOL { 0.0 } else { z }, w)),
        }
    }
    out
}

/// Result of [`window_norm`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowNorm {
    pub k_lo: f64,
    pub k_hi: f64,
    pub value: f64,
    /// A translate `t` with `|μ|(t + K) = value`.
    pub attained_at: f64,
}

/// `sup_t |μ|([t + k_lo, t + k_hi])` for the closed window K.
///
/// The supremum over a finite atom set is attained with an atom on the left
/// endpoint, so only those translates are swept. Atoms within `MERGE_TOL`
/// of the right endpoint are counted, which can only enlarge the value.
/// Window sums come from double-word prefix sums of `|w|`.
pub fn window_norm(mu: &WeightedComb, k_lo: f64, k_hi: f64) -> Result<WindowNorm> {
    if !(k_lo.is_finite() && k_hi.is_finite() && k_hi > k_lo) {
        return Err(Error::InvalidArgument(format!("window [{k_lo}, {k_hi}] must have positive length")));
    }
    let len = k_hi - k_lo;
    let atoms = &mu.atoms;
    let mut prefix = Vec::with_capacity(atoms.len() + 1);
    let (mut hi, mut lo) = (0.0f64, 0.0f64);
    prefix.push((hi, lo));
    for a in atoms {
        let (s, e) = two_sum(hi, a.weight.norm());
        hi = s;
        lo += e;
        prefix.push((hi, lo));
    }
    let mut best = WindowNorm { k_lo, k_hi, value: 0.0, attained_at: 0.0 };
    let mut end = 0;
    for i in 0..atoms.len() {
        let right = atoms[i].position + len + MERGE_TOL;
        end = end.max(i);
        while end < atoms.len() && atoms[end].position <= right {
            end += 1;
        }
        let v = (prefix[end].0 - prefix[i].0) + (prefix[end].1 - prefix[i].1);
        if v > best.value {
            best.value = v;
            best.attained_at = atoms[i].position - k_lo;
        }
    }
    Ok(best)
}

/// `T_t μ − μ` for a real translation `t`; atoms merge within `MERGE_TOL`.
pub fn translate_diff(mu: &WeightedComb, t: f64) -> WeightedComb {
    let mut atoms = Vec::with_capacity(2 * mu.len());
    for a in &mu.atoms {
        atoms.push(Atom { position: a.position + t, weight: a.weight, tag: None });
        atoms.push(Atom { position: a.position, weight: -a.weight, tag: None });
    }
    WeightedComb::new(atoms)
}

/// `T_t μ − μ` for an exact lattice translation; tagged atoms re-align exactly.
pub fn translate_diff_exact(mu: &WeightedComb, t: LatticePoint) -> WeightedComb {
    let mut atoms = Vec::with_capacity(2 * mu.len());
    let tf = t.position();
    for a in &mu.atoms {
        let shifted = match a.tag.and_then(|x| x.checked_add(t)) {
            Some(tag) => Atom::tagged(tag, a.weight),
            None => Atom { position: a.position + tf, weight: a.weight, tag: None },
        };
        atoms.push(shifted);
        atoms.push(Atom { weight: -a.weight, ..*a });
    }
    WeightedComb::new(atoms)
}

/// One serialized atom.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AtomRecord {
    pub position: f64,
    pub re_weight: f64,
    pub im_weight: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub side: Option<Side>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<i64>,
}

impl From<&Atom> for AtomRecord {
    fn from(a: &Atom) -> Self {
        let (side, m, n) = match a.tag {
            Some(LatticePoint::Direct(q)) => (Some(Side::Direct), Some(q.m), Some(q.n)),
            Some(LatticePoint::Dual(p)) => (Some(Side::Dual), Some(p.u.m), Some(p.u.n)),
            None => (None, None, None),
        };
        AtomRecord { position: a.position, re_weight: a.weight.re, im_weight: a.weight.im, side, m, n }
    }
}

impl AtomRecord {
    pub fn to_atom(&self) -> Result<Atom> {
        let weight = Complex64::new(self.re_weight, self.im_weight);
        match (self.m, self.n) {
            (Some(m), Some(n)) => {
                let q = QuadInt::new(m, n);
                let tag = match self.side.unwrap_or(Side::Direct) {
                    Side::Direct => LatticePoint::Direct(q),
                    Side::Dual => LatticePoint::Dual(DualPoint::new(q)),
                };
                Ok(Atom::tagged(tag, weight))
            }
            (None, None) => Ok(Atom::new(self.position, weight)),
            _ => Err(Error::Parse("exact tag needs both m and n".into())),
        }
    }
}

/// Formats a float with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes `position,re_weight,im_weight,side,m,n` rows.
pub fn write_comb_csv<W: Write>(comb: &WeightedComb, w: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["position", "re_weight", "im_weight", "side", "m", "n"])?;
    for a in &comb.atoms {
        let r = AtomRecord::from(a);
        let side = match r.side {
            Some(Side::Direct) => "direct",
            Some(Side::Dual) => "dual",
            None => "",
        };
        let opt = |v: Option<i64>| v.map(|x| x.to_string()).unwrap_or_default();
        wtr.write_record([
            fmt_f64(r.position),
            fmt_f64(r.re_weight),
            fmt_f64(r.im_weight),
            side.to_string(),
            opt(r.m),
            opt(r.n),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

/// Reads a comb written by [`write_comb_csv`]; `side`, `m`, `n` columns are optional
/// and `#` lines are comments.
pub fn read_comb_csv<R: Read>(r: R) -> Result<WeightedComb> {
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(r);
    let headers = rdr.headers()?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let (pi, ri, ii) = (col("position"), col("re_weight"), col("im_weight"));
    let (si, mi, ni) = (col("side"), col("m"), col("n"));
    let pi = pi.ok_or_else(|| Error::Parse("missing position column".into()))?;
    let mut atoms = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let field = |i: Option<usize>| i.and_then(|i| rec.get(i)).filter(|s| !s.is_empty());
        let num = |s: &str| s.parse::<f64>().map_err(|e| Error::Parse(format!("{s}: {e}")));
        let int = |s: &str| s.parse::<i64>().map_err(|e| Error::Parse(format!("{s}: {e}")));
        let side = match field(si) {
            None => None,
            Some("direct") => Some(Side::Direct),
            Some("dual") => Some(Side::Dual),
            Some(other) => return Err(Error::Parse(format!("unknown side {other}"))),
        };
        let record = AtomRecord {
            position: num(field(Some(pi)).unwrap_or("0"))?,
            re_weight: field(ri).map(num).transpose()?.unwrap_or(1.0),
            im_weight: field(ii).map(num).transpose()?.unwrap_or(0.0),
            side,
            m: field(mi).map(int).transpose()?,
            n: field(ni).map(int).transpose()?,
        };
        atoms.push(record.to_atom()?);
    }
    Ok(WeightedComb::new(atoms))
}

#[derive(Serialize, Deserialize)]
struct CombJson {
    atoms: Vec<AtomRecord>,
}

pub fn write_comb_json<W: Write>(comb: &WeightedComb, w: W) -> Result<()> {
    let doc = CombJson { atoms: comb.atoms.iter().map(AtomRecord::from).collect() };
    serde_json::to_writer_pretty(w, &doc)?;
    Ok(())
}

pub fn read_comb_json<R: Read>(r: R) -> Result<WeightedComb> {
    let doc: CombJson = serde_json::from_reader(r)?;
    let atoms = doc.atoms.iter().map(AtomRecord::to_atom).collect::<Result<Vec<_>>>()?;
    Ok(WeightedComb::new(atoms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cps::fibonacci_points;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn single_atom_autocorrelation() {
        let comb = WeightedComb::new(vec![Atom::new(0.0, c(1.0))]);
        let ac = autocorrelation(&comb, 1.0).unwrap();
        assert_eq!(ac.density, 0.5);
        assert_eq!(ac.comb.len(), 1);
    }

    #[test]
    fn autocorrelation_rejects_outside_points() {
        let comb = WeightedComb::from_positions(&[0.0, 2.5]);
        assert!(matches!(autocorrelation(&comb, 2.0), Err(Error::OutsideWindow { count: 1, .. })));
    }

    #[test]
    fn exact_and_float_paths_agree() {
        let pts = fibonacci_points(-50.0, 50.0).unwrap();
        let tagged = WeightedComb::from_points(&pts);
        let untagged = WeightedComb::from_positions(&tagged.atoms().iter().map(|a| a.position).collect::<Vec<_>>());
        let a = autocorrelation(&tagged, 50.0).unwrap();
        let b = autocorrelation(&untagged, 50.0).unwrap();
        assert_eq!(a.comb.len(), b.comb.len());
        for (x, y) in a.comb.atoms().iter().zip(b.comb.atoms()) {
            assert!((x.position - y.position).abs() < 1e-9);
            assert!((x.weight - y.weight).norm() < 1e-12);
        }
        assert_eq!(a.density, b.density);
    }

    #[test]
    fn autocorrelation_is_hermitian() {
        let pts = fibonacci_points(-30.0, 30.0).unwrap();
        let atoms: Vec<Atom> = pts
            .iter()
            .enumerate()
            .map(|(i, p)| Atom::tagged(p.point, Complex64::new((i % 3) as f64, (i % 5) as f64 - 2.0)))
            .collect();
        let ac = autocorrelation(&WeightedComb::new(atoms), 30.0).unwrap();
        for a in ac.comb.atoms() {
            let neg = match a.tag.unwrap() {
                LatticePoint::Direct(q) => LatticePoint::Direct(-q),
                LatticePoint::Dual(p) => LatticePoint::Dual(-p),
            };
            let b = ac.comb.weight_at(neg);
            assert!((a.weight - b.conj()).norm() <= 1e-12);
        }
        assert!(ac.density >= 0.0);
    }

    #[test]
    fn window_norm_examples() {
        let mu = WeightedComb::new(vec![Atom::new(0.0, c(1.0)), Atom::new(0.5, c(1.0))]);
        assert_eq!(window_norm(&mu, 0.0, 1.0).unwrap().value, 2.0);
        let zero = WeightedComb::new(vec![Atom::new(0.0, c(1.0)), Atom::new(0.0, c(-1.0))]);
        assert!(zero.is_empty());
        assert_eq!(window_norm(&zero, 0.0, 1.0).unwrap().value, 0.0);
        assert!(window_norm(&mu, 1.0, 1.0).is_err());
    }

    #[test]
    fn window_norm_closed_endpoints() {
        let mu = WeightedComb::from_positions(&[0.0, 1.0, 2.0]);
        assert_eq!(window_norm(&mu, 0.0, 1.0).unwrap().value, 2.0);
        assert_eq!(window_norm(&mu, -0.5, 1.5).unwrap().value, 3.0);
    }

    #[test]
    fn translate_diff_examples() {
        let mu = WeightedComb::new(vec![Atom::tagged(LatticePoint::Direct(QuadInt::ZERO), c(1.0))]);
        assert!(translate_diff(&mu, 0.0).is_empty());
        assert!(translate_diff_exact(&mu, LatticePoint::Direct(QuadInt::ZERO)).is_empty());
        let d = translate_diff_exact(&mu, LatticePoint::Direct(QuadInt::ONE));
        assert_eq!(d.len(), 2);
        assert_eq!(d.atoms()[0].position, 0.0);
        assert_eq!(d.atoms()[0].weight, c(-1.0));
        assert_eq!(d.atoms()[1].position, 1.0);
        assert_eq!(d.atoms()[1].weight, c(1.0));
    }

    #[test]
    fn csv_and_json_round_trip() {
        let pts = fibonacci_points(-5.0, 5.0).unwrap();
        let mut comb = WeightedComb::from_points(&pts);
        comb = comb.add(&WeightedComb::new(vec![Atom::new(0.123, Complex64::new(0.5, -0.25))]));
        let mut buf = Vec::new();
        write_comb_csv(&comb, &mut buf).unwrap();
        assert_eq!(read_comb_csv(buf.as_slice()).unwrap(), comb);
        let mut buf = Vec::new();
        write_comb_json(&comb, &mut buf).unwrap();
        assert_eq!(read_comb_json(buf.as_slice()).unwrap(), comb);
    }

    #[test]
    fn csv_minimal_columns() {
        let text = "# comment\nposition\n1.5\n-2\n";
        let comb = read_comb_csv(text.as_bytes()).unwrap();
        assert_eq!(comb.len(), 2);
        assert_eq!(comb.atoms()[0].position, -2.0);
        assert_eq!(comb.atoms()[1].weight, c(1.0));
    }
}
