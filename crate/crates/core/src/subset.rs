//! Named, reproducible subsets of Fib ∩ [−n, n].
//!
//! Grammar: `full | empty | bernoulli:p=<f>:seed=<u64> | stride:k=<int> | file:<path>`.

use std::fmt;
use std::fs::File;
use std::path::PathBuf;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cps::{fibonacci_points, Window};
use crate::error::{Error, Result};
use crate::measures::{read_comb_csv, read_comb_json, WeightedComb};
use crate::quadfield::LatticePoint;

/// Name of the generator used for Bernoulli thinning.
pub const RNG_NAME: &str = "ChaCha8";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum SubsetSpec {
    Full,
    Empty,
    Bernoulli {
        p: f64,
        seed: u64,
    },
    /// Every `k`-th point counted from the origin.
    Stride {
        k: usize,
    },
    File(PathBuf),
}

impl FromStr for SubsetSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |why: &str| Error::Parse(format!("subset spec {s:?}: {why}"));
        let mut parts = s.trim().split(':');
        let head = parts.next().unwrap_or("");
        let kv = |part: Option<&str>, key: &str| -> Result<String> {
            let part = part.ok_or_else(|| bad(&format!("missing {key}=")))?;
            part.strip_prefix(&format!("{key}="))
                .map(str::to_string)
                .ok_or_else(|| bad(&format!("expected {key}=<value>, got {part:?}")))
        };
        let spec = match head {
            "full" => SubsetSpec::Full,
            "empty" => SubsetSpec::Empty,
            "bernoulli" => {
                let p: f64 = kv(parts.next(), "p")?.parse().map_err(|_| bad("p is not a number"))?;
                let seed: u64 = kv(parts.next(), "seed")?.parse().map_err(|_| bad("seed is not a u64"))?;
                if !(0.0..=1.0).contains(&p) {
                    return Err(bad("p must lie in [0, 1]"));
                }
                SubsetSpec::Bernoulli { p, seed }
            }
            "stride" => {
                let k: usize = kv(parts.next(), "k")?.parse().map_err(|_| bad("k is not a positive integer"))?;
                if k == 0 {
                    return Err(bad("k must be positive"));
                }
                SubsetSpec::Stride { k }
            }
            "file" => {
                let rest: Vec<&str> = parts.collect();
                if rest.is_empty() || rest.join(":").is_empty() {
                    return Err(bad("missing path"));
                }
                return Ok(SubsetSpec::File(PathBuf::from(rest.join(":"))));
            }
            _ => return Err(bad("unknown subset kind")),
        };
        if parts.next().is_some() {
            return Err(bad("trailing fields"));
        }
        Ok(spec)
    }
}

impl fmt::Display for SubsetSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SubsetSpec::Full => write!(f, "full"),
            SubsetSpec::Empty => write!(f, "empty"),
            SubsetSpec::Bernoulli { p, seed } => write!(f, "bernoulli:p={p}:seed={seed}"),
            SubsetSpec::Stride { k } => write!(f, "stride:k={k}"),
            SubsetSpec::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}

impl SubsetSpec {
    /// The subset of Fib ∩ [−n, n] with unit weights (file subsets keep
    /// their weights).
    pub fn realize(&self, n: f64) -> Result<WeightedComb> {
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::InvalidArgument(format!("radius {n} must be positive")));
        }
        let fib = || fibonacci_points(-n, n);
        match self {
            SubsetSpec::Full => Ok(WeightedComb::from_points(&fib()?)),
            SubsetSpec::Empty => Ok(WeightedComb::empty()),
            SubsetSpec::Bernoulli { p, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let kept: Vec<_> = fib()?.into_iter().filter(|_| rng.random::<f64>() < *p).collect();
                Ok(WeightedComb::from_points(&kept))
            }
            SubsetSpec::Stride { k } => {
                let pts = fib()?;
                let origin = pts.iter().position(|p| p.position == 0.0).unwrap_or(0);
                let kept: Vec<_> = pts
                    .into_iter()
                    .enumerate()
                    .filter(|(i, _)| (*i as i64 - origin as i64).rem_euclid(*k as i64) == 0)
                    .map(|(_, p)| p)
                    .collect();
                Ok(WeightedComb::from_points(&kept))
            }
            SubsetSpec::File(path) => {
                let f = File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
                let comb =
                    if path.extension().is_some_and(|e| e == "json") { read_comb_json(f)? } else { read_comb_csv(f)? };
                check_subset_of_fib(&comb, n)?;
                Ok(comb)
            }
        }
    }
}

/// Every atom must lie in [−n, n]; tagged atoms must be points of Fib.
pub fn check_subset_of_fib(comb: &WeightedComb, n: f64) -> Result<()> {
    let w = Window::fibonacci();
    for a in comb.atoms() {
        if a.position.abs() > n {
            return Err(Error::OutsideWindow { count: 1, n });
        }
        match a.tag {
            Some(LatticePoint::Direct(q)) if !w.contains_surd(q.star_surd()) => {
                return Err(Error::InvalidArgument(format!("{q} is not a point of Fib")));
            }
            Some(LatticePoint::Dual(_)) => {
                return Err(Error::InvalidArgument("dual-lattice tag in a point set".into()));
            }
            _ => {}
        }
    }
    Ok(())
}
