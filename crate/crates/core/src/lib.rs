//! Exact Fibonacci cut-and-project scheme, diffraction estimators for its
//! weighted subsets, and almost-period certificates for the associated
//! ping-pong measure.

// `!(x > 0.0)` deliberately rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cps;
pub mod diffraction;
pub mod error;
pub mod measures;
pub mod numerics;
pub mod pingpong;
pub mod quadfield;
pub mod subset;

pub use cps::{Bound, Enumeration, EpsDualParams, ModelPoint, ModelSetQuery, Side, Window};
pub use error::{Error, Result};
pub use measures::{Atom, WeightedComb};
pub use pingpong::{AlmostPeriodReport, OmegaHatWeights, PiecewisePoly};
pub use quadfield::{DualPoint, LatticePoint, QuadInt, Surd, SQRT5, TAU, TAU_CONJ};
