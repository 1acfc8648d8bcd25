//! Numerical laboratory for `u_t = Δu^m + 1_{B_L}(x) u^p` in radial symmetry:
//! special solutions (stationary, exponential, self-similar), a radial PDE
//! solver, rate fitting and the paper's regime classification.

// `!(x > 0.0)` is used on purpose throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod eigen;
pub mod ode;
pub mod params;
pub mod pde;
pub mod rates;
pub mod selfsim;
pub mod specfun;
pub mod stationary;
pub mod verify;

pub use params::{classify_regime, exponents, Boundedness, ExponentTable, Globality, ProblemParams, Regime, RateLaw};
