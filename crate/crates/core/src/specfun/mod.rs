//! Special functions and scalar root finding used by the matching conditions.

mod bessel;
mod dd;
mod root;

pub use bessel::{
    bessel_i, bessel_i_prime, bessel_i_scaled, bessel_j, bessel_j_prime, bessel_k, bessel_k_log_derivative,
    bessel_k_prime, bessel_k_scaled, first_zero_j, BesselOrder, ASYMPTOTIC_CROSSOVER,
};
pub use root::{find_root, first_bracket, golden_max, BracketedRoot};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpecfunError {
    #[error("argument {x} outside the domain x > 0")]
    Domain { x: f64 },
    #[error("order {nu} is not a supported half-integer")]
    UnsupportedOrder { nu: f64 },
    #[error("I_nu({x}) overflows; use the scaled variant")]
    Overflow { x: f64 },
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RootError {
    #[error("no sign change on [{lo}, {hi}] (f = {f_lo}, {f_hi})")]
    NoSignChange { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },
    #[error("bisection did not converge on [{lo}, {hi}]")]
    MaxIterations { lo: f64, hi: f64 },
    #[error("sign change at {at} is a discontinuity (|f| = {residual})")]
    Discontinuity { at: f64, residual: f64 },
}
