//! Radial stationary solutions of §2.1.
//!
//! Inside the ball `w = u^m` solves `Δw + w^γ = 0`; after the scaling
//! `w(r) = A v(A^{(γ−1)/2} r)` this is the normalized inner problem
//! `v'' + (N−1)v'/r + v^γ = 0`, `v(0) = 1`, `v'(0) = 0`. Outside the ball `w`
//! is harmonic, `c1 + c2 φ(r)`, and the two pieces are matched in value and
//! flux at `r = L`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::ode::{integrate, OdeError, Termination, Tolerances, Trajectory};
use crate::params::{gamma_sobolev, unit_eigen_radius, ProblemParams};
use crate::specfun::{bessel_j, bessel_j_prime, find_root, first_bracket, golden_max, BesselOrder, RootError, SpecfunError};

/// End of the Taylor-series start region near the singular point r = 0.
pub const TAYLOR_START: f64 = 1e-3;
/// Default radius to which the inner profile is integrated when v has no zero.
pub const DEFAULT_INNER_RMAX: f64 = 1e4;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StationaryError {
    #[error("integration failed: {0}")]
    Ode(#[from] OdeError),
    #[error("root finding failed: {0}")]
    Root(#[from] RootError),
    #[error("special function failed: {0}")]
    Specfun(#[from] SpecfunError),
    #[error("inadmissible center value A = {a}: matching point s = {s} is not below r0 = {r0}")]
    Inadmissible { a: f64, s: f64, r0: f64 },
    #[error("radius {r} lies outside the integrated inner range [0, {r_end}]")]
    OutOfRange { r: f64, r_end: f64 },
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("no stationary solution: {0}")]
    Nonexistence(String),
    #[error("maximization failed: c1(A) has no interior maximum on [{lo}, {hi}]")]
    NoInteriorMaximum { lo: f64, hi: f64 },
}

/// Power-law fit `v ≈ K r^{exponent}` of the far field of a profile without zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerTail {
    pub exponent: f64,
    #[serde(rename = "K")]
    pub k: f64,
    pub r_lo: f64,
    pub r_hi: f64,
}

/// Solution of the normalized inner problem (stat-rad1).
#[derive(Debug, Clone)]
pub struct InnerProfile {
    pub gamma: f64,
    pub n: u32,
    /// First zero of v; `None` is the "+∞" marker (γ ≥ γ_S, or beyond r_max).
    pub r0: Option<f64>,
    /// Right end of the integrated range (r0 when it exists).
    pub r_end: f64,
    /// Far-field fit, reported when v has no zero on the integrated range.
    pub far_field: Option<PowerTail>,
    traj: Trajectory<2>,
}

fn taylor_start(gamma: f64, n: f64, r: f64) -> (f64, f64) {
    let c4 = gamma / (8.0 * n * (n + 2.0));
    let v = 1.0 - r * r / (2.0 * n) + c4 * r.powi(4);
    let dv = -r / n + 4.0 * c4 * r.powi(3);
    (v, dv)
}

/// Integrates (stat-rad1) from the regular singular point with a Taylor start
/// on `[0, 10⁻³]`, stopping at the first zero of v (located to 10⁻¹²) or `r_max`.
pub fn shoot_inner(gamma: f64, n: u32, r_max: f64) -> Result<InnerProfile, StationaryError> {
    shoot_inner_with(gamma, n, r_max, &Tolerances::default().with_rtol(1e-12).with_atol(1e-15))
}

pub fn shoot_inner_with(gamma: f64, n: u32, r_max: f64, tol: &Tolerances) -> Result<InnerProfile, StationaryError> {
    if !(gamma > 0.0) || n == 0 || !(r_max > TAYLOR_START) {
        return Err(StationaryError::NotApplicable(format!("shoot_inner needs gamma > 0, N >= 1, r_max > {TAYLOR_START}")));
    }
    let nf = n as f64;
    let (v0, dv0) = taylor_start(gamma, nf, TAYLOR_START);
    let rhs = move |r: f64, y: &[f64; 2]| [y[1], -(nf - 1.0) * y[1] / r - y[0].max(0.0).powf(gamma)];
    let event = |_r: f64, y: &[f64; 2]| y[0];
    let tol = tol.with_h_max(r_max / 50.0);
    let traj = integrate(rhs, TAYLOR_START, [v0, dv0], r_max, &tol, Some(&event), None)?;
    let (r_end, _) = traj.last();
    let r0 = (traj.termination == Termination::Event).then_some(r_end);
    let far_field = if r0.is_none() { fit_power_tail(&traj) } else { None };
    Ok(InnerProfile { gamma, n, r0, r_end, far_field, traj })
}

fn fit_power_tail(traj: &Trajectory<2>) -> Option<PowerTail> {
    let r_hi = traj.t_end();
    let r_lo = r_hi / 10.0;
    if r_lo <= 1.0 {
        return None;
    }
    let pts: Vec<(f64, f64)> = (0..=40)
        .map(|i| {
            let r = r_lo * 10f64.powf(i as f64 / 40.0);
            (r.ln(), traj.eval(r)[0].ln())
        })
        .collect();
    let (slope, intercept) = least_squares(&pts);
    Some(PowerTail { exponent: slope, k: intercept.exp(), r_lo, r_hi })
}

pub(crate) fn least_squares(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

impl InnerProfile {
    /// `(v(r), v'(r))` for `0 ≤ r ≤ r_end`.
    pub fn eval(&self, r: f64) -> Result<(f64, f64), StationaryError> {
        if !(r >= 0.0) || r > self.r_end * (1.0 + 1e-14) {
            return Err(StationaryError::OutOfRange { r, r_end: self.r_end });
        }
        if r <= TAYLOR_START {
            return Ok(taylor_start(self.gamma, self.n as f64, r));
        }
        let y = self.traj.eval(r);
        Ok((y[0], y[1]))
    }

    /// Accepted integration nodes as `(r, v, v')`, starting at r = 0.
    pub fn samples(&self) -> Vec<[f64; 3]> {
        let mut out = vec![[0.0, 1.0, 0.0]];
        out.extend(self.traj.t.iter().zip(&self.traj.y).map(|(r, y)| [*r, y[0], y[1]]));
        out
    }

    /// `F(r) = v + r v'/(N−2)` (N ≥ 3).
    pub fn f_value(&self, r: f64) -> Result<f64, StationaryError> {
        if self.n < 3 {
            return Err(StationaryError::NotApplicable("F is defined for N >= 3".into()));
        }
        let (v, dv) = self.eval(r)?;
        Ok(v + r * dv / (self.n as f64 - 2.0))
    }
}

/// Sampled F together with its zero r* (absent when F stays positive).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FProfile {
    pub samples: Vec<(f64, f64)>,
    pub r_star: Option<f64>,
}

/// Evaluates `F(r) = v(r) + r v'(r)/(N−2)` on the integration nodes and locates
/// its unique zero r* when γ < γ_S.
pub fn compute_f(profile: &InnerProfile) -> Result<FProfile, StationaryError> {
    let mut samples = Vec::with_capacity(profile.traj.t.len() + 1);
    for s in profile.samples() {
        samples.push((s[0], profile.f_value(s[0])?));
    }
    let mut r_star = None;
    for w in samples.windows(2) {
        if w[0].1 > 0.0 && w[1].1 <= 0.0 {
            let root = find_root(|r| profile.f_value(r).unwrap_or(f64::NAN), w[0].0, w[1].0, 1e-14)?;
            r_star = Some(root.root);
            break;
        }
    }
    Ok(FProfile { samples, r_star })
}

/// Normalized inner profile plus its F-zero, shared by all center values A.
#[derive(Debug, Clone)]
pub struct StationaryFamily {
    pub params: ProblemParams,
    pub inner: Arc<InnerProfile>,
    pub r_star: Option<f64>,
}

impl StationaryFamily {
    pub fn new(params: &ProblemParams) -> Result<Self, StationaryError> {
        Self::with_range(params, DEFAULT_INNER_RMAX)
    }

    pub fn with_range(params: &ProblemParams, r_max: f64) -> Result<Self, StationaryError> {
        params.validate().map_err(|e| StationaryError::NotApplicable(e.to_string()))?;
        if params.n < 3 {
            return Err(StationaryError::Nonexistence("radial stationary solutions of the Cauchy problem need N >= 3".into()));
        }
        let inner = shoot_inner(params.gamma(), params.n, r_max)?;
        let r_star = compute_f(&inner)?.r_star;
        Ok(StationaryFamily { params: *params, inner: Arc::new(inner), r_star })
    }

    fn scale(&self, a: f64) -> f64 {
        a.powf((self.params.gamma() - 1.0) / 2.0)
    }

    /// Matching constants `(c1, c2)` of Eq. (matching) for center value A.
    pub fn c1_of_a(&self, a: f64) -> Result<(f64, f64), StationaryError> {
        let g = self.params.gamma();
        let nf = self.params.dim();
        let l = self.params.l;
        let s = self.scale(a) * l;
        if !(a > 0.0) || self.inner.r0.is_some_and(|r0| s >= r0) {
            return Err(StationaryError::Inadmissible { a, s, r0: self.inner.r0.unwrap_or(f64::INFINITY) });
        }
        let (v, dv) = self.inner.eval(s)?;
        let c1 = a * (v + s * dv / (nf - 2.0));
        let c2 = -l.powf(nf - 1.0) * a.powf((g + 1.0) / 2.0) * dv / (nf - 2.0);
        Ok((c1, c2))
    }

    /// Center value A* where c1 vanishes (`None` = +∞ for γ ≥ γ_S; γ = 1 has
    /// c1 ∝ A and no finite A*).
    pub fn a_star(&self) -> Option<f64> {
        let g = self.params.gamma();
        if (g - 1.0).abs() < 1e-14 {
            return None;
        }
        self.r_star.map(|rs| (rs / self.params.l).powf(2.0 / (g - 1.0)))
    }

    pub fn build(&self, a: f64) -> Result<StationaryProfile, StationaryError> {
        let (c1, c2) = self.c1_of_a(a)?;
        Ok(StationaryProfile { a, c1, c2, l: self.params.l, n: self.params.n, gamma: self.params.gamma(), inner: Arc::clone(&self.inner) })
    }
}

/// Matched Cauchy stationary profile `w = u^m`.
#[derive(Debug, Clone)]
pub struct StationaryProfile {
    pub a: f64,
    pub c1: f64,
    pub c2: f64,
    pub l: f64,
    pub n: u32,
    pub gamma: f64,
    inner: Arc<InnerProfile>,
}

impl StationaryProfile {
    /// `(w(r), w'(r))`.
    pub fn eval(&self, r: f64) -> (f64, f64) {
        let nf = self.n as f64;
        if r <= self.l {
            let k = self.a.powf((self.gamma - 1.0) / 2.0);
            let (v, dv) = self.inner.eval(k * r).expect("admissible profile covers [0, L]");
            (self.a * v, self.a * k * dv)
        } else {
            (self.c1 + self.c2 * r.powf(2.0 - nf), self.c2 * (2.0 - nf) * r.powf(1.0 - nf))
        }
    }

    /// Inner and outer values/fluxes at r = L, for matching checks.
    pub fn matching_mismatch(&self) -> (f64, f64) {
        let nf = self.n as f64;
        let (wi, dwi) = self.eval(self.l);
        let wo = self.c1 + self.c2 * self.l.powf(2.0 - nf);
        let dwo = self.c2 * (2.0 - nf) * self.l.powf(1.0 - nf);
        ((wi - wo).abs() / wi.abs().max(wo.abs()), (dwi - dwo).abs() / dwi.abs().max(dwo.abs()))
    }

    /// `(r, w, w')` on a uniform grid of `[0, r_max]`.
    pub fn samples(&self, r_max: f64, points: usize) -> Vec<[f64; 3]> {
        (0..points)
            .map(|i| {
                let r = r_max * i as f64 / (points - 1).max(1) as f64;
                let (w, dw) = self.eval(r);
                [r, w, dw]
            })
            .collect()
    }
}

pub fn c1_of_a(params: &ProblemParams, a: f64) -> Result<(f64, f64), StationaryError> {
    StationaryFamily::new(params)?.c1_of_a(a)
}

pub fn build_stationary(params: &ProblemParams, a: f64) -> Result<StationaryProfile, StationaryError> {
    StationaryFamily::new(params)?.build(a)
}

/// Result of the k* maximization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KStar {
    pub k_star: f64,
    pub a_max: f64,
    /// `None` stands for A* = +∞ (γ ≥ γ_S).
    pub a_star: Option<f64>,
}

/// `k* = max_{0<A<A*} c1(A)` for γ > 1 (log-grid bracketing, then golden section).
pub fn k_star(params: &ProblemParams) -> Result<KStar, StationaryError> {
    let g = params.gamma();
    if !(g > 1.0 + 1e-12) {
        return Err(StationaryError::NotApplicable(format!("k* is defined for gamma > 1 (gamma = {g}); every k >= 0 is attained otherwise")));
    }
    let fam = StationaryFamily::new(params)?;
    let l = params.l;
    let q = 2.0 / (g - 1.0);
    // Work in the matching point s = A^{(γ−1)/2} L; A = (s/L)^q.
    let s_hi = fam.r_star.unwrap_or(fam.inner.r_end);
    let s_lo = (s_hi * 1e-4).min(1e-3);
    let c1 = |log_s: f64| {
        let s = log_s.exp();
        (s / l).powf(q) * fam.inner.f_value(s).unwrap_or(f64::NAN)
    };
    let n_grid = 400;
    let grid: Vec<f64> = (0..=n_grid).map(|i| s_lo.ln() + (s_hi / s_lo).ln() * i as f64 / n_grid as f64).collect();
    let vals: Vec<f64> = grid.iter().map(|&x| c1(x)).collect();
    let imax = (0..vals.len()).max_by(|&i, &j| vals[i].total_cmp(&vals[j])).unwrap();
    if imax == 0 || imax == n_grid {
        return Err(StationaryError::NoInteriorMaximum { lo: (s_lo / l).powf(q), hi: (s_hi / l).powf(q) });
    }
    let (x, k) = golden_max(c1, grid[imax - 1], grid[imax + 1], 1e-12);
    Ok(KStar { k_star: k, a_max: (x.exp() / l).powf(q), a_star: fam.a_star() })
}

/// First positive root of `ν J_ν(L) + L J_ν'(L) = 0`, ν = (N−2)/2 (Eq. stationary-bessel).
pub fn critical_length(n: u32) -> Result<f64, StationaryError> {
    if n < 3 {
        return Err(StationaryError::NotApplicable("L* is defined for N >= 3 (L* = 0 otherwise)".into()));
    }
    let order = BesselOrder::from_dimension(n)?;
    let nu = order.nu();
    let f = |x: f64| nu * bessel_j(order, x).unwrap_or(f64::NAN) + x * bessel_j_prime(order, x).unwrap_or(f64::NAN);
    let (lo, hi) = first_bracket(f, 1e-3, 30.0, 3000)
        .ok_or(StationaryError::Root(RootError::NoSignChange { lo: 1e-3, hi: 30.0, f_lo: f(1e-3), f_hi: f(30.0) }))?;
    Ok(find_root(f, lo, hi, 1e-15)?.root)
}

/// L* with the convention L*(N) = 0 for N ≤ 2.
pub fn critical_length_or_zero(n: u32) -> f64 {
    critical_length(n).unwrap_or(0.0)
}

/// Harmonic function of the outer region: r^{2−N}, log r, r.
fn green(n: u32, r: f64) -> (f64, f64) {
    match n {
        1 => (r, 1.0),
        2 => (r.ln(), 1.0 / r),
        _ => {
            let e = 2.0 - n as f64;
            (r.powf(e), e * r.powf(e - 1.0))
        }
    }
}

/// Zero of the harmonic continuation of `(v, v')` given at `s`, as a ratio
/// `log(ρ/s)`; `None` when the continuation never vanishes.
fn log_outer_zero_ratio(n: u32, s: f64, v: f64, dv: f64) -> Option<f64> {
    if !(dv < 0.0) {
        return None;
    }
    match n {
        1 => Some((1.0 - v / (s * dv)).ln()),
        2 => Some(-v / (s * dv)),
        _ => {
            let e = n as f64 - 2.0;
            // (ρ/s)^{2−N} = 1 + (N−2) v / (s v')
            let t = 1.0 + e * v / (s * dv);
            (t > 0.0).then(|| -t.ln() / e)
        }
    }
}

/// Stationary solution of the Dirichlet problem in B_R, decreasing, `w(R) = 0`.
#[derive(Debug, Clone)]
pub struct DirichletProfile {
    pub r_outer: f64,
    pub a: f64,
    pub l: f64,
    pub n: u32,
    pub gamma: f64,
    inner: Arc<InnerProfile>,
}

impl DirichletProfile {
    pub fn eval(&self, r: f64) -> (f64, f64) {
        let k = if (self.gamma - 1.0).abs() < 1e-14 { 1.0 } else { self.a.powf((self.gamma - 1.0) / 2.0) };
        let r_in = r.min(self.l).min(self.r_outer);
        let (v, dv) = self.inner.eval(k * r_in).expect("Dirichlet profile stays within the inner range");
        let (w, dw) = (self.a * v, self.a * k * dv);
        if r <= self.l || self.r_outer <= self.l {
            return (w, dw);
        }
        let (phi_l, dphi_l) = green(self.n, self.l);
        let (phi, dphi) = green(self.n, r);
        (w + dw * (phi - phi_l) / dphi_l, dw * dphi / dphi_l)
    }

    pub fn samples(&self, points: usize) -> Vec<[f64; 3]> {
        (0..points)
            .map(|i| {
                let r = self.r_outer * i as f64 / (points - 1).max(1) as f64;
                let (w, dw) = self.eval(r);
                [r, w.max(0.0), dw]
            })
            .collect()
    }
}

/// Shoots on the center value A (through the matching point
/// `s = A^{(γ−1)/2} L`) so that the harmonic continuation vanishes at R.
pub fn dirichlet_stationary(params: &ProblemParams, r_outer: f64) -> Result<DirichletProfile, StationaryError> {
    params.validate().map_err(|e| StationaryError::NotApplicable(e.to_string()))?;
    let g = params.gamma();
    let n = params.n;
    let l = params.l;
    if let Some(gs) = gamma_sobolev(n) {
        if g >= gs {
            return Err(StationaryError::Nonexistence(format!("Dirichlet problem has no positive solution for gamma >= gamma_S = {gs}")));
        }
    }
    let inner = Arc::new(shoot_inner(g, n, DEFAULT_INNER_RMAX)?);
    let r0 = inner.r0.ok_or_else(|| StationaryError::Nonexistence("inner profile has no zero".into()))?;
    let linear = (g - 1.0).abs() < 1e-14;

    if r_outer <= l {
        if linear {
            return Err(StationaryError::Nonexistence("gamma = 1 needs R = R(L) > L".into()));
        }
        let a = (r_outer / r0).powf(-2.0 / (g - 1.0));
        return Ok(DirichletProfile { r_outer, a, l: r_outer, n, gamma: g, inner });
    }

    let target = (r_outer / l).ln();
    let mismatch = |s: f64| -> f64 {
        let (v, dv) = inner.eval(s).unwrap_or((f64::NAN, f64::NAN));
        match log_outer_zero_ratio(n, s, v, dv) {
            Some(x) => x - target,
            None => f64::INFINITY,
        }
    };
    if linear {
        let r_of_l = dirichlet_r_of_l(n, l)?;
        if (r_of_l - r_outer).abs() > 1e-8 * r_of_l {
            return Err(StationaryError::Nonexistence(format!("gamma = 1 admits only R = R(L) = {r_of_l}")));
        }
        return Ok(DirichletProfile { r_outer, a: 1.0, l, n, gamma: g, inner });
    }
    // The mismatch decreases from +∞ (s ↓ r*, or s ↓ 0 for N ≤ 2) to −log(R/L) (s ↑ r0).
    let s_min = if n >= 3 { compute_f(&inner)?.r_star.unwrap_or(0.0) } else { 0.0 };
    let lo_guess = s_min + (r0 - s_min) * 1e-9;
    let hi = r0 * (1.0 - 1e-12);
    let (blo, bhi) = first_bracket(|s| mismatch(s).min(1e300), lo_guess, hi, 4000)
        .ok_or_else(|| StationaryError::Nonexistence(format!("no matching point for R = {r_outer}")))?;
    let s = find_root(|s| mismatch(s).min(1e300), blo, bhi, 1e-10)?.root;
    let a = (s / l).powf(2.0 / (g - 1.0));
    Ok(DirichletProfile { r_outer, a, l, n, gamma: g, inner })
}

/// The unique outer radius R(L) of the γ = 1 Dirichlet problem (L* < L < L1).
pub fn dirichlet_r_of_l(n: u32, l: f64) -> Result<f64, StationaryError> {
    if n < 2 {
        return Err(StationaryError::NotApplicable("R(L) is computed for N >= 2".into()));
    }
    let order = BesselOrder::from_dimension(n)?;
    let next = BesselOrder::new(order.nu() + 1.0)?;
    let l_star = critical_length_or_zero(n);
    let l1 = unit_eigen_radius(n);
    if !(l > l_star && l < l1) {
        return Err(StationaryError::NotApplicable(format!("R(L) requires L* = {l_star} < L < L1 = {l1}, got {l}")));
    }
    // v = Γ(ν+1)(2/r)^ν J_ν(r), so v'/v = −J_{ν+1}/J_ν.
    let ratio = bessel_j(order, l)? / (l * bessel_j(next, l)?);
    let log_ratio = if n == 2 {
        ratio
    } else {
        let e = n as f64 - 2.0;
        let t = 1.0 - e * ratio;
        if !(t > 0.0) {
            return Err(StationaryError::Nonexistence(format!("no outer zero for L = {l}")));
        }
        -t.ln() / e
    };
    Ok(l * log_ratio.exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn params(m: f64, p: f64, n: u32, l: f64) -> ProblemParams {
        ProblemParams::new(m, p, n, l).unwrap()
    }

    #[test]
    fn inner_gamma_one_is_sinc() {
        let inner = shoot_inner(1.0, 3, 10.0).unwrap();
        assert!((inner.r0.unwrap() - PI).abs() < 1e-10);
        for r in [0.0005, 0.3, 1.0, 2.0, 3.0] {
            let (v, _) = inner.eval(r).unwrap();
            assert!((v - r.sin() / r).abs() < 1e-10, "r={r}");
        }
    }

    #[test]
    fn inner_sobolev_is_explicit() {
        let inner = shoot_inner(5.0, 3, 1e3).unwrap();
        assert!(inner.r0.is_none());
        let (v, _) = inner.eval(1.0).unwrap();
        assert!((v - (1.0 + 1.0 / 3.0f64).powf(-0.5)).abs() < 1e-10);
        let tail = inner.far_field.unwrap();
        assert!((tail.exponent + 1.0).abs() < 1e-3, "{tail:?}");
    }

    #[test]
    fn inner_self_convergence_gamma_two() {
        let base = Tolerances::default();
        let a = shoot_inner_with(2.0, 3, 20.0, &base.with_rtol(1e-12).with_atol(1e-15)).unwrap();
        let b = shoot_inner_with(2.0, 3, 20.0, &base.with_rtol(5e-13).with_atol(5e-16)).unwrap();
        assert!(a.r0.is_some());
        assert!((a.r0.unwrap() - b.r0.unwrap()).abs() < 1e-8);
        for i in 1..50 {
            let r = a.r0.unwrap() * i as f64 / 50.0;
            assert!((a.eval(r).unwrap().0 - b.eval(r).unwrap().0).abs() < 1e-8);
        }
    }

    #[test]
    fn f_examples() {
        let inner = shoot_inner(1.0, 3, 10.0).unwrap();
        let f = compute_f(&inner).unwrap();
        assert!((f.r_star.unwrap() - FRAC_PI_2).abs() < 1e-9);
        assert!((f.samples[0].1 - 1.0).abs() < 1e-15);
        for &(r, fv) in &f.samples {
            assert!((fv - r.cos()).abs() < 1e-9);
        }
        let inner = shoot_inner(5.0, 3, 100.0).unwrap();
        let f = compute_f(&inner).unwrap();
        assert!(f.r_star.is_none());
        for &(r, fv) in &f.samples {
            assert!((fv - (1.0 + r * r / 3.0).powf(-1.5)).abs() < 1e-9);
        }
    }

    #[test]
    fn f_strictly_decreasing() {
        for n in [3u32, 4, 5] {
            let gs = gamma_sobolev(n).unwrap();
            for g in [0.5, 1.0, 2.0, gs, 8.0] {
                let inner = shoot_inner(g, n, 200.0).unwrap();
                let f = compute_f(&inner).unwrap();
                for w in f.samples.windows(2) {
                    assert!(w[1].1 < w[0].1, "N={n} gamma={g} at r={}", w[1].0);
                }
            }
        }
    }

    #[test]
    fn c1_examples() {
        let (c1, c2) = c1_of_a(&params(1.0, 1.0, 3, 1.0), 1.0).unwrap();
        assert!((c1 - 1f64.cos()).abs() < 1e-10);
        assert!((c2 - (1f64.sin() - 1f64.cos())).abs() < 1e-10);
        let fam = StationaryFamily::new(&params(1.0, 1.0, 3, FRAC_PI_2)).unwrap();
        for a in [0.1, 1.0, 7.0] {
            assert!(fam.c1_of_a(a).unwrap().0.abs() < 1e-9);
        }
    }

    #[test]
    fn c1_sublinear_increases_from_a_star() {
        let fam = StationaryFamily::new(&params(2.0, 1.0, 3, 1.0)).unwrap();
        let a_star = fam.a_star().unwrap();
        assert!(fam.c1_of_a(a_star).unwrap().0.abs() < 1e-9);
        let mut prev = 0.0;
        for i in 1..=40 {
            let a = a_star * (1.0 + 0.25 * i as f64);
            let c = fam.c1_of_a(a).unwrap().0;
            assert!(c > prev);
            prev = c;
        }
    }

    #[test]
    fn c1_superlinear_is_unimodal() {
        let fam = StationaryFamily::new(&params(1.0, 3.0, 3, 1.0)).unwrap();
        let a_star = fam.a_star().unwrap();
        assert!(fam.c1_of_a(a_star * (1.0 - 1e-12)).unwrap().0.abs() < 1e-8);
        let vals: Vec<f64> = (1..200).map(|i| fam.c1_of_a(a_star * i as f64 / 200.0).unwrap().0).collect();
        let peak = (0..vals.len()).max_by(|&i, &j| vals[i].total_cmp(&vals[j])).unwrap();
        assert!(vals[..=peak].windows(2).all(|w| w[1] > w[0]));
        assert!(vals[peak..].windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn k_star_sobolev_matches_closed_form() {
        let l = 1.3;
        let ks = k_star(&params(1.0, 5.0, 3, l)).unwrap();
        let a = (3.0 / (5.0 * l * l)).powf(0.25);
        let exact = a * (1.0 + a.powi(4) * l * l / 3.0).powf(-1.5);
        assert!((ks.k_star - exact).abs() < 1e-9 * exact, "{ks:?} vs {exact}");
        assert!((ks.a_max - a).abs() < 1e-4);
        assert!(ks.a_star.is_none());

        let ks = k_star(&params(1.0, 1.05, 3, 1.0)).unwrap();
        assert!(ks.k_star > 0.0 && ks.k_star.is_finite());
        assert!(k_star(&params(1.0, 0.5, 3, 1.0)).is_err());
    }

    #[test]
    fn critical_length_values() {
        assert!((critical_length(3).unwrap() - FRAC_PI_2).abs() < 1e-10);
        assert!((critical_length(4).unwrap() - 2.404825557695773).abs() < 1e-10);
        for n in 3..=6 {
            let inner = shoot_inner(1.0, n, 20.0).unwrap();
            let rs = compute_f(&inner).unwrap().r_star.unwrap();
            assert!((rs - critical_length(n).unwrap()).abs() < 1e-8, "N={n}");
        }
    }

    #[test]
    fn explicit_profile_and_residual() {
        let prof = build_stationary(&params(1.0, 1.0, 3, 1.0), 1.0).unwrap();
        let (c1, c2) = (1f64.cos(), 1f64.sin() - 1f64.cos());
        for i in 1..=1000 {
            let r = 0.01 * i as f64;
            let exact = if r < 1.0 { r.sin() / r } else { c2 / r + c1 };
            assert!((prof.eval(r).0 - exact).abs() <= 1e-8 * exact.abs(), "r={r}");
        }
        let (dv, df) = prof.matching_mismatch();
        assert!(dv < 1e-10 && df < 1e-10);
        assert!((prof.eval(1e3).0 - c1).abs() < 1e-2);

        // discrete residual of Δw + a w^γ with a 3-point Laplacian
        let prof = build_stationary(&params(1.0, 2.0, 3, 1.0), 0.8).unwrap();
        let h = 1e-3;
        for i in 1..3000 {
            let r = 0.1 + i as f64 * h;
            if (r - 1.0).abs() < 3.0 * h {
                continue;
            }
            let (wm, w0, wp) = (prof.eval(r - h).0, prof.eval(r).0, prof.eval(r + h).0);
            let lap = (wp - 2.0 * w0 + wm) / (h * h) + 2.0 / r * (wp - wm) / (2.0 * h);
            let a = if r < 1.0 { 1.0 } else { 0.0 };
            assert!((lap + a * w0.powf(2.0)).abs() < 1e-5, "r={r}");
        }
    }

    #[test]
    fn scaling_consistency() {
        let (g, l, a) = (3.0, 0.7, 1.9);
        let full = build_stationary(&params(1.0, g, 3, l), a).unwrap();
        let lam = a.powf((g - 1.0) / 2.0);
        let unit = build_stationary(&params(1.0, g, 3, lam * l), 1.0).unwrap();
        for i in 1..100 {
            let r = 0.05 * i as f64;
            let lhs = full.eval(r).0;
            let rhs = a * unit.eval(lam * r).0;
            assert!((lhs - rhs).abs() < 1e-8 * lhs.abs());
        }
    }

    #[test]
    fn dirichlet_profile_is_decreasing_and_vanishes() {
        let prof = dirichlet_stationary(&params(1.0, 0.5, 3, 1.0), 5.0).unwrap();
        assert!(prof.eval(5.0).0.abs() < 1e-9 * prof.a);
        let s = prof.samples(200);
        assert!(s.windows(2).all(|w| w[1][1] < w[0][1]));
        assert!(s[..199].iter().all(|x| x[1] > 0.0));
    }

    #[test]
    fn dirichlet_inside_ball_closed_form() {
        let inner = shoot_inner(3.0, 3, 100.0).unwrap();
        let prof = dirichlet_stationary(&params(1.0, 3.0, 3, 2.0), 1.5).unwrap();
        let expect = (1.5 / inner.r0.unwrap()).powf(-1.0);
        assert!((prof.a - expect).abs() < 1e-10 * expect);
        assert!(prof.eval(1.5).0.abs() < 1e-8);
    }

    #[test]
    fn dirichlet_monotone_in_r() {
        let sub: Vec<f64> = [2.0, 4.0, 8.0].iter().map(|&r| dirichlet_stationary(&params(1.0, 0.5, 2, 1.0), r).unwrap().a).collect();
        assert!(sub.windows(2).all(|w| w[1] > w[0]));
        let sup: Vec<f64> = [2.0, 4.0, 8.0].iter().map(|&r| dirichlet_stationary(&params(1.0, 2.0, 3, 1.0), r).unwrap().a).collect();
        assert!(sup.windows(2).all(|w| w[1] < w[0]));
        assert!(dirichlet_stationary(&params(1.0, 6.0, 3, 1.0), 3.0).is_err());
    }

    #[test]
    fn r_of_l_decreasing_and_matches_shooting() {
        let ls: Vec<f64> = (0..10).map(|i| 1.65 + 0.07 * i as f64).collect();
        let rs: Vec<f64> = ls.iter().map(|&l| dirichlet_r_of_l(3, l).unwrap()).collect();
        assert!(rs.windows(2).all(|w| w[1] < w[0]));
        // the γ = 1 Dirichlet profile built on R(L) vanishes there
        let r = dirichlet_r_of_l(3, 2.0).unwrap();
        let prof = dirichlet_stationary(&params(1.0, 1.0, 3, 2.0), r).unwrap();
        assert!(prof.eval(r).0.abs() < 1e-9);
        assert!(dirichlet_r_of_l(3, 1.5).is_err());
    }

    #[test]
    fn dirichlet_asymptotics_n2_sublinear() {
        // A^{1−γ} is linear in log R; flux balance gives slope L²/2.
        let (g, l) = (0.5, 1.0);
        let pts: Vec<(f64, f64)> = (0..=8)
            .map(|i| {
                let r = 100f64 * 10f64.powf(i as f64 / 4.0);
                let a = dirichlet_stationary(&params(1.0, g, 2, l), r).unwrap().a;
                (r.ln(), a.powf(1.0 - g))
            })
            .collect();
        let (slope, _) = least_squares(&pts);
        assert!((slope - l * l / 2.0).abs() < 0.05 * l * l / 2.0, "slope {slope}");
    }

    #[test]
    fn dirichlet_a_tends_to_a_star_n3() {
        let p = params(1.0, 0.5, 3, 1.0);
        let a_star = StationaryFamily::new(&p).unwrap().a_star().unwrap();
        let d: Vec<(f64, f64)> = [1e2, 1e3, 1e4]
            .iter()
            .map(|&r| (f64::ln(r), (dirichlet_stationary(&p, r).unwrap().a - a_star).abs().ln()))
            .collect();
        let (slope, _) = least_squares(&d);
        assert!((slope + 1.0).abs() < 0.05, "slope {slope}");
    }

    #[test]
    fn r_of_l_asymptotics() {
        // N = 3: R ~ c (L − L*)^{-1}
        let ls = critical_length(3).unwrap();
        let pts: Vec<(f64, f64)> = [1e-3, 1e-4, 1e-5].iter().map(|&e| (f64::ln(e), dirichlet_r_of_l(3, ls + e).unwrap().ln())).collect();
        assert!((least_squares(&pts).0 + 1.0).abs() < 0.01);
        // N = 2: log R vs 1/L² has slope 2
        let pts: Vec<(f64, f64)> = [0.2, 0.25, 0.3].iter().map(|&l: &f64| (1.0 / (l * l), dirichlet_r_of_l(2, l).unwrap().ln())).collect();
        assert!((least_squares(&pts).0 - 2.0).abs() < 0.1);
    }
}
