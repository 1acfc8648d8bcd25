//! Exponential solutions `e^{λt} φ(|x|)` of the linear problem m = p = 1
//! (§2.2) and the separated-variables profiles of Lemma (lem-tasa-p=m).

use serde::{Deserialize, Serialize};

use crate::ode::{integrate, OdeError, Termination, Tolerances};
use crate::params::unit_eigen_radius;
use crate::specfun::{
    bessel_j, bessel_j_prime, bessel_k_log_derivative, bessel_k_scaled, find_root, BesselOrder, RootError, SpecfunError,
};
use crate::stationary::critical_length_or_zero;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EigenError {
    #[error("special function failed: {0}")]
    Specfun(#[from] SpecfunError),
    #[error("root finding failed: {0}")]
    Root(#[from] RootError),
    #[error("integration failed: {0}")]
    Ode(#[from] OdeError),
    #[error("Phi has a pole at lambda = {lambda}: J_nu(L sqrt(1-lambda)) = {j}")]
    Pole { lambda: f64, j: f64 },
    #[error("no root of Phi(., L) for L = {l} <= L*(N) = {l_star}")]
    NoRoot { l: f64, l_star: f64 },
    #[error("profile not positive on [0, L]: L sqrt(1-lambda) = {z} >= first J_nu zero {eta}")]
    PositivityViolation { z: f64, eta: f64 },
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error("lambda* bracket failure: {0}")]
    Bracket(String),
}

fn order_for(n: u32) -> Result<BesselOrder, EigenError> {
    if n < 2 {
        return Err(EigenError::Invalid(format!("eigen module needs N >= 2, got {n}")));
    }
    Ok(BesselOrder::from_dimension(n)?)
}

/// Φ(λ, L) = √(1−λ) J_ν'(L√(1−λ))/J_ν(L√(1−λ)) − √λ K_ν'(L√λ)/K_ν(L√λ).
pub fn phi_capital(lambda: f64, l: f64, n: u32) -> Result<f64, EigenError> {
    if !(lambda > 0.0 && lambda < 1.0) || !(l > 0.0) {
        return Err(EigenError::Invalid(format!("Phi needs 0 < lambda < 1 and L > 0 (lambda = {lambda}, L = {l})")));
    }
    phi_in_s(lambda.sqrt(), l, n)
}

/// Φ written in `s = √λ`, with `z = L√((1−s)(1+s))`: well conditioned both
/// for λ → 0 (L → L*) and for λ → 1 (L → ∞).
fn phi_in_s(s: f64, l: f64, n: u32) -> Result<f64, EigenError> {
    phi_core(s, (1.0 - s) * (1.0 + s), l, n)
}

/// Φ in `z = L√(1−λ)`, the well-conditioned variable for λ → 1.
fn phi_in_z(z: f64, l: f64, n: u32) -> Result<f64, EigenError> {
    let one_minus = (z / l).powi(2);
    phi_core((1.0 - one_minus).sqrt(), one_minus, l, n)
}

fn phi_core(s: f64, one_minus: f64, l: f64, n: u32) -> Result<f64, EigenError> {
    let order = order_for(n)?;
    let z = l * one_minus.sqrt();
    let j = bessel_j(order, z)?;
    if j.abs() < 1e-14 {
        return Err(EigenError::Pole { lambda: s * s, j });
    }
    let inner = one_minus.sqrt() * bessel_j_prime(order, z)? / j;
    let outer = s * bessel_k_log_derivative(order, l * s)?;
    Ok(inner - outer)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lambda0 {
    pub lambda0: f64,
    /// 1 − λ₀, computed without cancellation.
    pub one_minus: f64,
    /// |Φ(λ₀, L)|.
    pub residual: f64,
}

/// The rate λ₀(L): the largest root of Φ(·, L) on (max(0, 1 − η²/L²), 1).
///
/// Existence (L > L*) is decided by the sign change itself rather than by
/// comparing with L*, so agreement with `stationary::critical_length` is a
/// genuine cross-check.
pub fn lambda0(l: f64, n: u32) -> Result<Lambda0, EigenError> {
    order_for(n)?;
    if !(l > 0.0) {
        return Err(EigenError::Invalid(format!("L = {l} must be positive")));
    }
    let l_star = critical_length_or_zero(n);
    let eta = unit_eigen_radius(n);
    // Probe points ordered by decreasing λ (increasing z = L√(1−λ)); the
    // first sign change brackets the largest root. The grid is uniform in z
    // because the poles of Φ sit at zeros of J_ν(z).
    let z_end = l.min(eta);
    let steps = 2000;
    let mut probes: Vec<f64> = (1..steps).map(|i| (1.0 - (z_end * i as f64 / steps as f64 / l).powi(2)).sqrt()).collect();
    probes.insert(0, 1.0 - 1e-15);
    if l < eta {
        probes.push(1e-13);
    }
    let f = |s: f64| phi_in_s(s, l, n).unwrap_or(f64::NAN);
    let mut prev = (probes[0], f(probes[0]));
    for &s in &probes[1..] {
        let cur = (s, f(s));
        if prev.1 * cur.1 <= 0.0 {
            if cur.0 * cur.0 < 0.5 {
                let root = find_root(f, cur.0, prev.0, 1e-12)?;
                let s0 = root.root;
                return Ok(Lambda0 { lambda0: s0 * s0, one_minus: (1.0 - s0) * (1.0 + s0), residual: root.residual });
            }
            let z_of = |s: f64| l * ((1.0 - s) * (1.0 + s)).sqrt();
            let fz = |z: f64| phi_in_z(z, l, n).unwrap_or(f64::NAN);
            let root = find_root(fz, z_of(prev.0), z_of(cur.0), 1e-12)?;
            let one_minus = (root.root / l).powi(2);
            return Ok(Lambda0 { lambda0: 1.0 - one_minus, one_minus, residual: root.residual });
        }
        prev = cur;
    }
    Err(EigenError::NoRoot { l, l_star })
}

/// Exponential solution profile `φ(r) = r^{−ν}J_ν(√(1−λ) r)` for r ≤ L and
/// `C r^{−ν} K_ν(√λ r)` beyond.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenSolution {
    pub lambda0: f64,
    #[serde(rename = "C")]
    pub c: f64,
    #[serde(rename = "L")]
    pub l: f64,
    #[serde(rename = "N")]
    pub n: u32,
    /// `(r, φ(r))` on a uniform grid of `[0, R_max]`.
    pub samples: Vec<(f64, f64)>,
}

impl EigenSolution {
    pub fn eval(&self, r: f64) -> f64 {
        let order = BesselOrder::from_dimension(self.n).expect("validated at construction");
        let nu = order.nu();
        let a = (1.0 - self.lambda0).sqrt();
        if r <= 0.0 {
            return (a / 2.0).powf(nu) / order.gamma_plus_one();
        }
        if r <= self.l {
            r.powf(-nu) * bessel_j(order, a * r).expect("positive argument")
        } else {
            let x = self.lambda0.sqrt() * r;
            self.c * r.powf(-nu) * bessel_k_scaled(order, x).expect("positive argument") * (-x).exp()
        }
    }

    /// `φ'(r)`.
    pub fn eval_prime(&self, r: f64) -> f64 {
        let order = BesselOrder::from_dimension(self.n).expect("validated at construction");
        let nu = order.nu();
        if r <= 0.0 {
            return 0.0;
        }
        if r <= self.l {
            let a = (1.0 - self.lambda0).sqrt();
            r.powf(-nu) * (a * bessel_j_prime(order, a * r).unwrap() - nu / r * bessel_j(order, a * r).unwrap())
        } else {
            let b = self.lambda0.sqrt();
            self.eval(r) * (b * bessel_k_log_derivative(order, b * r).unwrap() - nu / r)
        }
    }
}

pub fn eigenprofile(lambda0: f64, l: f64, n: u32, r_max: f64, points: usize) -> Result<EigenSolution, EigenError> {
    let order = order_for(n)?;
    if !(lambda0 > 0.0 && lambda0 < 1.0) {
        return Err(EigenError::Invalid(format!("lambda0 = {lambda0} outside (0, 1)")));
    }
    let eta = unit_eigen_radius(n);
    let z = l * (1.0 - lambda0).sqrt();
    if z >= eta {
        return Err(EigenError::PositivityViolation { z, eta });
    }
    let y = l * lambda0.sqrt();
    // C = J_ν(L√(1−λ)) / K_ν(L√λ), with K written through its scaled form.
    let c = bessel_j(order, z)? / bessel_k_scaled(order, y)? * y.exp();
    let mut sol = EigenSolution { lambda0, c, l, n, samples: Vec::new() };
    sol.samples = (0..points)
        .map(|i| {
            let r = r_max * i as f64 / (points - 1).max(1) as f64;
            (r, sol.eval(r))
        })
        .collect();
    Ok(sol)
}

/// How the separated profile ends on the truncated domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeparatedEnd {
    /// φ vanishes at R_λ.
    Vanishes { r: f64 },
    /// φ stays positive up to the end of the domain (the +∞ marker).
    Positive { r_end: f64 },
    /// φ^m exceeded the divergence threshold at `r`.
    Diverges { r: f64 },
}

/// Separated-variables profile of Lemma (lem-tasa-p=m): h = φ^m solves
/// `h'' + (N−1)h'/r + a(r) h − λ h^{1/m} = 0`, h(0) = 1, h'(0) = 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparatedProfile {
    pub lambda: f64,
    pub m: f64,
    #[serde(rename = "L")]
    pub l: f64,
    #[serde(rename = "N")]
    pub n: u32,
    /// `(r, φ)` at the accepted integration nodes.
    pub samples: Vec<(f64, f64)>,
    pub end: SeparatedEnd,
}

impl SeparatedProfile {
    pub fn r_lambda(&self) -> Option<f64> {
        match self.end {
            SeparatedEnd::Vanishes { r } => Some(r),
            _ => None,
        }
    }
}

const SEPARATED_START: f64 = 1e-3;
const DIVERGENCE_LEVEL: f64 = 1e8;

pub fn separated_profile(m: f64, l: f64, n: u32, lambda: f64) -> Result<SeparatedProfile, EigenError> {
    separated_profile_on(m, l, n, lambda, 1e3 * l)
}

pub fn separated_profile_on(m: f64, l: f64, n: u32, lambda: f64, r_max: f64) -> Result<SeparatedProfile, EigenError> {
    if !(m > 0.0 && m < 1.0) || !(lambda > 0.0) || !(l > SEPARATED_START) || n == 0 {
        return Err(EigenError::Invalid(format!("separated profile needs 0 < m < 1, lambda > 0, L > {SEPARATED_START}")));
    }
    let nf = n as f64;
    let q = 1.0 / m;
    let c2 = (lambda - 1.0) / (2.0 * nf);
    let c4 = c2 * (lambda / m - 1.0) / (4.0 * (nf + 2.0));
    let r_s = SEPARATED_START;
    let h0 = [1.0 + c2 * r_s * r_s + c4 * r_s.powi(4), 2.0 * c2 * r_s + 4.0 * c4 * r_s.powi(3)];
    let tol = Tolerances::default().with_rtol(1e-10).with_atol(1e-13);
    let event = |_r: f64, y: &[f64; 2]| y[0];
    let stop = |_r: f64, y: &[f64; 2]| y[0] > DIVERGENCE_LEVEL;
    let rhs = |a: f64| move |r: f64, y: &[f64; 2]| [y[1], -(nf - 1.0) * y[1] / r - a * y[0] + lambda * y[0].max(0.0).powf(q)];

    let mut samples = vec![(0.0, 1.0)];
    let push = |samples: &mut Vec<(f64, f64)>, t: &[f64], y: &[[f64; 2]]| {
        samples.extend(t.iter().zip(y).map(|(r, h)| (*r, h[0].max(0.0).powf(q))));
    };
    let inner = integrate(rhs(1.0), r_s, h0, l, &tol, Some(&event), Some(&stop))?;
    push(&mut samples, &inner.t, &inner.y);
    let (r_in, y_in) = inner.last();
    let end = match inner.termination {
        Termination::Event => SeparatedEnd::Vanishes { r: r_in },
        Termination::Stopped => SeparatedEnd::Diverges { r: r_in },
        Termination::ReachedEnd => {
            let outer = integrate(rhs(0.0), l, y_in, r_max, &tol.with_h_max(r_max / 100.0), Some(&event), Some(&stop))?;
            push(&mut samples, &outer.t[1..], &outer.y[1..]);
            let (r_out, _) = outer.last();
            match outer.termination {
                Termination::Event => SeparatedEnd::Vanishes { r: r_out },
                Termination::Stopped => SeparatedEnd::Diverges { r: r_out },
                Termination::ReachedEnd => SeparatedEnd::Positive { r_end: r_out },
            }
        }
    };
    Ok(SeparatedProfile { lambda, m, l, n, samples, end })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaStar {
    pub lambda_star: f64,
    /// Bracket `[λ_vanish, λ_positive]` at termination.
    pub bracket: (f64, f64),
    /// Set when a probe contradicted the assumed monotone dichotomy.
    pub nonmonotone: bool,
}

/// λ* of Lemma (lem-tasa-p=m): the threshold between profiles that vanish
/// at a finite R_λ and profiles that stay positive, by bisection to 10⁻⁶.
pub fn lambda_star(m: f64, l: f64, n: u32) -> Result<LambdaStar, EigenError> {
    let l_star = critical_length_or_zero(n);
    if !(l > l_star) {
        return Err(EigenError::Bracket(format!("L = {l} <= L* = {l_star}: no vanishing profile")));
    }
    let vanishes = |lam: f64| -> Result<bool, EigenError> { Ok(separated_profile(m, l, n, lam)?.r_lambda().is_some()) };
    let mut lo = 1e-6;
    let mut hi = 1.0;
    if !vanishes(lo)? {
        return Err(EigenError::Bracket(format!("profile at lambda = {lo} does not vanish")));
    }
    if vanishes(hi)? {
        return Err(EigenError::Bracket("profile at lambda = 1 vanishes".into()));
    }
    while hi - lo > 1e-6 {
        let mid = 0.5 * (lo + hi);
        if vanishes(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // Probe the dichotomy on a coarse grid below the threshold.
    let mut nonmonotone = false;
    for k in 1..=4 {
        let lam = lo * k as f64 / 5.0;
        if !vanishes(lam)? {
            nonmonotone = true;
        }
    }
    Ok(LambdaStar { lambda_star: 0.5 * (lo + hi), bracket: (lo, hi), nonmonotone })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stationary::least_squares;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn phi_limits() {
        let (order, l) = (BesselOrder::from_dimension(2).unwrap(), 1.5);
        let near_one = phi_capital(1.0 - 1e-10, l, 2).unwrap();
        let k_limit = -bessel_k_log_derivative(order, l).unwrap();
        assert!(near_one > 0.0 && (near_one - k_limit).abs() < 1e-4);
        assert!(phi_capital(1e-10, l, 2).unwrap() < 0.0);
        for i in 1..=9 {
            let v = phi_capital(0.1 * i as f64, 0.05, 3).unwrap();
            assert!(v > 0.0 && (v - 1.0 / 0.05).abs() < 0.05 / 0.05);
        }
        assert!(phi_capital(0.0, 1.0, 3).is_err());
    }

    #[test]
    fn phi_reports_poles() {
        // J_0 vanishes at L√(1−λ) = η: λ = 1 − (η/L)²
        let eta = unit_eigen_radius(2);
        let l = 5.0;
        let lam = 1.0 - (eta / l).powi(2);
        assert!(matches!(phi_capital(lam, l, 2), Err(EigenError::Pole { .. })));
    }

    #[test]
    fn lambda0_residual_and_monotone() {
        for n in [2u32, 3] {
            let mut prev = 0.0;
            for l in [2.0, 5.0, 20.0] {
                let r = lambda0(l, n).unwrap();
                assert!(r.residual <= 1e-10);
                assert!(phi_in_s(r.lambda0.sqrt(), l, n).unwrap().abs() <= 1e-10);
                assert!(r.lambda0 > prev && r.lambda0 < 1.0);
                assert!(l * r.one_minus.sqrt() < unit_eigen_radius(n));
                prev = r.lambda0;
            }
        }
    }

    #[test]
    fn lambda0_limits() {
        let near = lambda0(FRAC_PI_2 + 1e-4, 3).unwrap();
        assert!(near.lambda0 < 1e-3);
        assert!(lambda0(1.5, 3).is_err());
        let pts: Vec<(f64, f64)> = (0..=20)
            .map(|i| {
                let l = 10f64 * 100f64.powf(i as f64 / 20.0);
                (l.ln(), lambda0(l, 3).unwrap().one_minus.ln())
            })
            .collect();
        assert!((least_squares(&pts).0 + 2.0).abs() < 0.05);
    }

    #[test]
    fn critical_length_is_infimum_of_lambda0_domain() {
        let (mut lo, mut hi) = (1.0, 2.0);
        while hi - lo > 1e-8 {
            let mid = 0.5 * (lo + hi);
            if lambda0(mid, 3).is_ok() {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        assert!((hi - FRAC_PI_2).abs() < 1e-6);
    }

    #[test]
    fn eigenprofile_properties() {
        for n in [2u32, 3] {
            let l = 3.0;
            let lam = lambda0(l, n).unwrap().lambda0;
            let sol = eigenprofile(lam, l, n, 20.0, 401).unwrap();
            assert!(sol.c > 0.0);
            assert!(sol.samples.iter().all(|s| s.1 > 0.0));
            let order = BesselOrder::from_dimension(n).unwrap();
            let phi0 = ((1.0 - lam).sqrt() / 2.0).powf(order.nu()) / order.gamma_plus_one();
            assert!((sol.eval(0.0) - phi0).abs() < 1e-14);
            assert!((sol.eval(1e-6) - phi0).abs() < 1e-9);
            let (vi, vo) = (sol.eval(l), sol.eval(l * (1.0 + 1e-15)));
            assert!((vi - vo).abs() <= 1e-10 * vi);
            let h = 1e-6;
            let di = (sol.eval(l) - sol.eval(l - h)) / h;
            let d_o = (sol.eval(l + h) - sol.eval(l)) / h;
            assert!((di - d_o).abs() < 1e-5 * di.abs().max(1e-3));
            assert!((sol.eval_prime(l - 1e-12) - sol.eval_prime(l + 1e-12)).abs() <= 1e-8 * sol.eval_prime(l).abs());
        }
        assert!(matches!(eigenprofile(0.01, 5.0, 3, 10.0, 11), Err(EigenError::PositivityViolation { .. })));
    }

    #[test]
    fn separated_lambda_one_is_flat_inside() {
        let prof = separated_profile(0.5, 2.0, 3, 1.0).unwrap();
        for &(r, phi) in &prof.samples {
            if r <= 2.0 {
                assert!((phi - 1.0).abs() < 1e-12, "r={r}");
            }
        }
        let outside: Vec<f64> = prof.samples.iter().filter(|s| s.0 > 2.0).map(|s| s.1).collect();
        assert!(outside.windows(2).all(|w| w[1] >= w[0]));
        assert!(prof.r_lambda().is_none());
    }

    #[test]
    fn separated_small_lambda_vanishes_and_lambda_star() {
        let (m, l) = (0.5, 2.0);
        assert!(separated_profile(m, l, 3, 0.01).unwrap().r_lambda().is_some());
        let ls = lambda_star(m, l, 3).unwrap();
        assert!(ls.lambda_star > 0.0 && ls.lambda_star < 1.0);
        assert!(!ls.nonmonotone);
        let rs: Vec<f64> = [0.5, 0.8, 0.95, 0.99]
            .iter()
            .map(|f| separated_profile(m, l, 3, ls.lambda_star * f).unwrap().r_lambda().unwrap())
            .collect();
        assert!(rs.windows(2).all(|w| w[1] > w[0]), "{rs:?}");
        assert!(lambda_star(m, 1.4, 3).is_err());
    }

    #[test]
    fn lambda_star_trends() {
        let m = 0.5;
        let near = lambda_star(m, FRAC_PI_2 + 0.02, 3).unwrap().lambda_star;
        assert!(near < 0.2, "{near}");
        let ls: Vec<f64> = [1.8, 2.5, 4.0].iter().map(|&l| lambda_star(m, l, 3).unwrap().lambda_star).collect();
        assert!(ls.windows(2).all(|w| w[1] > w[0]), "{ls:?}");
    }
}
