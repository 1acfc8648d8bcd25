//! Functionals of §3: mass, Lyapunov energy, Kaplan and concavity
//! functionals, and the flat supersolution bound Eq. (flat).

use serde::{Deserialize, Serialize};

use super::grid::RadialGrid;
use crate::params::{unit_eigen_radius, ProblemParams};
use crate::specfun::{bessel_j, BesselOrder};

/// Eq. (flat): `(M^{1−p} + (1−p)t)^{1/(1−p)}` for p < 1, `M e^t` for p = 1
/// (and the same closed form for p > 1 up to its blow-up time, +∞ after).
pub fn flat_bound(m0: f64, p: f64, t: f64) -> f64 {
    if (p - 1.0).abs() < 1e-14 {
        return m0 * t.exp();
    }
    let base = m0.powf(1.0 - p) + (1.0 - p) * t;
    if base <= 0.0 {
        f64::INFINITY
    } else {
        base.powf(1.0 / (1.0 - p))
    }
}

/// First radial Dirichlet eigenvalue λ₁ = (η/L)² of `B_L` and the Kaplan
/// large-data threshold `λ₁^{1/(p−m)}` (defined for p > m).
pub fn kaplan_threshold(params: &ProblemParams) -> (f64, Option<f64>) {
    let lambda1 = (unit_eigen_radius(params.n) / params.l).powi(2);
    let thr = (params.p > params.m).then(|| lambda1.powf(1.0 / (params.p - params.m)));
    (lambda1, thr)
}

/// First Dirichlet eigenfunction of `B_L` (unnormalized): cos(πr/2L) for
/// N = 1, `r^{−ν} J_ν(η r/L)` otherwise, 0 outside.
pub fn dirichlet_eigenfunction(n: u32, l: f64, r: f64) -> f64 {
    if r >= l {
        return 0.0;
    }
    let eta = unit_eigen_radius(n);
    if n == 1 {
        return (eta * r / l).cos();
    }
    let order = BesselOrder::from_dimension(n).expect("N >= 2");
    let nu = order.nu();
    let z = eta * r / l;
    if z < 1e-8 {
        return (eta / l).powf(nu) / (2f64.powf(nu) * order.gamma_plus_one());
    }
    bessel_j(order, z).expect("finite argument") * r.powf(-nu)
}

/// Precomputed quadrature weights for the per-step functionals.
#[derive(Debug, Clone)]
pub struct Diagnostics {
    m: f64,
    p: f64,
    h: f64,
    sphere: f64,
    vol: Vec<f64>,
    area: Vec<f64>,
    frac: Vec<f64>,
    /// V_i·a_i·φ₁(r_i) / Σ V_j a_j φ₁(r_j).
    kaplan_w: Vec<f64>,
}

impl Diagnostics {
    pub fn new(params: &ProblemParams, grid: &RadialGrid, reaction: bool) -> Self {
        let vol = grid.volumes();
        let ball = grid.ball_fractions(params.l);
        let mut kaplan_w: Vec<f64> = (0..=grid.cells).map(|i| vol[i] * ball[i] * dirichlet_eigenfunction(params.n, params.l, grid.node(i))).collect();
        let total: f64 = kaplan_w.iter().sum();
        if total > 0.0 {
            kaplan_w.iter_mut().for_each(|w| *w /= total);
        }
        Diagnostics {
            m: params.m,
            p: params.p,
            h: grid.h,
            sphere: grid.sphere_area(),
            area: grid.face_areas(),
            frac: if reaction { ball } else { vec![0.0; grid.cells + 1] },
            vol,
            kaplan_w,
        }
    }

    /// ∫u dx.
    pub fn mass(&self, u: &[f64]) -> f64 {
        self.sphere * u.iter().zip(&self.vol).map(|(a, v)| a * v).sum::<f64>()
    }

    /// `E = ½∫|∇u^m|² − m/(m+p)∫a u^{m+p}`; for p = m this is the paper's
    /// Eq. (eq.lyapunov) `½∫|∇w^m|² − ½∫a w^{2m}`.
    pub fn energy(&self, u: &[f64]) -> f64 {
        let w: Vec<f64> = u.iter().map(|x| x.powf(self.m)).collect();
        let grad: f64 = self.area.iter().enumerate().map(|(i, a)| a * (w[i + 1] - w[i]).powi(2) / self.h).sum();
        let react: f64 = u.iter().zip(&self.vol).zip(&self.frac).map(|((x, v), a)| v * a * x.powf(self.m + self.p)).sum();
        self.sphere * (0.5 * grad - self.m / (self.m + self.p) * react)
    }

    /// `∫_{B_L} u φ₁` with `∫φ₁ = 1`.
    pub fn kaplan(&self, u: &[f64]) -> f64 {
        u.iter().zip(&self.kaplan_w).map(|(a, w)| a * w).sum()
    }

    /// `(1/(m+1))∫u^{m+1}`.
    pub fn concavity_j(&self, u: &[f64]) -> f64 {
        self.sphere * u.iter().zip(&self.vol).map(|(x, v)| v * x.powf(self.m + 1.0)).sum::<f64>() / (self.m + 1.0)
    }
}

/// Consequences of `J' ≥ C J^q`, q = 2m/(m+1), Eq. (eq.J').
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcavityReport {
    pub q: f64,
    /// First time with J' > 0 and J there.
    pub t0: Option<f64>,
    pub j0: Option<f64>,
    /// Smallest C with J' ≥ C J^q from t0 on (0 when J' returns to ≤ 0).
    pub c: Option<f64>,
    /// m > 1: `T = t0 + J0^{1−q}/(C(q−1))`, the ODE blow-up time.
    pub predicted_blowup: Option<f64>,
    /// m < 1: J grows at least like t^{(m+1)/(1−m)}.
    pub rate_exponent: Option<f64>,
    pub conclusion: String,
}

/// Evaluates the concavity inequality along a `(t, J)` series.
pub fn concavity_report(series: &[(f64, f64)], m: f64) -> ConcavityReport {
    let q = 2.0 * m / (m + 1.0);
    let mut report = ConcavityReport { q, t0: None, j0: None, c: None, predicted_blowup: None, rate_exponent: None, conclusion: String::new() };
    let slopes: Vec<(f64, f64, f64)> = series
        .windows(2)
        .filter(|w| w[1].0 > w[0].0)
        .map(|w| {
            let d = (w[1].1 - w[0].1) / (w[1].0 - w[0].0);
            (w[0].0, 0.5 * (w[0].1 + w[1].1), d)
        })
        .collect();
    let Some(k0) = slopes.iter().position(|s| s.2 > 0.0) else {
        report.c = Some(0.0);
        report.conclusion = "no conclusion: J' never positive".into();
        return report;
    };
    let (t0, j0) = (slopes[k0].0, series.iter().find(|s| s.0 == slopes[k0].0).map(|s| s.1).unwrap_or(slopes[k0].1));
    let c = slopes[k0..].iter().map(|s| s.2 / s.1.powf(q)).fold(f64::INFINITY, f64::min).max(0.0);
    report.t0 = Some(t0);
    report.j0 = Some(j0);
    report.c = Some(c);
    if c == 0.0 {
        report.conclusion = "no conclusion: J' not bounded below by C J^q with C > 0".into();
    } else if q > 1.0 {
        let t = t0 + j0.powf(1.0 - q) / (c * (q - 1.0));
        report.predicted_blowup = Some(t);
        report.conclusion = format!("J' >= {c:.4e} J^{q:.4}: finite-time blow-up no later than t = {t:.6e}");
    } else if q < 1.0 {
        let e = (m + 1.0) / (1.0 - m);
        report.rate_exponent = Some(e);
        report.conclusion = format!("J' >= {c:.4e} J^{q:.4}: J grows at least like t^{e:.4}, u(0,t) >= c t^(1/(1-m))");
    } else {
        report.conclusion = format!("J' >= {c:.4e} J: at least exponential growth");
    }
    report
}
