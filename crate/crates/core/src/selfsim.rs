//! Self-similar solutions of the pure fast-diffusion equation `u_t = Δu^m`
//! (§2.3), built from the separatrix of the phase-plane system
//!
//! ```text
//! X' = (2−N)X − mX² + Y(α + βX),   Y' = (2 + (1−m)X) Y,
//! X = ξf'/f,  Y = ξ² f^{1−m}/m,  ' = d/dη, η = log ξ.
//! ```
//!
//! The separatrix is computed backward in η from its ω-limit: the saddle C
//! (δ > 0, along C's stable eigenvector) or the slow manifold
//! `X ≈ X_C − g(X_C)/(βY)` at large Y (δ = 0). Backward in η it is attracted
//! to B (N ≥ 3) or to A along the centre manifold (N = 2).

use serde::{Deserialize, Serialize};

use crate::ode::{integrate, OdeError, Tolerances, Trajectory};
use crate::stationary::least_squares;

/// Displacement from C along the stable eigenvector.
pub const SEPARATRIX_EPS: f64 = 1e-8;
/// Lower end of the sampled η range (log ξ) for N = 2, where f is log-singular.
pub const ETA_MIN_2D: f64 = -200.0;
/// Lower end of the sampled η range for N ≥ 3.
pub const ETA_MIN_ND: f64 = -30.0;
/// Sampling step in η.
pub const ETA_STEP: f64 = 0.05;
/// log ξ values where the δ = 0 ratio is compared with its analytic limit.
pub const LOG_LIMIT_PROBES: [f64; 4] = [10.0, 20.0, 40.0, 80.0];
/// Far-field fit window in ξ.
pub const FAR_WINDOW: (f64, f64) = (1e2, 1e4);

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SelfSimError {
    #[error("integration failed: {0}")]
    Ode(#[from] OdeError),
    #[error("invalid parameters: {0}")]
    Invalid(String),
    #[error("separatrix left the invariant region at eta = {eta}: X = {x}, Y = {y}")]
    LeftRegion { eta: f64, x: f64, y: f64 },
    #[error("normalization failed: {0}")]
    Normalization(String),
    #[error("profile with delta = {delta} is neither type I nor type II")]
    NotTyped { delta: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    #[serde(rename = "X")]
    pub x: f64,
    #[serde(rename = "Y")]
    pub y: f64,
    pub eta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SelfSimType {
    /// U = t^α f(r t^β), δ = 1.
    I,
    /// U = e^{αt} f(r e^{βt}), δ = 0.
    II,
    /// Any other δ ≥ 0 (admissible for the lemma, not a typed solution).
    Untyped,
}

/// Similarity exponents with δ = α(1−m) − 2β.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelfSimParams {
    pub alpha: f64,
    pub beta: f64,
    pub m: f64,
    #[serde(rename = "N")]
    pub n: u32,
}

impl SelfSimParams {
    /// Type I (δ = 1): β = (α(1−m) − 1)/2, requires α > 1/(1−m).
    pub fn type_i(m: f64, n: u32, alpha: f64) -> Result<Self, SelfSimError> {
        Self::with_delta(m, n, alpha, 1.0)
    }

    /// Type II (δ = 0): β = α(1−m)/2.
    pub fn type_ii(m: f64, n: u32, alpha: f64) -> Result<Self, SelfSimError> {
        Self::with_delta(m, n, alpha, 0.0)
    }

    pub fn with_delta(m: f64, n: u32, alpha: f64, delta: f64) -> Result<Self, SelfSimError> {
        let p = SelfSimParams { alpha, beta: (alpha * (1.0 - m) - delta) / 2.0, m, n };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), SelfSimError> {
        let m_star = (self.n as f64 - 2.0).max(0.0) / self.n as f64;
        if !(self.m > m_star && self.m < 1.0) {
            return Err(SelfSimError::Invalid(format!("need m* = {m_star} < m < 1, got m = {}", self.m)));
        }
        if self.n < 2 {
            return Err(SelfSimError::Invalid("phase-plane construction needs N >= 2".into()));
        }
        if !(self.alpha > 0.0 && self.beta > 0.0) {
            return Err(SelfSimError::Invalid(format!("need alpha, beta > 0 (alpha = {}, beta = {})", self.alpha, self.beta)));
        }
        if self.delta() < -1e-12 {
            return Err(SelfSimError::Invalid(format!("delta = {} < 0", self.delta())));
        }
        Ok(())
    }

    pub fn delta(&self) -> f64 {
        let d = self.alpha * (1.0 - self.m) - 2.0 * self.beta;
        if d.abs() < 1e-12 {
            0.0
        } else {
            d
        }
    }

    pub fn kind(&self) -> SelfSimType {
        let d = self.delta();
        if d == 0.0 {
            SelfSimType::II
        } else if (d - 1.0).abs() < 1e-12 {
            SelfSimType::I
        } else {
            SelfSimType::Untyped
        }
    }

    /// X_C = −2/(1−m).
    pub fn x_c(&self) -> f64 {
        -2.0 / (1.0 - self.m)
    }

    /// X_B = (2−N)/m.
    pub fn x_b(&self) -> f64 {
        (2.0 - self.n as f64) / self.m
    }

    /// The critical point C (δ > 0).
    pub fn point_c(&self) -> Option<(f64, f64)> {
        let d = self.delta();
        let n = self.n as f64;
        (d > 0.0).then(|| (self.x_c(), (4.0 - 2.0 * n * (1.0 - self.m)) / ((1.0 - self.m) * d)))
    }

    /// Upper boundary Γ₃ of the invariant region, `Y = (mX² − (2−N)X)/(α+βX)`.
    pub fn gamma3(&self, x: f64) -> f64 {
        let n = self.n as f64;
        (self.m * x * x - (2.0 - n) * x) / (self.alpha + self.beta * x)
    }
}

/// The phase field `(dX/dη, dY/dη)`.
pub fn phase_field(pt: &PhasePoint, alpha: f64, beta: f64, m: f64, n: u32) -> (f64, f64) {
    field(pt.x, pt.y, alpha, beta, m, n as f64)
}

#[inline]
fn field(x: f64, y: f64, alpha: f64, beta: f64, m: f64, n: f64) -> (f64, f64) {
    ((2.0 - n) * x - m * x * x + y * (alpha + beta * x), (2.0 + (1.0 - m) * x) * y)
}

/// The separatrix orbit, integrated backward in η from its ω-limit.
#[derive(Debug, Clone)]
pub struct Separatrix {
    pub params: SelfSimParams,
    /// Samples ordered by increasing η.
    pub points: Vec<PhasePoint>,
    /// Stable eigenvalue of C (δ > 0) used by the far-field tail.
    pub lambda_stable: Option<f64>,
    /// Rate of linear growth `dY/dη → κ` on the slow manifold (δ = 0).
    pub kappa: Option<f64>,
    /// Largest violation of the invariant-region inequalities.
    pub region_violation: f64,
    traj: Trajectory<2>,
}

impl Separatrix {
    pub fn eta_range(&self) -> (f64, f64) {
        (self.points[0].eta, self.points.last().unwrap().eta)
    }

    /// `(X, log Y)` at η on the numerical orbit.
    pub fn eval_log(&self, eta: f64) -> (f64, f64) {
        let y = self.traj.eval(eta);
        (y[0], y[1])
    }

    /// η at which X crosses the midpoint between its limits (X_B or 0, and
    /// X_C): the scale separating the near-zero and far-field regimes.
    pub fn transition_eta(&self) -> f64 {
        let target = 0.5 * (self.params.x_b() + self.params.x_c());
        let i = self.points.iter().position(|q| q.x <= target).unwrap_or(0).max(1);
        let (a, b) = (self.points[i - 1], self.points[i]);
        a.eta + (b.eta - a.eta) * (target - a.x) / (b.x - a.x)
    }
}

fn g_of(x: f64, m: f64, n: f64) -> f64 {
    (2.0 - n) * x - m * x * x
}

/// Computes the separatrix. `y_start` sets the slow-manifold start for δ = 0
/// (ignored for δ > 0); `eps` is the displacement from C for δ > 0.
pub fn separatrix_with(p: &SelfSimParams, eps: f64, y_start: f64) -> Result<Separatrix, SelfSimError> {
    p.validate()?;
    let (m, n, alpha, beta) = (p.m, p.n as f64, p.alpha, p.beta);
    let xc = p.x_c();
    let (start, lambda_stable, kappa) = match p.point_c() {
        Some((x0, y0)) => {
            let j11 = (2.0 - n) - 2.0 * m * x0 + beta * y0;
            let j12 = alpha + beta * x0;
            let j21 = (1.0 - m) * y0;
            let ls = 0.5 * (j11 - (j11 * j11 + 4.0 * j12 * j21).sqrt());
            // eigenvector (λ_s, J21), oriented into Ω (positive X component)
            let (vx, vy) = (-ls, -j21);
            let norm = vx.hypot(vy);
            ([x0 + eps * vx / norm, y0 + eps * vy / norm], Some(ls), None)
        }
        None => {
            // slow manifold: x = X − X_C solves g(X_C + x) + βxY = 0 to O(1/Y²)
            let mut x = -g_of(xc, m, n) / (beta * y_start);
            for _ in 0..50 {
                x = -g_of(xc + x, m, n) / (beta * y_start);
            }
            let kappa = -(1.0 - m) * g_of(xc, m, n) / beta;
            ([xc + x, y_start], None, Some(kappa))
        }
    };

    let x_b = p.x_b();
    // state (X, log Y): Y spans ~60 orders of magnitude along the orbit
    let rhs = move |_eta: f64, s: &[f64; 2]| {
        let y = s[1].exp();
        [(2.0 - n) * s[0] - m * s[0] * s[0] + y * (alpha + beta * s[0]), 2.0 + (1.0 - m) * s[0]]
    };
    let two_d = p.n == 2;
    let stop = move |_eta: f64, s: &[f64; 2]| {
        if two_d {
            s[1] < -69.0
        } else {
            s[1] < -32.0 && (s[0] - x_b).abs() < 1e-12
        }
    };
    let tol = Tolerances::default().with_rtol(1e-12).with_atol(1e-13);
    let traj = integrate(rhs, 0.0, [start[0], start[1].ln()], -1e4, &tol, None, Some(&stop))?;

    let mut points: Vec<PhasePoint> = traj.t.iter().zip(&traj.y).map(|(e, s)| PhasePoint { x: s[0], y: s[1].exp(), eta: *e }).collect();
    points.reverse();

    let mut violation = 0.0_f64;
    for pt in &points {
        let v = (xc - pt.x).max(pt.x - x_b).max(-pt.y).max(pt.y - p.gamma3(pt.x));
        violation = violation.max(v / pt.y.abs().max(1.0));
        if v > 1e-6 * pt.y.abs().max(1.0) {
            return Err(SelfSimError::LeftRegion { eta: pt.eta, x: pt.x, y: pt.y });
        }
    }
    Ok(Separatrix { params: *p, points, lambda_stable, kappa, region_violation: violation.max(0.0), traj })
}

pub fn separatrix(p: &SelfSimParams) -> Result<Separatrix, SelfSimError> {
    let y_start = default_y_start(p, 40.0);
    separatrix_with(p, SEPARATRIX_EPS, y_start)
}

fn default_y_start(p: &SelfSimParams, eta_span: f64) -> f64 {
    let n = p.n as f64;
    let kappa = -(1.0 - p.m) * g_of(p.x_c(), p.m, n) / p.beta;
    (kappa * eta_span).max(100.0)
}

/// A self-similar profile `f`, normalized by `lim ξ^{(N−2)/m} f(ξ) = 1`
/// (N ≥ 3) or `lim f^m(ξ)/|log ξ| = 1` (N = 2), then scaled by μ.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SelfSimilarProfile {
    pub alpha: f64,
    pub beta: f64,
    pub delta: f64,
    pub m: f64,
    #[serde(rename = "N")]
    pub n: u32,
    pub mu: f64,
    #[serde(rename = "type")]
    pub kind: SelfSimType,
    /// `(ξ, f)` on a log-spaced grid (uniform in η).
    pub samples: Vec<(f64, f64)>,
    /// Fitted slope of log f vs log ξ on the first decade of samples.
    pub near_zero_exponent: f64,
    pub near_zero_window: (f64, f64),
    /// Fitted slope of log f vs log ξ over `FAR_WINDOW`.
    pub far_field_exponent: f64,
    /// δ = 0: the far field carries the (log ξ)^{1/(1−m)} correction.
    pub log_correction: bool,
    /// δ = 0: max/min − 1 of `f ξ^{2/(1−m)} / (log ξ)^{1/(1−m)}` over `FAR_WINDOW`.
    pub log_ratio_variation: Option<f64>,
    /// δ = 0: `(ξ, |R(ξ)^{1−m}/(mκ) − 1|)` at `LOG_LIMIT_PROBES`, where R is the
    /// ratio above and `(mκ)^{1/(1−m)}` its analytic limit, κ = −(1−m)g(X_C)/β.
    pub log_limit_error: Option<Vec<(f64, f64)>>,
    /// ξ range covered by the numerical orbit; outside it the fitted tails are used.
    pub numeric_range: (f64, f64),
    /// ξ where X crosses the midpoint between its near-zero and far-field
    /// limits; `build_profile(p, transition_xi)` moves it to ξ = 1.
    pub transition_xi: f64,
    /// Relative change of f at the transition when the start displacement
    /// is halved (δ > 0).
    pub richardson_change: Option<f64>,
    /// η shift `log(μ·μ_norm)` mapping ξ to the orbit's own η.
    pub eta_shift: f64,
    #[serde(skip)]
    orbit: Option<OrbitEval>,
}

#[derive(Debug, Clone)]
struct OrbitEval {
    sep: Separatrix,
    /// Far tail data at the top of the orbit.
    y_hi: f64,
    eta_hi: f64,
    /// Near tail data at the bottom of the orbit.
    x_lo: f64,
    logf_lo: f64,
    eta_lo: f64,
}

impl OrbitEval {
    fn new(sep: Separatrix) -> Self {
        let lo = sep.points[0];
        let hi = *sep.points.last().unwrap();
        let m = sep.params.m;
        let logf_lo = (m.ln() + sep.eval_log(lo.eta).1 - 2.0 * lo.eta) / (1.0 - m);
        OrbitEval { y_hi: hi.y, eta_hi: hi.eta, x_lo: lo.x, logf_lo, eta_lo: lo.eta, sep }
    }

    /// log f_raw at raw η, with tails outside the numerical range.
    fn log_f(&self, eta: f64) -> (f64, bool) {
        let p = &self.sep.params;
        let m = p.m;
        let from_log_y = |log_y: f64, eta: f64| (m.ln() + log_y - 2.0 * eta) / (1.0 - m);
        if eta < self.eta_lo {
            if p.n == 2 {
                // centre manifold Y = 0: X = 1/(m(η − η₀)), f^m ∝ (η₀ − η)
                let eta0 = self.eta_lo - 1.0 / (m * self.x_lo);
                (self.logf_lo + ((eta0 - eta) / (eta0 - self.eta_lo)).ln() / m, true)
            } else {
                (self.logf_lo + p.x_b() * (eta - self.eta_lo), true)
            }
        } else if eta > self.eta_hi {
            let y = match (self.sep.lambda_stable, self.sep.kappa) {
                (Some(ls), _) => {
                    let (_, yc) = p.point_c().unwrap();
                    yc + (self.y_hi - yc) * (ls * (eta - self.eta_hi)).exp()
                }
                (None, Some(kappa)) => self.y_hi + kappa * (eta - self.eta_hi),
                _ => unreachable!("separatrix carries one tail model"),
            };
            (from_log_y(y.ln(), eta), true)
        } else {
            let (_, log_y) = self.sep.eval_log(eta);
            (from_log_y(log_y, eta), false)
        }
    }
}

/// Normalizing η shift `c = log μ_norm` for a raw orbit.
fn normalization_shift(ev: &OrbitEval) -> Result<f64, SelfSimError> {
    let p = &ev.sep.params;
    let m = p.m;
    if p.n == 2 {
        if !(ev.x_lo < 0.0) {
            return Err(SelfSimError::Normalization("orbit did not reach the centre manifold".into()));
        }
        let eta0 = ev.eta_lo - 1.0 / (m * ev.x_lo);
        // f_raw^m ≈ F_lo (η₀ − η)/(η₀ − η_lo); want μ^{2m/(1−m)} F_lo/(η₀ − η_lo) = 1
        let log_k = m * ev.logf_lo - (eta0 - ev.eta_lo).ln();
        Ok(-log_k * (1.0 - m) / (2.0 * m))
    } else {
        let q = (p.n as f64 - 2.0) / m;
        if (ev.x_lo - p.x_b()).abs() > 1e-6 {
            return Err(SelfSimError::Normalization(format!("orbit ended at X = {} away from B", ev.x_lo)));
        }
        // G = lim ξ^q f_raw; μ^{2/(1−m) − q} G = 1
        let log_g = ev.logf_lo + q * ev.eta_lo;
        Ok(-log_g / (2.0 / (1.0 - m) - q))
    }
}

impl SelfSimilarProfile {
    /// f(ξ) and whether a fitted tail (not the numerical orbit) was used.
    pub fn eval(&self, xi: f64) -> (f64, bool) {
        let (log_f, tail) = self.eval_log(xi.ln());
        (log_f.exp(), tail)
    }

    /// `log f` at `η = log ξ` (no under/overflow far out).
    pub fn eval_log(&self, eta: f64) -> (f64, bool) {
        let ev = self.orbit.as_ref().expect("profile built by reconstruct_profile");
        let (log_f_raw, tail) = ev.log_f(eta + self.eta_shift);
        // f(ξ) = μ^{2/(1−m)} f_raw(μξ), μ = e^{shift}
        (log_f_raw + 2.0 * self.eta_shift / (1.0 - self.m), tail)
    }

    /// `ξ f'(ξ)/f(ξ)` (= X along the orbit).
    pub fn log_slope(&self, xi: f64) -> f64 {
        let h: f64 = 1e-5;
        let (a, _) = self.eval(xi * (-h).exp());
        let (b, _) = self.eval(xi * h.exp());
        (b.ln() - a.ln()) / (2.0 * h)
    }

    /// U(r, t) for typed profiles; the flag reports tail extrapolation.
    pub fn evaluate_u(&self, r: f64, t: f64) -> Result<(f64, bool), SelfSimError> {
        let (amp, xi) = match self.kind {
            SelfSimType::I => (t.powf(self.alpha), r * t.powf(self.beta)),
            SelfSimType::II => ((self.alpha * t).exp(), r * (self.beta * t).exp()),
            SelfSimType::Untyped => return Err(SelfSimError::NotTyped { delta: self.delta }),
        };
        let (f, tail) = self.eval(xi);
        Ok((amp * f, tail))
    }
}

/// Recovers f from the separatrix through `f = (mY/ξ²)^{1/(1−m)}` (the
/// integral of d log f/dη = X in closed form), normalizes, and applies the
/// μ-scaling `f_μ(ξ) = μ^{2/(1−m)} f(μξ)`.
pub fn reconstruct_profile(sep: &Separatrix, mu: f64) -> Result<SelfSimilarProfile, SelfSimError> {
    if !(mu > 0.0) {
        return Err(SelfSimError::Invalid(format!("mu = {mu} must be positive")));
    }
    let p = sep.params;
    let ev = OrbitEval::new(sep.clone());
    let shift = normalization_shift(&ev)? + mu.ln();
    let (eta_lo, eta_hi) = sep.eta_range();
    let numeric_range = ((eta_lo - shift).exp(), (eta_hi - shift).exp());
    let mut prof = SelfSimilarProfile {
        alpha: p.alpha,
        beta: p.beta,
        delta: p.delta(),
        m: p.m,
        n: p.n,
        mu,
        kind: p.kind(),
        samples: Vec::new(),
        near_zero_exponent: f64::NAN,
        near_zero_window: (0.0, 0.0),
        far_field_exponent: f64::NAN,
        log_correction: p.delta() == 0.0,
        log_ratio_variation: None,
        log_limit_error: None,
        numeric_range,
        transition_xi: (sep.transition_eta() - shift).exp(),
        richardson_change: None,
        eta_shift: shift,
        orbit: Some(ev),
    };

    let eta_min = if p.n == 2 { ETA_MIN_2D } else { ETA_MIN_ND };
    let eta_max = FAR_WINDOW.1.ln() + 2.0;
    let count = ((eta_max - eta_min) / ETA_STEP).round() as usize;
    prof.samples = (0..=count)
        .map(|i| {
            let xi = (eta_min + i as f64 * ETA_STEP).exp();
            (xi, prof.eval(xi).0)
        })
        .collect();

    let fit = |lo: f64, hi: f64| {
        let pts: Vec<(f64, f64)> = prof.samples.iter().filter(|s| s.0 >= lo * (1.0 - 1e-12) && s.0 <= hi * (1.0 + 1e-12)).map(|s| (s.0.ln(), s.1.ln())).collect();
        least_squares(&pts).0
    };
    let xi_lo = eta_min.exp();
    prof.near_zero_window = (xi_lo, 10.0 * xi_lo);
    prof.near_zero_exponent = fit(xi_lo, 10.0 * xi_lo);
    prof.far_field_exponent = fit(FAR_WINDOW.0, FAR_WINDOW.1);
    if prof.log_correction {
        let e = 1.0 / (1.0 - p.m);
        let ratios: Vec<f64> = prof
            .samples
            .iter()
            .filter(|s| s.0 >= FAR_WINDOW.0 && s.0 <= FAR_WINDOW.1 * (1.0 + 1e-12))
            .map(|s| s.1 * s.0.powf(2.0 * e) / s.0.ln().powf(e))
            .collect();
        let (lo, hi) = ratios.iter().fold((f64::INFINITY, 0.0_f64), |(a, b), &r| (a.min(r), b.max(r)));
        prof.log_ratio_variation = Some(hi / lo - 1.0);
        let kappa = sep.kappa.expect("delta = 0 orbit carries kappa");
        prof.log_limit_error = Some(
            LOG_LIMIT_PROBES
                .iter()
                .map(|&eta| {
                    let log_r = prof.eval_log(eta).0 + 2.0 * e * eta - e * eta.ln();
                    (eta.exp(), (((1.0 - p.m) * log_r).exp() / (p.m * kappa) - 1.0).abs())
                })
                .collect(),
        );
    }
    Ok(prof)
}

/// Separatrix plus normalized profile. For δ = 0 the start height is raised
/// until the orbit covers five decades of ξ beyond the transition; for δ > 0
/// the start displacement is halved as a Richardson check.
pub fn build_profile(p: &SelfSimParams, mu: f64) -> Result<SelfSimilarProfile, SelfSimError> {
    let mut span = 40.0;
    loop {
        let sep = separatrix_with(p, SEPARATRIX_EPS, default_y_start(p, span))?;
        let mut prof = reconstruct_profile(&sep, mu)?;
        if p.delta() == 0.0 && prof.numeric_range.1 < prof.transition_xi * (LOG_LIMIT_PROBES[3] + 1.0).exp() && span < 1e4 {
            span *= 2.0;
            continue;
        }
        if p.delta() > 0.0 {
            let half = reconstruct_profile(&separatrix_with(p, SEPARATRIX_EPS / 2.0, 0.0)?, mu)?;
            let xi = prof.transition_xi;
            let (a, b) = (prof.eval(xi).0, half.eval(xi).0);
            prof.richardson_change = Some((a - b).abs() / a);
        }
        return Ok(prof);
    }
}

/// The profile rescaled (μ = transition scale of the normalized profile) so
/// that the crossover between the near-zero and far-field regimes sits at
/// ξ = 1; the fixed fit windows then probe the asymptotic regimes.
pub fn build_centred_profile(p: &SelfSimParams) -> Result<SelfSimilarProfile, SelfSimError> {
    let base = build_profile(p, 1.0)?;
    build_profile(p, base.transition_xi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_vanishes_at_critical_points() {
        // spec example quotes α = 2, β = 1/2, which gives δ = 0; C = (−4, 4) needs δ = 1
        let p = SelfSimParams::type_i(0.5, 2, 4.0).unwrap();
        assert_eq!((p.beta, p.delta()), (0.5, 1.0));
        let (xc, yc) = p.point_c().unwrap();
        assert!((xc + 4.0).abs() < 1e-14 && (yc - 4.0).abs() < 1e-14);
        let (a, b) = phase_field(&PhasePoint { x: xc, y: yc, eta: 0.0 }, p.alpha, p.beta, p.m, p.n);
        assert!(a.abs() < 1e-12 && b.abs() < 1e-12);
        for n in [3u32, 4] {
            let p = SelfSimParams::type_i(0.7, n, 5.0).unwrap();
            let (xc, yc) = p.point_c().unwrap();
            let (a, b) = field(xc, yc, p.alpha, p.beta, p.m, n as f64);
            assert!(a.abs() < 1e-12 && b.abs() < 1e-12);
            let (a, b) = field(p.x_b(), 0.0, p.alpha, p.beta, p.m, n as f64);
            assert!(a.abs() < 1e-12 && b.abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_invalid_parameters() {
        assert!(SelfSimParams::type_i(0.2, 3, 5.0).is_err()); // m < m*
        assert!(SelfSimParams::type_i(0.5, 3, 1.5).is_err()); // alpha < 1/(1-m)
        assert!(SelfSimParams::with_delta(0.5, 3, 1.0, -0.1).is_err());
    }

    #[test]
    fn separatrix_delta_positive() {
        let p = SelfSimParams::type_i(0.6, 3, 3.0).unwrap();
        let sep = separatrix(&p).unwrap();
        let last = sep.points.last().unwrap();
        let (xc, yc) = p.point_c().unwrap();
        assert!((last.x - xc).abs() + (last.y - yc).abs() < 1e-6);
        assert!(sep.points.iter().all(|q| q.x >= xc - 1e-6));
        assert!(sep.points.windows(2).all(|w| w[1].y >= w[0].y));
        assert!(sep.region_violation <= 1e-6);
        assert!((sep.points[0].x - p.x_b()).abs() < 1e-9);
    }

    #[test]
    fn separatrix_delta_zero_goes_up() {
        let p = SelfSimParams::type_ii(0.8, 2, 1.0).unwrap();
        let sep = separatrix(&p).unwrap();
        let last = sep.points.last().unwrap();
        // on the slow manifold X − X_C ≈ −g(X_C)/(βY)
        let slow = p.m * p.x_c() * p.x_c() / (p.beta * last.y);
        assert!(last.y > 100.0 && ((last.x - p.x_c()) / slow - 1.0).abs() < 0.05);
        assert!(sep.points.windows(2).all(|w| w[1].y >= w[0].y));
    }

    #[test]
    fn profile_asymptotics() {
        for (m, n, delta) in [(0.6, 3u32, 1.0), (0.8, 2, 1.0), (0.6, 2, 0.0), (0.8, 3, 0.0)] {
            let alpha = if delta > 0.0 { 1.0 / (1.0 - m) + 1.0 } else { 1.0 };
            let p = SelfSimParams::with_delta(m, n, alpha, delta).unwrap();
            let prof = build_centred_profile(&p).unwrap();
            let expect0 = -(n as f64 - 2.0).max(0.0) / m;
            assert!((prof.near_zero_exponent - expect0).abs() <= 0.02 * expect0.abs().max(1.0), "{m} {n} {delta}: {}", prof.near_zero_exponent);
            if delta > 0.0 {
                let e = -2.0 / (1.0 - m);
                assert!((prof.far_field_exponent - e).abs() <= 0.02 * e.abs());
                assert!(prof.richardson_change.unwrap() < 1e-6);
            } else {
                // R(ξ)^{1−m}/(mκ) → 1 slowly (O(log η/η)): check monotone convergence
                let errs = prof.log_limit_error.unwrap();
                assert!(errs.windows(2).all(|w| w[1].1 < w[0].1), "{errs:?}");
                assert!(errs.last().unwrap().1 < 0.1);
            }
            assert!(prof.samples.windows(2).all(|w| w[1].1 < w[0].1));
        }
    }

    #[test]
    fn mu_family_consistency() {
        let p = SelfSimParams::type_i(0.7, 3, 4.0).unwrap();
        let sep = separatrix(&p).unwrap();
        let base = reconstruct_profile(&sep, 1.0).unwrap();
        let mu = 2.5;
        let scaled = reconstruct_profile(&sep, mu).unwrap();
        for xi in [0.01, 0.3, 1.0, 7.0, 50.0] {
            let lhs = scaled.eval(xi).0;
            let rhs = mu.powf(2.0 / (1.0 - p.m)) * base.eval(mu * xi).0;
            assert!((lhs - rhs).abs() <= 1e-8 * lhs);
        }
    }

    #[test]
    fn u_is_monotone_and_self_similar() {
        let p = SelfSimParams::type_i(0.6, 3, 3.0).unwrap();
        let prof = build_centred_profile(&p).unwrap();
        for &r in &[0.2, 0.5, 1.0, 2.0] {
            let mut prev = 0.0;
            for k in 1..20 {
                let t = 0.5 * k as f64;
                let (u, _) = prof.evaluate_u(r, t).unwrap();
                assert!(u >= prev);
                prev = u;
                let xi = r * t.powf(p.beta);
                assert!((u - t.powf(p.alpha) * prof.eval(xi).0).abs() <= 1e-14 * u);
            }
        }
        // αf + βξf' ≥ 0
        for &(xi, f) in prof.samples.iter().step_by(50) {
            assert!(p.alpha + p.beta * prof.log_slope(xi) >= -1e-9, "xi={xi} f={f}");
        }
    }
}
