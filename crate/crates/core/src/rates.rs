//! Rate extraction from simulation series and the analytic rate predictions
//! of §5 (flat bound, Duhamel iteration for m = 1, N = 2).
//!
//! Every fit regresses `log u` on a transformed time variable `x(t)`
//! (`log t`, `t` or `log log t`) using trapezoid weights in `x`, so that the
//! dense, irregular step series produced by the solver is treated as a
//! continuous curve rather than being dominated by its most refined part.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Fraction of the requested window (in the fit's time variable) discarded
/// as transient before regressing.
pub const TRANSIENT_FRACTION: f64 = 0.2;
/// Minimum ratio `t_b / t_a` for power fits (one decade).
pub const MIN_POWER_SPAN: f64 = 10.0;
/// Minimum ratio `t_b / t_a` for log-power fits (`[10², 10⁵]`).
pub const MIN_LOGPOWER_SPAN: f64 = 1e3;
/// Minimum length `t_b − t_a` for exponential fits.
pub const MIN_EXP_LENGTH: f64 = 5.0;
/// Goodness (max relative deviation) above which a log-power fit is
/// rejected as not describing the data.
pub const LOGPOWER_REJECTION: f64 = 0.05;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RatesError {
    #[error("fit window [{ta}, {tb}] too short for the {model:?} model")]
    WindowTooShort { model: RateModel, ta: f64, tb: f64 },
    #[error("invalid fit window [{ta}, {tb}]: {reason}")]
    InvalidWindow { ta: f64, tb: f64, reason: String },
    #[error("series must be positive with increasing times (offending t = {t})")]
    NonPositive { t: f64 },
    #[error("only {points} points in the fit window (need at least 3)")]
    Insufficient { points: usize },
    #[error("invalid exponent p = {0} (need 0 <= p < 1)")]
    InvalidExponent(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RateModel {
    /// `u ≈ C t^σ`.
    Power,
    /// `u ≈ C e^{λt}`.
    Exponential,
    /// `u ≈ C (log t)^σ`.
    LogPower,
}

impl RateModel {
    pub const ALL: [RateModel; 3] = [RateModel::Power, RateModel::Exponential, RateModel::LogPower];

    fn x(self, t: f64) -> f64 {
        match self {
            RateModel::Power => t.ln(),
            RateModel::Exponential => t,
            RateModel::LogPower => t.ln().ln(),
        }
    }

    fn t_of_x(self, x: f64) -> f64 {
        match self {
            RateModel::Power => x.exp(),
            RateModel::Exponential => x,
            RateModel::LogPower => x.exp().exp(),
        }
    }

    fn window_ok(self, ta: f64, tb: f64) -> bool {
        match self {
            RateModel::Power => tb >= MIN_POWER_SPAN * ta * (1.0 - 1e-12),
            RateModel::LogPower => tb >= MIN_LOGPOWER_SPAN * ta * (1.0 - 1e-12),
            RateModel::Exponential => tb - ta >= MIN_EXP_LENGTH * (1.0 - 1e-12),
        }
    }
}

/// One fitted rate: JSON record `{model, parameter, window, goodness, series_id}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub model: RateModel,
    /// σ (power, log-power) or λ (exponential).
    pub parameter: f64,
    /// `log C` of the fitted law.
    pub intercept: f64,
    /// Requested window `[t_a, t_b]`.
    pub window: (f64, f64),
    /// Window actually regressed, after discarding the transient.
    pub fitted_window: (f64, f64),
    /// Max relative deviation `|fit/u − 1|` over the fitted window.
    pub goodness: f64,
    pub points: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub series_id: Option<String>,
}

impl RateFit {
    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.series_id = Some(id.into());
        self
    }

    /// Fitted law evaluated at `t`.
    pub fn predict(&self, t: f64) -> f64 {
        (self.intercept + self.parameter * self.model.x(t)).exp()
    }
}

/// Least-squares slope of log u vs log t over `window`.
pub fn fit_power(series: &[(f64, f64)], window: (f64, f64)) -> Result<RateFit, RatesError> {
    fit(series, window, RateModel::Power)
}

/// Least-squares slope of log u vs t over `window` (λ of `u ~ e^{λt}`).
pub fn fit_exponential(series: &[(f64, f64)], window: (f64, f64)) -> Result<RateFit, RatesError> {
    fit(series, window, RateModel::Exponential)
}

/// Least-squares slope of log u vs log log t over `window`.
pub fn fit_logpower(series: &[(f64, f64)], window: (f64, f64)) -> Result<RateFit, RatesError> {
    fit(series, window, RateModel::LogPower)
}

/// Fits all models whose window requirement is met and returns them sorted
/// by goodness (best first).
pub fn fit_all(series: &[(f64, f64)], window: (f64, f64)) -> Vec<RateFit> {
    let mut fits: Vec<RateFit> = RateModel::ALL.iter().filter_map(|m| fit(series, window, *m).ok()).collect();
    fits.sort_by(|a, b| a.goodness.total_cmp(&b.goodness));
    fits
}

/// Generic fit of `log u = intercept + parameter·x(t)`.
pub fn fit(series: &[(f64, f64)], window: (f64, f64), model: RateModel) -> Result<RateFit, RatesError> {
    let (ta, tb) = window;
    if !(ta.is_finite() && tb.is_finite() && tb > ta) {
        return Err(RatesError::InvalidWindow { ta, tb, reason: "need finite t_a < t_b".into() });
    }
    let t_min_model = match model {
        RateModel::Power => 0.0,
        RateModel::LogPower => 1.0,
        RateModel::Exponential => f64::NEG_INFINITY,
    };
    if ta <= t_min_model {
        return Err(RatesError::InvalidWindow { ta, tb, reason: format!("t_a must exceed {t_min_model} for the {model:?} model") });
    }
    if !model.window_ok(ta, tb) {
        return Err(RatesError::WindowTooShort { model, ta, tb });
    }
    let (first, last) = match (series.first(), series.last()) {
        (Some(f), Some(l)) => (f.0, l.0),
        _ => return Err(RatesError::Insufficient { points: 0 }),
    };
    let slack = 1e-9 * tb.abs().max(1.0);
    if ta < first - slack || tb > last + slack {
        return Err(RatesError::InvalidWindow { ta, tb, reason: format!("outside the data range [{first}, {last}]") });
    }
    let (xa, xb) = (model.x(ta), model.x(tb));
    let xs = xa + TRANSIENT_FRACTION * (xb - xa);
    let fitted = (model.t_of_x(xs), tb);
    let mut pts = Vec::new();
    let mut prev_t = f64::NEG_INFINITY;
    for &(t, u) in series {
        if t < fitted.0 - slack || t > tb + slack {
            continue;
        }
        if !(u > 0.0 && u.is_finite()) || t <= prev_t {
            return Err(RatesError::NonPositive { t });
        }
        prev_t = t;
        pts.push((model.x(t), u.ln()));
    }
    if pts.len() < 3 {
        return Err(RatesError::Insufficient { points: pts.len() });
    }
    let (slope, intercept) = weighted_least_squares(&pts);
    let goodness = pts.iter().map(|(x, y)| ((intercept + slope * x - y).exp() - 1.0).abs()).fold(0.0, f64::max);
    Ok(RateFit { model, parameter: slope, intercept, window, fitted_window: fitted, goodness, points: pts.len(), series_id: None })
}

/// Least squares with trapezoid weights in x (continuous-L² approximation).
fn weighted_least_squares(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len();
    let w: Vec<f64> = (0..n)
        .map(|i| {
            let lo = if i == 0 { pts[0].0 } else { pts[i - 1].0 };
            let hi = if i + 1 == n { pts[n - 1].0 } else { pts[i + 1].0 };
            0.5 * (hi - lo)
        })
        .collect();
    let sw: f64 = w.iter().sum();
    if !(sw > 0.0) {
        return (0.0, pts[0].1);
    }
    let mx = pts.iter().zip(&w).map(|(p, w)| w * p.0).sum::<f64>() / sw;
    let my = pts.iter().zip(&w).map(|(p, w)| w * p.1).sum::<f64>() / sw;
    let sxy: f64 = pts.iter().zip(&w).map(|(p, w)| w * (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().zip(&w).map(|(p, w)| w * (p.0 - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// The iterated bounds `g_k(t) = c_k t^{δ_k} (log t)^{σ_k}` of §5.1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DuhamelSequence {
    pub p: f64,
    /// The constant `cL²` of the one-step estimate.
    pub c_l2: f64,
    pub delta: Vec<f64>,
    pub sigma: Vec<f64>,
    pub c: Vec<f64>,
    /// `(δ∞, σ∞, c∞) = (0, 1/(1−p), (cL²)^{1/(1−p)})`.
    pub limits: (f64, f64, f64),
}

/// Iterates `δ_{k+1} = pδ_k`, `σ_{k+1} = pσ_k + 1`, `c_{k+1} = cL² c_k^p`
/// from `δ₁ = 1/(1−p)`, `σ₁ = 0`, `c₁ = 1` with `cL² = 1`.
pub fn duhamel_sequence(p: f64, k_max: usize) -> Result<DuhamelSequence, RatesError> {
    duhamel_sequence_with(p, k_max, 1.0, 1.0)
}

/// As [`duhamel_sequence`] with explicit `c₁` and `cL²`.
pub fn duhamel_sequence_with(p: f64, k_max: usize, c1: f64, c_l2: f64) -> Result<DuhamelSequence, RatesError> {
    if !(0.0..1.0).contains(&p) {
        return Err(RatesError::InvalidExponent(p));
    }
    let k_max = k_max.max(1);
    let (mut delta, mut sigma, mut c) = (vec![1.0 / (1.0 - p)], vec![0.0], vec![c1]);
    for k in 1..k_max {
        delta.push(p * delta[k - 1]);
        sigma.push(p * sigma[k - 1] + 1.0);
        c.push(c_l2 * c[k - 1].powf(p));
    }
    let limits = (0.0, 1.0 / (1.0 - p), c_l2.powf(1.0 / (1.0 - p)));
    Ok(DuhamelSequence { p, c_l2, delta, sigma, c, limits })
}

/// Number of quadrature intervals (per unit of `y = log z`) for
/// [`duhamel_convolve`].
const CONVOLVE_DENSITY: f64 = 200.0;

/// One step of the Duhamel estimate, `g_next(t) = c∫₁^t g^p(s)(1 − e^{−L²/(t−s)}) ds`,
/// evaluated at every `t` of `t_grid` (values with t ≤ 1 give 0).
///
/// The endpoint singularity in the kernel's derivative at s = t is removed
/// by `z = L²/(t−s)`, `y = log z`: the integrand becomes
/// `L² g^p(t − L²e^{−y}) (1 − e^{−e^y}) e^{−y}`, smooth and exponentially
/// decaying in y, integrated by composite Simpson.
pub fn duhamel_convolve<G: Fn(f64) -> f64>(g: G, p: f64, l: f64, c: f64, t_grid: &[f64]) -> Vec<f64> {
    let l2 = l * l;
    t_grid
        .iter()
        .map(|&t| {
            if t <= 1.0 {
                return 0.0;
            }
            let y0 = (l2 / (t - 1.0)).ln();
            let y1 = l2.ln() + 40.0;
            if y1 <= y0 {
                return 0.0;
            }
            let n = (((y1 - y0) * CONVOLVE_DENSITY).ceil() as usize).max(2) & !1usize;
            let n = n.max(2);
            let h = (y1 - y0) / n as f64;
            let f = |y: f64| {
                let s = (t - l2 * (-y).exp()).max(1.0);
                let gs = g(s);
                if gs <= 0.0 {
                    return 0.0;
                }
                l2 * gs.powf(p) * (-(-y.exp()).exp_m1()) * (-y).exp()
            };
            let mut sum = f(y0) + f(y1);
            for i in 1..n {
                sum += f(y0 + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
            }
            c * sum * h / 3.0
        })
        .collect()
}

/// Logarithmic time grid with `per_decade` points per decade on `[a, b]`.
pub fn log_grid(a: f64, b: f64, per_decade: usize) -> Vec<f64> {
    let n = (((b / a).log10() * per_decade as f64).ceil() as usize).max(1);
    (0..=n).map(|i| a * (b / a).powf(i as f64 / n as f64)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn series<F: Fn(f64) -> f64>(f: F, grid: &[f64]) -> Vec<(f64, f64)> {
        grid.iter().map(|&t| (t, f(t))).collect()
    }

    #[test]
    fn power_exact() {
        let s = series(|t| t * t, &log_grid(1.0, 1e4, 20));
        let f = fit_power(&s, (10.0, 1e4)).unwrap();
        assert!((f.parameter - 2.0).abs() < 1e-12);
        assert!(f.goodness < 1e-12);
    }

    #[test]
    fn power_with_correction() {
        let s = series(|t| t * t * (1.0 + 1.0 / t), &log_grid(1.0, 1e4, 50));
        let f = fit_power(&s, (1e2, 1e4)).unwrap();
        assert!((f.parameter / 2.0 - 1.0).abs() < 0.01, "{}", f.parameter);
    }

    #[test]
    fn exponential_exact() {
        let grid: Vec<f64> = (0..=200).map(|i| i as f64 * 0.1).collect();
        let s = series(|t| (0.7 * t).exp(), &grid);
        let f = fit_exponential(&s, (2.0, 20.0)).unwrap();
        assert!((f.parameter - 0.7).abs() < 1e-12);
        assert!(f.goodness < 1e-12);
    }

    #[test]
    fn logpower_cube() {
        let s = series(|t| t.ln().powi(3), &log_grid(1e2, 1e6, 20));
        let f = fit_logpower(&s, (1e2, 1e6)).unwrap();
        assert!((f.parameter / 3.0 - 1.0).abs() < 0.02);
        assert!(f.goodness < LOGPOWER_REJECTION);
    }

    #[test]
    fn logpower_rejects_power_series() {
        let s = series(|t| t * t, &log_grid(1e2, 1e6, 20));
        let f = fit_logpower(&s, (1e2, 1e6)).unwrap();
        assert!(f.goodness > LOGPOWER_REJECTION, "{}", f.goodness);
        let best = &fit_all(&s, (1e2, 1e6))[0];
        assert_eq!(best.model, RateModel::Power);
    }

    #[test]
    fn window_errors() {
        let s = series(|t| t, &log_grid(1.0, 1e6, 10));
        assert!(matches!(fit_power(&s, (10.0, 50.0)), Err(RatesError::WindowTooShort { .. })));
        assert!(matches!(fit_logpower(&s, (1e2, 1e4)), Err(RatesError::WindowTooShort { .. })));
        assert!(matches!(fit_exponential(&s, (1.0, 4.0)), Err(RatesError::WindowTooShort { .. })));
        assert!(matches!(fit_power(&s, (1e2, 1e7)), Err(RatesError::InvalidWindow { .. })));
        let bad = vec![(1.0, 1.0), (10.0, -1.0), (100.0, 2.0)];
        assert!(matches!(fit_power(&bad, (1.0, 100.0)), Err(RatesError::NonPositive { .. })));
    }

    #[test]
    fn fit_report_json() {
        let s = series(|t| t, &log_grid(1.0, 1e3, 10));
        let f = fit_power(&s, (1.0, 1e3)).unwrap().with_id("u(0,t)");
        let v: serde_json::Value = serde_json::to_value(&f).unwrap();
        for key in ["model", "parameter", "window", "goodness", "series_id"] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert_eq!(v["model"], "power");
        assert_eq!(serde_json::from_value::<RateFit>(v).unwrap(), f);
    }

    #[test]
    fn duhamel_half() {
        let d = duhamel_sequence(0.5, 4).unwrap();
        assert_eq!(d.delta, vec![2.0, 1.0, 0.5, 0.25]);
        assert_eq!(d.sigma, vec![0.0, 1.0, 1.5, 1.75]);
        assert_eq!(d.limits.1, 2.0);
    }

    #[test]
    fn duhamel_limits() {
        // σ∞ − σ_k = p^{k−1}/(1−p): 100 iterations reach 1e-8 for p ≤ 0.5, while
        // p = 0.9 needs ≈ 220 (see the decisions ledger)
        for (p, k_max) in [(0.25, 100), (0.5, 100), (0.9, 250)] {
            let d = duhamel_sequence_with(p, k_max, 3.0, 1.7).unwrap();
            let k = d.sigma.len() - 1;
            assert!((d.sigma[k] - 1.0 / (1.0 - p)).abs() < 1e-8, "p={p}");
            assert!(d.sigma.windows(2).all(|w| w[1] >= w[0]));
            assert!(d.delta[k].abs() < 1e-8);
            assert!((d.c[k] / d.limits.2 - 1.0).abs() < 1e-8, "p={p}");
        }
        let d = duhamel_sequence(0.0, 5).unwrap();
        assert!(d.sigma[1..].iter().all(|s| *s == 1.0));
        assert!(duhamel_sequence(1.0, 3).is_err());
    }

    #[test]
    fn convolve_lhopital_limit() {
        let l: f64 = 1.2;
        let out = duhamel_convolve(|_| 1.0, 0.5, l, 1.0, &[1e6]);
        let ratio = out[0] / (1e6f64).ln() / (l * l);
        assert!((ratio - 1.0).abs() < 0.03, "{ratio}");
        assert_eq!(duhamel_convolve(|_| 0.0, 0.5, l, 1.0, &[10.0, 1e3]), vec![0.0, 0.0]);
    }

    #[test]
    fn convolve_one_iteration_exponent_drop() {
        let p = 0.5;
        let d1 = 1.0 / (1.0 - p);
        let grid = log_grid(1e2, 1e6, 10);
        let g2 = duhamel_convolve(|s| s.powf(d1), p, 1.0, 1.0, &grid);
        let d2 = p * d1;
        // δ₂: power fit after removing the log factor
        let s: Vec<(f64, f64)> = grid.iter().zip(&g2).map(|(t, g)| (*t, g / t.ln())).collect();
        let f = fit_power(&s, (1e2, 1e6)).unwrap();
        assert!((f.parameter - d2).abs() < 0.05, "δ₂ {}", f.parameter);
        // σ₂: log-power fit after removing t^{δ₂}
        let s: Vec<(f64, f64)> = grid.iter().zip(&g2).map(|(t, g)| (*t, g / t.powf(d2))).collect();
        let f = fit_logpower(&s, (1e2, 1e6)).unwrap();
        assert!((f.parameter - 1.0).abs() < 0.1, "σ₂ {}", f.parameter);
    }

    proptest! {
        #[test]
        fn power_fit_recovers_exponent(sigma in -3.0f64..3.0, c in 0.1f64..10.0) {
            let s = series(|t| c * t.powf(sigma), &log_grid(1.0, 1e3, 15));
            let f = fit_power(&s, (1.0, 1e3)).unwrap();
            prop_assert!((f.parameter - sigma).abs() < 1e-10);
            prop_assert!((f.intercept - c.ln()).abs() < 1e-9);
        }

        #[test]
        fn sigma_sequence_monotone_bounded(p in 0.01f64..0.99) {
            let d = duhamel_sequence(p, 60).unwrap();
            for w in d.sigma.windows(2) {
                prop_assert!(w[1] >= w[0] && w[1] < d.limits.1 + 1e-12);
            }
        }
    }
}
