//! Problem parameters, derived critical exponents and the regime classifier
//! of Theorems 1.1–1.4 / Fig. 1.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::specfun::{first_zero_j, BesselOrder};

/// Relative tolerance used to decide that two exponents lie on a border line
/// (p = m, p = 1, p = p0).
pub const BORDER_TOL: f64 = 1e-12;

/// Band around L* inside which the extra decay condition (extrainfinity) on
/// the initial datum is required for boundedness.
pub const L_STAR_BAND: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ParamsError {
    #[error("invalid parameter {name} = {value}: {reason}")]
    Invalid { name: &'static str, value: f64, reason: &'static str },
    #[error("p = {p} exceeds p0 = {p0}; the classification is only defined for p <= p0")]
    AboveP0 { p: f64, p0: f64 },
}

/// The tuple (m, p, N, L) of `u_t = Δu^m + 1_{B_L} u^p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemParams {
    pub m: f64,
    pub p: f64,
    #[serde(rename = "N")]
    pub n: u32,
    #[serde(rename = "L")]
    pub l: f64,
}

impl ProblemParams {
    pub fn new(m: f64, p: f64, n: u32, l: f64) -> Result<Self, ParamsError> {
        let params = ProblemParams { m, p, n, l };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<(), ParamsError> {
        let positive = |name, value: f64| {
            if value.is_finite() && value > 0.0 {
                Ok(())
            } else {
                Err(ParamsError::Invalid { name, value, reason: "must be finite and > 0" })
            }
        };
        positive("m", self.m)?;
        positive("p", self.p)?;
        positive("L", self.l)?;
        if self.n == 0 {
            return Err(ParamsError::Invalid { name: "N", value: 0.0, reason: "must be >= 1" });
        }
        Ok(())
    }

    /// γ = p/m.
    pub fn gamma(&self) -> f64 {
        self.p / self.m
    }

    /// ν = (N−2)/2, the Bessel order of the radial Laplacian.
    pub fn nu(&self) -> f64 {
        (self.n as f64 - 2.0) / 2.0
    }

    pub fn dim(&self) -> f64 {
        self.n as f64
    }
}

/// Exponents derived from (m, N); quantities that do not exist in a given
/// dimension are `None`, never zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentTable {
    pub p0: f64,
    #[serde(rename = "pF")]
    pub p_f: f64,
    #[serde(rename = "pS")]
    pub p_s: Option<f64>,
    pub m_star: f64,
    #[serde(rename = "gamma_S")]
    pub gamma_s: Option<f64>,
    /// Radius whose first radial Dirichlet eigenvalue equals 1.
    #[serde(rename = "L1")]
    pub l1: f64,
}

/// Sobolev ratio γ_S = (N+2)/(N−2), defined for N ≥ 3.
pub fn gamma_sobolev(n: u32) -> Option<f64> {
    (n >= 3).then(|| (n as f64 + 2.0) / (n as f64 - 2.0))
}

/// Radius of the ball in R^N whose first Dirichlet eigenvalue is 1:
/// π/2 for N = 1 (half-length of the interval), η_{ν,1} otherwise.
pub fn unit_eigen_radius(n: u32) -> f64 {
    if n == 1 {
        std::f64::consts::FRAC_PI_2
    } else {
        let order = BesselOrder::from_dimension(n).expect("dimension supported by specfun");
        first_zero_j(order)
    }
}

pub fn exponents(params: &ProblemParams) -> ExponentTable {
    let m = params.m;
    let n = params.n;
    let (p0, p_f) = if n == 1 { (1f64.max((m + 1.0) / 2.0), m + 1.0) } else { (1f64.max(m), 1f64.max(m)) };
    let gamma_s = gamma_sobolev(n);
    ExponentTable {
        p0,
        p_f,
        p_s: gamma_s.map(|g| m * g),
        m_star: (n as f64 - 2.0).max(0.0) / n as f64,
        gamma_s,
        l1: unit_eigen_radius(n),
    }
}

/// Whether solutions are global in time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Globality {
    AllGlobal,
    /// p = p0 = m > 1: global iff L ≤ L* (never, for N = 2 where L* = 0).
    LDependentGlobal { global: bool },
}

/// Region labels of Fig. 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Boundedness {
    /// A: all global solutions are unbounded.
    AllUnbounded,
    /// B: unbounded solutions exist (A or C unresolved, N = 2, m < p ≤ 1).
    UnboundedExist,
    /// C: bounded and unbounded solutions coexist.
    BothExist,
    /// D: all solutions are bounded.
    AllBounded,
    /// The line p = m for N ≥ 3, resolved by comparing L with L*.
    LDependent { bounded: bool },
}

impl Boundedness {
    pub fn label(&self) -> &'static str {
        match self {
            Boundedness::AllUnbounded => "A",
            Boundedness::UnboundedExist => "B",
            Boundedness::BothExist => "C",
            Boundedness::AllBounded => "D",
            Boundedness::LDependent { bounded: true } => "L-dependent:bounded",
            Boundedness::LDependent { bounded: false } => "L-dependent:unbounded",
        }
    }
}

/// Expected grow-up rate of unbounded global solutions (§5).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RateLaw {
    /// t^{1/(1−p)}, inside the ball.
    PowerP,
    /// t^{1/(1−m)}, on compact sets.
    PowerM,
    /// (log t)^{1/(1−p)}.
    LogPower,
    /// e^{λ₀(L) t}.
    ExpLambda0,
    /// e^{t}, inside the ball.
    ExpT,
    /// Bounded solutions or finite-time blow-up: no grow-up rate.
    None,
    /// Unbounded solutions exist but the paper does not establish a rate
    /// (N = 1, N = 2 with p < m ≠ 1, p ≥ p_S, superfast diffusion).
    Undetermined,
}

impl RateLaw {
    pub fn describe(&self) -> &'static str {
        match self {
            RateLaw::PowerP => "t^(1/(1-p))",
            RateLaw::PowerM => "t^(1/(1-m))",
            RateLaw::LogPower => "(log t)^(1/(1-p))",
            RateLaw::ExpLambda0 => "exp(lambda0 t)",
            RateLaw::ExpT => "exp(t)",
            RateLaw::None => "none",
            RateLaw::Undetermined => "undetermined",
        }
    }

    /// Predicted exponent of the law (σ for power/log-power, λ for exponential).
    pub fn exponent(&self, params: &ProblemParams, lambda0: Option<f64>) -> Option<f64> {
        match self {
            RateLaw::PowerP | RateLaw::LogPower => Some(1.0 / (1.0 - params.p)),
            RateLaw::PowerM => Some(1.0 / (1.0 - params.m)),
            RateLaw::ExpLambda0 => lambda0,
            RateLaw::ExpT => Some(1.0),
            RateLaw::None | RateLaw::Undetermined => None,
        }
    }
}

impl fmt::Display for RateLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.describe())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Regime {
    pub globality: Globality,
    pub boundedness: Boundedness,
    pub rate_law: RateLaw,
    /// L = L* (within `L_STAR_BAND`) on the line p = m, N ≥ 3: boundedness
    /// additionally requires limsup |x|^{(N−2)/m} u0(x) < ∞.
    pub requires_extrainfinity: bool,
    /// The value of L* used for the decision (0 for N ≤ 2).
    pub l_star: f64,
}

fn same(a: f64, b: f64) -> bool {
    (a - b).abs() <= BORDER_TOL * a.abs().max(b.abs()).max(1.0)
}

/// Classifies (m, p, N, L) for p ≤ p0 following Theorems 1.2–1.4 and Fig. 1.
///
/// Border lines belong to the region below them, except p = m for N ≥ 3,
/// which is decided by L versus `l_star` (L ≤ L* bounded).
pub fn classify_regime(params: &ProblemParams, l_star: f64) -> Result<Regime, ParamsError> {
    params.validate()?;
    let table = exponents(params);
    let (m, p, n, l) = (params.m, params.p, params.n, params.l);
    if p > table.p0 && !same(p, table.p0) {
        return Err(ParamsError::AboveP0 { p, p0: table.p0 });
    }
    let l_star = if n <= 2 { 0.0 } else { l_star };
    let p_eq_m = same(p, m);
    let p_eq_1 = same(p, 1.0);
    let m_eq_1 = same(m, 1.0);

    let globality = if n >= 2 && m > 1.0 && !same(m, 1.0) && same(p, table.p0) {
        Globality::LDependentGlobal { global: n >= 3 && l <= l_star }
    } else {
        Globality::AllGlobal
    };
    let blows_up = matches!(globality, Globality::LDependentGlobal { global: false });

    let mut requires_extrainfinity = false;
    let (boundedness, rate_law) = match n {
        1 => (Boundedness::AllUnbounded, RateLaw::Undetermined),
        2 => {
            if p_eq_m || p < m {
                let rate = if blows_up {
                    RateLaw::None
                } else if p_eq_m {
                    if m_eq_1 { RateLaw::ExpLambda0 } else { RateLaw::PowerM }
                } else if m_eq_1 {
                    RateLaw::LogPower
                } else {
                    RateLaw::Undetermined
                };
                (Boundedness::AllUnbounded, rate)
            } else {
                let rate = if p_eq_1 { RateLaw::ExpT } else { RateLaw::PowerP };
                (Boundedness::UnboundedExist, rate)
            }
        }
        _ => {
            if p_eq_m {
                let bounded = l <= l_star;
                requires_extrainfinity = (l - l_star).abs() <= L_STAR_BAND * l_star.max(1.0);
                let rate = if bounded || blows_up {
                    RateLaw::None
                } else if m_eq_1 {
                    RateLaw::ExpLambda0
                } else {
                    RateLaw::PowerM
                };
                (Boundedness::LDependent { bounded }, rate)
            } else if p < m {
                (Boundedness::AllBounded, RateLaw::None)
            } else {
                let p_s = table.p_s.expect("p_S defined for N >= 3");
                let rate = if p_eq_1 {
                    if m > (n as f64 - 2.0) / (n as f64 + 2.0) { RateLaw::ExpT } else { RateLaw::Undetermined }
                } else if p < p_s {
                    RateLaw::PowerP
                } else {
                    RateLaw::Undetermined
                };
                (Boundedness::BothExist, rate)
            }
        }
    };
    Ok(Regime { globality, boundedness, rate_law, requires_extrainfinity, l_star })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn exponent_examples() {
        let t = exponents(&ProblemParams::new(2.0, 1.0, 3, 1.0).unwrap());
        assert_eq!((t.p0, t.p_f), (2.0, 2.0));
        assert!((t.p_s.unwrap() - 10.0).abs() < 1e-14);
        assert!((t.gamma_s.unwrap() - 5.0).abs() < 1e-14);

        let t = exponents(&ProblemParams::new(1.0, 1.0, 2, 1.0).unwrap());
        assert_eq!((t.p0, t.p_f, t.m_star), (1.0, 1.0, 0.0));
        assert!(t.p_s.is_none() && t.gamma_s.is_none());
        assert!((t.l1 - 2.404825557695773).abs() < 1e-10);

        let t = exponents(&ProblemParams::new(0.5, 0.5, 1, 1.0).unwrap());
        assert_eq!((t.p0, t.p_f), (1.0, 1.5));
    }

    #[test]
    fn rejects_invalid_params_and_p_above_p0() {
        assert!(ProblemParams::new(0.0, 1.0, 3, 1.0).is_err());
        assert!(ProblemParams::new(1.0, 1.0, 0, 1.0).is_err());
        assert!(ProblemParams::new(1.0, f64::NAN, 3, 1.0).is_err());
        let p = ProblemParams::new(1.0, 1.5, 3, 1.0).unwrap();
        assert!(matches!(classify_regime(&p, 1.0), Err(ParamsError::AboveP0 { .. })));
    }

    #[test]
    fn classification_examples() {
        let l_star = std::f64::consts::FRAC_PI_2;
        let r = classify_regime(&ProblemParams::new(1.0, 1.0, 3, 2.0).unwrap(), l_star).unwrap();
        assert_eq!(r.boundedness, Boundedness::LDependent { bounded: false });
        assert_eq!(r.rate_law, RateLaw::ExpLambda0);

        let r = classify_regime(&ProblemParams::new(1.0, 0.5, 2, 1.0).unwrap(), 0.0).unwrap();
        assert_eq!(r.boundedness, Boundedness::AllUnbounded);
        assert_eq!(r.rate_law, RateLaw::LogPower);

        let r = classify_regime(&ProblemParams::new(0.5, 0.3, 3, 1.0).unwrap(), l_star).unwrap();
        assert_eq!(r.boundedness, Boundedness::AllBounded);
        assert_eq!(r.rate_law, RateLaw::None);

        // unresolved N = 2, m < p <= 1 region, including p = p0 = 1
        for p in [0.7, 1.0] {
            let r = classify_regime(&ProblemParams::new(0.5, p, 2, 1.0).unwrap(), 0.0).unwrap();
            assert_eq!(r.boundedness, Boundedness::UnboundedExist);
        }

        // p = m > 1: blow-up for N = 2, L-dependent for N >= 3
        let r = classify_regime(&ProblemParams::new(2.0, 2.0, 2, 1.0).unwrap(), 0.0).unwrap();
        assert_eq!(r.globality, Globality::LDependentGlobal { global: false });
        let r = classify_regime(&ProblemParams::new(2.0, 2.0, 3, 1.0).unwrap(), l_star).unwrap();
        assert_eq!(r.globality, Globality::LDependentGlobal { global: true });
        assert_eq!(r.boundedness, Boundedness::LDependent { bounded: true });
    }

    #[test]
    fn p_equals_m_flips_exactly_at_l_star() {
        let l_star = std::f64::consts::FRAC_PI_2;
        for m in [0.5, 1.0, 2.0] {
            let below = classify_regime(&ProblemParams::new(m, m, 3, l_star - 1e-3).unwrap(), l_star).unwrap();
            let above = classify_regime(&ProblemParams::new(m, m, 3, l_star + 1e-3).unwrap(), l_star).unwrap();
            assert_eq!(below.boundedness, Boundedness::LDependent { bounded: true });
            assert_eq!(above.boundedness, Boundedness::LDependent { bounded: false });
            assert!(!below.requires_extrainfinity && !above.requires_extrainfinity);
        }
        let at = classify_regime(&ProblemParams::new(1.0, 1.0, 3, l_star).unwrap(), l_star).unwrap();
        assert!(at.requires_extrainfinity);
        assert_eq!(at.boundedness, Boundedness::LDependent { bounded: true });
    }

    #[test]
    fn grid_partition_is_total() {
        for n in [1u32, 2, 3] {
            let mut labels = std::collections::BTreeSet::new();
            for i in 1..=100 {
                for j in 1..=100 {
                    let m = 2.0 * i as f64 / 100.0;
                    let p = 2.0 * j as f64 / 100.0;
                    let params = ProblemParams::new(m, p, n, 2.0).unwrap();
                    if p > exponents(&params).p0 {
                        continue;
                    }
                    let r = classify_regime(&params, std::f64::consts::FRAC_PI_2).unwrap();
                    labels.insert(r.boundedness.label());
                }
            }
            match n {
                1 => assert_eq!(labels.into_iter().collect::<Vec<_>>(), vec!["A"]),
                2 => assert_eq!(labels.into_iter().collect::<Vec<_>>(), vec!["A", "B"]),
                _ => assert_eq!(labels.into_iter().collect::<Vec<_>>(), vec!["C", "D", "L-dependent:unbounded"]),
            }
        }
    }

    proptest! {
        #[test]
        fn exponents_are_scale_free(m in 0.05f64..4.0, p in 0.05f64..4.0, n in 1u32..7, l1 in 0.1f64..10.0, l2 in 0.1f64..10.0) {
            let a = exponents(&ProblemParams::new(m, p, n, l1).unwrap());
            let b = exponents(&ProblemParams::new(m, p * 0.5, n, l2).unwrap());
            prop_assert_eq!(a, b);
            prop_assert!(a.p0 <= a.p_f);
            if let Some(ps) = a.p_s {
                if m > (n as f64 - 2.0) / (n as f64 + 2.0) {
                    prop_assert!(ps > 1f64.max(m));
                }
            }
        }
    }
}
