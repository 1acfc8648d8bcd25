//! `exponents` and `regime`: the exponent table and the paper's classification.

use serde::{Deserialize, Serialize};

use growup_core::eigen::lambda0;
use growup_core::stationary::critical_length_or_zero;
use growup_core::{classify_regime, exponents, Boundedness, ExponentTable, Globality, ProblemParams, RateLaw, Regime};

use crate::error::Result;
use crate::output::sci_opt;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentsOutput {
    pub m: f64,
    #[serde(rename = "N")]
    pub n: u32,
    pub exponents: ExponentTable,
}

/// Exponents depend on (m, N) only.
pub fn exponents_for(m: f64, n: u32) -> Result<ExponentsOutput> {
    let params = ProblemParams::new(m, m, n, 1.0)?;
    Ok(ExponentsOutput { m, n, exponents: exponents(&params) })
}

pub fn render_exponents(o: &ExponentsOutput) -> String {
    let t = &o.exponents;
    let opt = |x: Option<f64>| x.map(|v| format!("{v}")).unwrap_or_else(|| "undefined".into());
    format!(
        "m = {}, N = {}\np0 = {}\npF = {}\npS = {}\nm* = {}\ngamma_S = {}\nL1 = {}\n",
        o.m,
        o.n,
        t.p0,
        t.p_f,
        opt(t.p_s),
        t.m_star,
        opt(t.gamma_s),
        t.l1
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeOutput {
    pub params: ProblemParams,
    /// Fig. 1 region label (A–D or L-dependent).
    pub region: String,
    pub description: String,
    pub regime: Regime,
    pub rate_law: String,
    /// σ of a power/log-power law or λ of an exponential law.
    pub predicted_exponent: Option<f64>,
    /// λ₀(L), present whenever L > L*.
    pub lambda0: Option<f64>,
    pub l_star: f64,
    pub exponents: ExponentTable,
}

pub fn describe_region(b: &Boundedness) -> &'static str {
    match b {
        Boundedness::AllUnbounded => "every nontrivial solution is unbounded",
        Boundedness::UnboundedExist => "unbounded solutions exist",
        Boundedness::BothExist => "bounded and unbounded solutions coexist",
        Boundedness::AllBounded => "every solution is bounded",
        Boundedness::LDependent { bounded: true } => "p = m, L <= L*: every solution is bounded",
        Boundedness::LDependent { bounded: false } => "p = m, L > L*: unbounded solutions exist",
    }
}

pub fn regime_for(params: &ProblemParams) -> Result<RegimeOutput> {
    params.validate()?;
    let l_star = critical_length_or_zero(params.n);
    let regime = classify_regime(params, l_star)?;
    let lam = if params.l > l_star { lambda0(params.l, params.n).ok().map(|l| l.lambda0) } else { None };
    let mut description = describe_region(&regime.boundedness).to_string();
    if let Globality::LDependentGlobal { global } = regime.globality {
        description.push_str(if global { "; solutions are global" } else { "; finite-time blow-up occurs" });
    }
    if regime.requires_extrainfinity {
        description.push_str("; L = L*: boundedness needs limsup |x|^((N-2)/m) u0 < infinity");
    }
    Ok(RegimeOutput {
        params: *params,
        region: regime.boundedness.label().into(),
        description,
        rate_law: regime.rate_law.describe().into(),
        predicted_exponent: regime.rate_law.exponent(params, lam),
        lambda0: lam,
        l_star,
        exponents: exponents(params),
        regime,
    })
}

pub fn render_regime(o: &RegimeOutput) -> String {
    let p = &o.params;
    let mut s = format!(
        "m = {}, p = {}, N = {}, L = {}\nregion: {} ({})\nrate law: {}\n",
        p.m, p.p, p.n, p.l, o.region, o.description, o.rate_law
    );
    if let Some(e) = o.predicted_exponent {
        let what = if matches!(o.regime.rate_law, RateLaw::ExpLambda0 | RateLaw::ExpT) { "lambda" } else { "sigma" };
        s.push_str(&format!("predicted {what} = {e}\n"));
    }
    s.push_str(&format!("L* = {}\nlambda0(L) = {}\n", o.l_star, match o.lambda0 {
        Some(_) => sci_opt(o.lambda0),
        None => "none (L <= L*)".into(),
    }));
    s
}
