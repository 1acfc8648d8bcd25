//! `special {stationary|eigen|selfsim}`: build a special solution and export
//! it as CSV plus metadata sidecar.

use std::path::Path;

use serde::{Deserialize, Serialize};

use growup_core::eigen::{eigenprofile, lambda0};
use growup_core::selfsim::{build_profile, SelfSimParams};
use growup_core::stationary::{build_stationary, critical_length_or_zero};
use growup_core::ProblemParams;

use crate::error::{CliError, Result};
use crate::output::{columns, sci, write_csv_with_sidecar, Sidecar};

/// A sampled profile: column names, rows and a JSON summary.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub summary: serde_json::Value,
}

impl ProfileTable {
    /// Writes `path` and its sidecar; the sidecar config is `request`.
    pub fn write(&self, path: &Path, command: &str, request: &impl Serialize) -> Result<()> {
        let rows = self.rows.iter().map(|r| r.iter().copied().map(sci).collect());
        let sidecar = Sidecar::new(command, request)?.with_summary(&self.summary)?;
        write_csv_with_sidecar(path, &self.columns, rows, sidecar)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StationaryRequest {
    pub m: f64,
    pub gamma: f64,
    #[serde(rename = "N")]
    pub n: u32,
    #[serde(rename = "L")]
    pub l: f64,
    /// Centre value A = w(0).
    #[serde(rename = "A")]
    pub a: f64,
    pub r_max: f64,
    pub points: usize,
}

fn uniform(r_max: f64, points: usize) -> Result<Vec<f64>> {
    if !(r_max > 0.0 && r_max.is_finite()) || points < 2 {
        return Err(CliError::Usage(format!("need r_max > 0 and at least 2 points (r_max = {r_max}, points = {points})")));
    }
    Ok((0..points).map(|i| r_max * i as f64 / (points - 1) as f64).collect())
}

/// Matched stationary profile `w = u^m` of the Cauchy problem (N ≥ 3).
/// Columns `r, w, w_prime, u`.
pub fn stationary(req: &StationaryRequest) -> Result<ProfileTable> {
    let params = ProblemParams::new(req.m, req.gamma * req.m, req.n, req.l)?;
    if !(req.a > 0.0) {
        return Err(CliError::Usage(format!("A = {} must be positive", req.a)));
    }
    let prof = build_stationary(&params, req.a).map_err(|e| CliError::Compute(e.to_string()))?;
    let rows = uniform(req.r_max, req.points)?
        .into_iter()
        .map(|r| {
            let (w, dw) = prof.eval(r);
            vec![r, w, dw, w.max(0.0).powf(1.0 / req.m)]
        })
        .collect();
    let summary = serde_json::json!({
        "A": prof.a, "c1": prof.c1, "c2": prof.c2, "gamma": prof.gamma,
        "L_star": critical_length_or_zero(req.n),
        "far_field": "w = c1 + c2 r^(2-N) for r > L",
    });
    Ok(ProfileTable { columns: columns(&["r", "w", "w_prime", "u"]), rows, summary })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenRequest {
    #[serde(rename = "N")]
    pub n: u32,
    #[serde(rename = "L")]
    pub l: f64,
    pub r_max: f64,
    pub points: usize,
}

/// Exponential solution `e^{λ₀t}φ(r)`. Columns `r, phi`.
pub fn eigen(req: &EigenRequest) -> Result<ProfileTable> {
    ProblemParams::new(1.0, 1.0, req.n, req.l)?;
    uniform(req.r_max, req.points)?;
    let lam = lambda0(req.l, req.n).map_err(|e| CliError::Compute(e.to_string()))?;
    let sol = eigenprofile(lam.lambda0, req.l, req.n, req.r_max, req.points).map_err(|e| CliError::Compute(e.to_string()))?;
    let rows = sol.samples.iter().map(|&(r, phi)| vec![r, phi]).collect();
    let summary = serde_json::json!({
        "lambda0": lam.lambda0, "one_minus_lambda0": lam.one_minus, "residual": lam.residual,
        "C": sol.c, "L_star": critical_length_or_zero(req.n),
    });
    Ok(ProfileTable { columns: columns(&["r", "phi"]), rows, summary })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelfSimRequest {
    pub m: f64,
    #[serde(rename = "N")]
    pub n: u32,
    pub alpha: f64,
    /// δ = α(1−m) − 2β: 1 for type I, 0 for type II.
    pub delta: f64,
    /// Scaling μ of the normalized profile.
    pub mu: f64,
}

/// Self-similar profile f(ξ). Columns `xi, f`; the summary carries the
/// fitted near-zero and far-field exponents.
pub fn selfsim(req: &SelfSimRequest) -> Result<ProfileTable> {
    let p = SelfSimParams::with_delta(req.m, req.n, req.alpha, req.delta).map_err(|e| CliError::Config(e.to_string()))?;
    if !(req.mu > 0.0) {
        return Err(CliError::Usage(format!("mu = {} must be positive", req.mu)));
    }
    let prof = build_profile(&p, req.mu).map_err(|e| CliError::Compute(e.to_string()))?;
    let rows = prof.samples.iter().map(|&(x, f)| vec![x, f]).collect();
    let mut summary = serde_json::to_value(&prof)?;
    if let Some(obj) = summary.as_object_mut() {
        obj.remove("samples");
        obj.insert("expected_near_zero_exponent".into(), (-(req.n as f64 - 2.0).max(0.0) / req.m).into());
        obj.insert("expected_far_field_exponent".into(), (-2.0 / (1.0 - req.m)).into());
    }
    Ok(ProfileTable { columns: columns(&["xi", "f"]), rows, summary })
}
