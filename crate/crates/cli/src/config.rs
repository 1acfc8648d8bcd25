//! `ExperimentConfig`: the JSON description of one PDE experiment, plus the
//! command-line overrides applied on top of a config file.
//!
//! Schema (all keys except `params`, `grid`, `t_max`, `initial` optional):
//!
//! ```json
//! {
//!   "params":  {"m": 0.5, "p": 0.5, "N": 3, "L": 2.0},
//!   "grid":    {"r_max": 30.0, "cells": 600},
//!   "t_max":   1e4,
//!   "initial": {"kind": "gaussian", "amplitude": 1.0, "width": 1.0},
//!   "boundary": "dirichlet-zero",       // | "zero-flux" | "flat-bound"
//!   "scheme": "implicit",               // | "explicit"
//!   "reaction": true,                   // false: a ≡ 0 validation mode
//!   "policy": {"rel_change": 0.02, "fixed_dt": null, ...},
//!   "trace_radii": [0.0, 1.0],
//!   "snapshots_per_decade": 4,
//!   "snapshot_start": 0.01,
//!   "fit": {"window": [100.0, 10000.0]},
//!   "output_dir": "runs/pm"
//! }
//! ```
//!
//! Initial-data kinds: `constant {value}`, `gaussian {amplitude, width}`,
//! `bump {amplitude, radius}`, `stationary {a, scale}` (matched stationary
//! profile), `separated {lambda, scale}` (separated-variables subsolution),
//! `self-similar-tail {amplitude, plateau}`, `samples {r, u}`.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use growup_core::pde::{Boundary, InitialData, Policy, RadialGrid, Scheme, SimulationConfig};
use growup_core::ProblemParams;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub r_max: f64,
    pub cells: usize,
}

/// Rate fits applied to the sup norm and every point trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitSpec {
    pub window: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub params: ProblemParams,
    pub grid: GridSpec,
    pub t_max: f64,
    pub initial: InitialData,
    #[serde(default)]
    pub boundary: Boundary,
    #[serde(default)]
    pub scheme: Scheme,
    #[serde(default = "yes")]
    pub reaction: bool,
    #[serde(default)]
    pub policy: Policy,
    #[serde(default)]
    pub trace_radii: Vec<f64>,
    #[serde(default = "four")]
    pub snapshots_per_decade: u32,
    #[serde(default = "hundredth")]
    pub snapshot_start: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit: Option<FitSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

fn yes() -> bool {
    true
}
fn four() -> u32 {
    4
}
fn hundredth() -> f64 {
    0.01
}

impl Default for ExperimentConfig {
    /// m = p = 1, N = 3, L = 2 on B_20 with a unit Gaussian up to t = 10.
    fn default() -> Self {
        ExperimentConfig {
            params: ProblemParams { m: 1.0, p: 1.0, n: 3, l: 2.0 },
            grid: GridSpec { r_max: 20.0, cells: 400 },
            t_max: 10.0,
            initial: InitialData::Gaussian { amplitude: 1.0, width: 1.0 },
            boundary: Boundary::default(),
            scheme: Scheme::default(),
            reaction: true,
            policy: Policy::default(),
            trace_radii: Vec::new(),
            snapshots_per_decade: 4,
            snapshot_start: 0.01,
            fit: None,
            output_dir: None,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("invalid experiment config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// The solver configuration; validates params, grid and policy.
    pub fn to_simulation(&self) -> Result<SimulationConfig> {
        let grid = RadialGrid::new(self.params.n, self.grid.r_max, self.grid.cells)?;
        let cfg = SimulationConfig {
            params: self.params,
            grid,
            t_max: self.t_max,
            boundary: self.boundary,
            scheme: self.scheme,
            reaction: self.reaction,
            policy: self.policy.clone(),
            trace_radii: self.trace_radii.clone(),
            snapshots_per_decade: self.snapshots_per_decade,
            snapshot_start: self.snapshot_start,
        };
        cfg.validate()?;
        if let Some(fit) = &self.fit {
            let (a, b) = fit.window;
            if !(a > 0.0 && b > a) {
                return Err(CliError::Config(format!("fit window [{a}, {b}] must satisfy 0 < ta < tb")));
            }
        }
        Ok(cfg)
    }

    pub fn apply(&mut self, o: &Overrides) {
        let set = |dst: &mut f64, v: Option<f64>| {
            if let Some(v) = v {
                *dst = v;
            }
        };
        set(&mut self.params.m, o.m);
        set(&mut self.params.p, o.p);
        set(&mut self.params.l, o.l);
        if let Some(n) = o.n {
            self.params.n = n;
        }
        set(&mut self.t_max, o.t_max);
        set(&mut self.grid.r_max, o.r_max);
        if let Some(c) = o.cells {
            self.grid.cells = c;
        }
        if let Some(b) = o.boundary {
            self.boundary = b;
        }
        if let Some(s) = o.scheme {
            self.scheme = s;
        }
        if o.no_reaction {
            self.reaction = false;
        }
        if o.fixed_dt.is_some() {
            self.policy.fixed_dt = o.fixed_dt;
        }
        set(&mut self.policy.rel_change, o.rel_change);
        set(&mut self.policy.blowup_threshold, o.threshold);
        if let Some(t) = &o.trace_radii {
            self.trace_radii = t.clone();
        }
        if let Some(w) = o.fit_window {
            self.fit = Some(FitSpec { window: w });
        }
        if let Some(d) = &o.output_dir {
            self.output_dir = Some(d.clone());
        }
    }
}

/// Flag values that replace config-file values when present.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub m: Option<f64>,
    pub p: Option<f64>,
    pub n: Option<u32>,
    pub l: Option<f64>,
    pub t_max: Option<f64>,
    pub r_max: Option<f64>,
    pub cells: Option<usize>,
    pub boundary: Option<Boundary>,
    pub scheme: Option<Scheme>,
    pub no_reaction: bool,
    pub fixed_dt: Option<f64>,
    pub rel_change: Option<f64>,
    pub threshold: Option<f64>,
    pub trace_radii: Option<Vec<f64>>,
    pub fit_window: Option<(f64, f64)>,
    pub output_dir: Option<PathBuf>,
}

/// Parses a value list: `0.5,0.6,0.7`, a linear range `a:b:n`, or a
/// log-spaced range `log:a:b:n` (n points including both ends).
pub fn parse_values(spec: &str) -> Result<Vec<f64>> {
    let spec = spec.trim();
    if spec.is_empty() {
        return Ok(Vec::new());
    }
    let bad = |why: &str| CliError::Usage(format!("invalid value list '{spec}': {why}"));
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad(&format!("'{s}' is not a number")));
    let (log, range) = match spec.strip_prefix("log:") {
        Some(rest) => (true, rest),
        None => (false, spec),
    };
    if range.contains(':') {
        let parts: Vec<&str> = range.split(':').collect();
        if parts.len() != 3 {
            return Err(bad("ranges are a:b:n or log:a:b:n"));
        }
        let (a, b) = (num(parts[0])?, num(parts[1])?);
        let n: usize = parts[2].trim().parse().map_err(|_| bad("point count must be an integer"))?;
        if log && !(a > 0.0 && b > 0.0) {
            return Err(bad("log ranges need positive ends"));
        }
        let at = |i: usize| {
            if n == 1 {
                return a;
            }
            let s = i as f64 / (n - 1) as f64;
            if log { (a.ln() + s * (b.ln() - a.ln())).exp() } else { a + s * (b - a) }
        };
        return Ok((0..n).map(at).collect());
    }
    if log {
        return Err(bad("log: needs a range a:b:n"));
    }
    spec.split(',').map(num).collect()
}

/// Parses `ta,tb`.
pub fn parse_window(spec: &str) -> Result<(f64, f64)> {
    let v = parse_values(spec)?;
    match v[..] {
        [a, b] => Ok((a, b)),
        _ => Err(CliError::Usage(format!("window '{spec}' must be two numbers ta,tb"))),
    }
}
