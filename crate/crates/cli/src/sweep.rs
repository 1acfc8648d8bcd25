//! `sweep`: Cartesian sweeps over (m, p, L), run one cell per worker and
//! aggregated after the join into a single CSV (plus sidecar).
//!
//! Tables:
//! - `regime`: one PDE experiment per (m, p, L) cell; classifier label next
//!   to the empirical outcome (Fig. 1 data).
//! - `lambda0`: λ₀(L) for each L.
//! - `lambda-star`: λ*(m, L) for each (m, L).
//! - `dirichlet-radius`: R(L), the Dirichlet critical radius, for each L.
//! - `k-star`: k*(m, p) for each (m, p, L).

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use growup_core::eigen::{lambda0, lambda_star};
use growup_core::pde::Outcome;
use growup_core::stationary::{dirichlet_r_of_l, k_star};
use growup_core::ProblemParams;

use crate::config::ExperimentConfig;
use crate::error::{CliError, Result};
use crate::experiment::{run_experiment, write_experiment};
use crate::output::{columns, sci, write_csv_with_sidecar, Sidecar};

/// Environment variable holding the number of sweep workers (default 1).
pub const WORKERS_ENV: &str = "GROWUP_WORKERS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum SweepTable {
    #[default]
    Regime,
    Lambda0,
    LambdaStar,
    DirichletRadius,
    KStar,
}

impl SweepTable {
    pub fn name(self) -> &'static str {
        match self {
            SweepTable::Regime => "regime",
            SweepTable::Lambda0 => "lambda0",
            SweepTable::LambdaStar => "lambda-star",
            SweepTable::DirichletRadius => "dirichlet-radius",
            SweepTable::KStar => "k-star",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    #[serde(default)]
    pub table: SweepTable,
    #[serde(rename = "N")]
    pub n: u32,
    #[serde(default)]
    pub m: Vec<f64>,
    #[serde(default)]
    pub p: Vec<f64>,
    #[serde(default, rename = "L")]
    pub l: Vec<f64>,
    /// Template experiment of the `regime` table; its (m, p, N, L) are
    /// replaced cell by cell.
    #[serde(default)]
    pub base: ExperimentConfig,
    /// `regime` table: write every cell's experiment directory under `cells/`.
    #[serde(default = "yes")]
    pub write_cells: bool,
}

fn yes() -> bool {
    true
}

impl SweepConfig {
    pub fn new(table: SweepTable, n: u32) -> Self {
        SweepConfig { table, n, m: Vec::new(), p: Vec::new(), l: Vec::new(), base: ExperimentConfig::default(), write_cells: true }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("invalid sweep config: {e}")))
    }

    /// The cells in row order (m outermost, L innermost).
    pub fn cells(&self) -> Vec<(f64, f64, f64)> {
        let (ms, ps, ls): (&[f64], &[f64], &[f64]) = match self.table {
            SweepTable::Regime | SweepTable::KStar => (&self.m, &self.p, &self.l),
            SweepTable::Lambda0 | SweepTable::DirichletRadius => (&[f64::NAN], &[f64::NAN], &self.l),
            SweepTable::LambdaStar => (&self.m, &[f64::NAN], &self.l),
        };
        let mut cells = Vec::with_capacity(ms.len() * ps.len() * ls.len());
        for &m in ms {
            for &p in ps {
                for &l in ls {
                    cells.push((m, p, l));
                }
            }
        }
        cells
    }

    pub fn columns(&self) -> Vec<String> {
        let names: &[&str] = match self.table {
            SweepTable::Regime => &[
                "cell", "m", "p", "N", "L", "region", "rate_law", "expected", "outcome", "termination", "t_end", "sup_final",
                "t_blowup", "agrees", "boundary_cell", "error",
            ],
            SweepTable::Lambda0 => &["N", "L", "lambda0", "one_minus_lambda0", "residual", "error"],
            SweepTable::LambdaStar => &["m", "N", "L", "lambda_star", "bracket_lo", "bracket_hi", "nonmonotone", "error"],
            SweepTable::DirichletRadius => &["N", "L", "R", "error"],
            SweepTable::KStar => &["m", "p", "N", "L", "k_star", "A_max", "A_star", "error"],
        };
        columns(names)
    }
}

/// Worker count from `GROWUP_WORKERS`; unset means 1 (serial).
pub fn workers_from_env() -> Result<usize> {
    match std::env::var(WORKERS_ENV) {
        Err(_) => Ok(1),
        Ok(s) => s
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n >= 1)
            .ok_or_else(|| CliError::Usage(format!("{WORKERS_ENV} = '{s}' must be a positive integer"))),
    }
}

/// Maps `f` over `items` on `workers` threads; results keep input order.
pub fn map_cells<T, R, F>(items: Vec<T>, workers: usize, f: F) -> Result<Vec<R>>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync + Send,
{
    if workers <= 1 {
        return Ok(items.into_iter().map(f).collect());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Compute(format!("cannot start {workers} workers: {e}")))?;
    Ok(pool.install(|| items.into_par_iter().map(f).collect()))
}

/// Aggregated sweep output.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub summary: serde_json::Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeSummary {
    pub cells: usize,
    pub errors: usize,
    /// Cells with a data-independent prediction and a conclusive outcome.
    pub compared: usize,
    pub agreements: usize,
    pub agreement_fraction: Option<f64>,
    /// Compared cells all of whose grid neighbours share their region.
    pub interior_compared: usize,
    pub interior_agreements: usize,
    pub interior_agreement_fraction: Option<f64>,
}

fn err_text(e: impl std::fmt::Display) -> String {
    e.to_string()
}

struct RegimeCell {
    row: Vec<String>,
    /// Region label, empty when undefined (p > p0) or on error.
    region: String,
    compared: bool,
    agrees: bool,
    error: bool,
}

fn regime_cell(cfg: &SweepConfig, idx: usize, (m, p, l): (f64, f64, f64), cells_dir: Option<&Path>) -> RegimeCell {
    let mut row = vec![idx.to_string(), sci(m), sci(p), cfg.n.to_string(), sci(l)];
    let mut exp = cfg.base.clone();
    exp.params = ProblemParams { m, p, n: cfg.n, l };
    exp.output_dir = None;
    let result = run_experiment(&exp).and_then(|(run, report)| {
        if let Some(dir) = cells_dir {
            write_experiment(&dir.join(format!("cell_{idx:05}")), &exp, &run, &report)?;
        }
        Ok(report)
    });
    match result {
        Ok(rep) => {
            let agrees = rep.expected.and_then(|e| e.agrees(&rep.outcome));
            let t_blowup = match rep.outcome {
                Outcome::BlowUp { t_est } => sci(t_est),
                _ => String::new(),
            };
            row.extend([
                rep.regime.map(|r| r.boundedness.label().to_string()).unwrap_or_default(),
                rep.regime.map(|r| r.rate_law.describe().to_string()).unwrap_or_default(),
                rep.expected.map(|e| e.label().to_string()).unwrap_or_default(),
                rep.outcome.label().to_string(),
                serde_json::to_value(rep.termination).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
                sci(rep.t_end),
                sci(rep.sup_final),
                t_blowup,
                agrees.map(|a| a.to_string()).unwrap_or_default(),
                rep.regime_error.unwrap_or_default(),
            ]);
            let region = rep.regime.map(|r| r.boundedness.label().to_string()).unwrap_or_default();
            RegimeCell { row, region, compared: agrees.is_some(), agrees: agrees == Some(true), error: false }
        }
        Err(e) => {
            row.extend(std::iter::repeat_n(String::new(), 9));
            row.push(err_text(e));
            RegimeCell { row, region: String::new(), compared: false, agrees: false, error: true }
        }
    }
}

/// Cells with a grid neighbour (one step in m, p or L) of another region.
/// `regions` is in row order (m outermost, L innermost) with `dims = [nm, np, nl]`.
pub fn boundary_cells(regions: &[&str], dims: [usize; 3]) -> Vec<bool> {
    let [nm, np, nl] = dims;
    let idx = |i: usize, j: usize, k: usize| (i * np + j) * nl + k;
    let mut out = vec![false; regions.len()];
    for i in 0..nm {
        for j in 0..np {
            for k in 0..nl {
                let here = regions[idx(i, j, k)];
                let neighbours = [
                    (i.checked_sub(1), Some(j), Some(k)),
                    ((i + 1 < nm).then_some(i + 1), Some(j), Some(k)),
                    (Some(i), j.checked_sub(1), Some(k)),
                    (Some(i), (j + 1 < np).then_some(j + 1), Some(k)),
                    (Some(i), Some(j), k.checked_sub(1)),
                    (Some(i), Some(j), (k + 1 < nl).then_some(k + 1)),
                ];
                out[idx(i, j, k)] = neighbours.iter().any(|n| match n {
                    (Some(a), Some(b), Some(c)) => regions[idx(*a, *b, *c)] != here,
                    _ => false,
                });
            }
        }
    }
    out
}

fn table_row(cfg: &SweepConfig, (m, p, l): (f64, f64, f64)) -> (Vec<String>, Option<f64>) {
    let n = cfg.n;
    let pad = |mut row: Vec<String>, blanks: usize, e: String| {
        row.extend(std::iter::repeat_n(String::new(), blanks));
        row.push(e);
        row
    };
    match cfg.table {
        SweepTable::Lambda0 => {
            let head = vec![n.to_string(), sci(l)];
            match lambda0(l, n) {
                Ok(v) => ([head, vec![sci(v.lambda0), sci(v.one_minus), sci(v.residual), String::new()]].concat(), Some(v.lambda0)),
                Err(e) => (pad(head, 3, err_text(e)), None),
            }
        }
        SweepTable::LambdaStar => {
            let head = vec![sci(m), n.to_string(), sci(l)];
            match lambda_star(m, l, n) {
                Ok(v) => {
                    let tail = vec![sci(v.lambda_star), sci(v.bracket.0), sci(v.bracket.1), v.nonmonotone.to_string(), String::new()];
                    ([head, tail].concat(), Some(v.lambda_star))
                }
                Err(e) => (pad(head, 4, err_text(e)), None),
            }
        }
        SweepTable::DirichletRadius => {
            let head = vec![n.to_string(), sci(l)];
            match dirichlet_r_of_l(n, l) {
                Ok(r) => ([head, vec![sci(r), String::new()]].concat(), Some(r)),
                Err(e) => (pad(head, 1, err_text(e)), None),
            }
        }
        SweepTable::KStar => {
            let head = vec![sci(m), sci(p), n.to_string(), sci(l)];
            let res = ProblemParams::new(m, p, n, l).map_err(err_text).and_then(|pp| k_star(&pp).map_err(err_text));
            match res {
                Ok(k) => {
                    let a_star = k.a_star.map(sci).unwrap_or_else(|| "inf".into());
                    ([head, vec![sci(k.k_star), sci(k.a_max), a_star, String::new()]].concat(), Some(k.k_star))
                }
                Err(e) => (pad(head, 3, e), None),
            }
        }
        SweepTable::Regime => unreachable!("regime cells run experiments"),
    }
}

/// Runs the sweep; `out` receives per-cell directories (regime table with
/// `write_cells`). Cells fail independently: errors land in the `error`
/// column and the sweep continues.
pub fn run_sweep(cfg: &SweepConfig, out: Option<&Path>, workers: usize) -> Result<SweepResult> {
    if cfg.n == 0 {
        return Err(CliError::Usage("N must be >= 1".into()));
    }
    let cells = cfg.cells();
    let columns = cfg.columns();
    if cfg.table == SweepTable::Regime {
        cfg.base.to_simulation()?;
        let cells_dir: Option<PathBuf> = out.filter(|_| cfg.write_cells).map(|o| o.join("cells"));
        let jobs: Vec<(usize, (f64, f64, f64))> = cells.into_iter().enumerate().collect();
        let mut results = map_cells(jobs, workers, |(i, c)| regime_cell(cfg, i, c, cells_dir.as_deref()))?;
        let boundary = boundary_cells(&results.iter().map(|c| c.region.as_str()).collect::<Vec<_>>(), [cfg.m.len(), cfg.p.len(), cfg.l.len()]);
        for (cell, b) in results.iter_mut().zip(&boundary) {
            let at = cell.row.len() - 1;
            cell.row.insert(at, b.to_string());
        }
        let compared = results.iter().filter(|c| c.compared).count();
        let agreements = results.iter().filter(|c| c.agrees).count();
        let interior: Vec<&RegimeCell> = results.iter().zip(&boundary).filter(|(c, b)| c.compared && !**b).map(|(c, _)| c).collect();
        let interior_agreements = interior.iter().filter(|c| c.agrees).count();
        let summary = RegimeSummary {
            interior_compared: interior.len(),
            interior_agreements,
            interior_agreement_fraction: (!interior.is_empty()).then(|| interior_agreements as f64 / interior.len() as f64),
            cells: results.len(),
            errors: results.iter().filter(|c| c.error).count(),
            compared,
            agreements,
            agreement_fraction: (compared > 0).then(|| agreements as f64 / compared as f64),
        };
        let rows = results.into_iter().map(|c| c.row).collect();
        return Ok(SweepResult { columns, rows, summary: serde_json::to_value(summary)? });
    }
    let results = map_cells(cells, workers, |c| table_row(cfg, c))?;
    let values: Vec<Option<f64>> = results.iter().map(|r| r.1).collect();
    let ok: Vec<f64> = values.iter().flatten().copied().collect();
    let errors = values.len() - ok.len();
    let mut summary = serde_json::json!({ "cells": values.len(), "errors": errors });
    if matches!(cfg.table, SweepTable::Lambda0 | SweepTable::DirichletRadius) {
        // both are functions of L alone: report monotonicity along increasing L
        let mut pairs: Vec<(f64, f64)> = cfg.l.iter().copied().zip(values.iter().copied()).filter_map(|(l, v)| v.map(|v| (l, v))).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        summary["monotone_increasing"] = pairs.windows(2).all(|w| w[1].1 >= w[0].1).into();
        summary["monotone_decreasing"] = pairs.windows(2).all(|w| w[1].1 <= w[0].1).into();
    }
    let rows = results.into_iter().map(|r| r.0).collect();
    Ok(SweepResult { columns, rows, summary })
}

/// Runs the sweep and writes `<out>/<table>.csv` with its sidecar.
pub fn sweep_to(out: &Path, cfg: &SweepConfig, workers: usize) -> Result<SweepResult> {
    let result = run_sweep(cfg, Some(out), workers)?;
    let path = out.join(format!("{}.csv", cfg.table.name()));
    let mut sidecar = Sidecar::new("sweep", cfg)?.with_summary(&result.summary)?;
    sidecar.summary["workers"] = workers.into();
    write_csv_with_sidecar(&path, &result.columns, result.rows.clone(), sidecar)?;
    Ok(result)
}
