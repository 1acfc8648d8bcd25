//! `simulate`: one PDE experiment from an [`ExperimentConfig`], written to
//! its own directory as `series.csv`, `snapshots.csv`, `meta.json` (sidecar
//! with the full config) and `report.json` (outcome, checks, rate fits).

use std::path::Path;

use serde::{Deserialize, Serialize};

use growup_core::pde::{flat_bound, simulate_from, Boundary, InitialData, Outcome, SimulationRun, Termination};
use growup_core::rates::{fit_all, RateFit};
use growup_core::stationary::critical_length_or_zero;
use growup_core::verify::{flat_bound_check, Check};
use growup_core::{classify_regime, Boundedness, Globality, Regime};

use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::output::{columns, ensure_dir, sci, sci_opt, write_csv, write_json, Sidecar};

pub const SERIES_FILE: &str = "series.csv";
pub const SNAPSHOTS_FILE: &str = "snapshots.csv";
pub const META_FILE: &str = "meta.json";
pub const REPORT_FILE: &str = "report.json";

/// Relative tolerance of the heat-kernel oracle (a ≡ 0, m = 1, Gaussian data).
pub const HEAT_KERNEL_TOL: f64 = 0.02;
/// Relative mass drift allowed with zero flux and no reaction.
pub const MASS_TOL: f64 = 1e-6;

/// What the classifier predicts for the empirical outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Expected {
    Bounded,
    /// Grow-up or blow-up.
    Unbounded,
    BlowUp,
}

impl Expected {
    pub fn label(self) -> &'static str {
        match self {
            Expected::Bounded => "bounded",
            Expected::Unbounded => "unbounded",
            Expected::BlowUp => "blow-up",
        }
    }

    /// `None` when the outcome is inconclusive.
    pub fn agrees(self, outcome: &Outcome) -> Option<bool> {
        match outcome {
            Outcome::Inconclusive => None,
            Outcome::Bounded => Some(self == Expected::Bounded),
            Outcome::GrowUp => Some(self == Expected::Unbounded),
            Outcome::BlowUp { .. } => Some(self != Expected::Bounded),
        }
    }
}

/// Data-independent prediction of the regime; `None` in regions where
/// bounded and unbounded solutions coexist (the answer depends on u0).
pub fn expected_outcome(regime: &Regime) -> Option<Expected> {
    if let Globality::LDependentGlobal { global: false } = regime.globality {
        return Some(Expected::BlowUp);
    }
    match regime.boundedness {
        Boundedness::AllBounded | Boundedness::LDependent { bounded: true } => Some(Expected::Bounded),
        Boundedness::AllUnbounded | Boundedness::LDependent { bounded: false } => Some(Expected::Unbounded),
        Boundedness::UnboundedExist | Boundedness::BothExist => None,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub pass: bool,
    pub outcome: Outcome,
    pub termination: Termination,
    pub t_end: f64,
    pub sup_final: f64,
    pub threshold_time: Option<f64>,
    pub monotone: bool,
    pub non_unique: bool,
    pub steps: usize,
    pub rejected_steps: usize,
    /// Classification of (m, p, N, L); absent when it is undefined (p > p0).
    pub regime: Option<Regime>,
    pub regime_error: Option<String>,
    pub expected: Option<Expected>,
    pub checks: Vec<Check>,
    pub fits: Vec<RateFit>,
}

/// Runs the experiment without writing anything.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<(SimulationRun, ExperimentReport)> {
    let sim = cfg.to_simulation()?;
    let run = simulate_from(&sim, &cfg.initial)?;
    let report = evaluate(cfg, &run);
    Ok((run, report))
}

fn evaluate(cfg: &ExperimentConfig, run: &SimulationRun) -> ExperimentReport {
    let params = &cfg.params;
    let (regime, regime_error) = match classify_regime(params, critical_length_or_zero(params.n)) {
        Ok(r) => (Some(r), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let expected = regime.as_ref().and_then(expected_outcome);

    let mut checks = vec![flat_bound_check("run", run)];
    if let (false, InitialData::Gaussian { amplitude, width }) = (cfg.reaction, &cfg.initial) {
        if params.m == 1.0 {
            // u(0,t) = A (w²/(w² + 4t))^{N/2} for the heat equation in R^N
            let last = run.series.last().expect("runs record the initial state");
            let exact = amplitude * (width * width / (width * width + 4.0 * last.t)).powf(params.n as f64 / 2.0);
            let mut c = Check::relative("heat-kernel", last.sup_norm, exact, HEAT_KERNEL_TOL);
            c.detail = "u(0, t_end) vs the whole-space Gaussian solution".into();
            checks.push(c);
        }
    }
    if !cfg.reaction && cfg.boundary == Boundary::ZeroFlux {
        let m0 = run.series[0].mass;
        let drift = run.series.iter().map(|s| (s.mass / m0 - 1.0).abs()).fold(0.0, f64::max);
        checks.push(Check::at_most("mass-conservation", drift, MASS_TOL));
    }
    if let (Some(e), true) = (expected, cfg.reaction) {
        let detail = format!("classifier expects {}, run is {} (1 agree, 0 disagree, -1 inconclusive)", e.label(), run.outcome.label());
        let value = match e.agrees(&run.outcome) {
            Some(true) => 1.0,
            Some(false) => 0.0,
            None => -1.0,
        };
        checks.push(Check::info("regime-agreement", value, detail));
    }
    if let Outcome::BlowUp { t_est } = run.outcome {
        checks.push(Check::info("blow-up-time", t_est, "estimated blow-up time"));
    }

    let mut fits = Vec::new();
    if let Some(spec) = &cfg.fit {
        let sup: Vec<(f64, f64)> = run.series.iter().map(|s| (s.t, s.sup_norm)).collect();
        fits.extend(fit_all(&sup, spec.window).into_iter().map(|f| f.with_id("sup_norm")));
        for (j, r) in cfg.trace_radii.iter().enumerate() {
            let id = format!("u(r={r})");
            fits.extend(fit_all(&run.trace(j), spec.window).into_iter().map(|f| f.with_id(&id)));
        }
    }

    let last = run.final_state();
    ExperimentReport {
        pass: checks.iter().filter(|c| c.gating).all(|c| c.pass),
        outcome: run.outcome,
        termination: run.termination,
        t_end: last.t,
        sup_final: last.u.iter().copied().fold(0.0, f64::max),
        threshold_time: run.threshold_time,
        monotone: run.monotone,
        non_unique: run.non_unique,
        steps: run.steps,
        rejected_steps: run.rejected_steps,
        regime,
        regime_error,
        expected,
        checks,
        fits,
    }
}

pub fn series_columns(cfg: &ExperimentConfig) -> Vec<String> {
    let mut cols = columns(&["t", "dt", "sup_norm", "mass", "energy", "kaplan", "concavity_j", "flat_bound"]);
    cols.extend(cfg.trace_radii.iter().map(|r| format!("u(r={r})")));
    cols
}

pub const SNAPSHOT_COLUMNS: [&str; 4] = ["t", "r", "u", "dt_used"];

/// Writes the four files of an experiment into `dir`.
pub fn write_experiment(dir: &Path, cfg: &ExperimentConfig, run: &SimulationRun, report: &ExperimentReport) -> Result<()> {
    ensure_dir(dir)?;
    let m0 = run.series[0].sup_norm;
    let p = cfg.params.p;
    let series_cols = series_columns(cfg);
    let rows = run.series.iter().map(|s| {
        let mut row = vec![sci(s.t), sci(s.dt), sci(s.sup_norm), sci(s.mass), sci(s.energy), sci(s.kaplan), sci(s.concavity_j)];
        let b = flat_bound(m0, p, s.t);
        row.push(if b.is_finite() { sci(b) } else { String::new() });
        row.extend(s.traces.iter().copied().map(sci));
        row
    });
    let series_path = dir.join(SERIES_FILE);
    write_csv(&series_path, &series_cols, rows)?;

    let nodes = run.config.grid.nodes();
    let snap_cols = columns(&SNAPSHOT_COLUMNS);
    let rows = run
        .snapshots
        .iter()
        .flat_map(|s| nodes.iter().zip(&s.u).map(move |(r, u)| vec![sci(s.t), sci(*r), sci(*u), sci(s.dt_used)]));
    let snap_path = dir.join(SNAPSHOTS_FILE);
    write_csv(&snap_path, &snap_cols, rows)?;

    let summary = serde_json::json!({
        "outcome": run.outcome.label(),
        "termination": run.termination,
        "t_end": report.t_end,
        "threshold_time": sci_opt(run.threshold_time),
        "snapshots": run.snapshots.len(),
        "series_points": run.series.len(),
    });
    let meta = Sidecar::new("simulate", cfg)?
        .with_file(&series_path, &series_cols)
        .with_file(&snap_path, &snap_cols)
        .with_summary(&summary)?;
    write_json(&dir.join(META_FILE), &meta)?;
    write_json(&dir.join(REPORT_FILE), report)
}

/// Runs and writes; returns the report.
pub fn simulate_to(dir: &Path, cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let (run, report) = run_experiment(cfg)?;
    write_experiment(dir, cfg, &run, &report)?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{FitSpec, GridSpec};
    use growup_core::ProblemParams;

    fn heat_config() -> ExperimentConfig {
        ExperimentConfig {
            params: ProblemParams { m: 1.0, p: 1.0, n: 2, l: 1.0 },
            grid: GridSpec { r_max: 60.0, cells: 300 },
            t_max: 50.0,
            initial: InitialData::Gaussian { amplitude: 1.0, width: 1.0 },
            reaction: false,
            ..ExperimentConfig::default()
        }
    }

    #[test]
    fn heat_kernel_validation_passes() {
        let (_, report) = run_experiment(&heat_config()).unwrap();
        assert!(report.pass, "{:?}", report.checks);
        assert!(report.checks.iter().any(|c| c.name == "heat-kernel" && c.pass));
    }

    #[test]
    fn bounded_below_l_star() {
        // Theorem (teo-bup-p=m)(2)(i): N = 3, p = m = 1, L = 1 < π/2
        let cfg = ExperimentConfig {
            params: ProblemParams { m: 1.0, p: 1.0, n: 3, l: 1.0 },
            grid: GridSpec { r_max: 20.0, cells: 200 },
            t_max: 200.0,
            initial: InitialData::Stationary { a: 1.0, scale: 0.9 },
            ..ExperimentConfig::default()
        };
        let (_, report) = run_experiment(&cfg).unwrap();
        assert_eq!(report.outcome, Outcome::Bounded);
        assert_eq!(report.expected, Some(Expected::Bounded));
        assert!(report.pass);
    }

    #[test]
    fn two_d_p_equals_m_blows_up_with_estimate() {
        let cfg = ExperimentConfig {
            params: ProblemParams { m: 2.0, p: 2.0, n: 2, l: 2.0 },
            grid: GridSpec { r_max: 6.0, cells: 60 },
            t_max: 1e3,
            initial: InitialData::Bump { amplitude: 2.0, radius: 1.0 },
            ..ExperimentConfig::default()
        };
        let (_, report) = run_experiment(&cfg).unwrap();
        let Outcome::BlowUp { t_est } = report.outcome else { panic!("{:?}", report.outcome) };
        assert!(t_est.is_finite() && t_est > 0.0);
        assert_eq!(report.expected, Some(Expected::BlowUp));
        assert!(report.checks.iter().any(|c| c.name == "blow-up-time"));
    }

    #[test]
    fn writes_four_files_and_fits() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = heat_config();
        cfg.trace_radii = vec![0.0, 2.0];
        cfg.fit = Some(FitSpec { window: (5.0, 50.0) });
        let report = simulate_to(dir.path(), &cfg).unwrap();
        for f in [SERIES_FILE, SNAPSHOTS_FILE, META_FILE, REPORT_FILE] {
            assert!(dir.path().join(f).is_file(), "{f}");
        }
        // u(0,t) ~ t^{-1}: the power fit finds σ ≈ −1
        let fit = report.fits.iter().find(|f| f.series_id.as_deref() == Some("sup_norm") && f.model == growup_core::rates::RateModel::Power).unwrap();
        assert!((fit.parameter + 1.0).abs() < 0.1, "{}", fit.parameter);
        let meta: Sidecar = serde_json::from_str(&std::fs::read_to_string(dir.path().join(META_FILE)).unwrap()).unwrap();
        assert_eq!(serde_json::from_value::<ExperimentConfig>(meta.config).unwrap(), cfg);
        assert_eq!(meta.files.len(), 2);
        let header = std::fs::read_to_string(dir.path().join(SERIES_FILE)).unwrap();
        assert!(header.starts_with("t,dt,sup_norm,mass,energy,kaplan,concavity_j,flat_bound,u(r=0),u(r=2)\r\n"));
    }

    #[test]
    fn rerun_reproduces_csv_bytes() {
        let mut cfg = heat_config();
        cfg.t_max = 2.0;
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        simulate_to(a.path(), &cfg).unwrap();
        simulate_to(b.path(), &cfg).unwrap();
        for f in [SERIES_FILE, SNAPSHOTS_FILE] {
            assert_eq!(std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap());
        }
    }
}
