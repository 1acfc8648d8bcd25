//! Python module `growup`: problem parameters and the regime classifier,
//! special solutions, the radial PDE solver, rate fits, verification
//! recipes and sweeps. Structured results are returned as plain Python
//! dicts/lists (built through the stdlib `json` module); configs may be
//! passed as dicts or JSON strings using the CLI's `ExperimentConfig` schema.

#![allow(clippy::too_many_arguments)] // keyword-rich Python signatures

use std::fmt::Display;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use serde::de::DeserializeOwned;
use serde::Serialize;

use growup_cli::config::ExperimentConfig;
use growup_cli::experiment::{run_experiment, simulate_to as cli_simulate_to};
use growup_cli::info::{exponents_for, regime_for};
use growup_cli::special::{self, EigenRequest, ProfileTable, SelfSimRequest, StationaryRequest};
use growup_cli::sweep::{run_sweep, SweepConfig};
use growup_cli::CliError;
use growup_core::pde::SimulationRun;
use growup_core::rates::{self, RateModel};
use growup_core::specfun::{self as sf, BesselOrder};
use growup_core::verify::Recipe;
use growup_core::{eigen, stationary, ProblemParams};

fn value_err(e: impl Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn runtime_err(e: impl Display) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

/// Usage/config errors become `ValueError`, everything else `RuntimeError`.
fn cli_err(e: CliError) -> PyErr {
    if e.exit_code() == growup_cli::EXIT_USAGE { value_err(e) } else { runtime_err(e) }
}

fn to_py<'py>(py: Python<'py>, v: &impl Serialize) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(v).map_err(runtime_err)?;
    py.import("json")?.call_method1("loads", (text,))
}

/// Accepts a JSON string or any JSON-serializable Python object.
fn from_py<T: DeserializeOwned>(obj: &Bound<'_, PyAny>) -> PyResult<T> {
    let text: String = match obj.extract::<String>() {
        Ok(s) => s,
        Err(_) => obj.py().import("json")?.call_method1("dumps", (obj,))?.extract()?,
    };
    serde_json::from_str(&text).map_err(value_err)
}

fn table_to_py<'py>(py: Python<'py>, t: &ProfileTable) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &serde_json::json!({ "columns": t.columns, "rows": t.rows, "summary": t.summary }))
}

/// The tuple (m, p, N, L) of `u_t = Δu^m + 1_{B_L} u^p`.
#[pyclass(name = "ProblemParams", frozen, eq, from_py_object)]
#[derive(Clone, PartialEq)]
pub struct PyProblemParams {
    inner: ProblemParams,
}

#[pymethods]
impl PyProblemParams {
    #[new]
    #[allow(non_snake_case)]
    fn new(m: f64, p: f64, N: u32, L: f64) -> PyResult<Self> {
        Ok(PyProblemParams { inner: ProblemParams::new(m, p, N, L).map_err(value_err)? })
    }

    #[getter]
    fn m(&self) -> f64 {
        self.inner.m
    }

    #[getter]
    fn p(&self) -> f64 {
        self.inner.p
    }

    #[getter(N)]
    fn n(&self) -> u32 {
        self.inner.n
    }

    #[getter(L)]
    fn l(&self) -> f64 {
        self.inner.l
    }

    /// γ = p/m.
    #[getter]
    fn gamma(&self) -> f64 {
        self.inner.gamma()
    }

    /// p0, pF, pS, m*, γ_S, L1 as a dict.
    fn exponents<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &growup_core::exponents(&self.inner))
    }

    /// Region, rate law, λ₀ and predicted exponent as a dict.
    fn regime<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &regime_for(&self.inner).map_err(cli_err)?)
    }

    fn to_dict<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner)
    }

    fn __repr__(&self) -> String {
        let p = &self.inner;
        format!("ProblemParams(m={}, p={}, N={}, L={})", p.m, p.p, p.n, p.l)
    }
}

/// A finished PDE run with its report (outcome, checks, rate fits).
#[pyclass(name = "SimulationResult", frozen)]
pub struct PySimulationResult {
    run: SimulationRun,
    report: growup_cli::ExperimentReport,
}

#[pymethods]
impl PySimulationResult {
    /// `bounded`, `grow-up`, `blow-up` or `inconclusive`.
    #[getter]
    fn outcome(&self) -> &'static str {
        self.run.outcome.label()
    }

    /// Estimated blow-up time, if the run blew up.
    #[getter]
    fn blowup_time(&self) -> Option<f64> {
        match self.run.outcome {
            growup_core::pde::Outcome::BlowUp { t_est } => Some(t_est),
            _ => None,
        }
    }

    #[getter]
    fn passed(&self) -> bool {
        self.report.pass
    }

    #[getter]
    fn t_end(&self) -> f64 {
        self.report.t_end
    }

    #[getter]
    fn steps(&self) -> usize {
        self.run.steps
    }

    #[getter]
    fn t(&self) -> Vec<f64> {
        self.run.series.iter().map(|s| s.t).collect()
    }

    #[getter]
    fn sup_norm(&self) -> Vec<f64> {
        self.run.series.iter().map(|s| s.sup_norm).collect()
    }

    #[getter]
    fn mass(&self) -> Vec<f64> {
        self.run.series.iter().map(|s| s.mass).collect()
    }

    #[getter]
    fn energy(&self) -> Vec<f64> {
        self.run.series.iter().map(|s| s.energy).collect()
    }

    /// u(r_j, t) for the j-th trace radius.
    fn trace(&self, j: usize) -> PyResult<Vec<f64>> {
        if j >= self.run.config.trace_radii.len() {
            return Err(value_err(format!("trace index {j} out of range")));
        }
        Ok(self.run.series.iter().map(|s| s.traces[j]).collect())
    }

    /// `(r, u)` at the final time.
    fn final_profile(&self) -> (Vec<f64>, Vec<f64>) {
        (self.run.config.grid.nodes(), self.run.final_state().u.clone())
    }

    fn report<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.report)
    }

    fn __repr__(&self) -> String {
        format!("SimulationResult(outcome='{}', t_end={}, steps={})", self.outcome(), self.report.t_end, self.run.steps)
    }
}

/// Exponent table for (m, N).
#[pyfunction]
#[allow(non_snake_case)]
fn exponents<'py>(py: Python<'py>, m: f64, N: u32) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &exponents_for(m, N).map_err(cli_err)?)
}

/// Regime of (m, p, N, L): region label, rate law, λ₀.
#[pyfunction]
#[pyo3(signature = (m, p, N, L = 1.0))]
#[allow(non_snake_case)]
fn classify_regime<'py>(py: Python<'py>, m: f64, p: f64, N: u32, L: f64) -> PyResult<Bound<'py, PyAny>> {
    let params = ProblemParams::new(m, p, N, L).map_err(value_err)?;
    to_py(py, &regime_for(&params).map_err(cli_err)?)
}

/// L*(N): π/2 for N = 3, the zero of F at γ = 1 for N ≥ 3, 0 for N ≤ 2.
#[pyfunction]
#[allow(non_snake_case)]
fn critical_length(N: u32) -> f64 {
    stationary::critical_length_or_zero(N)
}

/// λ₀(L) of the exponential solution (L > L*).
#[pyfunction]
#[allow(non_snake_case)]
fn lambda0(L: f64, N: u32) -> PyResult<f64> {
    eigen::lambda0(L, N).map(|l| l.lambda0).map_err(value_err)
}

/// λ*(m, L) of the separated-variables profiles.
#[pyfunction]
#[allow(non_snake_case)]
fn lambda_star(m: f64, L: f64, N: u32) -> PyResult<f64> {
    eigen::lambda_star(m, L, N).map(|l| l.lambda_star).map_err(value_err)
}

/// R(L): the Dirichlet critical radius.
#[pyfunction]
#[allow(non_snake_case)]
fn dirichlet_radius(N: u32, L: f64) -> PyResult<f64> {
    stationary::dirichlet_r_of_l(N, L).map_err(value_err)
}

/// k*(m, p) = max c1(A) for γ > 1.
#[pyfunction]
#[allow(non_snake_case)]
fn k_star<'py>(py: Python<'py>, m: f64, p: f64, N: u32, L: f64) -> PyResult<Bound<'py, PyAny>> {
    let params = ProblemParams::new(m, p, N, L).map_err(value_err)?;
    to_py(py, &stationary::k_star(&params).map_err(value_err)?)
}

/// Matched stationary profile: `{columns: [r, w, w_prime, u], rows, summary}`.
#[pyfunction]
#[pyo3(signature = (N, L, m = 1.0, gamma = 1.0, A = 1.0, r_max = 10.0, points = 201))]
#[allow(non_snake_case)]
fn stationary_profile<'py>(py: Python<'py>, N: u32, L: f64, m: f64, gamma: f64, A: f64, r_max: f64, points: usize) -> PyResult<Bound<'py, PyAny>> {
    let t = special::stationary(&StationaryRequest { m, gamma, n: N, l: L, a: A, r_max, points }).map_err(cli_err)?;
    table_to_py(py, &t)
}

/// Exponential-solution profile: `{columns: [r, phi], rows, summary}`.
#[pyfunction]
#[pyo3(signature = (N, L, r_max = 10.0, points = 201))]
#[allow(non_snake_case)]
fn eigen_profile<'py>(py: Python<'py>, N: u32, L: f64, r_max: f64, points: usize) -> PyResult<Bound<'py, PyAny>> {
    let t = special::eigen(&EigenRequest { n: N, l: L, r_max, points }).map_err(cli_err)?;
    table_to_py(py, &t)
}

/// Self-similar profile: `{columns: [xi, f], rows, summary}` (δ = 1 type I, 0 type II).
#[pyfunction]
#[pyo3(signature = (m, N, alpha, delta = 1.0, mu = 1.0))]
#[allow(non_snake_case)]
fn selfsim_profile<'py>(py: Python<'py>, m: f64, N: u32, alpha: f64, delta: f64, mu: f64) -> PyResult<Bound<'py, PyAny>> {
    let t = special::selfsim(&SelfSimRequest { m, n: N, alpha, delta, mu }).map_err(cli_err)?;
    table_to_py(py, &t)
}

fn order(nu: f64) -> PyResult<BesselOrder> {
    BesselOrder::new(nu).map_err(value_err)
}

#[pyfunction]
fn bessel_j(nu: f64, x: f64) -> PyResult<f64> {
    sf::bessel_j(order(nu)?, x).map_err(value_err)
}

#[pyfunction]
fn bessel_i(nu: f64, x: f64) -> PyResult<f64> {
    sf::bessel_i(order(nu)?, x).map_err(value_err)
}

#[pyfunction]
fn bessel_k(nu: f64, x: f64) -> PyResult<f64> {
    sf::bessel_k(order(nu)?, x).map_err(value_err)
}

fn series(t: Vec<f64>, u: Vec<f64>) -> PyResult<Vec<(f64, f64)>> {
    if t.len() != u.len() {
        return Err(value_err(format!("t and u differ in length ({} vs {})", t.len(), u.len())));
    }
    Ok(t.into_iter().zip(u).collect())
}

/// Fits `power`, `exponential` or `log-power` on the window [ta, tb].
#[pyfunction]
#[pyo3(signature = (t, u, ta, tb, model = "power"))]
fn fit<'py>(py: Python<'py>, t: Vec<f64>, u: Vec<f64>, ta: f64, tb: f64, model: &str) -> PyResult<Bound<'py, PyAny>> {
    let model: RateModel = serde_json::from_value(serde_json::Value::String(model.into())).map_err(|_| value_err(format!("unknown model '{model}'")))?;
    to_py(py, &rates::fit(&series(t, u)?, (ta, tb), model).map_err(value_err)?)
}

/// All three models, best (smallest max relative deviation) first.
#[pyfunction]
fn fit_all<'py>(py: Python<'py>, t: Vec<f64>, u: Vec<f64>, ta: f64, tb: f64) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &rates::fit_all(&series(t, u)?, (ta, tb)))
}

/// Iterated Duhamel exponents (δ_k, σ_k, c_k) of §5.1.
#[pyfunction]
#[pyo3(signature = (p, k_max = 100))]
fn duhamel_sequence<'py>(py: Python<'py>, p: f64, k_max: usize) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &rates::duhamel_sequence(p, k_max).map_err(value_err)?)
}

/// The default experiment config as a dict (a template to edit).
#[pyfunction]
fn default_config<'py>(py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &ExperimentConfig::default())
}

/// Runs one experiment (config dict or JSON string) without writing files.
#[pyfunction]
fn simulate(py: Python<'_>, config: &Bound<'_, PyAny>) -> PyResult<PySimulationResult> {
    let cfg: ExperimentConfig = from_py(config)?;
    let (run, report) = py.detach(|| run_experiment(&cfg)).map_err(cli_err)?;
    Ok(PySimulationResult { run, report })
}

/// Runs one experiment and writes series.csv, snapshots.csv, meta.json and
/// report.json into `out_dir`; returns the report.
#[pyfunction]
fn simulate_to<'py>(py: Python<'py>, config: &Bound<'py, PyAny>, out_dir: std::path::PathBuf) -> PyResult<Bound<'py, PyAny>> {
    let cfg: ExperimentConfig = from_py(config)?;
    let report = py.detach(|| cli_simulate_to(&out_dir, &cfg)).map_err(cli_err)?;
    to_py(py, &report)
}

/// Names of the verification recipes.
#[pyfunction]
fn recipes() -> Vec<&'static str> {
    Recipe::ALL.iter().map(|r| r.name()).collect()
}

/// Runs a verification recipe; returns its report dict (see `pass`).
#[pyfunction]
fn verify<'py>(py: Python<'py>, recipe: &str) -> PyResult<Bound<'py, PyAny>> {
    let r = Recipe::from_name(recipe).ok_or_else(|| value_err(format!("unknown recipe '{recipe}'")))?;
    let report = py.detach(|| r.run());
    to_py(py, &report)
}

/// Runs a sweep (config dict or JSON string, `SweepConfig` schema) on
/// `workers` threads; returns `{columns, rows, summary}`.
#[pyfunction]
#[pyo3(signature = (config, workers = 1))]
fn sweep<'py>(py: Python<'py>, config: &Bound<'py, PyAny>, workers: usize) -> PyResult<Bound<'py, PyAny>> {
    let cfg: SweepConfig = from_py(config)?;
    let res = py.detach(|| run_sweep(&cfg, None, workers)).map_err(cli_err)?;
    to_py(py, &serde_json::json!({ "columns": res.columns, "rows": res.rows, "summary": res.summary }))
}

#[pymodule]
fn growup(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyProblemParams>()?;
    m.add_class::<PySimulationResult>()?;
    m.add_function(wrap_pyfunction!(exponents, m)?)?;
    m.add_function(wrap_pyfunction!(classify_regime, m)?)?;
    m.add_function(wrap_pyfunction!(critical_length, m)?)?;
    m.add_function(wrap_pyfunction!(lambda0, m)?)?;
    m.add_function(wrap_pyfunction!(lambda_star, m)?)?;
    m.add_function(wrap_pyfunction!(dirichlet_radius, m)?)?;
    m.add_function(wrap_pyfunction!(k_star, m)?)?;
    m.add_function(wrap_pyfunction!(stationary_profile, m)?)?;
    m.add_function(wrap_pyfunction!(eigen_profile, m)?)?;
    m.add_function(wrap_pyfunction!(selfsim_profile, m)?)?;
    m.add_function(wrap_pyfunction!(bessel_j, m)?)?;
    m.add_function(wrap_pyfunction!(bessel_i, m)?)?;
    m.add_function(wrap_pyfunction!(bessel_k, m)?)?;
    m.add_function(wrap_pyfunction!(fit, m)?)?;
    m.add_function(wrap_pyfunction!(fit_all, m)?)?;
    m.add_function(wrap_pyfunction!(duhamel_sequence, m)?)?;
    m.add_function(wrap_pyfunction!(default_config, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_to, m)?)?;
    m.add_function(wrap_pyfunction!(recipes, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    Ok(())
}
