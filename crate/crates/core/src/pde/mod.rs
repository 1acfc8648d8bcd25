//! Radial solver for `u_t = Δu^m + 1_{B_L}(x) u^p` on a truncated ball.
//!
//! Conservative finite volumes on a uniform grid: fluxes
//! `r_{i+1/2}^{N−1}(w_{i+1} − w_i)/h` of `w = u^m`, exact cell volumes, and the
//! exact volume fraction of each cell inside `B_L` as reaction coefficient.
//! Time stepping is either explicit Euler or IMEX Euler (diffusion backward,
//! reaction forward) solved by Newton with a tridiagonal (Thomas) solve; both adapt dt to a target relative
//! change per step and never exceed `dt_fraction·t`, which yields
//! logarithmic steps on long horizons.

pub mod diagnostics;
pub mod grid;

use serde::{Deserialize, Serialize};

use crate::eigen::{separated_profile_on, SeparatedEnd};
use crate::params::{ParamsError, ProblemParams};
use crate::stationary::build_stationary;

pub use diagnostics::{concavity_report, flat_bound, kaplan_threshold, ConcavityReport, Diagnostics};
pub use grid::RadialGrid;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PdeError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Params(#[from] ParamsError),
    #[error("initial data: {0}")]
    InitialData(String),
}

/// Condition at r = R_max.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Boundary {
    /// u(R_max, t) = 0: a subsolution of the Cauchy problem.
    #[default]
    DirichletZero,
    /// u(R_max, t) = flat_bound(‖u0‖∞, p, t): for upper-bound experiments.
    FlatBound,
    /// No flux through R_max (mass conserving when the reaction is off).
    ZeroFlux,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// Forward Euler under the diffusive CFL restriction.
    Explicit,
    /// Backward Euler for the diffusion, forward Euler for the reaction,
    /// Newton on the unknown w = u^m for m < 1, u otherwise.
    #[default]
    Implicit,
}

/// Policy constants of the run and of the outcome classifier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Policy {
    /// Sup norm above which the run stops (blow-up detection).
    pub blowup_threshold: f64,
    /// Relative variation of the sup norm over the last decade of time below
    /// which the run counts as bounded.
    pub plateau_tol: f64,
    /// Target relative change of u per step.
    pub rel_change: f64,
    /// dt ≤ dt_fraction·t.
    pub dt_fraction: f64,
    pub dt_init: f64,
    pub dt_min: f64,
    pub dt_max: Option<f64>,
    /// Constant step (no adaptation) when set; used for ordered-pair runs.
    pub fixed_dt: Option<f64>,
    pub max_steps: usize,
    /// Relative Newton update tolerance.
    pub newton_tol: f64,
    /// Explicit scheme: dt = cfl·h²/(N·max diffusivity).
    pub cfl: f64,
    /// Sup norm below `extinction_ratio·‖u0‖∞` ends the run as extinct.
    pub extinction_ratio: f64,
}

impl Default for Policy {
    fn default() -> Self {
        Policy {
            blowup_threshold: 1e12,
            plateau_tol: 0.01,
            rel_change: 0.02,
            dt_fraction: 0.1,
            dt_init: 1e-6,
            dt_min: 1e-14,
            dt_max: None,
            fixed_dt: None,
            max_steps: 2_000_000,
            newton_tol: 1e-11,
            cfl: 0.4,
            extinction_ratio: 1e-10,
        }
    }
}

/// Initial-data descriptors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum InitialData {
    /// u0 ≡ value (the Dirichlet node takes the boundary value).
    Constant { value: f64 },
    /// amplitude·exp(−r²/width²).
    Gaussian { amplitude: f64, width: f64 },
    /// amplitude·(1 − r²/radius²)₊².
    Bump { amplitude: f64, radius: f64 },
    /// amplitude·(e + r²)^{−1/(1−m)}·(½log(e + r²))^{1/(1−m)}: the tail
    /// `|x|^{−2/(1−m)}(log|x|)^{1/(1−m)}` of Theorem (teo.tasas.fuera), p = 1,
    /// raised to at least `plateau` on `B_L`. With `amplitude =
    /// (mκ)^{1/(1−m)}` ([`attractor_tail_amplitude`]) the tail starts on the
    /// type-II self-similar attractor; a large plateau removes the time lag
    /// between the inner source and the far field.
    SelfSimilarTail {
        amplitude: f64,
        #[serde(default)]
        plateau: f64,
    },
    /// scale·u_A with u_A = w_A^{1/m} the matched stationary profile.
    Stationary { a: f64, scale: f64 },
    /// scale·φ_λ, the separated-variables profile of Lemma (lem-tasa-p=m).
    Separated { lambda: f64, scale: f64 },
    /// Tabulated values, linearly interpolated (0 beyond the last radius).
    Samples { r: Vec<f64>, u: Vec<f64> },
}

impl InitialData {
    /// Nodal values on the grid.
    pub fn build(&self, params: &ProblemParams, grid: &RadialGrid) -> Result<Vec<f64>, PdeError> {
        let nodes = grid.nodes();
        let m = params.m;
        let values: Vec<f64> = match self {
            InitialData::Constant { value } => vec![*value; nodes.len()],
            InitialData::Gaussian { amplitude, width } => nodes.iter().map(|r| amplitude * (-(r / width).powi(2)).exp()).collect(),
            InitialData::Bump { amplitude, radius } => nodes.iter().map(|r| amplitude * (1.0 - (r / radius).powi(2)).max(0.0).powi(2)).collect(),
            InitialData::SelfSimilarTail { amplitude, plateau } => {
                if m >= 1.0 {
                    return Err(PdeError::InitialData("self-similar tail needs m < 1".into()));
                }
                let e = 1.0 / (1.0 - m);
                let c = std::f64::consts::E;
                nodes
                    .iter()
                    .map(|&r| {
                        let tail = amplitude * (c + r * r).powf(-e) * (0.5 * (c + r * r).ln()).powf(e);
                        if r <= params.l { tail.max(*plateau) } else { tail }
                    })
                    .collect()
            }
            InitialData::Stationary { a, scale } => {
                let prof = build_stationary(params, *a).map_err(|e| PdeError::InitialData(e.to_string()))?;
                nodes.iter().map(|&r| scale * prof.eval(r).0.max(0.0).powf(1.0 / m)).collect()
            }
            InitialData::Separated { lambda, scale } => {
                let prof = separated_profile_on(m, params.l, params.n, *lambda, grid.r_max).map_err(|e| PdeError::InitialData(e.to_string()))?;
                let (rs, us): (Vec<f64>, Vec<f64>) = prof.samples.iter().copied().unzip();
                let end = match prof.end {
                    SeparatedEnd::Vanishes { r } => r,
                    SeparatedEnd::Positive { r_end } => r_end,
                    SeparatedEnd::Diverges { r } => r,
                };
                nodes.iter().map(|&r| if r >= end { 0.0 } else { scale * interp(&rs, &us, r) }).collect()
            }
            InitialData::Samples { r, u } => {
                if r.len() != u.len() || r.len() < 2 || r.windows(2).any(|w| w[1] <= w[0]) {
                    return Err(PdeError::InitialData("samples need >= 2 strictly increasing radii with matching values".into()));
                }
                let last = *r.last().unwrap();
                nodes.iter().map(|&x| if x > last { 0.0 } else { interp(r, u, x) }).collect()
            }
        };
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(PdeError::InitialData("u0 must be finite and nonnegative".into()));
        }
        Ok(values)
    }
}

/// `(mκ)^{1/(1−m)}`, the coefficient of `ξ^{−2/(1−m)}(log ξ)^{1/(1−m)}` in the
/// far field of the type-II (α = 1, δ = 0) self-similar profile, with
/// `κ = −(1−m)g(X_C)/β`, `g(X) = (2−N)X − mX²`, `X_C = −2/(1−m)`, `β = (1−m)/2`.
pub fn attractor_tail_amplitude(m: f64, n: u32) -> f64 {
    let xc = -2.0 / (1.0 - m);
    let g = (2.0 - n as f64) * xc - m * xc * xc;
    let kappa = -(1.0 - m) * g / (0.5 * (1.0 - m));
    (m * kappa).powf(1.0 / (1.0 - m))
}

fn interp(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let i = xs.partition_point(|&v| v <= x);
    if i == 0 {
        return ys[0];
    }
    if i >= xs.len() {
        return *ys.last().unwrap();
    }
    let s = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
    ys[i - 1] * (1.0 - s) + ys[i] * s
}

/// Everything that defines a run (except the initial data).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub params: ProblemParams,
    pub grid: RadialGrid,
    pub t_max: f64,
    #[serde(default)]
    pub boundary: Boundary,
    #[serde(default)]
    pub scheme: Scheme,
    /// false switches the reaction off (a ≡ 0 test mode).
    #[serde(default = "yes")]
    pub reaction: bool,
    #[serde(default)]
    pub policy: Policy,
    /// Radii of the recorded point traces.
    #[serde(default)]
    pub trace_radii: Vec<f64>,
    /// Logarithmic snapshot checkpoints per decade of t (0 = none).
    #[serde(default = "four")]
    pub snapshots_per_decade: u32,
    /// First positive snapshot time.
    #[serde(default = "hundredth")]
    pub snapshot_start: f64,
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

impl SimulationConfig {
    pub fn new(params: ProblemParams, grid: RadialGrid, t_max: f64) -> Self {
        SimulationConfig {
            params,
            grid,
            t_max,
            boundary: Boundary::default(),
            scheme: Scheme::default(),
            reaction: true,
            policy: Policy::default(),
            trace_radii: Vec::new(),
            snapshots_per_decade: 4,
            snapshot_start: 0.01,
        }
    }

    pub fn validate(&self) -> Result<(), PdeError> {
        self.params.validate()?;
        if self.grid.n != self.params.n {
            return Err(PdeError::Config(format!("grid N = {} differs from params N = {}", self.grid.n, self.params.n)));
        }
        if !(self.t_max.is_finite() && self.t_max > 0.0) {
            return Err(PdeError::Config(format!("t_max = {} must be positive", self.t_max)));
        }
        let p = &self.policy;
        if !(p.rel_change > 0.0 && p.dt_fraction > 0.0 && p.dt_init > 0.0 && p.blowup_threshold > 0.0) {
            return Err(PdeError::Config("policy constants must be positive".into()));
        }
        if let Some(dt) = p.fixed_dt {
            if !(dt > 0.0) {
                return Err(PdeError::Config("fixed_dt must be positive".into()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub t: f64,
    pub u: Vec<f64>,
    pub dt_used: f64,
}

/// One accepted step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesPoint {
    pub t: f64,
    pub dt: f64,
    pub sup_norm: f64,
    /// ∫u dx.
    pub mass: f64,
    /// Lyapunov energy ½∫|∇u^m|² − m/(m+p)∫a u^{m+p}.
    pub energy: f64,
    /// Kaplan functional ∫_{B_L} u φ₁ (∫φ₁ = 1).
    pub kaplan: f64,
    /// Concavity functional (1/(m+1))∫u^{m+1}.
    pub concavity_j: f64,
    /// u at `trace_radii`.
    pub traces: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "label", rename_all = "kebab-case")]
pub enum Outcome {
    Bounded,
    GrowUp,
    BlowUp { t_est: f64 },
    Inconclusive,
}

impl Outcome {
    pub fn label(&self) -> &'static str {
        match self {
            Outcome::Bounded => "bounded",
            Outcome::GrowUp => "grow-up",
            Outcome::BlowUp { .. } => "blow-up",
            Outcome::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    Completed,
    Threshold,
    Extinct,
    StepSizeCollapse,
    MaxSteps,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationRun {
    pub config: SimulationConfig,
    pub series: Vec<SeriesPoint>,
    pub snapshots: Vec<Snapshot>,
    pub termination: Termination,
    pub outcome: Outcome,
    /// Time at which the blow-up threshold was crossed (interpolated).
    pub threshold_time: Option<f64>,
    /// Sup-norm series nondecreasing along the run.
    pub monotone: bool,
    /// p < 1 with u0 vanishing somewhere in the closed reaction ball.
    pub non_unique: bool,
    pub steps: usize,
    pub rejected_steps: usize,
}

impl SimulationRun {
    pub fn final_state(&self) -> &Snapshot {
        self.snapshots.last().expect("runs always store the final state")
    }

    /// `(t, u(r_j, t))` for trace j.
    pub fn trace(&self, j: usize) -> Vec<(f64, f64)> {
        self.series.iter().map(|s| (s.t, s.traces[j])).collect()
    }

    pub fn sup_series(&self) -> Vec<(f64, f64)> {
        self.series.iter().map(|s| (s.t, s.sup_norm)).collect()
    }
}

/// Nonlinear change of unknown: v = w = u^m for m < 1, v = u otherwise.
#[derive(Clone, Copy)]
struct Unknown {
    m: f64,
    use_w: bool,
}

impl Unknown {
    fn to_v(&self, u: f64) -> f64 {
        if self.use_w {
            u.powf(self.m)
        } else {
            u
        }
    }
    /// (u, du/dv, w, dw/dv)
    fn eval(&self, v: f64) -> (f64, f64, f64, f64) {
        let v = v.max(0.0);
        if self.use_w {
            let u = v.powf(1.0 / self.m);
            let du = if v > 0.0 { u / (self.m * v) } else if self.m < 1.0 { 0.0 } else { f64::INFINITY };
            (u, du, v, 1.0)
        } else if self.m == 1.0 {
            (v, 1.0, v, 1.0)
        } else {
            let w = v.powf(self.m);
            let dw = if v > 0.0 { self.m * w / v } else { 0.0 };
            (v, 1.0, w, dw)
        }
    }
}

/// Solves a tridiagonal system in place (Thomas algorithm); `lower[0]` and
/// `upper[n−1]` are ignored. Returns false on a zero pivot.
fn thomas(lower: &[f64], diag: &mut [f64], upper: &[f64], rhs: &mut [f64]) -> bool {
    let n = diag.len();
    for i in 1..n {
        if diag[i - 1] == 0.0 || !diag[i - 1].is_finite() {
            return false;
        }
        let f = lower[i] / diag[i - 1];
        diag[i] -= f * upper[i - 1];
        rhs[i] -= f * rhs[i - 1];
    }
    if diag[n - 1] == 0.0 || !diag[n - 1].is_finite() {
        return false;
    }
    rhs[n - 1] /= diag[n - 1];
    for i in (0..n - 1).rev() {
        rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
    }
    true
}

struct Solver<'a> {
    cfg: &'a SimulationConfig,
    vol: Vec<f64>,
    area: Vec<f64>,
    frac: Vec<f64>,
    unknown: Unknown,
    u0_sup: f64,
    diag: Diagnostics,
}

impl<'a> Solver<'a> {
    fn new(cfg: &'a SimulationConfig, u0_sup: f64) -> Self {
        let g = &cfg.grid;
        let frac = if cfg.reaction { g.ball_fractions(cfg.params.l) } else { vec![0.0; g.cells + 1] };
        Solver {
            cfg,
            vol: g.volumes(),
            area: g.face_areas(),
            frac,
            unknown: Unknown { m: cfg.params.m, use_w: cfg.params.m < 1.0 },
            u0_sup,
            diag: Diagnostics::new(&cfg.params, g, cfg.reaction),
        }
    }

    fn boundary_value(&self, t: f64) -> Option<f64> {
        match self.cfg.boundary {
            Boundary::DirichletZero => Some(0.0),
            Boundary::FlatBound => Some(flat_bound(self.u0_sup, self.cfg.params.p, t)),
            Boundary::ZeroFlux => None,
        }
    }

    /// Last unknown index.
    fn last(&self) -> usize {
        match self.cfg.boundary {
            Boundary::ZeroFlux => self.cfg.grid.cells,
            _ => self.cfg.grid.cells - 1,
        }
    }

    /// Backward-Euler step; None when Newton fails.
    fn implicit_step(&self, u_old: &[f64], t_new: f64, dt: f64) -> Option<Vec<f64>> {
        let (m, p) = (self.cfg.params.m, self.cfg.params.p);
        let h = self.cfg.grid.h;
        let last = self.last();
        let size = last + 1;
        let bc = self.boundary_value(t_new);
        let w_b = bc.map(|g| g.powf(m));
        let mut v: Vec<f64> = u_old[..size].iter().map(|&u| self.unknown.to_v(u)).collect();
        let (mut lower, mut diag, mut upper, mut res) = (vec![0.0; size], vec![0.0; size], vec![0.0; size], vec![0.0; size]);
        let mut evals = vec![(0.0, 0.0, 0.0, 0.0); size];
        let react: Vec<f64> = u_old[..size].iter().zip(&self.frac).map(|(u, a)| if *a > 0.0 { u.powf(p) } else { 0.0 }).collect();
        for _ in 0..40 {
            for i in 0..size {
                evals[i] = self.unknown.eval(v[i]);
            }
            for i in 0..size {
                let (u, du, w, dw) = evals[i];
                let mut r = self.vol[i] * (u - u_old[i]) / dt;
                let mut d = self.vol[i] * du / dt;
                if i > 0 {
                    let a = self.area[i - 1] / h;
                    r -= a * (evals[i - 1].2 - w);
                    d += a * dw;
                    lower[i] = -a * evals[i - 1].3;
                }
                if i < self.cfg.grid.cells {
                    let a = self.area[i] / h;
                    let w_next = if i < last { evals[i + 1].2 } else { w_b.unwrap() };
                    r -= a * (w_next - w);
                    d += a * dw;
                    upper[i] = if i < last { -a * evals[i + 1].3 } else { 0.0 };
                }
                // reaction taken explicitly (IMEX): the step stays monotone
                // and below the explicit flat ODE solution
                r -= self.vol[i] * self.frac[i] * react[i];
                res[i] = -r;
                diag[i] = d;
            }
            if !thomas(&lower, &mut diag, &upper, &mut res) {
                return None;
            }
            let scale = v.iter().fold(0.0_f64, |a, &x| a.max(x)).max(1e-300);
            let mut change = 0.0_f64;
            for i in 0..size {
                let nv = (v[i] + res[i]).max(0.0);
                if !nv.is_finite() {
                    return None;
                }
                change = change.max((nv - v[i]).abs());
                v[i] = nv;
            }
            if change <= self.cfg.policy.newton_tol * scale {
                let mut u: Vec<f64> = v.iter().map(|&x| self.unknown.eval(x).0).collect();
                if let Some(g) = bc {
                    u.push(g);
                }
                return Some(u);
            }
        }
        None
    }

    /// Time derivative of the semi-discrete system (explicit scheme).
    fn rhs(&self, u: &[f64]) -> Vec<f64> {
        let (m, p) = (self.cfg.params.m, self.cfg.params.p);
        let h = self.cfg.grid.h;
        let w: Vec<f64> = u.iter().map(|x| x.powf(m)).collect();
        let cells = self.cfg.grid.cells;
        let mut f = vec![0.0; cells + 1];
        for i in 0..cells {
            let flux = self.area[i] * (w[i + 1] - w[i]) / h;
            f[i] += flux;
            f[i + 1] -= flux;
        }
        for i in 0..=cells {
            f[i] /= self.vol[i];
            if self.frac[i] > 0.0 {
                f[i] += self.frac[i] * u[i].powf(p);
            }
        }
        f
    }

    /// `cfl·h²/(N·max diffusivity)` capped by the reaction stiffness
    /// `rel_change / max a·u^{p−1}` (u floored at 10⁻³‖u‖∞).
    fn explicit_dt(&self, u: &[f64]) -> f64 {
        let (m, p) = (self.cfg.params.m, self.cfg.params.p);
        let g = &self.cfg.grid;
        let mut d_max = 0.0_f64;
        for i in 0..g.cells {
            let (a, b) = (u[i], u[i + 1]);
            let ubar = if m < 1.0 { (2.0 * a * b / (a + b)).max(1e-30) } else { a.max(b) };
            d_max = d_max.max(m * ubar.powf(m - 1.0));
        }
        let dt_diff = self.cfg.policy.cfl * g.h * g.h / (g.n as f64 * d_max.max(1e-300));
        let sup = u.iter().fold(0.0_f64, |a, &x| a.max(x));
        let stiff = u
            .iter()
            .zip(&self.frac)
            .filter(|(_, a)| **a > 0.0)
            .map(|(x, a)| a * x.max(1e-3 * sup).powf(p - 1.0))
            .fold(0.0_f64, f64::max);
        dt_diff.min(self.cfg.policy.rel_change / stiff.max(1e-300))
    }

    fn point(&self, t: f64, dt: f64, u: &[f64]) -> SeriesPoint {
        let g = &self.cfg.grid;
        SeriesPoint {
            t,
            dt,
            sup_norm: u.iter().fold(0.0_f64, |a, &x| a.max(x)),
            mass: self.diag.mass(u),
            energy: self.diag.energy(u),
            kaplan: self.diag.kaplan(u),
            concavity_j: self.diag.concavity_j(u),
            traces: self.cfg.trace_radii.iter().map(|&r| g.interpolate(u, r)).collect(),
        }
    }
}

fn checkpoints(cfg: &SimulationConfig) -> Vec<f64> {
    let mut out = Vec::new();
    if cfg.snapshots_per_decade > 0 && cfg.snapshot_start > 0.0 {
        let mut k = 0;
        loop {
            let t = cfg.snapshot_start * 10f64.powf(k as f64 / cfg.snapshots_per_decade as f64);
            if t >= cfg.t_max * (1.0 - 1e-12) {
                break;
            }
            out.push(t);
            k += 1;
        }
    }
    out.push(cfg.t_max);
    out
}

/// Runs the experiment from nodal initial values `u0`.
pub fn simulate(cfg: &SimulationConfig, u0: &[f64]) -> Result<SimulationRun, PdeError> {
    cfg.validate()?;
    let g = &cfg.grid;
    if u0.len() != g.cells + 1 {
        return Err(PdeError::InitialData(format!("expected {} nodal values, got {}", g.cells + 1, u0.len())));
    }
    if u0.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(PdeError::InitialData("u0 must be finite and nonnegative".into()));
    }
    let u0_sup = u0.iter().fold(0.0_f64, |a, &x| a.max(x));
    let solver = Solver::new(cfg, u0_sup);
    let pol = &cfg.policy;

    let frac_ball = g.ball_fractions(cfg.params.l);
    let non_unique = cfg.params.p < 1.0 && cfg.reaction && u0.iter().zip(&frac_ball).any(|(u, a)| *a > 0.0 && *u <= 0.0);

    let mut u = u0.to_vec();
    if let Some(b) = solver.boundary_value(0.0) {
        u[g.cells] = b;
    }
    let mut t = 0.0;
    let mut dt = pol.fixed_dt.unwrap_or(pol.dt_init);
    let mut series = vec![solver.point(0.0, 0.0, &u)];
    let mut snapshots = vec![Snapshot { t: 0.0, u: u.clone(), dt_used: 0.0 }];
    let marks = checkpoints(cfg);
    let mut next_mark = 0;
    let (mut steps, mut rejected) = (0usize, 0usize);
    let mut termination = Termination::Completed;
    let mut threshold_time = None;
    let mut fixed_shrink = 1.0;

    while t < cfg.t_max * (1.0 - 1e-14) {
        if steps >= pol.max_steps {
            termination = Termination::MaxSteps;
            break;
        }
        let sup_old = series.last().unwrap().sup_norm;
        if let Some(fixed) = pol.fixed_dt {
            // restore after checkpoint landings; shrink only after failed solves
            dt = fixed * fixed_shrink;
        }
        let explicit_f = (cfg.scheme == Scheme::Explicit).then(|| solver.rhs(&u));
        if explicit_f.is_some() {
            dt = pol.fixed_dt.unwrap_or_else(|| solver.explicit_dt(&u));
        }
        if pol.fixed_dt.is_none() {
            if t > 0.0 {
                dt = dt.min(pol.dt_fraction * t);
            }
            if let Some(cap) = pol.dt_max {
                dt = dt.min(cap);
            }
        }
        let mut landing = false;
        if t + dt >= marks[next_mark] * (1.0 - 1e-12) {
            dt = marks[next_mark] - t;
            landing = true;
        }
        if dt < pol.dt_min {
            termination = Termination::StepSizeCollapse;
            break;
        }
        let t_new = t + dt;
        let candidate = match &explicit_f {
            Some(f) => {
                let mut un: Vec<f64> = u.iter().zip(f).map(|(a, b)| (a + dt * b).max(0.0)).collect();
                if let Some(b) = solver.boundary_value(t_new) {
                    un[g.cells] = b;
                }
                Some(un)
            }
            None => solver.implicit_step(&u, t_new, dt),
        };
        let Some(u_new) = candidate else {
            rejected += 1;
            dt *= 0.25;
            fixed_shrink *= 0.25;
            continue;
        };
        let floor = 1e-3 * sup_old;
        let delta = u.iter().zip(&u_new).map(|(a, b)| (b - a).abs() / a.max(floor)).fold(0.0_f64, f64::max);
        if cfg.scheme == Scheme::Implicit && pol.fixed_dt.is_none() && delta > 2.0 * pol.rel_change {
            rejected += 1;
            dt *= 0.5;
            continue;
        }
        steps += 1;
        fixed_shrink = 1.0;
        t = if landing { marks[next_mark] } else { t_new };
        u = u_new;
        let pt = solver.point(t, dt, &u);
        let sup_new = pt.sup_norm;
        series.push(pt);
        if landing {
            snapshots.push(Snapshot { t, u: u.clone(), dt_used: dt });
            next_mark += 1;
        }
        if sup_new > pol.blowup_threshold {
            let (l0, l1) = (sup_old.max(1e-300).ln(), sup_new.ln());
            let s = ((pol.blowup_threshold.ln() - l0) / (l1 - l0)).clamp(0.0, 1.0);
            threshold_time = Some(t - dt + s * dt);
            termination = Termination::Threshold;
            break;
        }
        if sup_new <= pol.extinction_ratio * u0_sup {
            termination = Termination::Extinct;
            break;
        }
        if cfg.scheme == Scheme::Implicit && pol.fixed_dt.is_none() {
            dt *= (0.9 * pol.rel_change / delta.max(1e-12)).clamp(0.2, 2.0);
        }
    }
    if snapshots.last().map(|s| s.t) != Some(t) {
        snapshots.push(Snapshot { t, u: u.clone(), dt_used: series.last().unwrap().dt });
    }

    let monotone = series.windows(2).all(|w| w[1].sup_norm >= w[0].sup_norm * (1.0 - 1e-12));
    let mut run = SimulationRun {
        config: cfg.clone(),
        series,
        snapshots,
        termination,
        outcome: Outcome::Inconclusive,
        threshold_time,
        monotone,
        non_unique,
        steps,
        rejected_steps: rejected,
    };
    run.outcome = classify_outcome(&run, pol);
    Ok(run)
}

/// Builds the initial data from a descriptor and runs.
pub fn simulate_from(cfg: &SimulationConfig, data: &InitialData) -> Result<SimulationRun, PdeError> {
    let u0 = data.build(&cfg.params, &cfg.grid)?;
    simulate(cfg, &u0)
}

/// Sup norm at time t by log-linear interpolation of the series.
fn sup_at(series: &[SeriesPoint], t: f64) -> f64 {
    let i = series.partition_point(|s| s.t < t);
    if i == 0 {
        return series[0].sup_norm;
    }
    if i >= series.len() {
        return series.last().unwrap().sup_norm;
    }
    let (a, b) = (&series[i - 1], &series[i]);
    let s = (t - a.t) / (b.t - a.t);
    a.sup_norm * (1.0 - s) + b.sup_norm * s
}

/// Outcome policy:
/// * threshold crossed with accelerating growth (d log‖u‖/dt over the last
///   5% of time at least 1.5× that of the preceding 5%): blow-up; crossed
///   without acceleration: grow-up;
/// * extinction, or sup norm never exceeding its value at `t_end/10` by more
///   than `plateau_tol` over the last decade: bounded (covers decay);
/// * sup norm increasing by more than `plateau_tol` on both log-halves of the
///   last decade: grow-up;
/// * otherwise inconclusive.
pub fn classify_outcome(run: &SimulationRun, policy: &Policy) -> Outcome {
    let s = &run.series;
    match run.termination {
        Termination::Threshold => {
            let tc = run.threshold_time.unwrap_or(s.last().unwrap().t);
            let d = 0.05 * tc;
            let rate = |a: f64, b: f64| (sup_at(s, b).max(1e-300).ln() - sup_at(s, a).max(1e-300).ln()) / (b - a);
            let late = rate(tc - d, tc);
            let early = rate(tc - 2.0 * d, tc - d);
            if late >= 1.5 * early.max(0.0) || tc < 1e-9 {
                Outcome::BlowUp { t_est: tc }
            } else {
                Outcome::GrowUp
            }
        }
        Termination::Extinct => Outcome::Bounded,
        Termination::StepSizeCollapse | Termination::MaxSteps => Outcome::Inconclusive,
        Termination::Completed => {
            let t_end = s.last().unwrap().t;
            let t_a = t_end / 10.0;
            let tol = policy.plateau_tol;
            let s_a = sup_at(s, t_a);
            let window_max = s.iter().filter(|p| p.t >= t_a).fold(s_a, |a, p| a.max(p.sup_norm));
            if window_max <= (1.0 + tol) * s_a {
                return Outcome::Bounded;
            }
            let s_mid = sup_at(s, (t_a * t_end).sqrt());
            let s_end = s.last().unwrap().sup_norm;
            if s_mid > (1.0 + tol) * s_a && s_end > (1.0 + tol) * s_mid {
                Outcome::GrowUp
            } else {
                Outcome::Inconclusive
            }
        }
    }
}
