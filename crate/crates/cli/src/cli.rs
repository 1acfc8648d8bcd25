//! Argument definitions and command dispatch.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use growup_core::pde::{Boundary, Scheme};
use growup_core::verify::{Recipe, VerifyReport};
use growup_core::ProblemParams;

use crate::config::{parse_values, parse_window, ExperimentConfig, Overrides};
use crate::error::{CliError, Result, EXIT_CHECK_FAILED, EXIT_OK};
use crate::experiment::simulate_to;
use crate::info::{exponents_for, regime_for, render_exponents, render_regime};
use crate::output::write_json;
use crate::special::{eigen, selfsim, stationary, EigenRequest, SelfSimRequest, StationaryRequest};
use crate::sweep::{sweep_to, workers_from_env, SweepConfig, SweepTable};

#[derive(Debug, Parser)]
#[command(name = "growup", version, about = "Grow-up and blow-up laboratory for u_t = Δu^m + 1_{B_L} u^p")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the critical exponents p0, pF, pS, m* for (m, N).
    Exponents(ExponentsArgs),
    /// Classify (m, p, N, L): region, rate law, λ₀.
    Regime(RegimeArgs),
    /// Build and export a special solution.
    #[command(subcommand)]
    Special(SpecialCommand),
    /// Run one PDE experiment from a JSON config (flags override file values).
    Simulate(SimulateArgs),
    /// Run verification recipes; exits 1 when a check fails.
    Verify(VerifyArgs),
    /// Parameter sweep over (m, p, L); worker count from GROWUP_WORKERS.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
pub struct ExponentsArgs {
    #[arg(long)]
    pub m: f64,
    #[arg(long = "N", visible_alias = "n")]
    pub n: u32,
    /// JSON instead of text output.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct RegimeArgs {
    #[arg(long)]
    pub m: f64,
    #[arg(long)]
    pub p: f64,
    #[arg(long = "N", visible_alias = "n")]
    pub n: u32,
    /// Radius of the reaction ball.
    #[arg(long = "L", visible_alias = "l", default_value_t = 1.0)]
    pub l: f64,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SelfSimKind {
    /// δ = 1: U = t^α f(r t^β).
    #[value(name = "I")]
    I,
    /// δ = 0: U = e^{αt} f(r e^{βt}).
    #[value(name = "II")]
    II,
}

#[derive(Debug, Subcommand)]
pub enum SpecialCommand {
    /// Matched stationary profile of the Cauchy problem (N >= 3).
    Stationary {
        #[arg(long = "N", visible_alias = "n")]
        n: u32,
        #[arg(long, default_value_t = 1.0)]
        m: f64,
        /// γ = p/m (default 1).
        #[arg(long, conflicts_with = "p")]
        gamma: Option<f64>,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long = "L", visible_alias = "l")]
        l: f64,
        /// Centre value w(0).
        #[arg(long = "A", visible_alias = "a", default_value_t = 1.0)]
        a: f64,
        #[arg(long, default_value_t = 10.0)]
        r_max: f64,
        #[arg(long, default_value_t = 201)]
        points: usize,
        /// CSV destination (a `.meta.json` sidecar is written next to it).
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Exponential solution e^{λ₀ t} φ(r) (L > L*).
    Eigen {
        #[arg(long = "N", visible_alias = "n")]
        n: u32,
        #[arg(long = "L", visible_alias = "l")]
        l: f64,
        /// Default max(10, 3L).
        #[arg(long)]
        r_max: Option<f64>,
        #[arg(long, default_value_t = 201)]
        points: usize,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Self-similar profile f(ξ) (m < 1).
    Selfsim {
        #[arg(long)]
        m: f64,
        #[arg(long = "N", visible_alias = "n")]
        n: u32,
        #[arg(long = "type", value_enum, conflicts_with = "delta")]
        kind: Option<SelfSimKind>,
        /// δ = α(1−m) − 2β (alternative to --type).
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 1.0)]
        mu: f64,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
}

fn parse_boundary(s: &str) -> std::result::Result<Boundary, String> {
    serde_json::from_value(serde_json::Value::String(s.into())).map_err(|_| "expected dirichlet-zero, zero-flux or flat-bound".into())
}

fn parse_scheme(s: &str) -> std::result::Result<Scheme, String> {
    serde_json::from_value(serde_json::Value::String(s.into())).map_err(|_| "expected implicit or explicit".into())
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Experiment config (JSON); defaults are used when absent.
    #[arg(long, short)]
    pub config: Option<PathBuf>,
    /// Output directory (overrides `output_dir`; default `run`).
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub m: Option<f64>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long = "N", visible_alias = "n")]
    pub n: Option<u32>,
    #[arg(long = "L", visible_alias = "l")]
    pub l: Option<f64>,
    #[arg(long)]
    pub t_max: Option<f64>,
    #[arg(long)]
    pub r_max: Option<f64>,
    #[arg(long)]
    pub cells: Option<usize>,
    #[arg(long, value_parser = parse_boundary)]
    pub boundary: Option<Boundary>,
    #[arg(long, value_parser = parse_scheme)]
    pub scheme: Option<Scheme>,
    /// Switch the reaction off (a ≡ 0 validation mode).
    #[arg(long)]
    pub no_reaction: bool,
    #[arg(long)]
    pub fixed_dt: Option<f64>,
    #[arg(long)]
    pub rel_change: Option<f64>,
    /// Blow-up detection threshold on the sup norm.
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Trace radii, e.g. `0,1,4`.
    #[arg(long)]
    pub traces: Option<String>,
    /// Rate-fit window `ta,tb`.
    #[arg(long)]
    pub fit_window: Option<String>,
    /// Print the merged config and exit without running.
    #[arg(long)]
    pub print_config: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Recipe name, or `all`.
    #[arg(required_unless_present = "list")]
    pub recipe: Option<String>,
    /// List the recipes.
    #[arg(long)]
    pub list: bool,
    /// Also write the JSON report(s) to this file.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    /// One summary line per recipe instead of JSON.
    #[arg(long)]
    pub human: bool,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Sweep config (JSON); flags override its values.
    #[arg(long, short)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub table: Option<SweepTable>,
    #[arg(long = "N", visible_alias = "n")]
    pub n: Option<u32>,
    /// Values of m: `a,b,c`, `a:b:n` or `log:a:b:n`.
    #[arg(long)]
    pub m: Option<String>,
    #[arg(long)]
    pub p: Option<String>,
    #[arg(long = "L", visible_alias = "l")]
    pub l: Option<String>,
    /// Output directory.
    #[arg(long, short, default_value = "sweep")]
    pub out: PathBuf,
    /// Regime table: skip the per-cell experiment directories.
    #[arg(long)]
    pub no_cells: bool,
    #[arg(long)]
    pub t_max: Option<f64>,
    #[arg(long)]
    pub r_max: Option<f64>,
    #[arg(long)]
    pub cells: Option<usize>,
}

fn print(text: &str) -> Result<()> {
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(CliError::io("<stdout>"))
}

fn print_json(value: &impl serde::Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    print(&text)
}

/// Executes a parsed command line; returns the process exit code.
pub fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Exponents(a) => {
            let o = exponents_for(a.m, a.n)?;
            if a.json { print_json(&o)? } else { print(&render_exponents(&o))? }
            Ok(EXIT_OK)
        }
        Command::Regime(a) => {
            let o = regime_for(&ProblemParams::new(a.m, a.p, a.n, a.l)?)?;
            if a.json { print_json(&o)? } else { print(&render_regime(&o))? }
            Ok(EXIT_OK)
        }
        Command::Special(s) => special(s),
        Command::Simulate(a) => simulate(a),
        Command::Verify(a) => verify(a),
        Command::Sweep(a) => sweep(a),
    }
}

fn special(cmd: SpecialCommand) -> Result<u8> {
    let (table, out, command, request) = match cmd {
        SpecialCommand::Stationary { n, m, gamma, p, l, a, r_max, points, out } => {
            let gamma = match (gamma, p) {
                (_, Some(p)) => p / m,
                (g, None) => g.unwrap_or(1.0),
            };
            let req = StationaryRequest { m, gamma, n, l, a, r_max, points };
            (stationary(&req)?, out, "special stationary", serde_json::to_value(req)?)
        }
        SpecialCommand::Eigen { n, l, r_max, points, out } => {
            let req = EigenRequest { n, l, r_max: r_max.unwrap_or((3.0 * l).max(10.0)), points };
            (eigen(&req)?, out, "special eigen", serde_json::to_value(req)?)
        }
        SpecialCommand::Selfsim { m, n, kind, delta, alpha, mu, out } => {
            let delta = match (kind, delta) {
                (Some(SelfSimKind::I), _) => 1.0,
                (Some(SelfSimKind::II), _) => 0.0,
                (None, Some(d)) => d,
                (None, None) => return Err(CliError::Usage("selfsim needs --type I|II or --delta".into())),
            };
            let req = SelfSimRequest { m, n, alpha, delta, mu };
            (selfsim(&req)?, out, "special selfsim", serde_json::to_value(req)?)
        }
    };
    if let Some(path) = &out {
        table.write(path, command, &request)?;
    }
    print_json(&serde_json::json!({ "request": request, "summary": table.summary, "rows": table.rows.len(), "csv": out }))?;
    Ok(EXIT_OK)
}

fn simulate(a: SimulateArgs) -> Result<u8> {
    let mut cfg = match &a.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    let overrides = Overrides {
        m: a.m,
        p: a.p,
        n: a.n,
        l: a.l,
        t_max: a.t_max,
        r_max: a.r_max,
        cells: a.cells,
        boundary: a.boundary,
        scheme: a.scheme,
        no_reaction: a.no_reaction,
        fixed_dt: a.fixed_dt,
        rel_change: a.rel_change,
        threshold: a.threshold,
        trace_radii: a.traces.as_deref().map(parse_values).transpose()?,
        fit_window: a.fit_window.as_deref().map(parse_window).transpose()?,
        output_dir: a.out.clone(),
    };
    cfg.apply(&overrides);
    if a.print_config {
        print(&(cfg.to_json()? + "\n"))?;
        return Ok(EXIT_OK);
    }
    let dir = cfg.output_dir.clone().unwrap_or_else(|| PathBuf::from("run"));
    let report = simulate_to(&dir, &cfg)?;
    print_json(&report)?;
    Ok(if report.pass { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn verify(a: VerifyArgs) -> Result<u8> {
    if a.list {
        let mut text = String::new();
        for r in Recipe::ALL {
            let crit = r.criterion().map(|c| format!("criterion {c}")).unwrap_or_else(|| "auxiliary".into());
            text.push_str(&format!("{:<22} {:<13} {}\n", r.name(), crit, r.theorem()));
        }
        print(&text)?;
        return Ok(EXIT_OK);
    }
    let name = a.recipe.unwrap_or_default();
    let recipes: Vec<Recipe> = if name.eq_ignore_ascii_case("all") {
        Recipe::ALL.to_vec()
    } else {
        let r = Recipe::from_name(&name).ok_or_else(|| {
            let known: Vec<&str> = Recipe::ALL.iter().map(|r| r.name()).collect();
            CliError::Usage(format!("unknown recipe '{name}'; known: all, {}", known.join(", ")))
        })?;
        vec![r]
    };
    let reports: Vec<VerifyReport> = recipes.into_iter().map(Recipe::run).collect();
    let pass = reports.iter().all(|r| r.pass);
    if a.human {
        let lines: Vec<String> = reports.iter().map(|r| r.summary_line()).collect();
        print(&(lines.join("\n") + "\n"))?;
    } else if reports.len() == 1 {
        print_json(&reports[0])?;
    } else {
        print_json(&reports)?;
    }
    if let Some(path) = &a.out {
        if reports.len() == 1 { write_json(path, &reports[0])? } else { write_json(path, &reports)? }
    }
    Ok(if pass { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn sweep(a: SweepArgs) -> Result<u8> {
    let workers = workers_from_env()?;
    let mut cfg = match &a.config {
        Some(path) => SweepConfig::load(path)?,
        None => SweepConfig::new(a.table.unwrap_or_default(), a.n.ok_or_else(|| CliError::Usage("sweep needs --N or --config".into()))?),
    };
    if let Some(t) = a.table {
        cfg.table = t;
    }
    if let Some(n) = a.n {
        cfg.n = n;
    }
    for (dst, src) in [(&mut cfg.m, &a.m), (&mut cfg.p, &a.p), (&mut cfg.l, &a.l)] {
        if let Some(s) = src {
            *dst = parse_values(s)?;
        }
    }
    if a.no_cells {
        cfg.write_cells = false;
    }
    cfg.base.apply(&Overrides { t_max: a.t_max, r_max: a.r_max, cells: a.cells, ..Default::default() });
    let res = sweep_to(&a.out, &cfg, workers)?;
    let csv = a.out.join(format!("{}.csv", cfg.table.name()));
    print_json(&serde_json::json!({ "table": cfg.table.name(), "csv": csv, "workers": workers, "summary": res.summary }))?;
    Ok(EXIT_OK)
}
