//! The `rsbr` command-line tool.
//!
//! Subcommands: `survival` and `hazard` emit closed-form curves as CSV;
//! `simulate` emits the Monte Carlo survival estimate with confidence
//! intervals; `efficiency` emits the JSON result envelope (optionally with
//! the renewal-cycle estimate alongside); `validate` juxtaposes the closed
//! form with the simulation and exits 2 when CI coverage falls below the
//! threshold; `order-stat-test` runs the conditional arrival-time KS check.
//!
//! Exit codes: 0 success, 1 any error, 2 validation coverage below
//! threshold. With a fixed `--seed`, artifacts are byte-identical
//! regardless of `--threads`.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::analytic::{AnalyticError, ClosedForm};
use crate::io::{
    parse_scenario, write_curve_csv, write_empirical_curve_csv, EfficiencyEnvelope, ParsedScenario,
    ScenarioError,
};
use crate::model::ValidationError;
use crate::quad::QuadratureSettings;
use crate::sim::{
    estimate_efficiency, estimate_survival, order_statistics_test, RngPolicy, SimError,
};

/// Environment variable supplying the default worker-thread count.
pub const THREADS_ENV: &str = "RSBR_THREADS";
/// z used for the simulated efficiency confidence interval (3σ).
const EFFICIENCY_CI_Z: f64 = 3.0;

#[derive(Debug, Parser)]
#[command(
    name = "rsbr",
    version,
    about = "Reliability of a server under randomly stressed workloads: \
             closed-form survival, hazard, and efficiency, cross-validated \
             by Monte Carlo simulation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form survival curve as `t,value` CSV.
    Survival(CurveArgs),
    /// Closed-form hazard-rate curve as `t,value` CSV.
    Hazard(CurveArgs),
    /// Efficiency report as JSON (add --simulate for the Monte Carlo cross-check).
    Efficiency(EfficiencyArgs),
    /// Monte Carlo survival estimate as `t,estimate,ci_lo,ci_hi` CSV.
    Simulate(SimulateArgs),
    /// Closed form vs Monte Carlo side by side, with CI coverage and exit status.
    Validate(ValidateArgs),
    /// KS test of conditional arrival times against the normalized intensity.
    OrderStatTest(OrderStatArgs),
}

#[derive(Debug, Args)]
pub struct IoArgs {
    /// Path to the scenario JSON document.
    #[arg(long)]
    pub scenario: PathBuf,
    /// Output path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// Largest grid time (and the simulation horizon). Defaults to the
    /// scenario file's simulation.horizon, else 20.
    #[arg(long)]
    pub t_max: Option<f64>,
    /// Number of grid points; the grid never includes t = 0.
    #[arg(long, default_value_t = 20)]
    pub points: usize,
    /// Smallest grid time; defaults to t-max / points.
    #[arg(long)]
    pub t_min: Option<f64>,
    /// Log-spaced grid instead of linear.
    #[arg(long)]
    pub log: bool,
}

#[derive(Debug, Args)]
pub struct NumericArgs {
    /// Relative quadrature tolerance override.
    #[arg(long)]
    pub rel_tol: Option<f64>,
    /// Absolute quadrature tolerance override.
    #[arg(long)]
    pub abs_tol: Option<f64>,
    /// Subdivision budget override.
    #[arg(long)]
    pub max_subdivisions: Option<usize>,
    /// Tail-window stopping tolerance override.
    #[arg(long)]
    pub tail_abs_tol: Option<f64>,
    /// Tail probe window length override.
    #[arg(long)]
    pub tail_window: Option<f64>,
}

impl NumericArgs {
    fn apply(&self, mut settings: QuadratureSettings) -> Result<QuadratureSettings, CliError> {
        if let Some(x) = self.rel_tol {
            settings.rel_tol = x;
        }
        if let Some(x) = self.abs_tol {
            settings.abs_tol = x;
        }
        if let Some(x) = self.max_subdivisions {
            settings.max_subdivisions = x;
        }
        if let Some(x) = self.tail_abs_tol {
            settings.tail_abs_tol = x;
        }
        if let Some(x) = self.tail_window {
            settings.tail_window = x;
        }
        settings.validate()?;
        Ok(settings)
    }
}

#[derive(Debug, Args)]
pub struct SimArgs {
    /// Replicas (or renewal cycles). Defaults to the scenario file's
    /// simulation.n_replicas, else 10000.
    #[arg(long)]
    pub n: Option<usize>,
    /// Master seed. Defaults to the scenario file's simulation.master_seed,
    /// else 42.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads; RSBR_THREADS or all cores when omitted.
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    #[command(flatten)]
    pub io: IoArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub numerics: NumericArgs,
}

#[derive(Debug, Args)]
pub struct EfficiencyArgs {
    #[command(flatten)]
    pub io: IoArgs,
    #[command(flatten)]
    pub numerics: NumericArgs,
    /// Also run the renewal-cycle estimator and report it with a 3σ CI.
    #[arg(long)]
    pub simulate: bool,
    #[command(flatten)]
    pub sim: SimArgs,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub io: IoArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub sim: SimArgs,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub io: IoArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub numerics: NumericArgs,
    #[command(flatten)]
    pub sim: SimArgs,
    /// Minimum fraction of grid points whose closed form must fall inside
    /// the 99% simulation CI.
    #[arg(long, default_value_t = 0.9)]
    pub threshold: f64,
}

#[derive(Debug, Args)]
pub struct OrderStatArgs {
    #[command(flatten)]
    pub io: IoArgs,
    /// Conditioning window end.
    #[arg(long)]
    pub t: f64,
    /// Condition on exactly this many arrivals in [0, t]; defaults to the
    /// nearest integer to the expected count m(t).
    #[arg(long)]
    pub n_condition: Option<usize>,
    /// Pooled arrival times to collect before testing.
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    /// Significance level for the verdict line.
    #[arg(long, default_value_t = 0.01)]
    pub alpha: f64,
    /// Master seed. Defaults to the scenario file's simulation.master_seed,
    /// else 42.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read scenario {path}: {source}")]
    ReadScenario {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Invalid(#[from] ValidationError),
    #[error(transparent)]
    Analytic(#[from] AnalyticError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Output(#[from] crate::io::OutputError),
    #[error("{0}")]
    BadFlag(String),
}

/// Run a parsed command line; returns the process exit code.
pub fn run(cli: Cli) -> u8 {
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn execute(command: Command) -> Result<u8, CliError> {
    match command {
        Command::Survival(args) => {
            let parsed = load(&args.io)?;
            let settings = args.numerics.apply(parsed.numerics)?;
            let grid = build_grid(&args.grid, &parsed)?;
            let cf = ClosedForm::with_settings(&parsed.scenario, settings);
            let curve = cf.survival_curve(&grid)?;
            let mut bytes = Vec::new();
            write_curve_csv(&curve, &mut bytes).expect("in-memory write");
            emit(&args.io, &bytes)?;
            Ok(0)
        }
        Command::Hazard(args) => {
            let parsed = load(&args.io)?;
            let settings = args.numerics.apply(parsed.numerics)?;
            let grid = build_grid(&args.grid, &parsed)?;
            let cf = ClosedForm::with_settings(&parsed.scenario, settings);
            let curve = cf.hazard_curve(&grid)?;
            let mut bytes = Vec::new();
            write_curve_csv(&curve, &mut bytes).expect("in-memory write");
            emit(&args.io, &bytes)?;
            Ok(0)
        }
        Command::Efficiency(args) => {
            let parsed = load(&args.io)?;
            let settings = args.numerics.apply(parsed.numerics)?;
            let cf = ClosedForm::with_settings(&parsed.scenario, settings);
            let report = cf.efficiency()?;
            let closed = EfficiencyEnvelope::from_report(&report);
            let json = if args.simulate {
                let (n, policy) = sim_defaults(&args.sim, &parsed);
                let estimate = with_threads(args.sim.threads, || {
                    estimate_efficiency(&parsed.scenario, n, policy)
                })?;
                let simulated = EfficiencyEnvelope::from_estimate(&estimate, EFFICIENCY_CI_Z);
                serde_json::to_string_pretty(&[closed, simulated])
            } else {
                serde_json::to_string_pretty(&closed)
            }
            .expect("envelope serializes");
            emit(&args.io, format!("{json}\n").as_bytes())?;
            Ok(0)
        }
        Command::Simulate(args) => {
            let parsed = load(&args.io)?;
            let grid = build_grid(&args.grid, &parsed)?;
            let (n, policy) = sim_defaults(&args.sim, &parsed);
            let curve = with_threads(args.sim.threads, || {
                estimate_survival(&parsed.scenario, &grid, n, policy)
            })?;
            let mut bytes = Vec::new();
            write_empirical_curve_csv(&curve, &mut bytes).expect("in-memory write");
            emit(&args.io, &bytes)?;
            Ok(0)
        }
        Command::Validate(args) => {
            if !(0.0..=1.0).contains(&args.threshold) {
                return Err(CliError::BadFlag(format!(
                    "--threshold must lie in [0, 1], got {}",
                    args.threshold
                )));
            }
            let parsed = load(&args.io)?;
            let settings = args.numerics.apply(parsed.numerics)?;
            let grid = build_grid(&args.grid, &parsed)?;
            let cf = ClosedForm::with_settings(&parsed.scenario, settings);
            let (n, policy) = sim_defaults(&args.sim, &parsed);
            let (curve, empirical) = with_threads(args.sim.threads, || {
                let curve = cf.survival_curve(&grid)?;
                let empirical = estimate_survival(&parsed.scenario, &grid, n, policy)
                    .map_err(CliError::from)?;
                Ok::<_, CliError>((curve, empirical))
            })?;

            let mut table = String::from("t,closed_form,mc_estimate,ci_lo,ci_hi,inside_ci\n");
            let mut covered = 0usize;
            for (i, &t) in grid.iter().enumerate() {
                let value = curve.values[i];
                let inside = empirical.covers(i, value);
                covered += inside as usize;
                let (lo, hi) = empirical.ci_bounds(i);
                writeln!(
                    table,
                    "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{}",
                    t, value, empirical.estimates[i], lo, hi, inside
                )
                .expect("in-memory write");
            }
            writeln!(table, "coverage: {covered}/{}", grid.len()).expect("in-memory write");
            emit(&args.io, table.as_bytes())?;
            let fraction = covered as f64 / grid.len() as f64;
            Ok(if fraction >= args.threshold { 0 } else { 2 })
        }
        Command::OrderStatTest(args) => {
            let parsed = load(&args.io)?;
            let expected = parsed
                .scenario
                .cumulative_intensity(args.t)
                .map_err(|e| CliError::Sim(SimError::Model(e)))?;
            let n_condition = match args.n_condition {
                Some(n) => n,
                None => expected.round().max(1.0) as usize,
            };
            let seed = args.seed.or(parsed.simulation.master_seed).unwrap_or(42);
            let report = order_statistics_test(
                &parsed.scenario,
                args.t,
                n_condition,
                args.samples,
                RngPolicy::new(seed),
            )?;
            let verdict = if report.p_value >= args.alpha {
                "pass"
            } else {
                "reject"
            };
            let text = format!(
                "ks_statistic: {:.16e}\np_value: {:.16e}\nn_pooled: {}\n\
                 paths_retained: {}\nattempts: {}\nn_condition: {}\nalpha: {}\nverdict: {}\n",
                report.statistic,
                report.p_value,
                report.n_pooled,
                report.paths_retained,
                report.attempts,
                n_condition,
                args.alpha,
                verdict
            );
            emit(&args.io, text.as_bytes())?;
            Ok(0)
        }
    }
}

fn load(io: &IoArgs) -> Result<ParsedScenario, CliError> {
    let text = std::fs::read_to_string(&io.scenario).map_err(|source| CliError::ReadScenario {
        path: io.scenario.clone(),
        source,
    })?;
    Ok(parse_scenario(&text)?)
}

fn emit(io: &IoArgs, bytes: &[u8]) -> Result<(), CliError> {
    match &io.out {
        Some(path) => Ok(crate::io::write_bytes_to_path(path, bytes)?),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes).expect("stdout write");
            stdout.flush().expect("stdout flush");
            Ok(())
        }
    }
}

/// Strictly increasing positive grid from the grid flags: `points` values
/// ending at `t_max`, linear by default, log-spaced with `--log`.
fn build_grid(args: &GridArgs, parsed: &ParsedScenario) -> Result<Vec<f64>, CliError> {
    let t_max = args.t_max.or(parsed.simulation.horizon).unwrap_or(20.0);
    if !t_max.is_finite() || t_max <= 0.0 {
        return Err(CliError::BadFlag(format!(
            "--t-max must be positive, got {t_max}"
        )));
    }
    let points = args.points;
    if points == 0 {
        return Err(CliError::BadFlag("--points must be at least 1".into()));
    }
    if points == 1 {
        return Ok(vec![t_max]);
    }
    let t_min = args.t_min.unwrap_or(t_max / points as f64);
    if !(t_min > 0.0 && t_min < t_max) {
        return Err(CliError::BadFlag(format!(
            "--t-min must lie in (0, t-max), got {t_min}"
        )));
    }
    let n = points as f64;
    let grid: Vec<f64> = if args.log {
        let ratio = t_max / t_min;
        (0..points)
            .map(|i| t_min * ratio.powf(i as f64 / (n - 1.0)))
            .collect()
    } else {
        (0..points)
            .map(|i| t_min + (t_max - t_min) * i as f64 / (n - 1.0))
            .collect()
    };
    Ok(grid)
}

fn sim_defaults(args: &SimArgs, parsed: &ParsedScenario) -> (usize, RngPolicy) {
    let n = args.n.or(parsed.simulation.n_replicas).unwrap_or(10_000);
    let seed = args.seed.or(parsed.simulation.master_seed).unwrap_or(42);
    (n, RngPolicy::new(seed))
}

/// Run `f` on a dedicated pool of `threads` workers (or the env-configured
/// count), falling back to the global pool.
fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    let resolved = threads.or_else(|| std::env::var(THREADS_ENV).ok().and_then(|v| v.parse().ok()));
    match resolved {
        Some(n) if n > 0 => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .expect("thread pool")
            .install(f),
        _ => f(),
    }
}
