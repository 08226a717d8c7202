//! Command implementations behind the `si-distancing` binary.
//!
//! Grids are written as CSV and reports as JSON; every float is printed with
//! 17 significant digits so that output round-trips exactly.

use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{Number, Value};

use crate::delay::{
    emblematic_disutility, ess_check, improvement_over_indifference, nash_equilibrium,
    relative_disutility, restricted_disutility, DelayPair, DEFAULT_GRID,
};
use crate::error::{check, Result};
use crate::filippov::{equilibrium_trajectory, monotonicity_suite};
use crate::model::GameParams;
use crate::oracle::{derivative_check, nash_residual};

/// Exit code for a failed verification.
pub const EXIT_VIOLATION: i32 = 1;
/// Exit code for bad flags or parameters.
pub const EXIT_USAGE: i32 = 2;

/// A dimensional outbreak description.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub population: f64,
    pub initial_cases: f64,
    /// Weeks for the case count to double without distancing.
    pub doubling_time: f64,
    pub infection_cost: f64,
    /// Largest useful distancing spend per week.
    pub max_weekly_spend: f64,
    /// Weeks until a vaccine ends the game.
    pub vaccine_wait: f64,
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        check(
            positive(self.population),
            "population",
            self.population,
            "must be positive",
        )?;
        check(
            positive(self.initial_cases) && self.initial_cases < self.population,
            "initial_cases",
            self.initial_cases,
            "must be positive and below population",
        )?;
        check(
            positive(self.doubling_time),
            "doubling_time",
            self.doubling_time,
            "must be positive",
        )?;
        check(
            positive(self.infection_cost),
            "infection_cost",
            self.infection_cost,
            "must be positive",
        )?;
        check(
            positive(self.max_weekly_spend),
            "max_weekly_spend",
            self.max_weekly_spend,
            "must be positive",
        )?;
        check(
            positive(self.vaccine_wait),
            "vaccine_wait",
            self.vaccine_wait,
            "must be positive",
        )
    }

    /// Weeks per nondimensional time unit, `doubling_time / ln 2`.
    pub fn time_unit(&self) -> f64 {
        self.doubling_time / std::f64::consts::LN_2
    }
}

/// Converts to units where the infection cost, transmission rate and
/// population are all one.
pub fn nondimensionalize(s: &ScenarioConfig) -> Result<GameParams> {
    s.validate()?;
    let unit = s.time_unit();
    GameParams::new(
        s.infection_cost / (s.max_weekly_spend * unit),
        s.initial_cases / s.population,
        s.vaccine_wait / unit,
    )
}

/// `x` with 17 significant digits.
pub fn fmt17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

fn widen(value: &mut Value) {
    match value {
        Value::Number(n) => {
            if let Some(x) = n.as_f64().filter(|_| n.is_f64()) {
                if let Ok(wide) = Number::from_str(&fmt17(x)) {
                    *n = wide;
                }
            }
        }
        Value::Array(items) => items.iter_mut().for_each(widen),
        Value::Object(map) => map.values_mut().for_each(widen),
        _ => {}
    }
}

/// Pretty JSON with every float at 17 significant digits.
pub fn to_json<T: Serialize>(report: &T) -> String {
    let mut value = serde_json::to_value(report).expect("reports serialize");
    widen(&mut value);
    serde_json::to_string_pretty(&value).expect("values serialize")
}

#[derive(Serialize)]
struct EquilibriumReport {
    params: GameParams,
    x_star: f64,
    regime: &'static str,
    residual: Option<f64>,
    disutility: f64,
    burden: f64,
    burden_indifferent: f64,
    improvement: f64,
}

pub fn cmd_equilibrium(params: &GameParams) -> Result<String> {
    let eq = nash_equilibrium(params);
    let burden = improvement_over_indifference(params)?;
    Ok(to_json(&EquilibriumReport {
        params: *params,
        x_star: eq.x_star,
        regime: eq.regime.as_str(),
        residual: eq.residual,
        disutility: emblematic_disutility(eq.x_star, params)?,
        burden: burden.burden,
        burden_indifferent: burden.burden_indifferent,
        improvement: burden.improvement,
    }))
}

/// `D(x, x̄)`, `D(x, x̄)/E(x̄)` and `E(x̄)` on a `grid × grid` lattice of `[0, tf]²`.
pub fn cmd_surface(params: &GameParams, grid: usize) -> Result<String> {
    check(grid >= 2, "grid", grid as f64, "need at least 2 points")?;
    let tf = params.tf();
    let at = |k: usize| {
        if k + 1 == grid {
            tf
        } else {
            tf * k as f64 / (grid - 1) as f64
        }
    };
    let mut out = String::from("x,xbar,D,D_hat,E\n");
    for i in 0..grid {
        for j in 0..grid {
            let pair = DelayPair::new(at(i), at(j));
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                fmt17(pair.x),
                fmt17(pair.xbar),
                fmt17(restricted_disutility(pair, params)?),
                fmt17(relative_disutility(pair, params)?),
                fmt17(emblematic_disutility(pair.xbar, params)?),
            ));
        }
    }
    Ok(out)
}

/// Which parameter varies alongside `tf` in a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum SweepAxis {
    I0,
    M,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Range {
    pub min: f64,
    pub max: f64,
    pub log: bool,
}

impl Range {
    fn points(&self, n: usize) -> Vec<f64> {
        (0..n)
            .map(|k| {
                let f = if n == 1 {
                    0.0
                } else {
                    k as f64 / (n - 1) as f64
                };
                if self.log {
                    (self.min.ln() + (self.max.ln() - self.min.ln()) * f).exp()
                } else {
                    self.min + (self.max - self.min) * f
                }
            })
            .map(|v| v.clamp(self.min, self.max))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub tf: Range,
    pub other: Range,
    /// Value of whichever of `m`, `i0` is not swept.
    pub fixed: f64,
    pub grid: usize,
}

pub const SWEEP_HEADER: &str =
    "tf,m,i0,regime,x_star,burden,burden_indifferent,improvement,relative_improvement,degenerate";

/// Equilibrium and burden over a `(tf, i0)` or `(tf, m)` grid.
///
/// At `i0 = 1` everyone is infected from the start, so the burden is 1 for
/// every delay; those rows carry `degenerate = true`.
pub fn cmd_sweep(spec: &SweepSpec) -> Result<String> {
    check(
        spec.grid >= 1,
        "grid",
        spec.grid as f64,
        "need at least 1 point",
    )?;
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for tf in spec.tf.points(spec.grid) {
        for v in spec.other.points(spec.grid) {
            let params = match spec.axis {
                SweepAxis::I0 => GameParams::new(spec.fixed, v, tf)?,
                SweepAxis::M => GameParams::new(v, spec.fixed, tf)?,
            };
            let eq = nash_equilibrium(&params);
            let b = improvement_over_indifference(&params)?;
            let relative = if b.burden_indifferent > 0.0 {
                b.improvement / b.burden_indifferent
            } else {
                0.0
            };
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{}\n",
                fmt17(tf),
                fmt17(params.m()),
                fmt17(params.i0()),
                eq.regime.as_str(),
                fmt17(eq.x_star),
                fmt17(b.burden),
                fmt17(b.burden_indifferent),
                fmt17(b.improvement),
                fmt17(relative),
                params.is_constant_risk(),
            ));
        }
    }
    Ok(out)
}

pub fn cmd_filippov(params: &GameParams) -> Result<String> {
    let trajectory = equilibrium_trajectory(params)?;
    #[derive(Serialize)]
    struct Report<'a> {
        params: GameParams,
        #[serde(flatten)]
        trajectory: &'a crate::filippov::EquilibriumTrajectory,
        distancing_duration: f64,
        terminal: crate::filippov::PotentialState,
        terminal_residual: f64,
    }
    Ok(to_json(&Report {
        params: *params,
        trajectory: &trajectory,
        distancing_duration: trajectory.distancing_duration(),
        terminal: trajectory.terminal_state(),
        terminal_residual: trajectory.terminal_residual(),
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum VerifyLevel {
    Quick,
    Full,
}

impl VerifyLevel {
    fn ess_grid(self) -> usize {
        match self {
            VerifyLevel::Quick => 2001,
            VerifyLevel::Full => DEFAULT_GRID,
        }
    }

    fn monotonicity_grid(self) -> usize {
        match self {
            VerifyLevel::Quick => 200,
            VerifyLevel::Full => 1000,
        }
    }

    fn lattice(self) -> usize {
        match self {
            VerifyLevel::Quick => 8,
            VerifyLevel::Full => 12,
        }
    }

    fn derivative_points(self) -> usize {
        match self {
            VerifyLevel::Quick => 4,
            VerifyLevel::Full => 10,
        }
    }
}

/// Tolerance shared by the monotonicity, residual and derivative checks.
pub const VERIFY_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyOutcome {
    pub params: GameParams,
    pub level: VerifyLevel,
    pub checks: Vec<CheckOutcome>,
    pub passed: bool,
}

impl VerifyOutcome {
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            EXIT_VIOLATION
        }
    }
}

fn detail<T: Serialize>(value: &T) -> Value {
    serde_json::to_value(value).expect("reports serialize")
}

pub fn cmd_verify(params: &GameParams, level: VerifyLevel) -> Result<VerifyOutcome> {
    let mut checks = Vec::new();

    let ess = ess_check(params, level.ess_grid())?;
    checks.push(CheckOutcome {
        name: "ess",
        passed: ess.holds(),
        detail: detail(&ess),
    });

    let monotone = monotonicity_suite(params, level.monotonicity_grid())?;
    checks.push(CheckOutcome {
        name: "monotonicity",
        passed: monotone.holds(VERIFY_TOLERANCE),
        detail: detail(&monotone),
    });

    let n = level.lattice();
    let residual = nash_residual(params, n)?;
    checks.push(CheckOutcome {
        name: "nash_residual",
        passed: residual >= -VERIFY_TOLERANCE,
        detail: serde_json::json!({ "n_intervals": n, "residual": residual }),
    });

    if params.is_constant_risk() {
        checks.push(CheckOutcome {
            name: "derivatives",
            passed: true,
            detail: serde_json::json!({ "skipped": "constant risk" }),
        });
    } else {
        let k = level.derivative_points();
        let tf = params.tf();
        let mut worst: f64 = 0.0;
        for a in 1..=k {
            for b in 1..=k {
                let x = tf * a as f64 / (k + 1) as f64;
                let xbar = tf * b as f64 / (k + 1) as f64;
                worst = worst.max(derivative_check(DelayPair::new(x, xbar), params)?.max_error);
            }
        }
        checks.push(CheckOutcome {
            name: "derivatives",
            passed: worst <= VERIFY_TOLERANCE,
            detail: serde_json::json!({ "points": k * k, "max_error": worst }),
        });
    }

    let passed = checks.iter().all(|c| c.passed);
    Ok(VerifyOutcome {
        params: *params,
        level,
        checks,
        passed,
    })
}

#[derive(Debug, Parser)]
#[command(
    name = "si-distancing",
    version,
    about = "Equilibria of the SI social-distancing game"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Write output here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ParamArgs {
    /// Distancing efficiency.
    #[arg(long, default_value_t = 6.0)]
    pub m: f64,
    /// Initial prevalence.
    #[arg(long, default_value_t = 0.02)]
    pub i0: f64,
    /// Game duration.
    #[arg(long, default_value_t = 6.0)]
    pub tf: f64,
    /// JSON scenario in dimensional units; overrides --m, --i0 and --tf.
    #[arg(long)]
    pub scenario: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Symmetric equilibrium, regime and burden as JSON.
    Equilibrium(ParamArgs),
    /// Disutility surfaces over the delay square as CSV.
    Surface {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = 61)]
        grid: usize,
    },
    /// Equilibrium and burden over a parameter grid as CSV.
    Sweep {
        /// Parameter swept alongside tf.
        #[arg(long, value_enum, default_value = "i0")]
        axis: SweepAxis,
        /// Duration range as `min,max`.
        #[arg(long, value_parser = parse_span, default_value = "0.1,30")]
        tf_range: (f64, f64),
        /// Range of the swept parameter as `min,max`.
        #[arg(long, value_parser = parse_span, default_value = "1e-4,0.99")]
        range: (f64, f64),
        /// Space the swept parameter logarithmically.
        #[arg(long)]
        log: bool,
        /// Value of the parameter that is not swept.
        #[arg(long, default_value_t = 6.0)]
        fixed: f64,
        #[arg(long, default_value_t = 51)]
        grid: usize,
    },
    /// Equilibrium trajectory in decision-potential coordinates as JSON.
    Filippov(ParamArgs),
    /// Stability, uniqueness, oracle and derivative checks; exit 1 on failure.
    Verify {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, value_enum, default_value = "quick")]
        level: VerifyLevel,
    },
}

fn parse_span(s: &str) -> std::result::Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or("expected `min,max`")?;
    let min: f64 = a.trim().parse().map_err(|e| format!("{a}: {e}"))?;
    let max: f64 = b.trim().parse().map_err(|e| format!("{b}: {e}"))?;
    if !(min.is_finite() && max.is_finite() && min <= max) {
        return Err(format!("need finite min <= max, got {min},{max}"));
    }
    Ok((min, max))
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Model(#[from] crate::Error),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("scenario: {0}")]
    Scenario(#[from] serde_json::Error),
}

impl ParamArgs {
    pub fn resolve(&self) -> std::result::Result<GameParams, CliError> {
        match &self.scenario {
            Some(path) => {
                let scenario: ScenarioConfig =
                    serde_json::from_str(&std::fs::read_to_string(path)?)?;
                Ok(nondimensionalize(&scenario)?)
            }
            None => Ok(GameParams::new(self.m, self.i0, self.tf)?),
        }
    }
}

/// Runs a parsed command, returning its output and exit code.
pub fn run(cli: &Cli) -> std::result::Result<(String, i32), CliError> {
    let (mut out, code) = match &cli.command {
        Command::Equilibrium(p) => (cmd_equilibrium(&p.resolve()?)?, 0),
        Command::Surface { params, grid } => (cmd_surface(&params.resolve()?, *grid)?, 0),
        Command::Sweep {
            axis,
            tf_range,
            range,
            log,
            fixed,
            grid,
        } => {
            let spec = SweepSpec {
                axis: *axis,
                tf: Range {
                    min: tf_range.0,
                    max: tf_range.1,
                    log: false,
                },
                other: Range {
                    min: range.0,
                    max: range.1,
                    log: *log,
                },
                fixed: *fixed,
                grid: *grid,
            };
            (cmd_sweep(&spec)?, 0)
        }
        Command::Filippov(p) => (cmd_filippov(&p.resolve()?)?, 0),
        Command::Verify { params, level } => {
            let outcome = cmd_verify(&params.resolve()?, *level)?;
            (to_json(&outcome), outcome.exit_code())
        }
    };
    if !out.ends_with('\n') {
        out.push('\n');
    }
    Ok((out, code))
}
