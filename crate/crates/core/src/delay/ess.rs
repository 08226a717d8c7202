//! Grid verification of the equilibrium's stability properties.

use serde::Serialize;

use super::{disutility_gap, nash_equilibrium, DelayPair, Regime};
use crate::error::{check, Error, Result};
use crate::model::GameParams;

/// Uniform grid size used by the check operations unless overridden.
pub const DEFAULT_GRID: usize = 10_001;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EssReport {
    pub x_star: f64,
    pub regime: Regime,
    /// Whether `x*` lies strictly inside `(0, tf)`, where both inequalities
    /// are claimed. Boundary equilibria only get the best-reply check.
    pub covered: bool,
    pub grid_size: usize,
    pub grid_step: f64,
    /// `min_y D(y, x*) - D(x*, x*)` over grid points `y != x*`.
    pub nash_slack: f64,
    /// `min_y D(y, y) - D(x*, y)`; `None` when not covered.
    pub invasion_slack: Option<f64>,
    /// Grid point where the Nash slack is smallest.
    pub nash_slack_at: f64,
    /// Grid minimiser of the emblematic disutility.
    pub emblematic_argmin: f64,
}

impl EssReport {
    pub fn nash_holds(&self) -> bool {
        self.nash_slack > 0.0
    }

    pub fn invasion_holds(&self) -> bool {
        self.invasion_slack.is_some_and(|s| s > 0.0)
    }

    /// Population optimum coincides with the equilibrium to grid resolution.
    pub fn no_free_riding(&self) -> bool {
        (self.emblematic_argmin - self.x_star).abs() <= self.grid_step
    }

    pub fn holds(&self) -> bool {
        if self.covered {
            self.nash_holds() && self.invasion_holds() && self.no_free_riding()
        } else {
            self.nash_holds()
        }
    }
}

fn uniform_grid(tf: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |k| {
        if k + 1 == n {
            tf
        } else {
            tf * k as f64 / (n - 1) as f64
        }
    })
}

/// `ln(1 - E(x̄))`, which orders delays by `E` without the saturation of
/// `E` near 1 in long games. `-∞` once `x̄ ≥ m`.
fn emblematic_log_complement(xbar: f64, params: &GameParams) -> f64 {
    let m = params.m();
    if xbar >= m {
        return f64::NEG_INFINITY;
    }
    let keep = (-xbar / m).ln_1p();
    let remaining = params.tf() - xbar;
    if params.is_constant_risk() {
        return keep - remaining;
    }
    let i0 = params.i0();
    let log_denom = if remaining >= 0.0 {
        i0.ln() + remaining + ((1.0 - i0) / i0 * (-remaining).exp()).ln_1p()
    } else {
        (1.0 - i0 + i0 * remaining.exp()).ln()
    };
    keep - log_denom
}

/// Checks, on a uniform grid of `[0, tf]`, that the equilibrium is a strict
/// best reply to itself and that it cannot be invaded:
/// `D(x*, x*) < D(y, x*)` and `D(x*, y) < D(y, y)` for every `y != x*`.
///
/// Slacks are reported, not thresholded; the check passes only when both are
/// strictly positive.
pub fn ess_check(params: &GameParams, grid_size: usize) -> Result<EssReport> {
    check(
        grid_size >= 2,
        "grid_size",
        grid_size as f64,
        "need at least 2 points",
    )?;
    let eq = nash_equilibrium(params);
    let x_star = eq.x_star;
    let tf = params.tf();
    let covered = eq.regime == Regime::Interior && x_star > 0.0 && x_star < tf;

    let at_star = DelayPair::symmetric(x_star);
    let mut nash_slack = f64::INFINITY;
    let mut nash_slack_at = f64::NAN;
    let mut invasion_slack = f64::INFINITY;
    let mut complement_max = f64::NEG_INFINITY;
    let mut emblematic_argmin = f64::NAN;

    for y in uniform_grid(tf, grid_size) {
        let c = emblematic_log_complement(y, params);
        if c > complement_max {
            complement_max = c;
            emblematic_argmin = y;
        }
        if y == x_star {
            continue;
        }
        let best_reply = disutility_gap(DelayPair::new(y, x_star), at_star, params)?;
        if best_reply < nash_slack {
            nash_slack = best_reply;
            nash_slack_at = y;
        }
        if covered {
            let invasion =
                disutility_gap(DelayPair::symmetric(y), DelayPair::new(x_star, y), params)?;
            invasion_slack = invasion_slack.min(invasion);
        }
    }

    Ok(EssReport {
        x_star,
        regime: eq.regime,
        covered,
        grid_size,
        grid_step: tf / (grid_size - 1) as f64,
        nash_slack,
        invasion_slack: covered.then_some(invasion_slack),
        nash_slack_at,
        emblematic_argmin,
    })
}

/// Evidence that `x*` minimises the two one-dimensional functions behind the
/// stability inequalities:
/// `e^{Cx} (x/m - 1)` with `C = I(tf - x*)`, and `(1 - I(tf - x)) (x/m - 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MinimizerReport {
    pub x_star: f64,
    /// Grid minimum of `e^{Cx}(x/m - 1)` sits within one cell of `x*` and is
    /// not below its value at `x*`.
    pub exponential_minimized: bool,
    /// Same for `(1 - I(tf - x))(x/m - 1)`.
    pub susceptible_minimized: bool,
    /// Second differences (step 1e-4) at `x*`.
    pub exponential_curvature: f64,
    pub susceptible_curvature: f64,
    /// `|I(tf - x*) - 1/(m - x*)|`.
    pub critical_residual: f64,
}

impl MinimizerReport {
    pub fn holds(&self) -> bool {
        self.exponential_minimized
            && self.susceptible_minimized
            && self.exponential_curvature > 0.0
            && self.susceptible_curvature > 0.0
    }
}

/// Dense-grid verification that the interior equilibrium minimises both
/// auxiliary objectives.
pub fn minimizer_check(params: &GameParams, grid_size: usize) -> Result<MinimizerReport> {
    check(
        grid_size >= 2,
        "grid_size",
        grid_size as f64,
        "need at least 2 points",
    )?;
    let eq = nash_equilibrium(params);
    if eq.regime != Regime::Interior {
        return Err(Error::NotInterior(eq.regime));
    }
    if params.is_constant_risk() {
        return Err(Error::ConstantRisk);
    }
    let (m, tf) = (params.m(), params.tf());
    let x_star = eq.x_star;
    let c = params.prevalence(tf - x_star).value();

    let exponential = |x: f64| (c * x).exp() * (x / m - 1.0);
    let susceptible = |x: f64| (1.0 - params.prevalence(tf - x).value()) * (x / m - 1.0);

    let step = tf / (grid_size - 1) as f64;
    let minimized = |f: &dyn Fn(f64) -> f64| {
        let (mut best, mut at) = (f64::INFINITY, f64::NAN);
        for y in uniform_grid(tf, grid_size) {
            let v = f(y);
            if v < best {
                best = v;
                at = y;
            }
        }
        let value = f(x_star);
        (at - x_star).abs() <= step && value <= best + 4.0 * f64::EPSILON * value.abs()
    };

    let h = 1e-4;
    let curvature =
        |f: &dyn Fn(f64) -> f64| (f(x_star + h) - 2.0 * f(x_star) + f(x_star - h)) / (h * h);

    Ok(MinimizerReport {
        x_star,
        exponential_minimized: minimized(&exponential),
        susceptible_minimized: minimized(&susceptible),
        exponential_curvature: curvature(&exponential),
        susceptible_curvature: curvature(&susceptible),
        critical_residual: (c - 1.0 / (m - x_star)).abs(),
    })
}
